use crate::model::{EvolutionRate, ModelParams};

use super::tridiag::solve_tridiagonal;
use super::Grid;

/// Stage of a step at which the reaction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Start of step `k` (within the current period).
    Start(usize),
    /// Midpoint of step `k`.
    Mid(usize),
}

/// Pointwise reaction term of the stepper.
pub trait Reaction {
    fn eval(&self, stage: Stage, t: f64, v: &[f64], out: &mut [f64]);
}

/// `(α − ρ̇/ρ) v − γ v²`.
#[derive(Debug, Clone, Copy)]
pub struct Logistic<'a> {
    pub params: &'a ModelParams,
    pub rho: &'a EvolutionRate,
}

impl Reaction for Logistic<'_> {
    fn eval(&self, _stage: Stage, t: f64, v: &[f64], out: &mut [f64]) {
        let growth = self.params.alpha - self.rho.log_derivative(t);
        let gamma = self.params.gamma;
        for (o, &x) in out.iter_mut().zip(v) {
            *o = growth * x - gamma * x * x;
        }
    }
}

/// One IMEX step: Crank–Nicolson diffusion, explicit midpoint reaction.
///
/// ```text
/// v*     = v + dt/2 (D(t0) Δ v + R(t0, v))
/// (I − dt/2 D(t1) Δ) v' = (I + dt/2 D(t0) Δ) v + dt R(t0 + dt/2, v*)
/// ```
#[derive(Debug, Clone)]
pub struct Stepper {
    d: f64,
    rho: EvolutionRate,
    dt: f64,
    inv_dy2: f64,
    lap: Vec<f64>,
    mid: Vec<f64>,
    react: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    pub fn new(params: &ModelParams, rho: &EvolutionRate, grid: &Grid) -> Self {
        let n = grid.ny;
        Self {
            d: params.d,
            rho: *rho,
            dt: grid.dt(),
            inv_dy2: 1.0 / grid.dy().powi(2),
            lap: vec![0.0; n],
            mid: vec![0.0; n],
            react: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn diffusivity(&self, t: f64) -> f64 {
        self.d / self.rho.value(t).powi(2)
    }

    /// Advances `v` at time `t0` (step `k` of its period) into `out`.
    /// Negative undershoots are clamped to zero; the count is returned.
    /// The midpoint stage state is copied to `mid_out` when given.
    pub fn step<R: Reaction + ?Sized>(
        &mut self,
        k: usize,
        t0: f64,
        v: &[f64],
        reaction: &R,
        mid_out: Option<&mut [f64]>,
        out: &mut [f64],
    ) -> usize {
        let n = v.len();
        let dt = self.dt;
        let t_mid = t0 + 0.5 * dt;
        let t1 = t0 + dt;
        let s0 = dt * self.diffusivity(t0) * self.inv_dy2;
        let s1 = dt * self.diffusivity(t1) * self.inv_dy2;

        for j in 0..n {
            let left = if j > 0 { v[j - 1] } else { 0.0 };
            let right = if j + 1 < n { v[j + 1] } else { 0.0 };
            self.lap[j] = left - 2.0 * v[j] + right;
        }
        reaction.eval(Stage::Start(k), t0, v, &mut self.react);
        for j in 0..n {
            self.mid[j] = v[j] + 0.5 * (s0 * self.lap[j] + dt * self.react[j]);
        }
        reaction.eval(Stage::Mid(k), t_mid, &self.mid, &mut self.react);
        for j in 0..n {
            out[j] = v[j] + 0.5 * s0 * self.lap[j] + dt * self.react[j];
        }
        solve_tridiagonal(-0.5 * s1, 1.0 + s1, -0.5 * s1, out, &mut self.scratch);
        if let Some(m) = mid_out {
            m.copy_from_slice(&self.mid);
        }
        let mut clamped = 0;
        for x in out.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
                clamped += 1;
            }
        }
        clamped
    }
}
