//! Positive periodic solutions: analytic upper/lower solutions, the monotone
//! iteration between them, Picard iteration of the period map, and the
//! envelope bracket for nonmonotone pulses.

use std::f64::consts::PI;

use crate::engine::{advance_period, Grid, Logistic, PeriodOrbit, Reaction, Stage, StateField, Stepper};
use crate::error::{Error, Result};
use crate::index::{self, PeriodicOdeSolution, TemporalFactor};
use crate::model::{self, B2Bound, EnvelopePair, EvolutionRate, ModelParams, PulseFunction, PulseMap};

pub const DEFAULT_MULTIPLIER: f64 = 1.5;
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_PERIODS: usize = 500;
/// Ordering violations above this abort the monotone iteration.
pub const ORDER_TOLERANCE: f64 = 1e-8;
/// Sup norm below which the period map is declared extinct.
pub const EXTINCTION_SUP: f64 = 1e-10;

/// `K* = α/γ + sup |ρ̇|/ρ`.
pub fn shift_constant(params: &ModelParams, rho: &EvolutionRate) -> f64 {
    params.alpha / params.gamma + rho.max_abs_log_derivative()
}

fn uniform_orbit<F: Fn(f64) -> f64>(grid: &Grid, pre: f64, value: F) -> PeriodOrbit {
    let s = grid.steps_per_period;
    let dt = grid.dt();
    let row = |v: f64| vec![v; grid.ny];
    PeriodOrbit {
        t0: 0.0,
        start: row(pre),
        steps: (0..=s).map(|k| row(value(k as f64 * dt))).collect(),
        mids: (0..s).map(|k| row(value((k as f64 + 0.5) * dt))).collect(),
    }
}

/// `M W(t)`, spatially uniform.
#[derive(Debug, Clone)]
pub struct UpperSolution {
    pub multiplier: f64,
    pub w: PeriodicOdeSolution,
    pub orbit: PeriodOrbit,
    /// Min over step midpoints of `ṽ_t − [(α − ρ̇/ρ) ṽ − γ ṽ²]`.
    pub differential_margin: f64,
    /// `ṽ(0⁺) − g(ṽ(0))`.
    pub impulse_margin: f64,
}

pub fn build_upper_solution<P: PulseMap + ?Sized>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &P,
    multiplier: f64,
    grid: &Grid,
) -> Result<UpperSolution> {
    if !(multiplier > 1.0) {
        return Err(Error::InvalidParameter { name: "multiplier", reason: format!("must be > 1, got {multiplier}") });
    }
    let w = index::periodic_ode_solution(params, rho, pulse)?;
    let m = multiplier;
    // W(0⁺) = g'(0) W(0) sits at steps[0]
    let orbit = uniform_orbit(grid, m * w.anchor, |t| if t == 0.0 { m * w.ode.values[0] } else { m * w.value(t) });

    let dt = grid.dt();
    let mut margin = f64::INFINITY;
    for k in 0..grid.steps_per_period {
        let t = (k as f64 + 0.5) * dt;
        let v = m * w.value(t);
        let rhs = (params.alpha - rho.log_derivative(t)) * v - params.gamma * v * v;
        margin = margin.min(m * w.derivative(t) - rhs);
    }
    let top = m * w.anchor;
    let impulse_margin = m * w.ode.values[0] - pulse.apply(top);
    if margin < -ORDER_TOLERANCE || impulse_margin < 0.0 {
        return Err(Error::NotAnUpperSolution { margin: margin.min(impulse_margin) });
    }
    Ok(UpperSolution { multiplier, w, orbit, differential_margin: margin, impulse_margin })
}

/// Constants of the analytic lower solution `ε (κ/g'(0)) e^{δ(t−nT)} φ(t, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSolutionSpec {
    pub epsilon: f64,
    /// `δ = (α/2)(1 − 1/R0)`.
    pub delta: f64,
    /// `κ = e^{−δT} g'(0)`, the jump ratio at the pulse.
    pub kappa: f64,
    /// `δ/γ`.
    pub epsilon1: f64,
    /// `((g'(0) − κ)/D)^{1/(ν−1)}`.
    pub epsilon2: f64,
    pub bound: B2Bound,
    pub r0: f64,
}

impl LowerSolutionSpec {
    /// Largest admissible amplitude (exclusive).
    pub fn epsilon_limit(&self) -> f64 {
        self.epsilon1.min(self.epsilon2).min(self.bound.radius)
    }

    /// Builds the constants; `epsilon = None` picks half the admissible limit.
    pub fn new(params: &ModelParams, rho: &EvolutionRate, pulse: &PulseFunction, epsilon: Option<f64>) -> Result<Self> {
        let report = index::compute_index(params, rho, pulse)?;
        let r0 = report.r0.ok_or(Error::InvalidLowerSpec("reproduction index undefined".into()))?;
        if r0 <= 1.0 {
            return Err(Error::InvalidLowerSpec(format!("requires R0 > 1, got {r0}")));
        }
        let gp = pulse.derivative_at_zero();
        let delta = 0.5 * params.alpha * (1.0 - 1.0 / r0);
        let kappa = (-delta * params.period).exp() * gp;
        let bound = pulse.b2_bound();
        let epsilon2 = if bound.coefficient == 0.0 {
            f64::INFINITY
        } else {
            ((gp - kappa) / bound.coefficient).powf(1.0 / (bound.exponent - 1.0))
        };
        let mut spec = Self { epsilon: 0.0, delta, kappa, epsilon1: delta / params.gamma, epsilon2, bound, r0 };
        let limit = spec.epsilon_limit();
        spec.epsilon = epsilon.unwrap_or(0.5 * limit);
        if !(spec.epsilon > 0.0 && spec.epsilon < limit) {
            return Err(Error::InvalidLowerSpec(format!("epsilon {} outside (0, {limit})", spec.epsilon)));
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone)]
pub struct LowerSolution {
    pub spec: LowerSolutionSpec,
    pub orbit: PeriodOrbit,
    /// Max over samples of `v̂_t − [d/ρ² v̂_yy + (α − ρ̇/ρ) v̂ − γ v̂²]` (must be ≤ 0).
    pub differential_residual: f64,
    /// Min over nodes of `g(v̂(nT)) − v̂(nT⁺)` (must be ≥ 0).
    pub impulse_margin: f64,
}

pub fn build_lower_solution(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &PulseFunction,
    spec: &LowerSolutionSpec,
    factor: &TemporalFactor,
    grid: &Grid,
) -> Result<LowerSolution> {
    if !(spec.epsilon > 0.0 && spec.epsilon < spec.epsilon_limit()) {
        return Err(Error::InvalidLowerSpec(format!("epsilon {} outside (0, {})", spec.epsilon, spec.epsilon_limit())));
    }
    let gp = pulse.derivative_at_zero();
    let lambda1 = index::principal_eigenvalue(params.l0);
    let psi: Vec<f64> = grid.nodes().iter().map(|y| (PI * y / params.l0).sin()).collect();
    let amp = spec.epsilon * spec.kappa / gp;
    let time_part = |t: f64| amp * (spec.delta * t).exp() * factor.value(t);
    let time_slope = |t: f64| amp * (spec.delta * t).exp() * (spec.delta * factor.value(t) + factor.derivative(t));
    let s = grid.steps_per_period;
    let dt = grid.dt();
    let field = |a: f64| psi.iter().map(|p| a * p).collect::<Vec<f64>>();

    let start = field(spec.epsilon * factor.pre_jump);
    let mut steps = Vec::with_capacity(s + 1);
    steps.push(field(amp * factor.post_jump()));
    for k in 1..=s {
        steps.push(field(time_part(k as f64 * dt)));
    }
    let mids = (0..s).map(|k| field(time_part((k as f64 + 0.5) * dt))).collect();

    let mut residual = f64::NEG_INFINITY;
    for k in 0..=2 * s {
        let t = (k as f64 * 0.5 * dt).max(1e-12 * dt);
        let a = time_part(t);
        let da = time_slope(t);
        let diffusion = params.d / rho.value(t).powi(2);
        let growth = params.alpha - rho.log_derivative(t);
        for p in &psi {
            let v = a * p;
            let r = da * p - (-diffusion * lambda1 * v + growth * v - params.gamma * v * v);
            residual = residual.max(r);
        }
    }
    let impulse_margin = start
        .iter()
        .zip(&steps[0])
        .map(|(pre, post)| pulse.value(*pre) - post)
        .fold(f64::INFINITY, f64::min);
    if residual > 1e-12 || impulse_margin < -1e-15 {
        return Err(Error::NotALowerSolution { residual: residual.max(-impulse_margin) });
    }
    Ok(LowerSolution {
        spec: *spec,
        orbit: PeriodOrbit { t0: 0.0, start, steps, mids },
        differential_residual: residual,
        impulse_margin,
    })
}

/// Frozen source `−K* v + K* u + f(u, t)` with `u` the previous iterate.
struct FrozenSource<'a> {
    prev: &'a PeriodOrbit,
    k_star: f64,
    params: &'a ModelParams,
    rho: &'a EvolutionRate,
}

impl Reaction for FrozenSource<'_> {
    fn eval(&self, stage: Stage, t: f64, v: &[f64], out: &mut [f64]) {
        let u = match stage {
            Stage::Start(k) => &self.prev.steps[k],
            Stage::Mid(k) => &self.prev.mids[k],
        };
        let growth = self.params.alpha - self.rho.log_derivative(t);
        for ((o, &x), &w) in out.iter_mut().zip(v).zip(u) {
            *o = -self.k_star * x + self.k_star * w + growth * w - self.params.gamma * w * w;
        }
    }
}

/// Upper and lower monotone sequences after the last iteration.
#[derive(Debug, Clone)]
pub struct BracketPair {
    pub upper: PeriodOrbit,
    pub lower: PeriodOrbit,
    pub iterations: usize,
    pub gap: f64,
    pub gap_history: Vec<f64>,
    /// Largest ordering violation seen (`lower ≤ lower' ≤ upper' ≤ upper`).
    pub max_order_violation: f64,
}

impl BracketPair {
    /// Midpoint of the bracket.
    pub fn midpoint(&self) -> PeriodOrbit {
        let avg = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect::<Vec<f64>>();
        PeriodOrbit {
            t0: 0.0,
            start: avg(&self.upper.start, &self.lower.start),
            steps: self.upper.steps.iter().zip(&self.lower.steps).map(|(a, b)| avg(a, b)).collect(),
            mids: self.upper.mids.iter().zip(&self.lower.mids).map(|(a, b)| avg(a, b)).collect(),
        }
    }
}

/// Monotone iteration between an ordered upper/lower pair of periodic
/// fields: each iterate solves the linear problem with source
/// `K* v⁽ᵐ⁻¹⁾ + f(v⁽ᵐ⁻¹⁾, t)`, starts from `v⁽ᵐ⁻¹⁾(T)` and is pulsed by
/// `g(v⁽ᵐ⁻¹⁾(T))`.
#[allow(clippy::too_many_arguments)]
pub fn monotone_iteration<P: PulseMap + ?Sized>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &P,
    grid: &Grid,
    upper: &PeriodOrbit,
    lower: &PeriodOrbit,
    tol: f64,
    max_iterations: usize,
) -> Result<BracketPair> {
    if !pulse.is_monotone() {
        return Err(Error::InvalidParameter { name: "pulse", reason: "monotone iteration needs a nondecreasing pulse".into() });
    }
    let k_star = shift_constant(params, rho);
    let v_max = upper.max_value();
    if k_star + params.alpha - rho.max_abs_log_derivative() - 2.0 * params.gamma * v_max < 0.0 {
        return Err(Error::ShiftTooSmall { k_star, v_max });
    }
    let initial = lower.max_excess_over(upper);
    if initial > ORDER_TOLERANCE {
        return Err(Error::IterationOrderBroken { iteration: 0, violation: initial });
    }

    let mut stepper = Stepper::new(params, rho, grid);
    let mut up = upper.clone();
    let mut lo = lower.clone();
    let mut gap = up.sup_distance(&lo);
    let mut gap_history = vec![gap];
    let mut max_violation = initial.max(0.0);
    let mut iterations = 0;
    while gap >= tol && iterations < max_iterations {
        iterations += 1;
        let next_up = {
            let src = FrozenSource { prev: &up, k_star, params, rho };
            advance_period(&mut stepper, grid, 0, up.end(), pulse, &src)?.0
        };
        let next_lo = {
            let src = FrozenSource { prev: &lo, k_star, params, rho };
            advance_period(&mut stepper, grid, 0, lo.end(), pulse, &src)?.0
        };
        let violation = next_lo
            .max_excess_over(&next_up)
            .max(lo.max_excess_over(&next_lo))
            .max(next_up.max_excess_over(&up));
        max_violation = max_violation.max(violation);
        if violation > ORDER_TOLERANCE {
            return Err(Error::IterationOrderBroken { iteration: iterations, violation });
        }
        up = next_up;
        lo = next_lo;
        gap = up.sup_distance(&lo);
        gap_history.push(gap);
    }
    Ok(BracketPair { upper: up, lower: lo, iterations, gap, gap_history, max_order_violation: max_violation })
}

/// Converged one-period orbit of the period map.
#[derive(Debug, Clone)]
pub struct PeriodicSolution {
    pub orbit: PeriodOrbit,
    /// `sup |P(v*) − v*|`.
    pub residual: f64,
    pub periods: usize,
    /// Per-period `sup |v((m+1)T) − v(mT)|`.
    pub residual_history: Vec<f64>,
}

impl PeriodicSolution {
    pub fn interior_min(&self) -> f64 {
        self.orbit.min_value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtinctionCertificate {
    pub periods: usize,
    pub final_sup: f64,
    pub lambda_star: f64,
}

#[derive(Debug, Clone)]
pub enum FixedPointOutcome {
    Periodic(PeriodicSolution),
    Extinct(ExtinctionCertificate),
}

impl FixedPointOutcome {
    pub fn periodic(self) -> Option<PeriodicSolution> {
        match self {
            FixedPointOutcome::Periodic(p) => Some(p),
            FixedPointOutcome::Extinct(_) => None,
        }
    }
}

/// Picard iteration of the full-period map (steps plus pulse).
///
/// With `λ* > 0` it stops once `sup |v((m+1)T) − v(mT)| < tol`; otherwise
/// once the sup norm drops below [`EXTINCTION_SUP`].
#[allow(clippy::too_many_arguments)]
pub fn period_map_fixed_point<P: PulseMap + ?Sized>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &P,
    grid: &Grid,
    seed: &[f64],
    tol: f64,
    max_periods: usize,
) -> Result<FixedPointOutcome> {
    if seed.len() != grid.ny {
        return Err(Error::InvalidGrid(format!("seed has {} nodes, grid has {}", seed.len(), grid.ny)));
    }
    if let Some((node, &value)) = seed.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::InvalidInitialCondition { node, value });
    }
    if !seed.iter().any(|v| *v > 0.0) {
        return Err(Error::InvalidInitialCondition { node: 0, value: 0.0 });
    }
    let report = index::compute_index(params, rho, pulse)?;
    let persists = report.persists();
    let reaction = Logistic { params, rho };
    let mut stepper = Stepper::new(params, rho, grid);
    let mut state = seed.to_vec();
    let mut v = vec![0.0; grid.ny];
    let mut next = vec![0.0; grid.ny];
    let mut history = Vec::new();
    for m in 0..max_periods {
        for (x, &u) in v.iter_mut().zip(&state) {
            *x = pulse.apply(u);
        }
        for k in 0..grid.steps_per_period {
            let t0 = grid.time(0, k);
            stepper.step(k, t0, &v, &reaction, None, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Instability { step: (m + 1) * grid.steps_per_period, time: grid.time(m + 1, 0) });
        }
        let residual = v.iter().zip(&state).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        history.push(residual);
        if persists && residual < tol {
            let (orbit, _) = advance_period(&mut stepper, grid, 0, &state, pulse, &reaction)?;
            let residual = orbit.end().iter().zip(&orbit.start).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            return Ok(FixedPointOutcome::Periodic(PeriodicSolution {
                orbit,
                residual,
                periods: m + 1,
                residual_history: history,
            }));
        }
        let sup = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        std::mem::swap(&mut state, &mut v);
        if !persists && sup < EXTINCTION_SUP {
            return Ok(FixedPointOutcome::Extinct(ExtinctionCertificate {
                periods: m + 1,
                final_sup: sup,
                lambda_star: report.lambda_star,
            }));
        }
    }
    Err(Error::NonConvergence { periods: max_periods, residual: history.last().copied().unwrap_or(f64::NAN) })
}

/// Outcome of bracketing a nonmonotone pulse between its envelope systems.
#[derive(Debug, Clone)]
pub struct NonmonotoneBracket {
    pub envelopes: EnvelopePair,
    pub beta_plus: f64,
    /// Minimal positive periodic solution of the `g⁻`-pulsed problem.
    pub lower_attractor: PeriodicSolution,
    /// Whether the initial data had to be clamped to `β⁺`.
    pub clamped_initial: bool,
    pub periods_simulated: usize,
    /// Min over every step of `v − v⁻`.
    pub min_margin_lower: f64,
    /// Min over every step of `v⁺ − v`.
    pub min_margin_upper: f64,
    /// Max over every step of `v⁺`.
    pub max_upper: f64,
    /// Last simulated period of the true system.
    pub final_orbit: PeriodOrbit,
    /// Min over the last period of `v − v̲⁻`.
    pub min_margin_attractor: f64,
}

/// Builds the envelopes, finds the `g⁻` attractor, and runs the true system
/// alongside both envelope systems, tracking `v⁻ ≤ v ≤ v⁺ ≤ β⁺`.
pub fn nonmonotone_bracket(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &PulseFunction,
    grid: &Grid,
    v0: &StateField,
    tol: f64,
    max_periods: usize,
) -> Result<NonmonotoneBracket> {
    let envelopes = model::build_envelopes(pulse, params, rho)?;
    let beta = envelopes.beta_plus;
    let clamped_initial = v0.values.iter().any(|v| *v > beta);
    if clamped_initial {
        log::warn!("initial data exceeds beta+ = {beta}; clamping");
    }
    let start: Vec<f64> = v0.values.iter().map(|v| v.min(beta)).collect();
    let lower_map = envelopes.lower_map();
    let upper_map = envelopes.upper_map();
    let lower_attractor = period_map_fixed_point(params, rho, &lower_map, grid, &start, tol, max_periods)?
        .periodic()
        .ok_or(Error::EnvelopeUndefined { r0: 1.0 })?;

    let reaction = Logistic { params, rho };
    let mut steppers = [
        Stepper::new(params, rho, grid),
        Stepper::new(params, rho, grid),
        Stepper::new(params, rho, grid),
    ];
    let n = grid.ny;
    let mut states = [start.clone(), start.clone(), start];
    let mut next = vec![0.0; n];
    let (mut min_lower, mut min_upper, mut max_upper) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut track = |s: &[Vec<f64>; 3]| {
        for j in 0..n {
            min_lower = min_lower.min(s[0][j] - s[1][j]);
            min_upper = min_upper.min(s[2][j] - s[0][j]);
            max_upper = max_upper.max(s[2][j]);
        }
    };
    let target = lower_attractor.orbit.start.clone();
    let mut periods = 0;
    while periods < max_periods {
        track(&states);
        for (i, state) in states.iter_mut().enumerate() {
            for x in state.iter_mut() {
                *x = match i {
                    0 => pulse.value(*x),
                    1 => lower_map.apply(*x),
                    _ => upper_map.apply(*x),
                };
            }
        }
        track(&states);
        for k in 0..grid.steps_per_period {
            let t0 = grid.time(periods, k);
            for (stepper, state) in steppers.iter_mut().zip(states.iter_mut()) {
                stepper.step(k, t0, state, &reaction, None, &mut next);
                std::mem::swap(state, &mut next);
            }
            track(&states);
        }
        periods += 1;
        let dist = states[1].iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if dist < 0.1 * tol {
            break;
        }
    }
    let (final_orbit, _) = advance_period(&mut steppers[0], grid, periods, &states[0], pulse, &reaction)?;
    let min_margin_attractor = final_orbit
        .steps
        .iter()
        .zip(&lower_attractor.orbit.steps)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y))
        .fold(f64::INFINITY, f64::min);
    Ok(NonmonotoneBracket {
        envelopes,
        beta_plus: beta,
        lower_attractor,
        clamped_initial,
        periods_simulated: periods,
        min_margin_lower: min_lower,
        min_margin_upper: min_upper,
        max_upper,
        final_orbit,
        min_margin_attractor,
    })
}
