//! Model parameters, domain evolution rates, pulse (harvesting) maps and
//! their monotone envelopes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::index;
use crate::quadrature;

/// Coefficients of the fixed-domain problem
/// `v_t = d/ρ² v_yy + (α − ρ̇/ρ) v − γ v²` on `(0, l0)` with period `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Diffusion coefficient.
    pub d: f64,
    /// Intrinsic growth rate.
    pub alpha: f64,
    /// Competition coefficient.
    pub gamma: f64,
    /// Initial domain length.
    pub l0: f64,
    /// Pulse / evolution period `T`.
    pub period: f64,
}

impl ModelParams {
    pub fn new(d: f64, alpha: f64, gamma: f64, l0: f64, period: f64) -> Result<Self> {
        let p = Self { d, alpha, gamma, l0, period };
        p.validate()?;
        Ok(p)
    }

    /// `d = 1, α = 1.1, γ = 0.05, l0 = π, T = 2`.
    pub fn reference() -> Self {
        Self { d: 1.0, alpha: 1.1, gamma: 0.05, l0: PI, period: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d", self.d),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("l0", self.l0),
            ("T", self.period),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { name, reason: format!("must be > 0, got {v}") });
            }
        }
        Ok(())
    }

    /// Same parameters with the competition switched off (linearized system).
    pub fn linearized(&self) -> Self {
        Self { gamma: 0.0, ..*self }
    }
}

/// Shape of the evolution rate `ρ(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateKind {
    /// `ρ ≡ 1` (fixed domain).
    Constant,
    /// `ρ(t) = exp(c (1 − cos(2πt/T)))`.
    ExpCosine { amplitude: f64 },
}

/// A `T`-periodic evolution rate with `ρ(0) = 1`; the physical domain is `(0, ρ(t) l0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRate {
    pub kind: RateKind,
    pub period: f64,
}

impl EvolutionRate {
    pub fn constant(period: f64) -> Self {
        Self { kind: RateKind::Constant, period }
    }

    pub fn exp_cosine(amplitude: f64, period: f64) -> Self {
        Self { kind: RateKind::ExpCosine { amplitude }, period }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho.period",
                reason: format!("must be > 0, got {}", self.period),
            });
        }
        if let RateKind::ExpCosine { amplitude } = self.kind {
            if !amplitude.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "rho.amplitude",
                    reason: "must be finite".into(),
                });
            }
        }
        Ok(())
    }

    pub fn amplitude(&self) -> f64 {
        match self.kind {
            RateKind::Constant => 0.0,
            RateKind::ExpCosine { amplitude } => amplitude,
        }
    }

    fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `ρ(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            RateKind::Constant => 1.0,
            RateKind::ExpCosine { amplitude } => (amplitude * (1.0 - (self.omega() * t).cos())).exp(),
        }
    }

    /// `ρ̇(t)/ρ(t)`, analytic.
    pub fn log_derivative(&self, t: f64) -> f64 {
        match self.kind {
            RateKind::Constant => 0.0,
            RateKind::ExpCosine { amplitude } => amplitude * self.omega() * (self.omega() * t).sin(),
        }
    }

    /// `sup_t |ρ̇/ρ|`.
    pub fn max_abs_log_derivative(&self) -> f64 {
        self.amplitude().abs() * self.omega()
    }

    /// `sup_t ρ(t)^{-2}`.
    pub fn max_inv_sq(&self) -> f64 {
        match self.kind {
            RateKind::Constant => 1.0,
            // ρ ranges over [e^{min(0,2c)}, e^{max(0,2c)}]
            RateKind::ExpCosine { amplitude } => (-4.0 * amplitude.min(0.0)).exp(),
        }
    }

    /// `∫_a^b e^{ατ}/ρ(τ) dτ`.
    pub fn weighted_inverse_integral(&self, alpha: f64, a: f64, b: f64) -> Result<f64> {
        let scale = (alpha.abs() * a.abs().max(b.abs())).exp().max(1.0);
        Ok(quadrature::integrate(|s| (alpha * s).exp() / self.value(s), a, b, 1e-13 * scale)?.value)
    }
}

/// A density map applied pointwise at each pulse instant.
pub trait PulseMap: Sync {
    /// `g(u)` for `u ≥ 0`.
    fn apply(&self, u: f64) -> f64;
    /// `g'(0)`.
    fn derivative_at_zero(&self) -> f64;
    /// Whether `g` is nondecreasing on `[0, ∞)`.
    fn is_monotone(&self) -> bool;
}

/// Harvesting pulse families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseFunction {
    Identity,
    /// `g(u) = m u / (a + u)`.
    BevertonHolt { a: f64, m: f64 },
    /// `g(u) = u e^{r − b u}`.
    Ricker { r: f64, b: f64 },
}

/// Constants of the bound `g(u) ≥ g'(0) u − D u^ν` valid on `[0, radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B2Bound {
    pub coefficient: f64,
    pub exponent: f64,
    pub radius: f64,
}

impl PulseFunction {
    pub fn beverton_holt(a: f64, m: f64) -> Result<Self> {
        let g = PulseFunction::BevertonHolt { a, m };
        g.validate()?;
        Ok(g)
    }

    pub fn ricker(r: f64, b: f64) -> Result<Self> {
        let g = PulseFunction::Ricker { r, b };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be > 0, got {v}") })
            }
        };
        match *self {
            PulseFunction::Identity => Ok(()),
            PulseFunction::BevertonHolt { a, m } => {
                check("pulse.a", a)?;
                check("pulse.m", m)?;
                if m >= a {
                    log::warn!("beverton-holt with m >= a: g(u)/u >= 1 near 0, harvesting assumption violated");
                }
                Ok(())
            }
            PulseFunction::Ricker { r, b } => {
                check("pulse.r", r)?;
                check("pulse.b", b)
            }
        }
    }

    /// `g(u)`; negative densities are a domain error.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if u < 0.0 || u.is_nan() {
            return Err(Error::NegativeDensity(u));
        }
        Ok(self.value(u))
    }

    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            PulseFunction::Identity => u,
            PulseFunction::BevertonHolt { a, m } => m * u / (a + u),
            PulseFunction::Ricker { r, b } => u * (r - b * u).exp(),
        }
    }

    pub fn derivative_at_zero(&self) -> f64 {
        match *self {
            PulseFunction::Identity => 1.0,
            PulseFunction::BevertonHolt { a, m } => m / a,
            PulseFunction::Ricker { r, .. } => r.exp(),
        }
    }

    /// Largest `σ0` such that `g` is nondecreasing on `[0, σ0]`.
    pub fn monotone_threshold(&self) -> f64 {
        match *self {
            PulseFunction::Identity | PulseFunction::BevertonHolt { .. } => f64::INFINITY,
            PulseFunction::Ricker { b, .. } => 1.0 / b,
        }
    }

    pub fn b2_bound(&self) -> B2Bound {
        match *self {
            PulseFunction::Identity => B2Bound { coefficient: 0.0, exponent: 2.0, radius: f64::INFINITY },
            PulseFunction::BevertonHolt { a, m } => B2Bound { coefficient: m / (a * a), exponent: 2.0, radius: a },
            // e^{-bu} >= 1 - bu; validated on [0, 0.5/b]
            PulseFunction::Ricker { r, b } => B2Bound { coefficient: b * r.exp(), exponent: 2.0, radius: 0.5 / b },
        }
    }
}

impl PulseMap for PulseFunction {
    fn apply(&self, u: f64) -> f64 {
        self.value(u)
    }

    fn derivative_at_zero(&self) -> f64 {
        PulseFunction::derivative_at_zero(self)
    }

    fn is_monotone(&self) -> bool {
        self.monotone_threshold().is_infinite()
    }
}

/// Number of grid points used to materialize the envelopes.
pub const ENVELOPE_POINTS: usize = 4096;

/// Nondecreasing envelopes `g⁻ ≤ g ≤ g⁺` of a (possibly nonmonotone) pulse.
///
/// Both are exact on `[0, σ0]`; beyond it they come from running extrema over
/// a uniform density grid with linear interpolation.
#[derive(Debug, Clone)]
pub struct EnvelopePair {
    pub pulse: PulseFunction,
    pub sigma0: f64,
    /// Upper density bound: max over one period of the minimal positive
    /// periodic solution of the `g⁺`-pulsed kinetic equation.
    pub beta_plus: f64,
    /// Min over one period of that same periodic solution.
    pub orbit_min: f64,
    pub u_max: f64,
    upper_start: f64,
    upper_step: f64,
    upper_grid: Vec<f64>,
    lower_start: f64,
    lower_step: f64,
    lower_grid: Vec<f64>,
    lower_tail_min: f64,
}

fn interpolate(grid: &[f64], start: f64, step: f64, u: f64) -> f64 {
    let s = (u - start) / step;
    if s <= 0.0 {
        return grid[0];
    }
    let i = s.floor() as usize;
    if i + 1 >= grid.len() {
        return grid[grid.len() - 1];
    }
    let w = s - i as f64;
    (grid[i] + w * (grid[i + 1] - grid[i])).min(grid[i + 1])
}

impl EnvelopePair {
    /// `g⁺(u) = max_{0≤w≤u} g(w)`.
    pub fn upper(&self, u: f64) -> f64 {
        let g = self.pulse.value(u);
        if u <= self.sigma0 {
            return g;
        }
        if u > self.u_max {
            return g.max(self.upper_grid[self.upper_grid.len() - 1]);
        }
        g.max(interpolate(&self.upper_grid, self.upper_start, self.upper_step, u))
    }

    /// `g⁻(u) = min_{u≤w≤β⁺} g(w)` on `[0, β⁺]`, constant beyond.
    pub fn lower(&self, u: f64) -> f64 {
        let u = u.min(self.beta_plus);
        let g = self.pulse.value(u);
        if u <= self.sigma0 {
            return g.min(self.lower_tail_min);
        }
        g.min(interpolate(&self.lower_grid, self.lower_start, self.lower_step, u))
    }

    pub fn upper_map(&self) -> EnvelopeSide<'_> {
        EnvelopeSide { pair: self, upper: true }
    }

    pub fn lower_map(&self) -> EnvelopeSide<'_> {
        EnvelopeSide { pair: self, upper: false }
    }

    fn from_parts(pulse: PulseFunction, beta_plus: f64, orbit_min: f64, u_max: f64) -> Self {
        let sigma0 = pulse.monotone_threshold();
        let n = ENVELOPE_POINTS;
        // running max over [σ0, u_max]
        let upper_start = if sigma0.is_finite() { sigma0.min(u_max) } else { u_max };
        let upper_step = ((u_max - upper_start) / (n - 1) as f64).max(f64::MIN_POSITIVE);
        let mut upper_grid = Vec::with_capacity(n);
        let mut running = pulse.value(upper_start);
        for i in 0..n {
            running = running.max(pulse.value(upper_start + i as f64 * upper_step));
            upper_grid.push(running);
        }
        // suffix min over [σ0, β⁺]
        let lower_start = if sigma0.is_finite() { sigma0.min(beta_plus) } else { beta_plus };
        let lower_step = ((beta_plus - lower_start) / (n - 1) as f64).max(f64::MIN_POSITIVE);
        let mut lower_grid = vec![0.0; n];
        let mut running = pulse.value(beta_plus);
        for i in (0..n).rev() {
            let u = if i == n - 1 { beta_plus } else { lower_start + i as f64 * lower_step };
            running = running.min(pulse.value(u));
            lower_grid[i] = running;
        }
        let lower_tail_min = lower_grid[0];
        Self {
            pulse,
            sigma0,
            beta_plus,
            orbit_min,
            u_max,
            upper_start,
            upper_step,
            upper_grid,
            lower_start,
            lower_step,
            lower_grid,
            lower_tail_min,
        }
    }
}

/// One side of an [`EnvelopePair`] used as a pulse map.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeSide<'a> {
    pair: &'a EnvelopePair,
    upper: bool,
}

impl PulseMap for EnvelopeSide<'_> {
    fn apply(&self, u: f64) -> f64 {
        if self.upper {
            self.pair.upper(u)
        } else {
            self.pair.lower(u)
        }
    }

    fn derivative_at_zero(&self) -> f64 {
        self.pair.pulse.derivative_at_zero()
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// Minimal positive periodic solution of the spatially homogeneous kinetic
/// equation `w' = (α − ρ̇/ρ) w − γ w²` pulsed by `pulse`.
///
/// Returns `(w(0), flow)` where `flow(w0⁺, t)` is the closed-form solution at `t`.
fn minimal_kinetic_fixed_point<F: Fn(f64) -> f64>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: F,
) -> Result<f64> {
    let t_end = params.period;
    let integral = rho.weighted_inverse_integral(params.alpha, 0.0, t_end)?;
    let growth = (params.alpha * t_end).exp();
    let rho_end = rho.value(t_end);
    let flow = |w: f64| growth * w / (rho_end * (1.0 + w * params.gamma * integral));
    let excess = |u: f64| flow(pulse(u)) - u;

    let upper_bound = growth / (rho_end * params.gamma * integral) + 1.0;
    let n = 4000;
    let (lo_exp, hi_exp) = (-10.0f64, upper_bound.log10() + 1.0);
    let mut prev_u = 10f64.powf(lo_exp);
    if excess(prev_u) <= 0.0 {
        return Err(Error::NoPositivePeriodicSolution { growth: growth * pulse(prev_u) / prev_u });
    }
    for i in 1..=n {
        let u = 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / n as f64);
        if excess(u) <= 0.0 {
            let (mut a, mut b) = (prev_u, u);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if excess(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= 1e-15 * b {
                    break;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev_u = u;
    }
    Err(Error::NoPositivePeriodicSolution { growth })
}

/// Samples of the kinetic periodic orbit started at `w0` (pre-pulse) over one period.
fn kinetic_orbit_extrema<F: Fn(f64) -> f64>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: F,
    w0: f64,
) -> Result<(f64, f64)> {
    let post = pulse(w0);
    let samples = 2048;
    let h = params.period / samples as f64;
    let (mut lo, mut hi) = (w0.min(post), w0.max(post));
    let mut acc = 0.0;
    for k in 1..=samples {
        let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
        acc += rho.weighted_inverse_integral(params.alpha, a, b)?;
        let w = (params.alpha * b).exp() * post / (rho.value(b) * (1.0 + post * params.gamma * acc));
        lo = lo.min(w);
        hi = hi.max(w);
    }
    Ok((lo, hi))
}

/// Builds `g⁺`, `β⁺` and `g⁻` for `pulse`.
pub fn build_envelopes(pulse: &PulseFunction, params: &ModelParams, rho: &EvolutionRate) -> Result<EnvelopePair> {
    let report = index::compute_index(params, rho, pulse)?;
    let r0 = report.authoritative_index();
    if r0 <= 1.0 {
        return Err(Error::EnvelopeUndefined { r0 });
    }
    let mut u_max = 10.0 * params.alpha / params.gamma;
    // β⁺ only depends on g⁺, which is built first on a provisional range.
    let provisional = EnvelopePair::from_parts(*pulse, u_max, u_max, u_max);
    let w0 = minimal_kinetic_fixed_point(params, rho, |u| provisional.upper(u))?;
    let (orbit_min, beta_plus) = kinetic_orbit_extrema(params, rho, |u| provisional.upper(u), w0)?;
    u_max = u_max.max(beta_plus);
    Ok(EnvelopePair::from_parts(*pulse, beta_plus, orbit_min, u_max))
}
