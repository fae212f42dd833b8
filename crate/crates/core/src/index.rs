//! Reproduction index of the impulsive problem and the one-dimensional
//! periodic objects built from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{EvolutionRate, ModelParams, PulseMap};
use crate::ode::{rk4, HermiteSamples};
use crate::quadrature;

/// RK4 steps per period for `f(t)` and `W(t)`.
pub const ODE_STEPS: usize = 4096;

/// Absolute tolerance for `∫ρ⁻²`.
pub const QUAD_TOL: f64 = 1e-12;

/// `λ1 = (π/l0)²`, principal Dirichlet eigenvalue of `−d²/dy²` on `(0, l0)`.
pub fn principal_eigenvalue(l0: f64) -> f64 {
    (PI / l0).powi(2)
}

/// `Q = ∫_0^T ρ(t)^{-2} dt`.
pub fn quad_rho_inv_sq(rho: &EvolutionRate) -> Result<f64> {
    let half = 0.5 * rho.period;
    // split at the symmetry point of the exp-cosine family
    let a = quadrature::integrate(|t| rho.value(t).powi(-2), 0.0, half, 0.5 * QUAD_TOL)?;
    let b = quadrature::integrate(|t| rho.value(t).powi(-2), half, rho.period, 0.5 * QUAD_TOL)?;
    Ok(a.value + b.value)
}

/// Everything the threshold analysis needs from the linearization at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexReport {
    pub lambda1: f64,
    /// `∫_0^T ρ⁻²`.
    pub quad_rho: f64,
    pub ln_gprime0: f64,
    /// `None` when the denominator of the closed form is not positive.
    pub r0: Option<f64>,
    pub r_noimpulse: f64,
    pub lambda_star: f64,
    /// Shift `M = |ln g'(0)| / T`.
    pub m_shift: f64,
    pub r0_star: f64,
}

impl IndexReport {
    /// `r0` when defined, otherwise the shifted index `r0_star`.
    pub fn authoritative_index(&self) -> f64 {
        self.r0.unwrap_or(self.r0_star)
    }

    /// `true` when the population persists (index above one).
    pub fn persists(&self) -> bool {
        self.lambda_star > 0.0
    }

    /// `key = value` lines, one per field.
    pub fn to_keyed_text(&self) -> String {
        let r0 = match self.r0 {
            Some(v) => format!("{v:.16e}"),
            None => "undefined".to_string(),
        };
        format!(
            "lambda1 = {:.16e}\nquad_rho = {:.16e}\nln_gprime0 = {:.16e}\nr0 = {}\nr_noimpulse = {:.16e}\nlambda_star = {:.16e}\nm_shift = {:.16e}\nr0_star = {:.16e}\n",
            self.lambda1, self.quad_rho, self.ln_gprime0, r0, self.r_noimpulse, self.lambda_star, self.m_shift, self.r0_star
        )
    }
}

/// Closed-form reproduction index and its companions.
pub fn compute_index<P: PulseMap + ?Sized>(params: &ModelParams, rho: &EvolutionRate, pulse: &P) -> Result<IndexReport> {
    let gp = pulse.derivative_at_zero();
    if !(gp.is_finite() && gp > 0.0) {
        return Err(Error::InvalidParameter { name: "pulse", reason: format!("g'(0) must be > 0, got {gp}") });
    }
    let t = params.period;
    let lambda1 = principal_eigenvalue(params.l0);
    let quad_rho = quad_rho_inv_sq(rho)?;
    let ln_gp = gp.ln();
    let loss = params.d * lambda1 * quad_rho / t;
    let denominator = loss - ln_gp / t;
    let r0 = (denominator > 0.0).then(|| params.alpha / denominator);
    let m_shift = ln_gp.abs() / t;
    Ok(IndexReport {
        lambda1,
        quad_rho,
        ln_gprime0: ln_gp,
        r0,
        r_noimpulse: params.alpha / loss,
        lambda_star: ln_gp / t + params.alpha - loss,
        m_shift,
        r0_star: (params.alpha + m_shift) / (denominator + m_shift),
    })
}

/// `R = αT / (d λ1 ∫ρ⁻²)`, the index without pulses.
pub fn compute_r_noimpulse(params: &ModelParams, rho: &EvolutionRate) -> Result<f64> {
    Ok(params.alpha * params.period / (params.d * principal_eigenvalue(params.l0) * quad_rho_inv_sq(rho)?))
}

/// Time factor `f(t)` of the principal eigenfunction `φ(t, y) = f(t) sin(πy/l0)`,
/// normalized to sup 1 over one period.
#[derive(Debug, Clone)]
pub struct TemporalFactor {
    /// `f(0)` before the pulse.
    pub pre_jump: f64,
    pub jump_ratio: f64,
    pub r0: f64,
    /// Samples on `[0⁺, T]`.
    pub samples: HermiteSamples,
}

impl TemporalFactor {
    /// `f(t)` for `t ∈ (0, T]`.
    pub fn value(&self, t: f64) -> f64 {
        self.samples.value(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.samples.derivative(t)
    }

    /// `f(0⁺)`.
    pub fn post_jump(&self) -> f64 {
        self.samples.values[0]
    }

    /// `f(T)`.
    pub fn end_value(&self) -> f64 {
        *self.samples.values.last().unwrap()
    }
}

fn temporal_rhs<'a>(params: &'a ModelParams, rho: &'a EvolutionRate, lambda1: f64, r0: f64) -> impl Fn(f64, f64) -> f64 + 'a {
    move |t, f| (params.alpha / r0 - rho.log_derivative(t) - params.d * lambda1 / rho.value(t).powi(2)) * f
}

pub fn temporal_factor<P: PulseMap + ?Sized>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &P,
    r0: f64,
) -> Result<TemporalFactor> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidParameter { name: "r0", reason: format!("must be finite and > 0, got {r0}") });
    }
    let gp = pulse.derivative_at_zero();
    let lambda1 = principal_eigenvalue(params.l0);
    let h = params.period / ODE_STEPS as f64;
    let rhs = temporal_rhs(params, rho, lambda1, r0);
    let raw = rk4(&rhs, 0.0, gp, h, ODE_STEPS);
    let peak = raw.iter().copied().fold(1.0f64, f64::max);
    let values: Vec<f64> = raw.iter().map(|v| v / peak).collect();
    let slopes = values.iter().enumerate().map(|(k, &v)| rhs(k as f64 * h, v)).collect();
    Ok(TemporalFactor {
        pre_jump: 1.0 / peak,
        jump_ratio: gp,
        r0,
        samples: HermiteSamples { t0: 0.0, h, values, slopes },
    })
}

/// Positive `T`-periodic solution `W` of `W' = (α − ρ̇/ρ) W − γ W²` with
/// pulse `W(nT⁺) = g'(0) W(nT)`.
#[derive(Debug, Clone)]
pub struct PeriodicOdeSolution {
    /// `W(nT)` from the closed-form anchor.
    pub anchor: f64,
    pub jump_ratio: f64,
    /// RK4 samples on `[0⁺, T]`.
    pub ode: HermiteSamples,
    /// Bernoulli closed form at the same instants.
    pub closed_form: Vec<f64>,
    /// Max relative disagreement between the two routes.
    pub max_rel_disagreement: f64,
    /// Max relative deviation of the closed form with the `1/ρ(t)` factor dropped.
    pub unscaled_form_deviation: f64,
}

impl PeriodicOdeSolution {
    /// `W(t)` for `t ∈ (0, T]`.
    pub fn value(&self, t: f64) -> f64 {
        self.ode.value(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.ode.derivative(t)
    }

    pub fn end_value(&self) -> f64 {
        *self.ode.values.last().unwrap()
    }
}

pub fn periodic_ode_solution<P: PulseMap + ?Sized>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &P,
) -> Result<PeriodicOdeSolution> {
    let gp = pulse.derivative_at_zero();
    let t_end = params.period;
    let growth = (params.alpha * t_end).exp() * gp;
    if !(growth > 1.0) {
        return Err(Error::NoPositivePeriodicSolution { growth });
    }
    let integral = rho.weighted_inverse_integral(params.alpha, 0.0, t_end)?;
    let anchor = (growth - 1.0) / (gp * params.gamma * integral);
    let post = gp * anchor;

    let h = t_end / ODE_STEPS as f64;
    let rhs = |t: f64, w: f64| (params.alpha - rho.log_derivative(t)) * w - params.gamma * w * w;
    let values = rk4(rhs, 0.0, post, h, ODE_STEPS);
    let slopes = values.iter().enumerate().map(|(k, &w)| rhs(k as f64 * h, w)).collect();

    let mut closed_form = Vec::with_capacity(ODE_STEPS + 1);
    let mut unscaled_dev = 0.0f64;
    let mut acc = 0.0;
    closed_form.push(post);
    for k in 1..=ODE_STEPS {
        let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
        acc += rho.weighted_inverse_integral(params.alpha, a, b)?;
        let numer = (params.alpha * b).exp() * post;
        let denom = 1.0 + post * params.gamma * acc;
        let w = numer / (rho.value(b) * denom);
        unscaled_dev = unscaled_dev.max(((numer / denom) - w).abs() / w);
        closed_form.push(w);
    }
    let max_rel_disagreement = values
        .iter()
        .zip(&closed_form)
        .map(|(a, b)| (a - b).abs() / b.abs())
        .fold(0.0, f64::max);
    Ok(PeriodicOdeSolution {
        anchor,
        jump_ratio: gp,
        ode: HermiteSamples { t0: 0.0, h, values, slopes },
        closed_form,
        max_rel_disagreement,
        unscaled_form_deviation: unscaled_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PulseFunction;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigenvalue_closed_form() {
        assert!(close(principal_eigenvalue(PI), 1.0, 1e-15));
        assert!(close(principal_eigenvalue(2.0 * PI), 0.25, 1e-15));
        assert!(close(principal_eigenvalue(1.0), PI * PI, 1e-13));
    }

    #[test]
    fn constant_rate_quadrature() {
        assert!(close(quad_rho_inv_sq(&EvolutionRate::constant(2.0)).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn constant_identity_index() {
        let p = ModelParams::reference();
        let r = compute_index(&p, &EvolutionRate::constant(2.0), &PulseFunction::Identity).unwrap();
        assert!(close(r.r0.unwrap(), 1.1, 1e-13));
        assert!(close(r.r_noimpulse, 1.1, 1e-13));
        assert!(close(compute_r_noimpulse(&p, &EvolutionRate::constant(2.0)).unwrap(), 1.1, 1e-13));
    }

    #[test]
    fn undefined_index_falls_back_to_shifted() {
        // g'(0) = e^3 makes the denominator negative.
        let p = ModelParams::reference();
        let g = PulseFunction::Ricker { r: 3.0, b: 1.0 };
        let r = compute_index(&p, &EvolutionRate::constant(2.0), &g).unwrap();
        assert!(r.r0.is_none());
        assert!(r.r0_star > 1.0);
        assert!(r.lambda_star > 0.0);
        assert_eq!(r.authoritative_index(), r.r0_star);
    }

    #[test]
    fn keyed_text_lists_every_field() {
        let p = ModelParams::reference();
        let r = compute_index(&p, &EvolutionRate::constant(2.0), &PulseFunction::Identity).unwrap();
        let text = r.to_keyed_text();
        for key in ["lambda1", "quad_rho", "ln_gprime0", "r0", "r_noimpulse", "lambda_star", "m_shift", "r0_star"] {
            assert!(text.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key}");
        }
    }

    #[test]
    fn temporal_factor_constant_case() {
        let p = ModelParams::reference();
        let rho = EvolutionRate::constant(2.0);
        let f = temporal_factor(&p, &rho, &PulseFunction::Identity, 1.1).unwrap();
        assert!(f.samples.values.iter().all(|v| close(*v, 1.0, 1e-13)));
    }

    #[test]
    fn temporal_factor_jump_and_period() {
        let p = ModelParams::reference();
        let g = PulseFunction::BevertonHolt { a: 10.0, m: 8.0 };
        for c in [-0.1, 0.1] {
            let rho = EvolutionRate::exp_cosine(c, 2.0);
            let r0 = compute_index(&p, &rho, &g).unwrap().r0.unwrap();
            let f = temporal_factor(&p, &rho, &g, r0).unwrap();
            assert!(close(f.post_jump() / f.pre_jump, 0.8, 1e-14));
            assert!(close(f.end_value() / f.pre_jump, 1.0, 1e-10));
            assert!(f.samples.values.iter().all(|v| *v > 0.0 && *v <= 1.0 + 1e-15));
            // ODE residual at midpoints
            let lambda1 = principal_eigenvalue(p.l0);
            for k in 0..ODE_STEPS {
                let t = (k as f64 + 0.5) * f.samples.h;
                let rhs = (p.alpha / r0 - rho.log_derivative(t) - p.d * lambda1 / rho.value(t).powi(2)) * f.value(t);
                assert!((f.derivative(t) - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn periodic_ode_logistic_capacity() {
        let p = ModelParams::reference();
        let w = periodic_ode_solution(&p, &EvolutionRate::constant(2.0), &PulseFunction::Identity).unwrap();
        assert!(close(w.anchor, 22.0, 1e-11));
        assert!(w.ode.values.iter().all(|v| close(*v, 22.0, 1e-9)));
        assert!(w.unscaled_form_deviation < 1e-14);
    }

    #[test]
    fn periodic_ode_anchor_evolving() {
        let p = ModelParams::reference();
        let rho = EvolutionRate::exp_cosine(0.1, 2.0);
        let g = PulseFunction::BevertonHolt { a: 10.0, m: 8.0 };
        let w = periodic_ode_solution(&p, &rho, &g).unwrap();
        // 50-digit quadrature oracle for the anchor expression
        assert!(close(w.anchor, 23.242_293_138_440_066, 1e-10));
        assert!((w.end_value() - w.anchor).abs() / w.anchor < 1e-8);
        assert!(w.max_rel_disagreement < 1e-6);
        assert!(w.unscaled_form_deviation > 1e-3);
        assert!(w.ode.values.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn periodic_ode_requires_growth() {
        let p = ModelParams { alpha: 0.1, ..ModelParams::reference() };
        let g = PulseFunction::BevertonHolt { a: 10.0, m: 5.0 };
        assert!(matches!(
            periodic_ode_solution(&p, &EvolutionRate::constant(2.0), &g),
            Err(Error::NoPositivePeriodicSolution { .. })
        ));
    }
}
