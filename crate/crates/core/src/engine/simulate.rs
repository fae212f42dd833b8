use crate::error::{Error, Result};
use crate::model::{EvolutionRate, ModelParams, PulseMap};

use super::{Grid, Logistic, Phase, StateField, Stepper};

/// What [`simulate`] records besides the pulse-instant states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSpec {
    /// Interior snapshots per period (0 records only `nT` and `nT⁺`).
    pub snapshots_per_period: usize,
    /// Also record the physical-frame field `u(t, x) = v(t, x/ρ(t))`.
    pub physical_frame: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { snapshots_per_period: 8, physical_frame: false }
    }
}

/// Field on the evolving domain `x ∈ [0, ρ(t) l0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSnapshot {
    pub t: f64,
    pub phase: Phase,
    /// `ρ(t) l0`.
    pub endpoint: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub snapshots: Vec<StateField>,
    /// Sup norm at `t = nT` before the pulse, `n = 0..=N`.
    pub period_sup: Vec<f64>,
    /// Sup norm at `t = nT⁺`, `n = 0..N`.
    pub post_sup: Vec<f64>,
    pub clamp_count: usize,
    pub final_state: StateField,
    pub physical: Option<Vec<PhysicalSnapshot>>,
}

impl Trajectory {
    /// Snapshots are ordered by time, with `nT⁺` after `nT`.
    pub fn is_ordered(&self) -> bool {
        self.snapshots
            .windows(2)
            .all(|w| w[0].t < w[1].t || (w[0].t == w[1].t && w[0].phase.rank() < w[1].phase.rank()))
    }
}

/// Pointwise `v(nT⁺) = g(v(nT))`.
pub fn apply_impulse<P: PulseMap + ?Sized>(state: &StateField, pulse: &P) -> StateField {
    StateField {
        t: state.t,
        phase: Phase::PostImpulse,
        values: state.values.iter().map(|&u| pulse.apply(u.max(0.0))).collect(),
    }
}

/// One logistic step from `t0` to `t1 = t0 + dt`.
pub fn step_interval(
    state: &StateField,
    t0: f64,
    t1: f64,
    params: &ModelParams,
    rho: &EvolutionRate,
    grid: &Grid,
) -> Result<StateField> {
    let dt = grid.dt();
    if ((t1 - t0) - dt).abs() > 1e-12 * dt.max(1.0) {
        return Err(Error::InvalidGrid(format!("step length {} differs from dt {dt}", t1 - t0)));
    }
    let mut stepper = Stepper::new(params, rho, grid);
    let mut out = vec![0.0; state.values.len()];
    let k = ((t0 / dt).round() as usize) % grid.steps_per_period;
    stepper.step(k, t0, &state.values, &Logistic { params, rho }, None, &mut out);
    Ok(StateField { t: t1, phase: Phase::Interior, values: out })
}

pub fn reconstruct_physical(snapshots: &[StateField], rho: &EvolutionRate, grid: &Grid) -> Vec<PhysicalSnapshot> {
    let nodes = grid.nodes();
    snapshots
        .iter()
        .map(|s| {
            let scale = rho.value(s.t);
            PhysicalSnapshot {
                t: s.t,
                phase: s.phase,
                endpoint: scale * grid.l0,
                x: nodes.iter().map(|y| scale * y).collect(),
                u: s.values.clone(),
            }
        })
        .collect()
}

/// Alternates `S` interval steps with one pulse per period, starting with
/// the pulse at `t = 0`.
pub fn simulate<P: PulseMap + ?Sized>(
    params: &ModelParams,
    rho: &EvolutionRate,
    pulse: &P,
    grid: &Grid,
    v0: &StateField,
    n_periods: usize,
    output: &OutputSpec,
) -> Result<Trajectory> {
    if n_periods == 0 {
        return Err(Error::InvalidParameter { name: "n_periods", reason: "must be >= 1".into() });
    }
    if v0.values.len() != grid.ny {
        return Err(Error::InvalidGrid(format!("initial field has {} nodes, grid has {}", v0.values.len(), grid.ny)));
    }
    let s = grid.steps_per_period;
    let stride = s.checked_div(output.snapshots_per_period).map_or(usize::MAX, |k| k.max(1));
    let reaction = Logistic { params, rho };
    let mut stepper = Stepper::new(params, rho, grid);

    let mut snapshots = Vec::new();
    let mut period_sup = Vec::with_capacity(n_periods + 1);
    let mut post_sup = Vec::with_capacity(n_periods);
    let mut clamp_count = 0;
    let mut current = StateField { t: 0.0, phase: Phase::PreImpulse, values: v0.values.clone() };
    let mut next = vec![0.0; grid.ny];

    for n in 0..n_periods {
        period_sup.push(current.sup_norm());
        snapshots.push(current.clone());
        let mut v = apply_impulse(&current, pulse);
        post_sup.push(v.sup_norm());
        snapshots.push(v.clone());
        for k in 0..s {
            let t0 = grid.time(n, k);
            clamp_count += stepper.step(k, t0, &v.values, &reaction, None, &mut next);
            if next.iter().any(|x| !x.is_finite()) {
                return Err(Error::Instability { step: n * s + k, time: t0 });
            }
            std::mem::swap(&mut v.values, &mut next);
            v.t = grid.time(n, k + 1);
            v.phase = Phase::Interior;
            if (k + 1) % stride == 0 && k + 1 < s {
                snapshots.push(v.clone());
            }
        }
        current = StateField { t: grid.time(n + 1, 0), phase: Phase::PreImpulse, values: v.values };
    }
    period_sup.push(current.sup_norm());
    snapshots.push(current.clone());
    let physical = output.physical_frame.then(|| reconstruct_physical(&snapshots, rho, grid));
    Ok(Trajectory { grid: *grid, snapshots, period_sup, post_sup, clamp_count, final_state: current, physical })
}
