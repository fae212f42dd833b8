use crate::error::{Error, Result};
use crate::model::PulseMap;

use super::{Grid, Reaction, Stepper};

/// Every step of one period: the pre-pulse state at `nT`, the post-pulse
/// state at `nT⁺` (`steps[0]`), the states `steps[k]` at `nT + k dt`, and the
/// midpoint stage states `mids[k]` of each step.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodOrbit {
    pub t0: f64,
    pub start: Vec<f64>,
    pub steps: Vec<Vec<f64>>,
    pub mids: Vec<Vec<f64>>,
}

impl PeriodOrbit {
    /// State at the end of the period, before the next pulse.
    pub fn end(&self) -> &[f64] {
        self.steps.last().expect("orbit has at least one step")
    }

    pub fn post(&self) -> &[f64] {
        &self.steps[0]
    }

    fn all_states(&self) -> impl Iterator<Item = &Vec<f64>> {
        std::iter::once(&self.start).chain(self.steps.iter())
    }

    /// Sup-norm distance over every recorded state (not the stage states).
    pub fn sup_distance(&self, other: &PeriodOrbit) -> f64 {
        self.all_states()
            .zip(other.all_states())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest `self − other` over every recorded state; `≤ 0` means `self ≤ other`.
    pub fn max_excess_over(&self, other: &PeriodOrbit) -> f64 {
        self.all_states()
            .zip(other.all_states())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.all_states().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.all_states().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup norm at the end of the period.
    pub fn end_sup(&self) -> f64 {
        self.end().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Runs period `period_index` from the pre-pulse state `start`, recording
/// every step. Returns the orbit and the number of clamped undershoots.
pub fn advance_period<P: PulseMap + ?Sized, R: Reaction + ?Sized>(
    stepper: &mut Stepper,
    grid: &Grid,
    period_index: usize,
    start: &[f64],
    pulse: &P,
    reaction: &R,
) -> Result<(PeriodOrbit, usize)> {
    let s = grid.steps_per_period;
    let n = start.len();
    let post: Vec<f64> = start.iter().map(|&u| pulse.apply(u.max(0.0))).collect();
    let mut steps = Vec::with_capacity(s + 1);
    let mut mids = Vec::with_capacity(s);
    steps.push(post);
    let mut clamped = 0;
    for k in 0..s {
        let mut next = vec![0.0; n];
        let mut mid = vec![0.0; n];
        let t0 = grid.time(period_index, k);
        clamped += stepper.step(k, t0, &steps[k], reaction, Some(&mut mid), &mut next);
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::Instability { step: period_index * s + k, time: t0 });
        }
        steps.push(next);
        mids.push(mid);
    }
    Ok((PeriodOrbit { t0: grid.time(period_index, 0), start: start.to_vec(), steps, mids }, clamped))
}
