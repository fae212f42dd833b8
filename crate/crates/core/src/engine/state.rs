use crate::error::{Error, Result};

use super::Grid;

/// Where a snapshot sits relative to the pulse at `t = nT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    PreImpulse,
    PostImpulse,
    Interior,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::PreImpulse => "pre",
            Phase::PostImpulse => "post",
            Phase::Interior => "interior",
        }
    }

    /// Ordering key among snapshots sharing a time stamp.
    pub(crate) fn rank(&self) -> u8 {
        match self {
            Phase::PreImpulse => 0,
            Phase::PostImpulse => 1,
            Phase::Interior => 2,
        }
    }
}

/// Interior node values of `v(t, ·)`; the Dirichlet boundary values are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub t: f64,
    pub phase: Phase,
    pub values: Vec<f64>,
}

impl StateField {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `v0(y) = Σ amplitude_k sin(k π y / l0)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SineModes(pub Vec<(usize, f64)>);

impl SineModes {
    /// `0.5 sin y + 0.2 sin 3y` on `(0, π)`.
    pub fn reference() -> Self {
        SineModes(vec![(1, 0.5), (3, 0.2)])
    }

    pub fn eval(&self, y: f64, l0: f64) -> f64 {
        self.0
            .iter()
            .map(|&(k, a)| a * (k as f64 * std::f64::consts::PI * y / l0).sin())
            .sum()
    }
}

pub fn initial_condition(modes: &SineModes, grid: &Grid) -> Result<StateField> {
    let values: Vec<f64> = (0..grid.ny).map(|j| modes.eval(grid.node(j), grid.l0)).collect();
    if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::InvalidInitialCondition { node, value });
    }
    Ok(StateField { t: 0.0, phase: Phase::Interior, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    #[test]
    fn reference_midpoint_value() {
        let p = ModelParams::reference();
        let g = Grid::default_for(&p).unwrap();
        let v = initial_condition(&SineModes::reference(), &g).unwrap();
        let mid = (g.ny - 1) / 2;
        assert!((g.node(mid) - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((v.values[mid] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn single_mode_and_empty() {
        let p = ModelParams::reference();
        let g = Grid::default_for(&p).unwrap();
        let v = initial_condition(&SineModes(vec![(1, 1.0)]), &g).unwrap();
        assert!((v.sup_norm() - 1.0).abs() < 1e-14);
        let z = initial_condition(&SineModes::default(), &g).unwrap();
        assert!(z.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn negative_initial_data_rejected() {
        let p = ModelParams::reference();
        let g = Grid::default_for(&p).unwrap();
        assert!(matches!(
            initial_condition(&SineModes(vec![(2, 1.0)]), &g),
            Err(Error::InvalidInitialCondition { .. })
        ));
    }
}
