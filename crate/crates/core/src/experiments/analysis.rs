use std::fmt;

use crate::error::{Error, Result};

/// Per-period sup norm below which a run counts as extinct.
pub const EXTINCTION_THRESHOLD: f64 = 1e-10;
/// Settled runs must stay above this level to count as persistent.
pub const PERSISTENCE_FLOOR: f64 = 1e-6;
/// Relative change over the last periods below which a run counts as settled.
pub const SETTLED_RELATIVE_CHANGE: f64 = 1e-6;
const WINDOW: usize = 5;
const DECAY_RATIO: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    /// Sup norm fell below [`EXTINCTION_THRESHOLD`] at period `period`, or is
    /// still decaying geometrically at the end of the run.
    Extinction { period: Option<usize> },
    /// Sup norm settled at a positive level.
    Persistence,
    Undetermined,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Extinction { .. } => "extinction",
            Classification::Persistence => "persistence",
            Classification::Undetermined => "undetermined",
        }
    }

    pub fn is_extinction(&self) -> bool {
        matches!(self, Classification::Extinction { .. })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classifies a series of per-period sup norms (`sup[n]` at `t = nT`).
///
/// The decay and settling rules look at the last six entries only, so an
/// early transient drop does not count as extinction.
pub fn classify(sup: &[f64]) -> Classification {
    if let Some(n) = sup.iter().position(|s| *s < EXTINCTION_THRESHOLD) {
        return Classification::Extinction { period: Some(n) };
    }
    if sup.len() <= WINDOW {
        return Classification::Undetermined;
    }
    let tail = &sup[sup.len() - WINDOW - 1..];
    let last = tail[WINDOW];
    let settled = tail.iter().all(|s| (s - last).abs() <= SETTLED_RELATIVE_CHANGE * last);
    if settled && last > PERSISTENCE_FLOOR {
        return Classification::Persistence;
    }
    if tail.windows(2).all(|w| w[1] < DECAY_RATIO * w[0]) {
        return Classification::Extinction { period: None };
    }
    Classification::Undetermined
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEstimate {
    /// Slope of `ln sup` against time (negative when decaying).
    pub rate: f64,
    /// `false` when the tail is not a clean exponential.
    pub reliable: bool,
}

/// Least-squares slope of `ln sup[n]` against `t = nT` over the last half
/// of the series.
pub fn estimate_decay_rate(sup: &[f64], period: f64) -> Result<DecayEstimate> {
    if sup.len() < 10 {
        return Err(Error::InvalidParameter { name: "sup", reason: format!("need >= 10 periods, got {}", sup.len()) });
    }
    if !(period > 0.0) {
        return Err(Error::InvalidParameter { name: "period", reason: format!("must be > 0, got {period}") });
    }
    let start = sup.len() / 2;
    let tail = &sup[start..];
    if tail.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Ok(DecayEstimate { rate: f64::NAN, reliable: false });
    }
    let pts: Vec<(f64, f64)> = tail.iter().enumerate().map(|(i, s)| ((start + i) as f64 * period, s.ln())).collect();
    let n = pts.len() as f64;
    let (mt, ml) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let rate = sxy / sxx;

    let steps: Vec<f64> = pts.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let monotone = steps.iter().all(|s| *s < 0.0) || steps.iter().all(|s| *s > 0.0);
    let mean = steps.iter().sum::<f64>() / steps.len() as f64;
    let spread = steps.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    let geometric = mean.abs() > 1e-9 && spread <= 0.05 * mean.abs();
    Ok(DecayEstimate { rate, reliable: monotone && geometric })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let sup: Vec<f64> = (0..40).map(|n| 0.7 * (-0.3 * 2.0 * n as f64).exp()).collect();
        let est = estimate_decay_rate(&sup, 2.0).unwrap();
        assert!((est.rate + 0.3).abs() < 1e-6);
        assert!(est.reliable);
    }

    #[test]
    fn settled_series_is_unreliable() {
        let sup: Vec<f64> = (0..40).map(|n| 5.0 + (-(n as f64)).exp()).collect();
        assert!(!estimate_decay_rate(&sup, 2.0).unwrap().reliable);
        assert_eq!(classify(&sup), Classification::Persistence);
    }

    #[test]
    fn short_series_rejected() {
        assert!(estimate_decay_rate(&[1.0; 9], 2.0).is_err());
    }

    #[test]
    fn classification_cases() {
        let decaying: Vec<f64> = (0..20).map(|n| 0.9f64.powi(n)).collect();
        assert_eq!(classify(&decaying), Classification::Extinction { period: None });
        let extinct: Vec<f64> = (0..300).map(|n| 0.9f64.powi(n)).collect();
        assert!(matches!(classify(&extinct), Classification::Extinction { period: Some(219) }));
        let wobbly = vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0];
        assert_eq!(classify(&wobbly), Classification::Undetermined);
    }
}
