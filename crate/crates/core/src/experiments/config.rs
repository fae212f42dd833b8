//! TOML run configuration.
//!
//! ```toml
//! preset = "4.1b"          # optional; other keys override it
//! name = "my-run"          # optional
//!
//! [model]                  # required without a preset
//! d = 1.0                  # diffusion coefficient
//! alpha = 1.1              # growth rate, 1/time
//! gamma = 0.05             # competition, 1/(density·time)
//! l0 = 3.141592653589793   # initial domain length
//! T = 2.0                  # period, time
//!
//! [rho]                    # required without a preset
//! kind = "exp-cosine"      # or "constant"
//! amplitude = 0.1          # c in exp(c(1 − cos 2πt/T))
//!
//! [pulse]                  # absent or empty: identity (no harvesting)
//! kind = "beverton-holt"   # or "ricker" / "identity"
//! a = 10.0                 # beverton-holt: m u / (a + u)
//! m = 8.0
//! # r, b                   # ricker: u e^{r − b u}
//!
//! [grid]
//! ny = 99                  # interior nodes
//! steps_per_period = 4096
//!
//! [run]
//! n_periods = 100
//! snapshots_per_period = 8
//! initial_amplitudes = [0.5, 0.0, 0.2]   # coefficients of sin(k π y / l0), k = 1, 2, ...
//! expect = "persistence"   # or "extinction" / "unspecified"
//! ```

use std::fmt;

use serde::Deserialize;

use crate::engine::{Grid, SineModes, DEFAULT_NY, DEFAULT_STEPS_PER_PERIOD};
use crate::model::{EvolutionRate, ModelParams, PulseFunction};

use super::scenario::{preset, Expectation, Scenario, DEFAULT_PERIODS, DEFAULT_SNAPSHOTS};

/// Parse failure naming the offending key and its 1-based line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: `{}`: {}", self.line, self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    name: Option<String>,
    model: Option<RawModel>,
    rho: Option<RawRho>,
    pulse: Option<RawPulse>,
    grid: Option<RawGrid>,
    run: Option<RawRun>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    d: Option<f64>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    l0: Option<f64>,
    #[serde(rename = "T")]
    period: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRho {
    kind: Option<String>,
    amplitude: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    kind: Option<String>,
    a: Option<f64>,
    m: Option<f64>,
    r: Option<f64>,
    b: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    ny: Option<usize>,
    steps_per_period: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    n_periods: Option<usize>,
    snapshots_per_period: Option<usize>,
    initial_amplitudes: Option<Vec<f64>>,
    expect: Option<String>,
}

/// 1-based line of `key` inside `[section]` (top level when `section` is empty),
/// falling back to the section header, then to line 1.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    header.unwrap_or(1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        ConfigError { key: full, line: locate(self.text, section, key), message: message.into() }
    }

    fn require(&self, section: &str, key: &str, value: Option<f64>, base: Option<f64>) -> Result<f64, ConfigError> {
        value.or(base).ok_or_else(|| self.err(section, key, "missing key"))
    }

    fn positive(&self, section: &str, key: &str, v: f64) -> Result<f64, ConfigError> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(section, key, format!("must be > 0, got {v}")))
        }
    }
}

fn key_from_toml_error(e: &toml::de::Error) -> String {
    // messages look like "unknown field `x`, expected ..." or "invalid type: ..."
    let msg = e.message();
    if let Some(start) = msg.find('`') {
        if let Some(len) = msg[start + 1..].find('`') {
            return msg[start + 1..start + 1 + len].to_string();
        }
    }
    "<document>".to_string()
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        key: key_from_toml_error(&e),
        line: e.span().map(|s| line_of_offset(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    let cx = Ctx { text };

    let base = match &raw.preset {
        Some(name) => Some(preset(name).ok_or_else(|| cx.err("", "preset", format!("unknown preset `{name}`")))?),
        None => None,
    };

    let m = raw.model.unwrap_or_default();
    let bp = base.as_ref().map(|s| s.params);
    let params = ModelParams {
        d: cx.positive("model", "d", cx.require("model", "d", m.d, bp.map(|p| p.d))?)?,
        alpha: cx.positive("model", "alpha", cx.require("model", "alpha", m.alpha, bp.map(|p| p.alpha))?)?,
        gamma: cx.positive("model", "gamma", cx.require("model", "gamma", m.gamma, bp.map(|p| p.gamma))?)?,
        l0: cx.positive("model", "l0", cx.require("model", "l0", m.l0, bp.map(|p| p.l0))?)?,
        period: cx.positive("model", "T", cx.require("model", "T", m.period, bp.map(|p| p.period))?)?,
    };

    let rho = match (raw.rho, base.as_ref()) {
        (None, Some(b)) => EvolutionRate { period: params.period, ..b.rho },
        (None, None) => return Err(cx.err("rho", "kind", "missing section [rho]")),
        (Some(r), b) => {
            let kind = match (r.kind.as_deref(), b) {
                (Some(k), _) => k.to_string(),
                (None, Some(b)) => super::scenario::rate_kind_name(&b.rho).to_string(),
                (None, None) => return Err(cx.err("rho", "kind", "missing key")),
            };
            match kind.as_str() {
                "constant" => {
                    if r.amplitude.is_some() {
                        return Err(cx.err("rho", "amplitude", "not allowed for kind = \"constant\""));
                    }
                    EvolutionRate::constant(params.period)
                }
                "exp-cosine" => {
                    let c = cx.require("rho", "amplitude", r.amplitude, b.map(|s| s.rho.amplitude()))?;
                    if !c.is_finite() {
                        return Err(cx.err("rho", "amplitude", "must be finite"));
                    }
                    EvolutionRate::exp_cosine(c, params.period)
                }
                other => {
                    return Err(cx.err("rho", "kind", format!("unknown kind `{other}` (expected constant, exp-cosine)")))
                }
            }
        }
    };

    let pulse = match raw.pulse {
        None => base.as_ref().map(|b| b.pulse).unwrap_or(PulseFunction::Identity),
        Some(p) if p.kind.is_none() && p.a.is_none() && p.m.is_none() && p.r.is_none() && p.b.is_none() => {
            PulseFunction::Identity
        }
        Some(p) => {
            let base_pulse = base.as_ref().map(|b| b.pulse);
            let kind = match (p.kind.as_deref(), base_pulse) {
                (Some(k), _) => k.to_string(),
                (None, Some(PulseFunction::BevertonHolt { .. })) => "beverton-holt".into(),
                (None, Some(PulseFunction::Ricker { .. })) => "ricker".into(),
                _ => return Err(cx.err("pulse", "kind", "missing key")),
            };
            let forbid = |key: &str, v: Option<f64>| match v {
                Some(_) => Err(cx.err("pulse", key, format!("not allowed for kind = \"{kind}\""))),
                None => Ok(()),
            };
            match kind.as_str() {
                "identity" => {
                    forbid("a", p.a)?;
                    forbid("m", p.m)?;
                    forbid("r", p.r)?;
                    forbid("b", p.b)?;
                    PulseFunction::Identity
                }
                "beverton-holt" => {
                    forbid("r", p.r)?;
                    forbid("b", p.b)?;
                    let (ba, bm) = match base_pulse {
                        Some(PulseFunction::BevertonHolt { a, m }) => (Some(a), Some(m)),
                        _ => (None, None),
                    };
                    let a = cx.positive("pulse", "a", cx.require("pulse", "a", p.a, ba)?)?;
                    let m = cx.positive("pulse", "m", cx.require("pulse", "m", p.m, bm)?)?;
                    if m >= a {
                        log::warn!("beverton-holt with m >= a: g(u)/u < 1 fails near zero");
                    }
                    PulseFunction::BevertonHolt { a, m }
                }
                "ricker" => {
                    forbid("a", p.a)?;
                    forbid("m", p.m)?;
                    let (br, bb) = match base_pulse {
                        Some(PulseFunction::Ricker { r, b }) => (Some(r), Some(b)),
                        _ => (None, None),
                    };
                    let r = cx.positive("pulse", "r", cx.require("pulse", "r", p.r, br)?)?;
                    let b = cx.positive("pulse", "b", cx.require("pulse", "b", p.b, bb)?)?;
                    PulseFunction::Ricker { r, b }
                }
                other => {
                    return Err(cx.err(
                        "pulse",
                        "kind",
                        format!("unknown kind `{other}` (expected identity, beverton-holt, ricker)"),
                    ))
                }
            }
        }
    };

    let g = raw.grid.unwrap_or_default();
    let bg = base.as_ref().map(|b| b.grid);
    let ny = g.ny.or(bg.map(|g| g.ny)).unwrap_or(DEFAULT_NY);
    let steps = g.steps_per_period.or(bg.map(|g| g.steps_per_period)).unwrap_or(DEFAULT_STEPS_PER_PERIOD);
    let grid = Grid::new(&params, ny, steps).map_err(|e| {
        let key = if ny < 15 { "ny" } else { "steps_per_period" };
        cx.err("grid", key, e.to_string())
    })?;

    let r = raw.run.unwrap_or_default();
    let n_periods = r.n_periods.or(base.as_ref().map(|b| b.n_periods)).unwrap_or(DEFAULT_PERIODS);
    if n_periods == 0 {
        return Err(cx.err("run", "n_periods", "must be >= 1"));
    }
    let snapshots_per_period =
        r.snapshots_per_period.or(base.as_ref().map(|b| b.snapshots_per_period)).unwrap_or(DEFAULT_SNAPSHOTS);
    let initial = match r.initial_amplitudes {
        Some(amps) => {
            if amps.is_empty() || amps.iter().any(|a| !a.is_finite()) {
                return Err(cx.err("run", "initial_amplitudes", "must be a nonempty list of finite numbers"));
            }
            SineModes(amps.into_iter().enumerate().filter(|(_, a)| *a != 0.0).map(|(k, a)| (k + 1, a)).collect())
        }
        None => base.as_ref().map(|b| b.initial.clone()).unwrap_or_else(SineModes::reference),
    };
    let expected = match r.expect {
        Some(e) => Expectation::parse(&e)
            .ok_or_else(|| cx.err("run", "expect", format!("unknown value `{e}` (expected extinction, persistence, unspecified)")))?,
        None => base.as_ref().map(|b| b.expected).unwrap_or(Expectation::Unspecified),
    };
    let name = raw.name.or(base.as_ref().map(|b| b.name.clone())).unwrap_or_else(|| "custom".to_string());

    let scenario = Scenario { name, params, rho, pulse, grid, initial, n_periods, snapshots_per_period, expected };
    scenario.initial_state().map_err(|e| cx.err("run", "initial_amplitudes", e.to_string()))?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[model]
d = 1
alpha = 1.1
gamma = 0.05
l0 = 3.141592653589793
T = 2

[rho]
kind = "exp-cosine"
amplitude = -0.1

[pulse]
kind = "beverton-holt"
a = 10
m = 8
"#;

    #[test]
    fn full_config_matches_preset() {
        let s = parse_config(FULL).unwrap();
        let p = preset("4.1a").unwrap();
        assert_eq!(s.params, p.params);
        assert_eq!(s.rho, p.rho);
        assert_eq!(s.pulse, p.pulse);
        assert_eq!(s.grid, p.grid);
    }

    #[test]
    fn preset_by_alias() {
        let s = parse_config("preset = \"example-4.1-rho2\"\n").unwrap();
        assert_eq!(s.rho.amplitude(), 0.1);
        assert_eq!(s.pulse, PulseFunction::BevertonHolt { a: 10.0, m: 8.0 });
    }

    #[test]
    fn empty_pulse_section_is_identity() {
        let s = parse_config("preset = \"4.1b\"\n[pulse]\n").unwrap();
        assert_eq!(s.pulse, PulseFunction::Identity);
        let no_section = FULL.split("[pulse]").next().unwrap();
        assert_eq!(parse_config(no_section).unwrap().pulse, PulseFunction::Identity);
    }

    #[test]
    fn negative_gamma_names_key_and_line() {
        let text = FULL.replace("gamma = 0.05", "gamma = -1");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.key, "model.gamma");
        assert_eq!(e.line, 5);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = FULL.replace("alpha = 1.1", "alpha = 1.1\nbeta = 2");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.key, "beta");
        assert_eq!(e.line, 5);
    }

    #[test]
    fn missing_key_reported() {
        let text = FULL.replace("d = 1\n", "");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.key, "model.d");
        assert_eq!(e.message, "missing key");
    }

    #[test]
    fn type_mismatch_reported() {
        let text = FULL.replace("m = 8", "m = \"eight\"");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.line, 16);
    }

    #[test]
    fn overrides_on_preset() {
        let s = parse_config("preset = \"4.1a\"\n[pulse]\nm = 6\n[run]\nn_periods = 3\ninitial_amplitudes = [0.1]\n").unwrap();
        assert_eq!(s.pulse, PulseFunction::BevertonHolt { a: 10.0, m: 6.0 });
        assert_eq!(s.n_periods, 3);
        assert_eq!(s.initial, SineModes(vec![(1, 0.1)]));
    }

    #[test]
    fn negative_initial_data_rejected() {
        let e = parse_config("preset = \"4.1a\"\n[run]\ninitial_amplitudes = [-0.1]\n").unwrap_err();
        assert_eq!(e.key, "run.initial_amplitudes");
        assert_eq!(e.line, 3);
    }
}
