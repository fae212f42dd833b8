use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::engine::{reconstruct_physical, simulate, OutputSpec, PeriodOrbit, Phase, PhysicalSnapshot, StateField};
use crate::index::{compute_index, IndexReport};
use crate::periodic::{period_map_fixed_point, FixedPointOutcome, DEFAULT_FIXED_POINT_TOL, DEFAULT_MAX_PERIODS};

use super::analysis::{classify, estimate_decay_rate, Classification, DecayEstimate};
use super::artifacts::{self, fmt_f64, Table};
use super::scenario::{Expectation, Scenario};
use super::ExperimentError;

/// Environment variable holding the sweep worker count.
pub const WORKERS_ENV: &str = "IMPLOG_WORKERS";

/// `IMPLOG_WORKERS` when set to a positive integer, else the machine parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Summary of a converged periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSummary {
    pub min: f64,
    pub max: f64,
    pub residual: f64,
    pub periods: usize,
}

impl OrbitSummary {
    fn of(orbit: &PeriodOrbit, residual: f64, periods: usize) -> Self {
        Self { min: orbit.min_value(), max: orbit.max_value(), residual, periods }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub name: String,
    pub index: IndexReport,
    pub expected: Expectation,
    pub classification: Classification,
    /// Sup norm at `t = nT` before each pulse.
    pub period_sup: Vec<f64>,
    pub clamp_count: usize,
    pub decay: Option<DecayEstimate>,
    pub orbit: Option<OrbitSummary>,
    pub artifacts: Vec<PathBuf>,
    /// Failures of inner stages; the remaining fields hold what was computed.
    pub errors: Vec<String>,
}

impl RunRecord {
    /// Classification agrees with the sign of `R0 − 1` whenever `|R0 − 1| > margin`.
    pub fn consistent(&self, margin: f64) -> bool {
        let r0 = self.index.authoritative_index();
        if (r0 - 1.0).abs() <= margin {
            return true;
        }
        match self.classification {
            Classification::Extinction { .. } => r0 < 1.0,
            Classification::Persistence => r0 > 1.0,
            Classification::Undetermined => false,
        }
    }

    pub fn to_keyed_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "expected = {}", self.expected);
        let _ = writeln!(s, "classification = {}", self.classification);
        if let Classification::Extinction { period: Some(n) } = self.classification {
            let _ = writeln!(s, "extinction_period = {n}");
        }
        let _ = writeln!(s, "periods = {}", self.period_sup.len().saturating_sub(1));
        if let Some(last) = self.period_sup.last() {
            let _ = writeln!(s, "final_sup = {}", fmt_f64(*last));
        }
        let _ = writeln!(s, "clamp_count = {}", self.clamp_count);
        if let Some(d) = self.decay {
            let _ = writeln!(s, "decay_rate = {}\ndecay_rate_reliable = {}", fmt_f64(d.rate), d.reliable);
        }
        if let Some(o) = self.orbit {
            let _ = writeln!(
                s,
                "orbit_min = {}\norbit_max = {}\norbit_residual = {}\norbit_periods = {}",
                fmt_f64(o.min),
                fmt_f64(o.max),
                fmt_f64(o.residual),
                o.periods
            );
        }
        for e in &self.errors {
            let _ = writeln!(s, "error = {e}");
        }
        s.push_str(&self.index.to_keyed_text());
        s
    }
}

fn field_artifacts(
    out: &Path,
    snapshots: &[PhysicalSnapshot],
    nodes: &[f64],
    title: &str,
    written: &mut Vec<PathBuf>,
) -> Result<(), ExperimentError> {
    let path = out.join("field.csv");
    artifacts::write_table(&path, &artifacts::field_table(snapshots, nodes))?;
    written.push(path);
    let path = out.join("domain.csv");
    artifacts::write_table(&path, &artifacts::domain_table(snapshots))?;
    written.push(path);
    let path = out.join("field.dat");
    artifacts::write_text(&path, &artifacts::gnuplot_data(snapshots))?;
    written.push(path);
    let path = out.join("surface.svg");
    artifacts::write_text(&path, &artifacts::svg_heatmap(snapshots, title))?;
    written.push(path);
    Ok(())
}

/// Index, simulation, classification and (when the population persists)
/// the periodic orbit. Artifacts go to `out` when given.
pub fn run_scenario(s: &Scenario, out: Option<&Path>) -> Result<RunRecord, ExperimentError> {
    s.validate()?;
    let index = compute_index(&s.params, &s.rho, &s.pulse)?;
    let mut record = RunRecord {
        name: s.name.clone(),
        index,
        expected: s.expected,
        classification: Classification::Undetermined,
        period_sup: Vec::new(),
        clamp_count: 0,
        decay: None,
        orbit: None,
        artifacts: Vec::new(),
        errors: Vec::new(),
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let v0 = s.initial_state()?;
    let spec = OutputSpec { snapshots_per_period: s.snapshots_per_period, physical_frame: true };
    let mut final_state: Option<StateField> = None;
    match simulate(&s.params, &s.rho, &s.pulse, &s.grid, &v0, s.n_periods, &spec) {
        Ok(traj) => {
            record.classification = classify(&traj.period_sup);
            record.clamp_count = traj.clamp_count;
            if record.classification.is_extinction() && traj.period_sup.len() >= 10 {
                record.decay = estimate_decay_rate(&traj.period_sup, s.params.period).ok();
            }
            if let Some(dir) = out {
                let physical = traj.physical.as_deref().unwrap_or_default();
                field_artifacts(dir, physical, &s.grid.nodes(), &s.name, &mut record.artifacts)?;
                let path = dir.join("periods.csv");
                artifacts::write_table(&path, &artifacts::period_table(&traj.period_sup, &traj.post_sup, s.params.period))?;
                record.artifacts.push(path);
            }
            record.period_sup = traj.period_sup;
            final_state = Some(traj.final_state);
        }
        Err(e) => record.errors.push(format!("simulate: {e}")),
    }

    let wants_orbit = index.persists() || record.classification == Classification::Persistence;
    if wants_orbit {
        let seed = match &final_state {
            Some(f) if f.values.iter().any(|v| *v > 0.0) => f.values.clone(),
            _ => v0.values.clone(),
        };
        match period_map_fixed_point(
            &s.params,
            &s.rho,
            &s.pulse,
            &s.grid,
            &seed,
            DEFAULT_FIXED_POINT_TOL,
            DEFAULT_MAX_PERIODS,
        ) {
            Ok(FixedPointOutcome::Periodic(p)) => {
                record.orbit = Some(OrbitSummary::of(&p.orbit, p.residual, p.periods));
                if let Some(dir) = out {
                    let path = dir.join("orbit.csv");
                    artifacts::write_table(&path, &orbit_table(&p.orbit, s))?;
                    record.artifacts.push(path);
                }
            }
            Ok(FixedPointOutcome::Extinct(c)) => {
                record.errors.push(format!("period map: extinct after {} periods", c.periods))
            }
            Err(e) => record.errors.push(format!("period map: {e}")),
        }
    }

    if let Some(dir) = out {
        let path = dir.join("summary.txt");
        record.artifacts.push(path.clone());
        artifacts::write_text(&path, &record.to_keyed_text())?;
    }
    Ok(record)
}

/// One period of an orbit sampled at the scenario's snapshot stride, long format.
pub fn orbit_table(orbit: &PeriodOrbit, s: &Scenario) -> Table {
    let steps = s.grid.steps_per_period;
    let stride = steps.checked_div(s.snapshots_per_period).map_or(steps, |k| k.max(1));
    let mut fields = vec![StateField {
        t: 0.0,
        phase: Phase::PreImpulse,
        values: orbit.start.clone(),
    }];
    for k in (0..steps).step_by(stride).chain(std::iter::once(steps)) {
        let phase = if k == 0 { Phase::PostImpulse } else { Phase::Interior };
        fields.push(StateField { t: s.grid.time(0, k), phase, values: orbit.steps[k].clone() });
    }
    artifacts::field_table(&reconstruct_physical(&fields, &s.rho, &s.grid), &s.grid.nodes())
}

/// Result of [`run_periodic`].
#[derive(Debug, Clone)]
pub struct PeriodicRecord {
    pub name: String,
    pub index: IndexReport,
    pub outcome: FixedPointOutcome,
    pub artifacts: Vec<PathBuf>,
}

impl PeriodicRecord {
    pub fn to_keyed_text(&self) -> String {
        let mut s = format!("name = {}\n", self.name);
        match &self.outcome {
            FixedPointOutcome::Periodic(p) => {
                let _ = write!(
                    s,
                    "outcome = periodic\nperiods = {}\nresidual = {}\norbit_min = {}\norbit_max = {}\n",
                    p.periods,
                    fmt_f64(p.residual),
                    fmt_f64(p.orbit.min_value()),
                    fmt_f64(p.orbit.max_value())
                );
            }
            FixedPointOutcome::Extinct(c) => {
                let _ = write!(
                    s,
                    "outcome = extinct\nperiods = {}\nfinal_sup = {}\n",
                    c.periods,
                    fmt_f64(c.final_sup)
                );
            }
        }
        s.push_str(&self.index.to_keyed_text());
        s
    }
}

/// Period-map iteration from the scenario's initial data.
pub fn run_periodic(s: &Scenario, out: Option<&Path>) -> Result<PeriodicRecord, ExperimentError> {
    s.validate()?;
    let index = compute_index(&s.params, &s.rho, &s.pulse)?;
    let v0 = s.initial_state()?;
    let outcome = period_map_fixed_point(
        &s.params,
        &s.rho,
        &s.pulse,
        &s.grid,
        &v0.values,
        DEFAULT_FIXED_POINT_TOL,
        DEFAULT_MAX_PERIODS,
    )?;
    let mut record = PeriodicRecord { name: s.name.clone(), index, outcome, artifacts: Vec::new() };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        if let FixedPointOutcome::Periodic(p) = &record.outcome {
            let path = dir.join("orbit.csv");
            artifacts::write_table(&path, &orbit_table(&p.orbit, s))?;
            record.artifacts.push(path);
            let path = dir.join("residuals.csv");
            let rows = p
                .residual_history
                .iter()
                .enumerate()
                .map(|(m, r)| vec![(m + 1).to_string(), fmt_f64(*r)])
                .collect();
            artifacts::write_table(&path, &Table { headers: vec!["period".into(), "residual".into()], rows })?;
            record.artifacts.push(path);
        }
        let path = dir.join("summary.txt");
        record.artifacts.push(path.clone());
        artifacts::write_text(&path, &record.to_keyed_text())?;
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Closed-form index, `None` where undefined.
    pub r0: Option<f64>,
    pub r0_star: f64,
    pub lambda_star: f64,
    pub classification: Option<Classification>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: String,
    pub rows: Vec<SweepRow>,
    /// Parameter values where `R0 = 1`, located to `1e-6`.
    pub crossings: Vec<f64>,
}

impl SweepTable {
    pub fn to_table(&self) -> Table {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.value),
                    r.r0.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(r.r0_star),
                    fmt_f64(r.lambda_star),
                    r.classification.map(|c| c.label().to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        Table {
            headers: ["value", "r0", "r0_star", "lambda_star", "classification"].map(String::from).to_vec(),
            rows,
        }
    }

    pub fn crossings_text(&self) -> String {
        let mut s = format!("param = {}\ncrossings = {}\n", self.param, self.crossings.len());
        for (i, c) in self.crossings.iter().enumerate() {
            let _ = writeln!(s, "crossing_{i} = {}", fmt_f64(*c));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        fs::create_dir_all(dir)?;
        let a = dir.join("sweep.csv");
        artifacts::write_table(&a, &self.to_table())?;
        let b = dir.join("crossings.txt");
        artifacts::write_text(&b, &self.crossings_text())?;
        Ok(vec![a, b])
    }
}

fn lambda_star_at(base: &Scenario, path: &str, value: f64) -> Result<f64, ExperimentError> {
    let s = base.with_param(path, value)?;
    Ok(compute_index(&s.params, &s.rho, &s.pulse)?.lambda_star)
}

/// Evaluates the index at `points` evenly spaced values of `path` in
/// `[from, to]` (optionally simulating each), in parallel, and bisects every
/// sign change of `λ*` (equivalently of `R0 − 1`) to `1e-6`.
pub fn sweep(
    base: &Scenario,
    path: &str,
    from: f64,
    to: f64,
    points: usize,
    run_simulations: bool,
) -> Result<SweepTable, ExperimentError> {
    if points < 2 {
        return Err(crate::Error::InvalidParameter { name: "points", reason: format!("must be >= 2, got {points}") }.into());
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(crate::Error::InvalidParameter { name: "range", reason: format!("need from < to, got [{from}, {to}]") }.into());
    }
    base.with_param(path, from)?;
    let values: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let rows: Vec<Result<SweepRow, ExperimentError>> = pool.install(|| {
        values
            .par_iter()
            .map(|&value| {
                let s = base.with_param(path, value)?;
                let idx = compute_index(&s.params, &s.rho, &s.pulse)?;
                let classification = if run_simulations {
                    let v0 = s.initial_state()?;
                    let spec = OutputSpec { snapshots_per_period: 0, physical_frame: false };
                    let traj = simulate(&s.params, &s.rho, &s.pulse, &s.grid, &v0, s.n_periods, &spec)?;
                    Some(classify(&traj.period_sup))
                } else {
                    None
                };
                Ok(SweepRow { value, r0: idx.r0, r0_star: idx.r0_star, lambda_star: idx.lambda_star, classification })
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut crossings = Vec::new();
    for w in rows.windows(2) {
        let (fa, fb) = (w[0].lambda_star, w[1].lambda_star);
        if fa == 0.0 {
            crossings.push(w[0].value);
            continue;
        }
        if fa.signum() == fb.signum() || fb == 0.0 {
            continue;
        }
        let (mut a, mut b) = (w[0].value, w[1].value);
        while b - a > 1e-7 {
            let m = 0.5 * (a + b);
            let fm = lambda_star_at(base, path, m)?;
            if fm == 0.0 {
                a = m;
                b = m;
            } else if fm.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        crossings.push(0.5 * (a + b));
    }
    if let Some(last) = rows.last() {
        if last.lambda_star == 0.0 {
            crossings.push(last.value);
        }
    }
    Ok(SweepTable { param: path.to_string(), rows, crossings })
}
