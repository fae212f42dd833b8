use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use impulsive_logistic::engine::Grid;
use impulsive_logistic::experiments::artifacts::read_table;
use impulsive_logistic::experiments::{
    parse_config, preset, run_periodic, run_scenario, sweep, Classification, Expectation, SWEEP_PATHS,
};
use impulsive_logistic::model::{EvolutionRate, PulseFunction};

fn short(name: &str, periods: usize) -> impulsive_logistic::experiments::Scenario {
    let mut s = preset(name).unwrap();
    s.n_periods = periods;
    s
}

#[test]
fn preset_runs_classify_as_expected() {
    let a = run_scenario(&preset("4.1-rho1").unwrap(), None).unwrap();
    assert!((a.index.r0.unwrap() - 0.8177).abs() < 5e-4);
    assert!(a.classification.is_extinction());
    assert!(a.consistent(0.02));

    let c = run_scenario(&preset("4.3-rho2-harvest").unwrap(), None).unwrap();
    assert_eq!(c.index.ln_gprime0, 0.5f64.ln());
    assert!(c.index.r0.unwrap() < 1.0 && c.index.r_noimpulse > 1.0);
    assert!(c.classification.is_extinction());

    let d = run_scenario(&preset("4.4").unwrap(), None).unwrap();
    assert_eq!(d.classification, Classification::Persistence);
    let orbit = d.orbit.unwrap();
    assert!(orbit.min > 0.0 && orbit.max < 0.5);
    assert!(d.errors.is_empty());
}

#[test]
fn artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = short("4.1b", 3);
    let rec = run_scenario(&s, Some(dir.path())).unwrap();
    for name in ["field.csv", "domain.csv", "periods.csv", "field.dat", "surface.svg", "summary.txt", "orbit.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let periods = read_table(&dir.path().join("periods.csv")).unwrap();
    let sup = periods.floats("sup_pre").unwrap();
    assert_eq!(sup.len(), rec.period_sup.len());
    for (a, b) in sup.iter().zip(&rec.period_sup) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    let field = read_table(&dir.path().join("field.csv")).unwrap();
    assert_eq!(field.headers, ["t", "phase", "y", "x", "v"]);
    assert_eq!(field.rows.len(), (3 * 9 + 1) * s.grid.ny);
    let y = field.floats("y").unwrap();
    assert_eq!(y[..s.grid.ny], s.grid.nodes()[..]);
    let v0 = s.initial_state().unwrap().values;
    let v = field.floats("v").unwrap();
    assert!(v[..s.grid.ny].iter().zip(&v0).all(|(a, b)| a.to_bits() == b.to_bits()));
    let raw = fs::read_to_string(dir.path().join("periods.csv")).unwrap();
    assert!(!raw.contains('\r'));
    assert!(raw.lines().nth(1).unwrap().split(',').nth(2).unwrap().len() >= 17);
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let s = short("4.2b", 2);
    run_scenario(&s, Some(a.path())).unwrap();
    run_scenario(&s, Some(b.path())).unwrap();
    for entry in fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn periodic_run_writes_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run_periodic(&preset("4.3b").unwrap(), Some(dir.path())).unwrap();
    assert!(rec.to_keyed_text().contains("outcome = periodic"));
    let res = read_table(&dir.path().join("residuals.csv")).unwrap();
    assert!(res.floats("residual").unwrap().last().unwrap() < &1e-8);
    let extinct = run_periodic(&preset("4.1a").unwrap(), None).unwrap();
    assert!(extinct.to_keyed_text().contains("outcome = extinct"));
}

#[test]
fn sweep_amplitude_is_increasing() {
    let t = sweep(&preset("4.1a").unwrap(), "rho.amplitude", -0.1, 0.1, 11, false).unwrap();
    let r: Vec<f64> = t.rows.iter().map(|r| r.r0.unwrap()).collect();
    assert!(r.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(t.crossings.len(), 1);
    let c = t.crossings[0];
    assert!(c > -0.1 && c < 0.1);
    let at = preset("4.1a").unwrap().with_param("rho.amplitude", c).unwrap();
    let idx = impulsive_logistic::compute_index(&at.params, &at.rho, &at.pulse).unwrap();
    assert!((idx.r0.unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn sweep_diffusion_crossing_closed_form() {
    let mut base = preset("4.3a").unwrap();
    base.rho = EvolutionRate::constant(base.params.period);
    base.pulse = PulseFunction::Identity;
    let t = sweep(&base, "model.d", 0.5, 2.0, 7, false).unwrap();
    let r: Vec<f64> = t.rows.iter().map(|r| r.r0.unwrap()).collect();
    assert!(r.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(t.crossings.len(), 1);
    assert!((t.crossings[0] - 1.1).abs() < 1e-6, "{}", t.crossings[0]);
    let dir = tempfile::tempdir().unwrap();
    t.write(dir.path()).unwrap();
    let table = read_table(&dir.path().join("sweep.csv")).unwrap();
    assert_eq!(table.rows.len(), 7);
}

#[test]
fn sweep_rejects_unknown_path() {
    let err = sweep(&preset("4.1a").unwrap(), "model.gamma", 0.1, 1.0, 3, false).unwrap_err().to_string();
    for p in SWEEP_PATHS {
        assert!(err.contains(p), "{err}");
    }
}

#[test]
fn sweep_results_keep_input_order_with_one_worker() {
    let base = preset("4.1a").unwrap();
    let many = sweep(&base, "pulse.m", 2.0, 9.0, 15, false).unwrap();
    std::env::set_var("IMPLOG_WORKERS", "1");
    let one = sweep(&base, "pulse.m", 2.0, 9.0, 15, false).unwrap();
    std::env::remove_var("IMPLOG_WORKERS");
    assert_eq!(many, one);
}

#[test]
fn classification_concordance_over_random_sweeps() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_4c04);
    let mut checked = 0;
    for _ in 0..5 {
        let mut base = preset("4.1a").unwrap();
        base.params.d = rng.gen_range(0.7..1.3);
        let a = rng.gen_range(5.0..15.0);
        base.pulse = PulseFunction::BevertonHolt { a, m: rng.gen_range(0.6..1.0) * a };
        base.grid = Grid::new(&base.params, 49, 1024).unwrap();
        base.n_periods = 300;
        let table = sweep(&base, "rho.amplitude", -0.2, 0.2, 10, true).unwrap();
        for row in &table.rows {
            let r0 = row.r0.unwrap_or(row.r0_star);
            if (r0 - 1.0).abs() <= 0.05 {
                continue;
            }
            let class = row.classification.unwrap();
            let ok = if r0 > 1.0 { class == Classification::Persistence } else { class.is_extinction() };
            assert!(ok, "amplitude {} r0 {r0} classified {class}", row.value);
            checked += 1;
        }
    }
    assert!(checked >= 30, "{checked}");
}

#[test]
fn config_file_drives_a_run() {
    let s = parse_config("preset = \"4.3-rho1\"\nname = \"cfg\"\n[run]\nn_periods = 2\nexpect = \"unspecified\"\n").unwrap();
    assert_eq!(s.pulse, PulseFunction::Identity);
    assert_eq!(s.expected, Expectation::Unspecified);
    let rec = run_scenario(&s, None).unwrap();
    assert_eq!(rec.name, "cfg");
    assert_eq!(rec.period_sup.len(), 3);
}
