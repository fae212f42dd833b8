"""Smoke test for the Python bindings; run after `maturin develop`."""

import math
import tempfile
from pathlib import Path

import impulsive_logistic_py as il


def main():
    p = il.Params.reference()
    rho = il.Rate.exp_cosine(-0.1, p.period)
    report = il.compute_index(p, rho, il.Pulse.beverton_holt(10.0, 8.0))
    assert abs(report.r0 - 0.8177) < 5e-4, report
    assert not report.persists()

    try:
        il.Pulse.ricker(-1.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative Ricker rate accepted")

    s = il.Scenario.preset("4.1b")
    s.n_periods = 20
    sup, final = s.simulate()
    assert len(sup) == 21 and len(final) == len(s.nodes)
    assert all(math.isfinite(v) and v >= 0.0 for v in final)

    orbit = s.periodic_orbit()
    assert orbit is not None and orbit[1] < 1e-8
    assert il.Scenario.preset("4.1a").periodic_orbit() is None

    with tempfile.TemporaryDirectory() as out:
        summary = s.run(out)
        assert summary["orbit_min"] > 0.0 and not summary["errors"], summary
        assert (Path(out) / "field.csv").exists()

    rows, crossings = il.Scenario.preset("4.1a").sweep("rho.amplitude", -0.1, 0.1, 5)
    assert len(rows) == 5 and len(crossings) == 1

    cfg = il.Scenario.from_toml('preset = "4.4"\n[run]\nn_periods = 3\n')
    assert cfg.n_periods == 3
    print("python smoke test passed:", len(il.PRESETS), "presets")


if __name__ == "__main__":
    main()
