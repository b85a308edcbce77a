import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xlirs import harness
from xlirs.errors import ConfigError, ValidationError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SIZE_CFG = (CONFIGS / "size_sweep.cfg").read_text(encoding="utf-8")


def test_size_config_parses():
    cfg = harness.config_from_text(SIZE_CFG)
    sc = cfg.scenario
    assert sc.geom.spacing_d == pytest.approx(0.025)
    assert sc.geom.occupation_ratio == pytest.approx(0.25)
    assert sc.tx.zenith_theta == pytest.approx(math.pi / 2)
    assert sc.transmit_snr_pbar == pytest.approx(1e9)
    assert cfg.sweep_var == "L"


def test_config_errors_carry_context():
    with pytest.raises(ConfigError, match="line 3, key 'bogus'"):
        harness.config_from_text("wavelength_m = 0.125\n\nbogus = 1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        harness.config_from_text("my = 3\nmy = 5\n")
    with pytest.raises(ConfigError, match="missing required keys"):
        harness.config_from_text("my = 3\n")
    with pytest.raises(ConfigError, match="not a number"):
        harness.config_from_text(SIZE_CFG.replace("pbar_db = 90", "pbar_db = ninety"))
    with pytest.raises(ConfigError, match="integer"):
        harness.config_from_text(SIZE_CFG.replace("my = 201", "my = 20.5"))


def test_zero_zenith_is_a_validation_error():
    bad = SIZE_CFG.replace("theta_rad = pi/2", "theta_rad = 0", 1)
    with pytest.raises(ValidationError, match=r"zenith angle must lie in \(0, π\)"):
        harness.config_from_text(bad)


def test_size_report_at_5m():
    sc = harness.config_from_text(SIZE_CFG).scenario
    outs = harness.evaluate_models(sc, ["exact-sum", "bounds", "asymptotic", "upw"])
    values = [e for o in outs for e in o.estimates]
    assert len(values) == 5
    exact, lower, upper = outs[0].estimates[0], outs[1].estimates[0], outs[1].estimates[1]
    assert lower.value <= exact.value <= upper.value


def test_ula_on_upa_is_skipped_with_reason(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text(SIZE_CFG, encoding="utf-8")
    report = harness.run_scenario(path, ["exact-sum", "ula-closed"])
    skipped = report.outcomes[1]
    assert not skipped.ok and "requires m_y = 1" in skipped.skipped
    assert "ula-closed" in report.format() and "skipped" in report.format()


def test_unknown_model_rejected():
    with pytest.raises(ValidationError):
        harness.check_models(["exact-sum", "magic"])
    with pytest.raises(ValidationError):
        harness.check_models([])


def test_grid_parsing():
    assert harness.parse_grid("1:3:3") == (1.0, 2.0, 3.0)
    assert harness.parse_grid("1, 2.5,4") == (1.0, 2.5, 4.0)
    lg = harness.parse_grid("1:100:3:log")
    assert lg == pytest.approx((1.0, 10.0, 100.0))
    for bad in ("1:2", "1:2:0", "a:b:3", "1:2:3:cubic"):
        with pytest.raises(ValidationError):
            harness.parse_grid(bad)


def test_sweep_spec_invariants():
    sc = harness.config_from_text(SIZE_CFG).scenario
    with pytest.raises(ValidationError):
        harness.SweepSpec(sc, "L", (2.0, 1.0), ("exact-sum",))
    with pytest.raises(ValidationError):
        harness.SweepSpec(sc, "L", (), ("exact-sum",))
    with pytest.raises(ValidationError):
        harness.SweepSpec(sc, "L", (1.0,), ())
    with pytest.raises(ValidationError):
        harness.SweepSpec(sc, "width", (1.0,), ("exact-sum",))


def test_sweep_records_realized_geometry():
    sc = harness.config_from_text(SIZE_CFG).scenario
    table = harness.run_sweep(harness.SweepSpec(sc, "L", (0.5, 1.0, 1.01), ("exact-sum",)), threads=1)
    assert table.variable == "surface_size_L"
    (l0, _, d0), (l1, _, d1), (l2, _, d2) = table.rows
    assert l0 == pytest.approx(21 * 0.025) and "M=21x21" in d0 and "requested=0.5" in d0
    assert "M=41x41" in d1 and "M=41x41" in d2  # 1.01 / 0.025 = 40.4 rounds to 41
    assert table.columns == ("exact-sum_db",)


def test_sweep_row_errors_become_diagnostics():
    sc = harness.config_from_text(SIZE_CFG).scenario
    table = harness.run_sweep(harness.SweepSpec(sc, "rq", (10.0, 20.0), ("exact-sum", "ula-closed")), threads=1)
    for _, cells, diag in table.rows:
        assert cells[1] is None and "requires m_y = 1" in diag
        assert math.isfinite(cells[0])


def test_csv_round_trip_and_determinism(tmp_path):
    sc = harness.config_from_text(SIZE_CFG).scenario
    spec = harness.SweepSpec(sc, "L", harness.parse_grid("0.5:8:6:log"), ("exact-sum", "bounds", "upw"))
    serial = harness.run_sweep(spec, threads=1)
    parallel = harness.run_sweep(spec, threads=3)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.write_csv(serial, a)
    harness.write_csv(parallel, b)
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
    header, rows = harness.read_csv(a)
    assert header == ["sweep_var", "exact-sum_db", "bounds_lower_db", "bounds_upper_db", "upw_db", "diagnostics"]
    for (value, cells, _), (nums, _) in zip(serial.rows, rows):
        assert nums[0] == float(f"{value:.10g}")
        assert nums[1:] == [float(f"{c:.10g}") for c in cells]


def test_csv_io_error_names_path(tmp_path):
    sc = harness.config_from_text(SIZE_CFG).scenario
    table = harness.run_sweep(harness.SweepSpec(sc, "rq", (10.0,), ("upw",)), threads=1)
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        harness.write_csv(table, target)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(1e-300, 1e300))
def test_ten_significant_digits(x):
    assert float(harness._fmt(x)) == pytest.approx(x, rel=5e-10)


def _config_sweep(name):
    cfg = harness.load_config(CONFIGS / name)
    spec = harness.SweepSpec(
        cfg.scenario, cfg.sweep_var, harness.parse_grid(cfg.sweep_grid),
        tuple(cfg.sweep_models.split(",")), cfg.upw,
    )
    return harness.run_sweep(spec, threads=1)


def test_ula_closed_form_tracks_sum_over_default_range():
    table = _config_sweep("ula_sweep.cfg")
    col = {c: i for i, c in enumerate(table.columns)}
    limit = table.rows[0][1][col["ula-asymptotic_db"]]
    for _, cells, _ in table.rows:
        exact, closed = cells[col["exact-sum_db"]], cells[col["ula-closed_db"]]
        assert abs(exact - closed) < 1.0
        assert exact < limit
    assert limit == pytest.approx(25.28, abs=0.01)


def test_size_sweep_is_nondecreasing_and_bracketed():
    table = _config_sweep("size_sweep.cfg")
    exact = [cells[0] for _, cells, _ in table.rows]
    assert all(b >= a for a, b in zip(exact, exact[1:]))
    for _, (e, lo, up, *_), _ in table.rows:
        assert lo < e < up
