"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line that pytest prints in the
"acceptance criteria" section at the end of the run.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from xlirs import harness, models
from xlirs.channel import Scenario, snr_exact_sum, to_db
from xlirs.geometry import IrsGeometry, NodePosition
from xlirs.quadrature import QuadSpec, integrate_1d, integrate_rect_2d
from xlirs.special import ellip_f
from xlirs.validation import (
    AREA,
    SPACING,
    WAVELENGTH,
    check_elliptic_reduction,
    check_dominance,
    check_symmetry,
    ula_scenario,
    reference_geometry,
    random_node,
    square_setup,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SIZE_LENGTHS = (0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


@pytest.fixture(scope="module")
def size_rows():
    """(L, exact, lower, upper) for the size sweep, computed once."""
    rows = []
    for length in SIZE_LENGTHS:
        sc = square_setup(length, pbar=1e9)
        b = models.snr_bounds_general(sc)
        rows.append((length, snr_exact_sum(sc).value, b.lower.value, b.upper.value))
    return rows


def test_c01_elliptic_constant(acceptance):
    value = ellip_f(math.pi / 4, 2.0) ** 2
    ok = abs(value - 1.7188) <= 1e-3
    acceptance("C1 elliptic constant", ok, f"[F(pi/4|2)]^2 = {value:.7f} (target 1.7188 +- 1e-3)")
    assert ok


def test_c02_bounds_sandwich(acceptance, size_rows):
    worst = min(min(e / lo - 1.0, up / e - 1.0) for _, e, lo, up in size_rows)
    ok = all(lo < e < up for _, e, lo, up in size_rows)
    acceptance("C2 bounds sandwich", ok, f"8 sizes 0.5..100 m, min relative slack {worst:.3g}")
    assert ok


def test_c03_saturation(acceptance, size_rows):
    exact_db = [to_db(e) for _, e, _, _ in size_rows]
    monotone = all(b >= a for a, b in zip(exact_db, exact_db[1:]))
    asym_db = models.snr_asymptotic_upa(square_setup(100.0, pbar=1e9)).db
    gap = asym_db - exact_db[-1]
    ok_gap = abs(gap) <= 0.5
    acceptance(
        "C3 saturation",
        monotone and ok_gap,
        f"nondecreasing={monotone}; at L=100 m exact {exact_db[-1]:.3f} dB vs asymptote "
        f"{asym_db:.3f} dB, gap {gap:.2f} dB (limit 0.5 dB)",
    )
    assert monotone
    assert ok_gap, f"exact sum at L=100 m is {gap:.2f} dB below the asymptote"


def test_c04_sum_integral(acceptance):
    rng = np.random.default_rng(4)
    worst = 0.0
    worst_eps = 0.0
    for _ in range(50):
        geom = reference_geometry(int(rng.integers(0, 200)) * 2 + 1, int(rng.integers(0, 200)) * 2 + 1)
        # eps = d / r < 1e-3 needs r > 25 m
        tx = random_node(rng, 25.5, 300.0)
        rx = random_node(rng, 25.5, 300.0)
        worst_eps = max(worst_eps, tx.epsilon(geom), rx.epsilon(geom))
        sc = Scenario(geom, tx, rx, 1e9)
        exact = snr_exact_sum(sc).value
        approx = models.snr_integral_upa(sc).value
        worst = max(worst, abs(approx - exact) / exact)
    ok = worst < 1e-3 and worst_eps < 1e-3
    acceptance("C4 sum vs integral", ok, f"50 random cases, max eps {worst_eps:.3g}, worst rel. diff {worst:.3g}")
    assert ok


def test_c05a_upw_far_field(acceptance):
    sc = square_setup(0.1, pbar=1e9)
    gap = abs(models.snr_upw(sc).db - snr_exact_sum(sc).db)
    ok = gap < 0.01
    acceptance("C5a UPW far-field agreement", ok, f"|UPW - sum| at L=0.1 m = {gap:.2e} dB (limit 0.01 dB)")
    assert ok


def test_c05b_upw_divergence(acceptance):
    sc = square_setup(50.0, pbar=1e9)
    exact = snr_exact_sum(sc).db
    excess = models.snr_upw(sc).db - exact
    excess_free = models.snr_upw(sc, models.UpwConfig.free_space(WAVELENGTH)).db - exact
    ok = excess > 20.0
    acceptance(
        "C5b UPW divergence",
        ok,
        f"UPW - sum at L=50 m = {excess:.2f} dB with the default beta0 (limit > 20 dB); "
        f"{excess_free:.2f} dB with free-space beta0",
    )
    assert ok, f"UPW exceeds the sum by only {excess:.2f} dB at L=50 m"


def _distance_scenario(rq):
    geom = IrsGeometry.from_lengths(5.0, 5.0, SPACING, AREA, WAVELENGTH)
    return Scenario(
        geom,
        NodePosition(rq, math.pi / 3, math.pi / 6),
        NodePosition(200.0, 3 * math.pi / 4, -math.pi / 5),
        1e10,
    )


def test_c06_upw_gap_near_surface(acceptance):
    sc = _distance_scenario(2.0)
    exact = snr_exact_sum(sc).db
    gap_free = models.snr_upw(sc, models.UpwConfig.free_space(WAVELENGTH)).db - exact
    gap_matched = models.snr_upw(sc).db - exact
    ok = abs(gap_free - 25.0) <= 3.0
    acceptance(
        "C6 UPW gap at r_q = 2 m",
        ok,
        f"UPW - sum at r_q=2 m: {gap_free:.2f} dB with free-space beta0=(lambda/4pi)^2 "
        f"(target 25 +- 3); {gap_matched:.2f} dB with the matched default",
    )
    assert ok


def test_c07_ula_closed_form(acceptance):
    worst_q = worst_s = 0.0
    for m_z in (101, 1001, 10001, 100001):
        sc = ula_scenario(r_rx=1000.0, m_z=m_z)
        closed = models.snr_ula_closed(sc).value
        quad = models.snr_ula_integral(sc).value
        exact = snr_exact_sum(sc).value
        worst_q = max(worst_q, abs(closed / quad - 1.0))
        worst_s = max(worst_s, abs(closed / exact - 1.0), abs(quad / exact - 1.0))
    ok = worst_q < 0.01 and worst_s < 0.01
    acceptance(
        "C7 ULA closed form",
        ok,
        f"rho=0.01, M up to 1e5: closed vs quadrature {worst_q:.3%}, vs summation {worst_s:.3%} (limit 1%)",
    )
    assert ok


def test_c08_ula_asymptote(acceptance):
    base = ula_scenario()
    geom = IrsGeometry.from_lengths(SPACING, 1e4 * base.tx.range_r, SPACING, AREA, WAVELENGTH)
    sc = base.with_geometry(geom)
    closed = models.snr_ula_closed(sc).db
    limit = models.snr_ula_asymptotic(sc).db
    ok = abs(closed - limit) < 0.1
    acceptance(
        "C8 ULA asymptote",
        ok,
        f"L_z = {sc.geom.length_z:.6g} m: closed {closed:.4f} dB vs limit {limit:.4f} dB (limit 0.1 dB)",
    )
    assert ok


def test_c09_closed_form_identities(acceptance):
    spec = QuadSpec(relative_tolerance=1e-12)
    worst_a = 0.0
    for ly, lz, r in ((5.0, 5.0, 10.0), (20.0, 8.0, 10.0), (100.0, 100.0, 3.0), (0.3, 40.0, 7.0)):
        closed = models.equal_range_rect_integral(ly, lz, r)
        num = integrate_rect_2d(
            lambda y, z: (1.0 + (y * y + z * z) / r**2) ** -1.5, (-ly / 2, ly / 2), (-lz / 2, lz / 2), spec
        ).value
        worst_a = max(worst_a, abs(num / closed - 1.0))
    worst_b = 0.0
    for m_z in (101, 1001, 10001, 100001):
        sc = ula_scenario(r_rx=1000.0, m_z=m_z)
        half = 0.5 * sc.geom.length_z
        num = integrate_1d(models.ula_kernel(sc), -half, half, spec).value
        worst_b = max(worst_b, abs(models.ula_line_integral_closed(sc) / num - 1.0))
    ok = worst_a < 1e-8 and worst_b < 0.01
    acceptance(
        "C9 closed-form identities",
        ok,
        f"arctan form vs 2-D quadrature {worst_a:.2e} (< 1e-8); elliptic form vs 1-D quadrature {worst_b:.3%} (< 1%)",
    )
    assert ok


def test_c10_property_suites(acceptance):
    sym = check_symmetry()
    dom = check_dominance()
    red = check_elliptic_reduction()
    cfg = harness.load_config(CONFIGS / "size_sweep.cfg")
    spec = harness.SweepSpec(
        cfg.scenario, "L", harness.parse_grid("0.5:30:12:log"), ("exact-sum", "bounds", "upw")
    )
    serial = harness.table_to_csv(harness.run_sweep(spec, threads=1)).encode()
    parallel = harness.table_to_csv(harness.run_sweep(spec, threads=4)).encode()
    csv_ok = serial == parallel
    ok = sym.passed and dom.passed and red.passed and csv_ok
    acceptance(
        "C10 property suites",
        ok,
        f"symmetry {sym.deviation:.1e} (1e-12), dominance excess {dom.deviation:.1e}, "
        f"elliptic reduction {red.deviation:.1e} (1e-10), CSV serial==parallel {csv_ok}",
    )
    assert ok


def _timed_sum(m_y, m_z):
    sc = square_setup(1.0).with_geometry(reference_geometry(m_y, m_z))
    start = time.perf_counter()
    snr_exact_sum(sc)
    return time.perf_counter() - start


def test_c11_performance(acceptance):
    t6 = _timed_sum(1001, 999)
    t7 = _timed_sum(3163, 3163)
    ok = t6 < 2.0 and t7 < 20.0
    acceptance(
        "C11 performance",
        ok,
        f"M=1.0e6 in {t6:.2f} s (< 2 s); M=1.0e7 in {t7:.2f} s (< 20 s)",
    )
    assert ok
