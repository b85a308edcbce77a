"""Cross-model consistency checks run by ``xlirs validate``.

Each check computes a measured deviation and compares it with a fixed
threshold.  Random cases come from a seeded generator so every run measures
the same thing.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import models
from .channel import (
    PhaseProfile,
    Scenario,
    near_field_prefactor,
    optimal_phases,
    snr_exact_sum,
    snr_with_phases,
    to_db,
)
from .errors import ValidationError
from .geometry import IrsGeometry, NodePosition
from .quadrature import QuadSpec, integrate_1d, integrate_rect_2d
from .special import ellip_f

WAVELENGTH = 0.125
SPACING = WAVELENGTH / 5
AREA = (SPACING / 2) ** 2
SEED = 20211


@dataclass(frozen=True)
class CheckResult:
    name: str
    tags: tuple
    passed: bool
    deviation: float
    threshold: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: deviation {self.deviation:.4g} (limit {self.threshold:.4g}) {self.detail}".rstrip()


def reference_geometry(m_y, m_z):
    return IrsGeometry(m_y, m_z, SPACING, AREA, WAVELENGTH)


def square_setup(length, pbar=1e9, r_tx=10.0, r_rx=100.0):
    """Square surface with both nodes on the surface normal."""
    geom = IrsGeometry.from_lengths(length, length, SPACING, AREA, WAVELENGTH)
    return Scenario(
        geom, NodePosition(r_tx, math.pi / 2, 0.0), NodePosition(r_rx, math.pi / 2, 0.0), pbar
    )


def random_node(rng, r_lo, r_hi, min_cos_x=0.1):
    while True:
        node = NodePosition(
            rng.uniform(r_lo, r_hi), rng.uniform(0.05, math.pi - 0.05), rng.uniform(-1.5, 1.5)
        )
        if node.cos_x > min_cos_x:
            return node


def _result(name, tags, deviation, threshold, detail="", lower_is_pass=True):
    passed = deviation <= threshold if lower_is_pass else deviation >= threshold
    return CheckResult(name, tuple(tags), bool(passed), float(deviation), float(threshold), detail)


def check_elliptic_constant(**_):
    value = ellip_f(math.pi / 4, 2.0) ** 2
    return _result("elliptic-constant", ("elliptic",), abs(value - 1.7188), 1e-3, f"[F(pi/4|2)]^2 = {value:.6f}")


def check_elliptic_reduction(**_):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for theta in rng.uniform(0.0, math.pi / 4, 100):
        lhs = ellip_f(theta, 2.0) * math.sqrt(2.0)
        # arcsin(sqrt(2) sin theta) written as an atan2 to stay accurate near pi/4
        amp = math.atan2(math.sqrt(2.0) * math.sin(theta), math.sqrt(max(0.0, math.cos(2.0 * theta))))
        rhs = ellip_f(amp, 0.5)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return _result("elliptic-reduction", ("elliptic",), worst, 1e-10)


def check_elliptic_quadrature(**_):
    rng = np.random.default_rng(SEED + 1)
    spec = QuadSpec(relative_tolerance=1e-12)
    worst = 0.0
    for _ in range(30):
        k = rng.uniform(-2.0, 2.0)
        top = math.asin(1 / math.sqrt(k)) - 1e-3 if k > 1 else math.pi / 2 - 1e-3
        theta = rng.uniform(0.0, top)
        ref = integrate_1d(lambda b: 1.0 / np.sqrt(1.0 - k * np.sin(b) ** 2), 0.0, theta, spec).value
        worst = max(worst, abs(ellip_f(theta, k) - ref) / ref)
    return _result("elliptic-quadrature", ("elliptic",), worst, 1e-9)


def check_symmetry(**_):
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(100):
        geom = reference_geometry(int(rng.integers(0, 20)) * 2 + 1, int(rng.integers(0, 20)) * 2 + 1)
        sc = Scenario(geom, random_node(rng, 1.0, 50.0), random_node(rng, 1.0, 50.0), 1e9)
        a = snr_exact_sum(sc).value
        b = snr_exact_sum(sc.swapped()).value
        worst = max(worst, abs(a - b) / a)
    return _result("txrx-symmetry", ("symmetry",), worst, 1e-12)


def check_dominance(**_):
    rng = np.random.default_rng(SEED + 3)
    geom = reference_geometry(3, 3)
    sc = Scenario(geom, random_node(rng, 1.0, 10.0), random_node(rng, 1.0, 10.0), 1e9)
    best = snr_exact_sum(sc).value
    aligned = snr_with_phases(sc, optimal_phases(sc)).value
    worst_excess = abs(aligned - best) / best
    for _ in range(100):
        prof = PhaseProfile(rng.uniform(0, 2 * math.pi, (geom.m_z, geom.m_y)))
        worst_excess = max(worst_excess, snr_with_phases(sc, prof).value / best - 1.0)
    return _result("phase-dominance", ("symmetry", "channel"), max(worst_excess, 0.0), 1e-12)


BOUND_LENGTHS = (0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


def check_bounds_sandwich(lengths=BOUND_LENGTHS, **_):
    """Smallest relative slack of lower <= exact <= upper; must stay positive."""
    slack = math.inf
    for length in lengths:
        sc = square_setup(length)
        exact = snr_exact_sum(sc).value
        b = models.snr_bounds_general(sc)
        slack = min(slack, exact / b.lower.value - 1.0, b.upper.value / exact - 1.0)
    return _result(
        "bounds-sandwich", ("bounds",), slack, 0.0, "min relative slack", lower_is_pass=False
    )


def check_boresight_consistency(**_):
    worst = 0.0
    for length in (1.0, 5.0, 20.0, 50.0):
        sc = square_setup(length)
        general = models.snr_bounds_general(sc)
        closed = models.snr_boresight(sc)
        worst = max(
            worst,
            abs(closed.lower.value / general.lower.value - 1.0),
            abs(closed.upper.value / general.upper.value - 1.0),
        )
    return _result("boresight-consistency", ("bounds",), worst, 1e-2)


def check_sum_integral(cases=10, **_):
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(cases):
        geom = reference_geometry(int(rng.integers(1, 100)) * 2 + 1, int(rng.integers(1, 100)) * 2 + 1)
        sc = Scenario(geom, random_node(rng, 26.0, 200.0), random_node(rng, 26.0, 200.0), 1e9)
        exact = snr_exact_sum(sc).value
        approx = models.snr_integral_upa(sc).value
        worst = max(worst, abs(approx - exact) / exact)
    return _result("sum-integral", ("integral",), worst, 1e-3)


def check_ula_reduction(**_):
    geom = reference_geometry(1, 401)
    sc = ula_scenario(m_z=401)
    kernel = models.upa_kernel(sc)
    half = 0.5 * geom.length_z
    spec = QuadSpec(relative_tolerance=1e-12)
    line = integrate_1d(lambda z: kernel(0.0, z), -half, half, spec).value
    # y = 0 with dy = d in the planar integral
    reduced = near_field_prefactor(sc) / geom.spacing_d**4 * (geom.spacing_d * line) ** 2
    ula = models.snr_ula_integral(sc, spec).value
    return _result("ula-reduction", ("integral", "ula"), abs(reduced - ula) / ula, 1e-10)


def check_arctan_form(**_):
    worst = 0.0
    spec = QuadSpec(relative_tolerance=1e-12)
    for ly, lz, r in ((5.0, 5.0, 10.0), (20.0, 8.0, 10.0), (100.0, 100.0, 3.0)):
        closed = models.equal_range_rect_integral(ly, lz, r)
        num = integrate_rect_2d(
            lambda y, z: (1.0 + (y * y + z * z) / r**2) ** -1.5, (-ly / 2, ly / 2), (-lz / 2, lz / 2), spec
        ).value
        worst = max(worst, abs(num - closed) / closed)
    return _result("arctan-closed-form", ("identities",), worst, 1e-8)


def ula_scenario(r_rx=100.0, m_z=401, pbar=1e12):
    return Scenario(
        reference_geometry(1, m_z),
        NodePosition(10.0, math.pi / 3, math.pi / 6),
        NodePosition(r_rx, 3 * math.pi / 4, -math.pi / 5),
        pbar,
    )


def check_elliptic_form(**_):
    worst = 0.0
    for m_z in (101, 1001, 10001):
        sc = ula_scenario(r_rx=1000.0, m_z=m_z)
        half = 0.5 * sc.geom.length_z
        num = integrate_1d(models.ula_kernel(sc), -half, half).value
        closed = models.ula_line_integral_closed(sc)
        worst = max(worst, abs(closed - num) / num)
    return _result("elliptic-closed-form", ("identities", "ula"), worst, 1e-2)


def check_ula_closed(**_):
    worst = 0.0
    for m_z in (101, 1001, 10001, 100001):
        sc = ula_scenario(r_rx=1000.0, m_z=m_z)
        closed = models.snr_ula_closed(sc).value
        worst = max(
            worst,
            abs(closed / models.snr_ula_integral(sc).value - 1.0),
            abs(closed / snr_exact_sum(sc).value - 1.0),
        )
    return _result("ula-closed-form", ("ula",), worst, 1e-2)


def check_upw_far_field(beta0_scale=1.0, **_):
    sc = square_setup(0.1)
    upw = models.UpwConfig(models.UpwConfig.matched(sc).beta0_squared * beta0_scale)
    gap = abs(to_db(models.snr_upw(sc, upw).value) - to_db(snr_exact_sum(sc).value))
    return _result("upw-far-field", ("upw",), gap, 0.01, "dB")


CHECKS = (
    check_elliptic_constant,
    check_elliptic_reduction,
    check_elliptic_quadrature,
    check_symmetry,
    check_dominance,
    check_bounds_sandwich,
    check_boresight_consistency,
    check_sum_integral,
    check_ula_reduction,
    check_arctan_form,
    check_elliptic_form,
    check_ula_closed,
    check_upw_far_field,
)

CHECK_TAGS = {
    check_elliptic_constant: ("elliptic",),
    check_elliptic_reduction: ("elliptic",),
    check_elliptic_quadrature: ("elliptic",),
    check_symmetry: ("symmetry",),
    check_dominance: ("symmetry", "channel"),
    check_bounds_sandwich: ("bounds",),
    check_boresight_consistency: ("bounds",),
    check_sum_integral: ("integral",),
    check_ula_reduction: ("integral", "ula"),
    check_arctan_form: ("identities",),
    check_elliptic_form: ("identities", "ula"),
    check_ula_closed: ("ula",),
    check_upw_far_field: ("upw",),
}

ALL_TAGS = tuple(sorted({t for tags in CHECK_TAGS.values() for t in tags}))


def validate(tags=None, beta0_scale=1.0):
    """Run the checks whose tags intersect ``tags`` (all when None)."""
    wanted = None if not tags else set(tags)
    if wanted is not None:
        unknown = wanted - set(ALL_TAGS)
        if unknown:
            raise ValidationError(f"unknown tags: {', '.join(sorted(unknown))}")
    results = []
    for check in CHECKS:
        if wanted is not None and not wanted & set(CHECK_TAGS[check]):
            continue
        results.append(check(beta0_scale=beta0_scale))
    return results
