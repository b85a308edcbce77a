"""Analytical SNR models for near-field links through a large reflecting surface.

Everything here is an approximation of, or a bound on, the exact element sum
in :func:`xlirs.channel.snr_exact_sum`:

* ``snr_integral_upa`` / ``snr_ula_integral`` replace the sum by an integral
  over the aperture (valid while d/r << 1);
* ``snr_bounds_general`` brackets the rectangular aperture integral between
  its inscribed and circumscribed disks;
* ``snr_boresight`` and ``snr_asymptotic_upa`` are the closed forms of those
  disk integrals when both nodes sit near the surface normal;
* ``snr_ula_closed`` and ``snr_ula_asymptotic`` are closed forms for a linear
  array when one node is much closer than the other;
* ``snr_upw`` is the far-field (uniform plane wave) baseline that scales with
  the square of the element count.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import Model, Scenario, SnrEstimate, near_field_prefactor
from .errors import PreconditionError, ValidationError
from .quadrature import DEFAULT_SPEC, integrate_1d, integrate_disk_polar, integrate_rect_2d
from .special import ellip_f, ellip_f_difference

# "much smaller than" conditions are enforced as a factor of ten
BORESIGHT_MARGIN = 0.1
# relative |r_tx - r_rx| below which the equal-range closed form is used
EQUAL_RANGE_RTOL = 1e-9
# relative |r_tx - r_rx| below which the unequal-range form is flagged as ill-conditioned
NEAR_EQUAL_RTOL = 1e-3
# element spacing over range above which the integral models are flagged
INTEGRAL_EPS_WARN = 1e-2
ULA_RATIO_WARN = 0.01
ULA_RATIO_MAX = 0.1
# [F(pi/4 | 2)]^2, the constant of the linear-array saturation limit
ULA_LIMIT_CONSTANT = ellip_f(math.pi / 4, 2.0) ** 2


@dataclass(frozen=True)
class BoundsPair:
    lower: SnrEstimate
    upper: SnrEstimate
    r1: float
    r2: float

    def __post_init__(self):
        if self.r1 > self.r2:
            raise ValidationError("inscribed radius exceeds circumscribed radius")


@dataclass(frozen=True)
class UpwConfig:
    """Reference channel power gain at 1 m, squared, for the plane-wave baseline."""

    beta0_squared: float

    def __post_init__(self):
        if not self.beta0_squared > 0:
            raise ValidationError("beta0_squared must be positive")

    @classmethod
    def matched(cls, scenario):
        """beta0^2 = A^2 cos_x,tx cos_x,rx / (16 pi^2): agrees with the exact sum in the far field."""
        geom = scenario.geom
        return cls(
            geom.element_area_A**2 * scenario.tx.cos_x * scenario.rx.cos_x / (16.0 * math.pi**2)
        )

    @classmethod
    def free_space(cls, wavelength):
        """Isotropic free-space gain at 1 m, beta0 = (lambda / 4 pi)^2."""
        return cls((wavelength / (4.0 * math.pi)) ** 4)


def _signed_f(amplitude, k=2.0):
    # F is odd in its amplitude
    return math.copysign(ellip_f(abs(amplitude), k), amplitude)


def _range_ratio(scenario):
    """(rho, 1 - rho) with the difference formed before dividing."""
    near = min(scenario.tx.range_r, scenario.rx.range_r)
    far = max(scenario.tx.range_r, scenario.rx.range_r)
    return near / far, (far - near) / far


def _epsilon_warnings(scenario):
    out = []
    for label, node in (("tx", scenario.tx), ("rx", scenario.rx)):
        eps = node.epsilon(scenario.geom)
        if eps > INTEGRAL_EPS_WARN:
            out.append(f"{label} d/r = {eps:.3g} > {INTEGRAL_EPS_WARN:g}; integral approximation may be poor")
    return out


def _bracket(node, y, z):
    r = node.range_r
    return 1.0 - 2.0 * (y * node.cos_y + z * node.cos_z) / r + (y * y + z * z) / (r * r)


def upa_kernel(scenario):
    """Aperture integrand [bracket_tx(y, z) * bracket_rx(y, z)]^(-3/4)."""
    tx, rx = scenario.tx, scenario.rx

    def kernel(y, z):
        return (_bracket(tx, y, z) * _bracket(rx, y, z)) ** -0.75

    return kernel


def ula_kernel(scenario):
    """Line integrand along z for a single-column array (y = 0)."""
    tx, rx = scenario.tx, scenario.rx

    def kernel(z):
        return (_bracket(tx, 0.0, z) * _bracket(rx, 0.0, z)) ** -0.75

    return kernel


def snr_integral_upa(scenario, spec=DEFAULT_SPEC):
    """SNR with the element sum replaced by an integral over the L_y x L_z aperture."""
    geom = scenario.geom
    hy, hz = 0.5 * geom.length_y, 0.5 * geom.length_z
    res = integrate_rect_2d(upa_kernel(scenario), (-hy, hy), (-hz, hz), spec)
    value = near_field_prefactor(scenario) / geom.spacing_d**4 * res.value**2
    return SnrEstimate(value, Model.INTEGRAL_UPA, _epsilon_warnings(scenario))


def disk_integral(scenario, radius, spec=DEFAULT_SPEC):
    """Aperture integrand integrated over a centred disk (polar coordinates)."""
    kernel = upa_kernel(scenario)

    def polar(r, zeta):
        return kernel(r * np.cos(zeta), r * np.sin(zeta))

    return integrate_disk_polar(polar, radius, spec).value


def disk_snr(scenario, radius, spec=DEFAULT_SPEC):
    """The disk-aperture SNR f(R) bracketing the rectangular one."""
    d = scenario.geom.spacing_d
    return near_field_prefactor(scenario) / d**4 * disk_integral(scenario, radius, spec) ** 2


def bound_radii(geom):
    ly, lz = geom.length_y, geom.length_z
    return 0.5 * min(ly, lz), 0.5 * math.hypot(ly, lz)


def snr_bounds_general(scenario, spec=DEFAULT_SPEC, radii=None):
    """Inscribed/circumscribed disk bounds on the integral-form SNR."""
    r1, r2 = bound_radii(scenario.geom) if radii is None else radii
    diag = _epsilon_warnings(scenario)
    lower = disk_snr(scenario, r1, spec)
    upper = lower if r2 == r1 else disk_snr(scenario, r2, spec)
    return BoundsPair(
        SnrEstimate(lower, Model.BOUND_LOWER, diag),
        SnrEstimate(upper, Model.BOUND_UPPER, diag),
        r1,
        r2,
    )


def boresight_margins(scenario):
    """How far each boresight condition is from its threshold (>1 means satisfied).

    Conditions: |cos_y| < margin * r_near / L_y and |cos_z| < margin * r_near / L_z
    for both nodes.
    """
    geom = scenario.geom
    r_near = min(scenario.tx.range_r, scenario.rx.range_r)
    out = {}
    for label, node in (("tx", scenario.tx), ("rx", scenario.rx)):
        for axis, cosine, length in (("y", node.cos_y, geom.length_y), ("z", node.cos_z, geom.length_z)):
            limit = BORESIGHT_MARGIN * r_near / length
            out[f"{label}.cos_{axis}"] = math.inf if abs(cosine) < 1e-15 else limit / abs(cosine)
    return out


def _require_boresight(scenario):
    margins = boresight_margins(scenario)
    worst_key = min(margins, key=margins.get)
    worst = margins[worst_key]
    if worst <= 1.0:
        raise PreconditionError(
            f"boresight condition violated: {worst_key} exceeds "
            f"{BORESIGHT_MARGIN:g} * r/L (margin {worst:.3g})"
        )
    return [] if math.isinf(worst) else [f"boresight margin {worst:.3g} ({worst_key})"]


def _ratio_diagnostics(one_minus_rho):
    if EQUAL_RANGE_RTOL <= one_minus_rho < NEAR_EQUAL_RTOL:
        return [f"near-equal ranges (1 - rho = {one_minus_rho:.3g}); closed form is ill-conditioned"]
    return []


def boresight_disk_snr(scenario, radius):
    """Closed-form disk SNR for unequal ranges near boresight.

    rho / (1 - rho^2) * xi^2 * pbar * [F(a | 2) - F(b | 2)]^2, with
    a = atan(s)/2, b = atan(s cos(atan(R / r_near)))/2, s = sqrt(1 - rho^2)/rho.
    The difference of the two F values is formed directly so it stays
    accurate as rho -> 1, where both amplitudes shrink to zero.
    """
    rho, one_minus = _range_ratio(scenario)
    r_near = min(scenario.tx.range_r, scenario.rx.range_r)
    s = math.sqrt(one_minus * (1.0 + rho)) / rho
    cos_span = 1.0 / math.hypot(1.0, radius / r_near)
    diff = ellip_f_difference(0.5 * math.atan(s), 0.5 * math.atan(s * cos_span), 2.0)
    xi = scenario.geom.occupation_ratio
    return rho / (one_minus * (1.0 + rho)) * xi**2 * scenario.transmit_snr_pbar * diff**2


def _equal_range_snr(scenario):
    geom = scenario.geom
    r = min(scenario.tx.range_r, scenario.rx.range_r)
    u = geom.length_y / (2.0 * r)
    v = geom.length_z / (2.0 * r)
    angle = math.atan(u * v / math.sqrt(u * u + v * v + 1.0))
    return geom.occupation_ratio**2 * scenario.transmit_snr_pbar / math.pi**2 * angle**2


def snr_boresight(scenario):
    """Closed-form boresight SNR.

    Returns a :class:`BoundsPair` for unequal ranges and a single
    :class:`SnrEstimate` when the ranges are equal (there the rectangle
    integrates in closed form).
    """
    diag = _require_boresight(scenario)
    rho, one_minus = _range_ratio(scenario)
    if one_minus < EQUAL_RANGE_RTOL:
        return SnrEstimate(_equal_range_snr(scenario), Model.BORESIGHT_CLOSED, diag)
    diag = diag + _ratio_diagnostics(one_minus) + ["closed-form boresight bounds"]
    r1, r2 = bound_radii(scenario.geom)
    return BoundsPair(
        SnrEstimate(boresight_disk_snr(scenario, r1), Model.BOUND_LOWER, diag),
        SnrEstimate(boresight_disk_snr(scenario, r2), Model.BOUND_UPPER, diag),
        r1,
        r2,
    )


def snr_asymptotic_upa(scenario):
    """Limit of the boresight SNR as L_y, L_z -> infinity."""
    diag = _require_boresight(scenario)
    rho, one_minus = _range_ratio(scenario)
    xi = scenario.geom.occupation_ratio
    pbar = scenario.transmit_snr_pbar
    if one_minus < EQUAL_RANGE_RTOL:
        return SnrEstimate(xi**2 * pbar / 4.0, Model.ASYMPTOTIC_UPA, diag)
    s = math.sqrt(one_minus * (1.0 + rho)) / rho
    value = rho / (one_minus * (1.0 + rho)) * xi**2 * pbar * ellip_f(0.5 * math.atan(s), 2.0) ** 2
    return SnrEstimate(value, Model.ASYMPTOTIC_UPA, diag + _ratio_diagnostics(one_minus))


def _require_ula(scenario):
    if scenario.geom.m_y != 1:
        raise PreconditionError(f"requires m_y = 1 (linear array), got m_y = {scenario.geom.m_y}")


def snr_ula_integral(scenario, spec=DEFAULT_SPEC):
    """Single-column array SNR with the sum replaced by a line integral over z."""
    _require_ula(scenario)
    geom = scenario.geom
    hz = 0.5 * geom.length_z
    res = integrate_1d(ula_kernel(scenario), -hz, hz, spec)
    value = near_field_prefactor(scenario) / geom.spacing_d**2 * res.value**2
    return SnrEstimate(value, Model.ULA_INTEGRAL, _epsilon_warnings(scenario))


def _ula_ratio_check(scenario):
    _require_ula(scenario)
    rho, _ = _range_ratio(scenario)
    if rho > ULA_RATIO_MAX:
        raise PreconditionError(
            f"linear-array closed form needs r_near << r_far; rho = {rho:.3g} > {ULA_RATIO_MAX:g}"
        )
    if rho > ULA_RATIO_WARN:
        return [f"rho = {rho:.3g} > {ULA_RATIO_WARN:g}; closed form accuracy degrades"]
    return []


def ula_span_angles(scenario):
    """Angles at the near node subtended by the two ends of the array.

    Negative when an end lies on the same side of the near node's projection
    as the other end, i.e. the array does not reach past the projection.
    """
    sc = scenario.normalized()
    q = sc.tx
    half = 0.5 * sc.geom.length_z
    r = q.range_r
    sin_t, cos_t = math.sin(q.zenith_theta), math.cos(q.zenith_theta)
    return (
        math.atan((half + r * cos_t) / (r * sin_t)),
        math.atan((half - r * cos_t) / (r * sin_t)),
    )


def _ula_scale(scenario):
    sc = scenario.normalized()
    geom = sc.geom
    return (
        geom.element_area_A**2
        * sc.transmit_snr_pbar
        * sc.rx.cos_x
        * math.cos(sc.tx.azimuth_phi)
        / (math.pi**2 * geom.spacing_d**2 * sc.rx.range_r**2)
    )


def snr_ula_closed(scenario):
    """Closed-form linear-array SNR in terms of the two span angles."""
    diag = _ula_ratio_check(scenario)
    a1, a2 = ula_span_angles(scenario)
    span = _signed_f(0.5 * a1) + _signed_f(0.5 * a2)
    return SnrEstimate(0.25 * _ula_scale(scenario) * span**2, Model.ULA_CLOSED, diag)


def snr_ula_asymptotic(scenario):
    """Saturation SNR of an unbounded linear array."""
    diag = _ula_ratio_check(scenario)
    return SnrEstimate(_ula_scale(scenario) * ULA_LIMIT_CONSTANT, Model.ULA_ASYMPTOTIC, diag)


def snr_upw(scenario, upw=None):
    """Plane-wave baseline beta0^2 pbar M^2 / (r_tx^2 r_rx^2)."""
    upw = UpwConfig.matched(scenario) if upw is None else upw
    m = scenario.geom.n_elements
    value = (
        upw.beta0_squared
        * scenario.transmit_snr_pbar
        * float(m) ** 2
        / (scenario.tx.range_r**2 * scenario.rx.range_r**2)
    )
    return SnrEstimate(value, Model.UPW)


# closed forms used by cross-checks and validation


def equal_range_rect_integral(length_y, length_z, r):
    """Closed form of the boresight equal-range aperture integral."""
    u = length_y / (2.0 * r)
    v = length_z / (2.0 * r)
    return 4.0 * r * r * math.atan(u * v / math.sqrt(u * u + v * v + 1.0))


def ula_line_integral_closed(scenario):
    """Closed form of the linear-array line integral for r_near << r_far."""
    sc = scenario.normalized()
    a1, a2 = ula_span_angles(sc)
    q = sc.tx
    return 2.0 * q.range_r / math.sqrt(math.sin(q.zenith_theta)) * (
        _signed_f(0.5 * a1) + _signed_f(0.5 * a2)
    )


__all__ = [
    "BoundsPair",
    "UpwConfig",
    "snr_integral_upa",
    "snr_bounds_general",
    "snr_boresight",
    "snr_asymptotic_upa",
    "snr_ula_integral",
    "snr_ula_closed",
    "snr_ula_asymptotic",
    "snr_upw",
]
