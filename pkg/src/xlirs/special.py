"""Elliptic integrals of the first kind in the *parameter* convention.

Every function here takes the parameter ``k`` that multiplies ``sin^2`` in the
integrand::

    F(theta | k) = integral_0^theta  dbeta / sqrt(1 - k sin^2 beta)

This is not the modulus convention used by some references (where the
integrand has ``k^2 sin^2``). The near-field SNR formulas need ``k = 2``,
which only makes sense as a parameter: the integrand is real for
``theta <= pi/4`` and has an integrable singularity at ``theta = pi/4``.
"""

import math

import numpy as np

from .errors import DomainError

# slack allowed on 1 - k sin^2(theta) before it is treated as out of domain
_DOMAIN_SLACK = 1e-14

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def carlson_rf(x, y, z, rtol=1e-15):
    """Carlson's symmetric integral R_F(x, y, z) by the duplication theorem.

    Arguments must be nonnegative with at most one of them zero.
    """
    x, y, z = float(x), float(y), float(z)
    if min(x, y, z) < 0.0:
        raise DomainError("carlson_rf arguments must be nonnegative")
    if (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise DomainError("carlson_rf allows at most one zero argument")

    a = (x + y + z) / 3.0
    q = (3.0 * rtol) ** (-1.0 / 6.0) * max(abs(a - x), abs(a - y), abs(a - z))
    while q >= abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        q *= 0.25

    dx = 1.0 - x / a
    dy = 1.0 - y / a
    dz = -dx - dy
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(a)


def agm(a, b, rtol=1e-16):
    """Arithmetic-geometric mean of two positive numbers."""
    a, b = float(a), float(b)
    if a <= 0.0 or b <= 0.0:
        raise DomainError("agm needs positive arguments")
    for _ in range(64):
        if abs(a - b) <= rtol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellip_k_complete(m):
    """Complete integral K(m) for parameter 0 <= m < 1, via the AGM."""
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise DomainError(f"complete elliptic integral needs 0 <= m < 1, got {m!r}")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def _domain_radicand(theta, k):
    """1 - k sin^2(theta), computed without cancellation where it matters."""
    if k == 2.0:
        return math.cos(2.0 * theta)
    s = math.sin(theta)
    return 1.0 - k * s * s


def singular_amplitude(k):
    """Largest real amplitude for k > 1, i.e. arcsin(1/sqrt(k))."""
    if k <= 1.0:
        return math.inf
    return math.asin(1.0 / math.sqrt(k))


def ellip_f(theta, k):
    """Incomplete elliptic integral F(theta | k) of the first kind.

    ``k`` is the parameter (see module docstring). For ``k > 1`` the real
    domain ends at ``arcsin(1/sqrt(k))`` and the value there is finite; it is
    reached through the reciprocal-parameter transformation

        F(theta | k) = F(theta' | 1/k) / sqrt(k),   sin(theta') = sqrt(k) sin(theta)

    whose right-hand side is regular up to ``theta' = pi/2``.
    """
    theta = float(theta)
    k = float(k)
    if not theta >= 0.0:
        raise DomainError(f"amplitude must be nonnegative, got {theta!r}")
    if theta == 0.0:
        return 0.0
    if k == 0.0:
        return theta

    if k > 1.0:
        if theta > math.pi / 2:
            raise DomainError(f"F(theta|{k}) is not real for theta={theta!r}")
        radicand = _domain_radicand(theta, k)
        if radicand < -_DOMAIN_SLACK:
            raise DomainError(
                f"1 - k sin^2(theta) < 0 for theta={theta!r}, k={k!r}; "
                f"amplitude must not exceed {singular_amplitude(k)!r}"
            )
        # transformed amplitude: sin^2 = k sin^2(theta), cos^2 = radicand
        sin_t = min(1.0, math.sqrt(k) * math.sin(theta))
        cos2_t = max(0.0, radicand)
        m = 1.0 / k
        return sin_t * carlson_rf(cos2_t, 1.0 - m * sin_t * sin_t, 1.0) / math.sqrt(k)

    if k == 1.0 and theta >= math.pi / 2:
        raise DomainError("F(theta|1) diverges at theta = pi/2")

    # k < 1 (including negative k): quasi-periodic in theta with period pi
    n = math.floor(theta / math.pi + 0.5)
    phi = theta - n * math.pi
    s = math.sin(phi)
    c = math.cos(phi)
    value = s * carlson_rf(c * c, 1.0 - k * s * s, 1.0)
    if n:
        value += 2.0 * n * ellip_k_complete(k) if k >= 0.0 else 2.0 * n * _k_negative(k)
    return value


def _k_negative(k):
    # K(k) for k < 0 through R_F directly; the AGM form needs 0 <= k < 1
    return carlson_rf(0.0, 1.0 - k, 1.0)


def ellip_f_difference(upper, lower, k):
    """F(upper | k) - F(lower | k) without catastrophic cancellation.

    When the two amplitudes are close the difference is integrated directly
    with Gauss-Legendre over [lower, upper]; that is only done while the
    interval stays well away from the singular amplitude of k > 1.
    """
    upper = float(upper)
    lower = float(lower)
    if upper < lower:
        return -ellip_f_difference(lower, upper, k)
    width = upper - lower
    if width == 0.0:
        return 0.0
    if k > 1.0:
        gap = singular_amplitude(k) - upper
    elif k <= 0.5:
        gap = math.inf
    else:
        # complex singularities approach the real axis near pi/2 as k -> 1
        gap = abs(math.pi / 2 - (upper % math.pi)) * (1.0 - k)
    if width < 0.5 * upper and width <= 0.25 and gap > 2.0 * width:
        mid = 0.5 * (upper + lower)
        beta = mid + 0.5 * width * _GL_NODES
        s = np.sin(beta)
        integrand = 1.0 / np.sqrt(1.0 - k * s * s)
        return 0.5 * width * math.fsum(_GL_WEIGHTS * integrand)
    return ellip_f(upper, k) - ellip_f(lower, k)
