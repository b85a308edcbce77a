"""Deterministic adaptive quadrature on intervals, rectangles and disks.

All integrands are called with numpy arrays and must evaluate elementwise.
Panels are refined by bisection; the error of a panel is estimated as the
difference between its high-order Gauss-Legendre value and the value of a
rule of half the order on the same panel.  The half-order rule is much less
accurate than the full one, so the estimate is pessimistic for smooth
integrands.
"""

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, ValidationError

# panels are never bisected beyond this many in total
_MAX_PANELS = 20000
_ROUNDOFF = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadSpec:
    relative_tolerance: float = 1e-9
    max_refinement_levels: int = 20
    base_points_per_panel: int = 15

    def __post_init__(self):
        if not 0.0 < self.relative_tolerance <= 1e-3:
            raise ValidationError("relative_tolerance must lie in (0, 1e-3]")
        if self.max_refinement_levels < 1:
            raise ValidationError("max_refinement_levels must be >= 1")
        if self.base_points_per_panel < 2:
            raise ValidationError("base_points_per_panel must be >= 2")


class QuadResult(NamedTuple):
    value: float
    error: float


DEFAULT_SPEC = QuadSpec()


@lru_cache(maxsize=None)
def _rule(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def _panel_1d(f, a, b, n):
    hi_x, hi_w = _rule(n)
    lo_x, lo_w = _rule(max(n // 2, 1))
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * np.concatenate((hi_x, lo_x))), dtype=float)
    hi = half * float(np.dot(hi_w, fx[:n]))
    lo = half * float(np.dot(lo_w, fx[n:]))
    return hi, abs(hi - lo), abs(half) * float(np.dot(hi_w, np.abs(fx[:n])))


def _converged(total, err, floor, spec):
    # the floor absorbs round-off for integrals that cancel to ~0
    return err <= spec.relative_tolerance * abs(total) or err <= floor


def _adapt(panels, split, spec, what, abs_floor=0.0):
    """Shared global-adaptive loop.

    ``panels`` is a list of (value, error, depth, key, geometry, |f|-integral)
    tuples; the panel with the largest error is split until the summed error
    meets the tolerance.  ``key`` orders panels for the final summation.
    Returns (value, error, magnitude).
    """
    heap = [(-p[1], p[3], p) for p in panels]
    heapq.heapify(heap)
    total = math.fsum(p[0] for p in panels)
    err = math.fsum(p[1] for p in panels)
    magnitude = math.fsum(p[5] for p in panels)
    while not _converged(total, err, max(abs_floor, _ROUNDOFF * magnitude), spec):
        worst = heap[0][2]
        if worst[2] >= spec.max_refinement_levels or len(heap) >= _MAX_PANELS:
            raise ConvergenceError(f"{what} did not converge", total, err)
        heapq.heappop(heap)
        children = split(worst)
        total += math.fsum(c[0] for c in children) - worst[0]
        err += math.fsum(c[1] for c in children) - worst[1]
        magnitude += math.fsum(c[5] for c in children) - worst[5]
        for child in children:
            heapq.heappush(heap, (-child[1], child[3], child))
    items = sorted((h[2] for h in heap), key=lambda p: p[3])
    return (
        math.fsum(p[0] for p in items),
        math.fsum(p[1] for p in items),
        math.fsum(p[5] for p in items),
    )


def integrate_1d(f, a, b, spec=DEFAULT_SPEC):
    """Integrate ``f`` over [a, b]; returns ``QuadResult(value, error)``."""
    value, error, _ = _integrate_1d(f, a, b, spec)
    return QuadResult(value, error)


def _integrate_1d(f, a, b, spec, abs_floor=0.0):
    a = float(a)
    b = float(b)
    if not a <= b:
        raise ValidationError("integrate_1d needs a <= b")
    if a == b:
        return 0.0, 0.0, 0.0
    n = spec.base_points_per_panel

    def make(lo, hi, depth, key):
        v, e, m = _panel_1d(f, lo, hi, n)
        return (v, e, depth, key, (lo, hi), m)

    def split(panel):
        lo, hi = panel[4]
        mid = 0.5 * (lo + hi)
        depth = panel[2] + 1
        return [make(lo, mid, depth, (lo,)), make(mid, hi, depth, (mid,))]

    return _adapt([make(a, b, 0, (a,))], split, spec, "integrate_1d", abs_floor)


def _panel_2d(f, y0, y1, z0, z1, n):
    hi_x, hi_w = _rule(n)
    lo_x, lo_w = _rule(max(n // 2, 1))
    hy, my = 0.5 * (y1 - y0), 0.5 * (y0 + y1)
    hz, mz = 0.5 * (z1 - z0), 0.5 * (z0 + z1)
    area = hy * hz
    yh, zh = np.meshgrid(my + hy * hi_x, mz + hz * hi_x, indexing="ij")
    yl, zl = np.meshgrid(my + hy * lo_x, mz + hz * lo_x, indexing="ij")
    fh = np.broadcast_to(np.asarray(f(yh, zh), dtype=float), yh.shape)
    fl = np.broadcast_to(np.asarray(f(yl, zl), dtype=float), yl.shape)
    hi = area * float(hi_w @ fh @ hi_w)
    lo = area * float(lo_w @ fl @ lo_w)
    return hi, abs(hi - lo), abs(area) * float(hi_w @ np.abs(fh) @ hi_w)


def integrate_rect_2d(f, y_range, z_range, spec=DEFAULT_SPEC):
    """Integrate ``f(y, z)`` over the rectangle ``y_range x z_range``.

    Tensor-product Gauss-Legendre panels, each bisected in both directions
    when refined.
    """
    y0, y1 = map(float, y_range)
    z0, z1 = map(float, z_range)
    if not (y0 <= y1 and z0 <= z1):
        raise ValidationError("integrate_rect_2d needs increasing ranges")
    if y0 == y1 or z0 == z1:
        return QuadResult(0.0, 0.0)
    n = spec.base_points_per_panel

    def make(box, depth):
        v, e, m = _panel_2d(f, *box, n)
        return (v, e, depth, (box[2], box[0]), box, m)

    def split(panel):
        a, b, c, d = panel[4]
        ym = 0.5 * (a + b)
        zm = 0.5 * (c + d)
        depth = panel[2] + 1
        return [
            make((a, ym, c, zm), depth),
            make((ym, b, c, zm), depth),
            make((a, ym, zm, d), depth),
            make((ym, b, zm, d), depth),
        ]

    value, error, _ = _adapt([make((y0, y1, z0, z1), 0)], split, spec, "integrate_rect_2d")
    return QuadResult(value, error)


def integrate_disk_polar(f, radius, spec=DEFAULT_SPEC, min_angles=32, max_angles=8192):
    """Integrate ``f(r, zeta)`` over the disk of the given radius.

    The angular integral uses the uniform trapezoid rule, which converges
    spectrally for periodic integrands; the number of angles doubles until
    two successive results agree to the tolerance.  The radial integral
    (including the Jacobian ``r``) is adaptive Gauss-Legendre.
    """
    radius = float(radius)
    if radius < 0.0:
        raise ValidationError("disk radius must be nonnegative")
    if radius == 0.0:
        return QuadResult(0.0, 0.0)

    def angular_sum(n_angles, transform):
        zeta = 2.0 * math.pi * np.arange(n_angles) / n_angles

        def g(r):
            r = np.asarray(r, dtype=float)
            vals = np.asarray(f(r[:, None], zeta[None, :]), dtype=float)
            vals = transform(np.broadcast_to(vals, (r.size, n_angles)))
            return r * vals.sum(axis=1) * (2.0 * math.pi / n_angles)

        return g

    # coarse integral of |f| sets the round-off floor for cancelling integrands
    coarse = QuadSpec(relative_tolerance=1e-3, max_refinement_levels=spec.max_refinement_levels)
    floor = _ROUNDOFF * _integrate_1d(angular_sum(min_angles, np.abs), 0.0, radius, coarse)[0]

    def radial(n_angles):
        return _integrate_1d(angular_sum(n_angles, np.asarray), 0.0, radius, spec, floor)

    n_angles = min_angles
    prev = radial(n_angles)
    while True:
        n_angles *= 2
        value, error, magnitude = radial(n_angles)
        angular_err = abs(value - prev[0])
        if (
            angular_err <= 0.1 * spec.relative_tolerance * abs(value)
            or angular_err <= floor
        ):
            return QuadResult(value, error + angular_err)
        if n_angles >= max_angles:
            raise ConvergenceError(
                "integrate_disk_polar angular rule did not converge",
                value,
                error + angular_err,
            )
        prev = (value, error, magnitude)
