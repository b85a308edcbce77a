"""Element-wise channel gains, channel vectors, phase profiles and the exact SNR.

SNR values are analytic: the transmit power and the receiver noise only enter
through their ratio ``pbar``.
"""

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .geometry import (
    IrsGeometry,
    NodePosition,
    distance_bracket,
    element_distance,
    element_distance_direct,
    spherical_to_cartesian,
)

# elements per summation chunk; chunk boundaries are fixed by the geometry
# alone so the result does not depend on the worker count
CHUNK_ELEMENTS = 1 << 18
# explicit channel vectors are only built up to this many elements
MAX_VECTOR_ELEMENTS = 10**6


class Model(enum.Enum):
    EXACT_SUM = "exact-sum"
    INTEGRAL_UPA = "integral"
    BOUND_LOWER = "bound-lower"
    BOUND_UPPER = "bound-upper"
    BORESIGHT_CLOSED = "boresight"
    ASYMPTOTIC_UPA = "asymptotic"
    ULA_INTEGRAL = "ula-integral"
    ULA_CLOSED = "ula-closed"
    ULA_ASYMPTOTIC = "ula-asymptotic"
    UPW = "upw"


@dataclass(frozen=True)
class SnrEstimate:
    value: float
    model: Model
    diagnostics: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValidationError(f"SNR must be nonnegative, got {self.value!r}")
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    @property
    def db(self):
        return 10.0 * math.log10(self.value) if self.value > 0 else -math.inf


def to_db(value):
    return 10.0 * math.log10(value)


def from_db(value_db):
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class Scenario:
    geom: IrsGeometry
    tx: NodePosition
    rx: NodePosition
    transmit_snr_pbar: float

    def __post_init__(self):
        p = float(self.transmit_snr_pbar)
        if not (math.isfinite(p) and p > 0):
            raise ValidationError(f"transmit SNR must be positive, got {p!r}")
        object.__setattr__(self, "transmit_snr_pbar", p)

    @property
    def distance_ratio(self):
        """min(r_tx, r_rx) / max(r_tx, r_rx), always in (0, 1]."""
        a, b = self.tx.range_r, self.rx.range_r
        return min(a, b) / max(a, b)

    def swapped(self):
        return Scenario(self.geom, self.rx, self.tx, self.transmit_snr_pbar)

    def normalized(self):
        """The same link with the nearer node as transmitter."""
        return self.swapped() if self.tx.range_r > self.rx.range_r else self

    def with_geometry(self, geom):
        return Scenario(geom, self.tx, self.rx, self.transmit_snr_pbar)


@dataclass(frozen=True)
class PhaseProfile:
    """Per-element phase shifts in [0, 2pi), shaped (m_z, m_y)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.mod(np.asarray(self.values, dtype=float), 2.0 * math.pi)
        if v.ndim != 2:
            raise ValidationError("phase profile must be a 2-D (m_z, m_y) array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def matches(self, geom):
        return self.values.shape == (geom.m_z, geom.m_y)


def _grid(geom):
    iz = geom.indices_z()[:, None].astype(float)
    iy = geom.indices_y()[None, :].astype(float)
    return iy, iz


def element_gain(node, geom, i_y, i_z):
    """Power gain between a node and one element (free-space loss x projected aperture)."""
    geom.check_index(i_y, i_z)
    return _gain(node, geom, float(i_y), float(i_z))


def _gain(node, geom, iy, iz):
    bracket = distance_bracket(node, geom, iy, iz)
    return geom.element_area_A * node.cos_x / (4.0 * math.pi * node.range_r**2 * bracket**1.5)


def _wavelength_fraction(node, geom, iy, iz):
    # distance / wavelength reduced mod 1, so phases stay accurate for long links
    dist = node.range_r * np.sqrt(distance_bracket(node, geom, iy, iz))
    return np.mod(dist / geom.wavelength, 1.0)


def _check_vector_size(geom):
    if geom.n_elements > MAX_VECTOR_ELEMENTS:
        raise ValidationError(
            f"explicit vectors are limited to {MAX_VECTOR_ELEMENTS} elements; "
            f"this geometry has {geom.n_elements}"
        )


def channel_vector(node, geom):
    """Complex node-to-surface channel, row-major with i_z outer and i_y inner."""
    _check_vector_size(geom)
    iy, iz = _grid(geom)
    amp = np.sqrt(_gain(node, geom, iy, iz))
    phase = -2.0 * math.pi * _wavelength_fraction(node, geom, iy, iz)
    return (amp * np.exp(1j * phase)).ravel()


def optimal_phases(scenario):
    """Phase shifts that co-phase every reflected path at the receiver."""
    geom = scenario.geom
    _check_vector_size(geom)
    iy, iz = _grid(geom)
    frac = _wavelength_fraction(scenario.tx, geom, iy, iz) + _wavelength_fraction(
        scenario.rx, geom, iy, iz
    )
    return PhaseProfile(2.0 * math.pi * np.mod(frac, 1.0))


def composite_phases(scenario, phases):
    """Phase of each reflected path g * exp(j theta) * h, reduced to (-pi, pi]."""
    geom = scenario.geom
    iy, iz = _grid(geom)
    frac = _wavelength_fraction(scenario.tx, geom, iy, iz) + _wavelength_fraction(
        scenario.rx, geom, iy, iz
    )
    total = phases.values - 2.0 * math.pi * frac
    return np.angle(np.exp(1j * total))


def snr_with_phases(scenario, phases):
    """Received SNR |sum g exp(j theta) h|^2 * pbar for an arbitrary profile."""
    geom = scenario.geom
    if not phases.matches(geom):
        raise ValidationError(
            f"phase profile shape {phases.values.shape} does not match ({geom.m_z}, {geom.m_y})"
        )
    _check_vector_size(geom)
    iy, iz = _grid(geom)
    amp = np.sqrt(_gain(scenario.tx, geom, iy, iz) * _gain(scenario.rx, geom, iy, iz))
    ang = composite_phases(scenario, phases)
    re = math.fsum((amp * np.cos(ang)).ravel().tolist())
    im = math.fsum((amp * np.sin(ang)).ravel().tolist())
    return SnrEstimate((re * re + im * im) * scenario.transmit_snr_pbar, Model.EXACT_SUM)


def worker_count(threads=None):
    """Resolve a worker count; ``None`` reads XLIRS_THREADS (0 or unset = auto)."""
    if threads is None:
        raw = os.environ.get("XLIRS_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValidationError(f"XLIRS_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValidationError("thread count must be >= 0")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def _chunk_rows(geom):
    rows = max(1, CHUNK_ELEMENTS // geom.m_y)
    iz = geom.indices_z()
    return [iz[i : i + rows] for i in range(0, iz.size, rows)]


def _chunk_sum(scenario, rows):
    tx, rx, geom = scenario.tx, scenario.rx, scenario.geom
    iy = geom.indices_y()[None, :].astype(float)
    iz = rows[:, None].astype(float)
    bq = distance_bracket(tx, geom, iy, iz)
    bp = distance_bracket(rx, geom, iy, iz)
    terms = (bq * bp) ** -0.75
    return math.fsum(terms.ravel().tolist())


def amplitude_sum(scenario, threads=None):
    """Sum over all elements of [bracket_tx * bracket_rx]^(-3/4).

    Each chunk is summed with ``math.fsum`` (exactly rounded), and the chunk
    totals are combined the same way, so the result is identical for any
    number of workers.
    """
    chunks = _chunk_rows(scenario.geom)
    n = min(worker_count(threads), len(chunks))
    if n <= 1:
        partial = [_chunk_sum(scenario, rows) for rows in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            partial = list(pool.map(lambda rows: _chunk_sum(scenario, rows), chunks))
    return math.fsum(partial)


def near_field_prefactor(scenario):
    """A^2 pbar cos_x,tx cos_x,rx / (16 pi^2 r_tx^2 r_rx^2)."""
    tx, rx, geom = scenario.tx, scenario.rx, scenario.geom
    return (
        geom.element_area_A**2
        * scenario.transmit_snr_pbar
        * tx.cos_x
        * rx.cos_x
        / (16.0 * math.pi**2 * tx.range_r**2 * rx.range_r**2)
    )


def snr_exact_sum(scenario, threads=None):
    """Maximum SNR with optimal phases, summed element by element."""
    s = amplitude_sum(scenario, threads)
    return SnrEstimate(near_field_prefactor(scenario) * s * s, Model.EXACT_SUM)


def snr_exact_sum_direct(scenario):
    """Reference path: sum of sqrt(a*b) with gains from explicit Euclidean distances.

    Loops in Python, so it is meant for small grids in tests and validation.
    """
    geom = scenario.geom
    terms = []
    for i_z in geom.indices_z():
        for i_y in geom.indices_y():
            a = _gain_from_distance(scenario.tx, geom, int(i_y), int(i_z))
            b = _gain_from_distance(scenario.rx, geom, int(i_y), int(i_z))
            terms.append(math.sqrt(a * b))
    s = math.fsum(terms)
    return s * s * scenario.transmit_snr_pbar


def _gain_from_distance(node, geom, i_y, i_z):
    dist = element_distance_direct(node, geom, i_y, i_z)
    q = spherical_to_cartesian(node)
    # projected aperture: x-component of the unit vector from element to node
    return geom.element_area_A * (q.x / dist) / (4.0 * math.pi * dist * dist)


__all__ = [
    "Model",
    "SnrEstimate",
    "Scenario",
    "PhaseProfile",
    "element_gain",
    "element_distance",
    "channel_vector",
    "optimal_phases",
    "snr_with_phases",
    "snr_exact_sum",
    "amplitude_sum",
]
