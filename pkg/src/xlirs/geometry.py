"""Surface geometry, node positions and exact node-to-element distances.

The reflecting surface lies on the y-z plane centred at the origin with its
normal along +x.  Elements sit at ``(0, i_y d, i_z d)`` for signed integer
indices ``|i_y| <= (m_y - 1)/2``, ``|i_z| <= (m_z - 1)/2``.  Angles are in
radians and lengths in meters throughout.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

# relative slack on the sqrt(A) <= d <= lambda/2 checks
_REL_SLACK = 1e-12


class Point3(NamedTuple):
    x: float
    y: float
    z: float


def _odd_positive(name, value):
    if isinstance(value, bool) or int(value) != value:
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}")
    if value % 2 == 0:
        raise ValidationError(f"{name} must be odd, got {value}")
    return value


def nearest_odd(x):
    """Nearest odd integer >= 1 to ``x``; exact ties go to the larger one."""
    if not x > 0:
        raise ValidationError(f"cannot round {x!r} to an element count")
    # L/d ratios carry float noise; snap it so exact ties stay ties
    x = round(x, 9)
    n = 2 * math.floor((x - 1.0) / 2.0 + 0.5) + 1
    return max(1, int(n))


@dataclass(frozen=True)
class IrsGeometry:
    """A uniform planar array of ``m_y x m_z`` reflecting elements."""

    m_y: int
    m_z: int
    spacing_d: float
    element_area_A: float
    wavelength: float

    def __post_init__(self):
        object.__setattr__(self, "m_y", _odd_positive("m_y", self.m_y))
        object.__setattr__(self, "m_z", _odd_positive("m_z", self.m_z))
        for name in ("spacing_d", "element_area_A", "wavelength"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {v!r}")
            object.__setattr__(self, name, v)
        if self.spacing_d > 0.5 * self.wavelength * (1 + _REL_SLACK):
            raise ValidationError(
                f"element spacing {self.spacing_d} exceeds half a wavelength ({0.5 * self.wavelength})"
            )
        if math.sqrt(self.element_area_A) > self.spacing_d * (1 + _REL_SLACK):
            raise ValidationError("element side sqrt(A) must not exceed the spacing d")

    @classmethod
    def from_lengths(cls, length_y, length_z, spacing_d, element_area_A, wavelength):
        """Geometry whose element counts are the nearest odd integers to L/d."""
        return cls(
            nearest_odd(length_y / spacing_d),
            nearest_odd(length_z / spacing_d),
            spacing_d,
            element_area_A,
            wavelength,
        )

    @property
    def n_elements(self):
        return self.m_y * self.m_z

    @property
    def length_y(self):
        return self.m_y * self.spacing_d

    @property
    def length_z(self):
        return self.m_z * self.spacing_d

    @property
    def occupation_ratio(self):
        """Array occupation ratio A / d^2."""
        return self.element_area_A / self.spacing_d**2

    @property
    def half_y(self):
        return (self.m_y - 1) // 2

    @property
    def half_z(self):
        return (self.m_z - 1) // 2

    def indices_y(self):
        return np.arange(-self.half_y, self.half_y + 1)

    def indices_z(self):
        return np.arange(-self.half_z, self.half_z + 1)

    def check_index(self, i_y, i_z):
        if abs(i_y) > self.half_y or abs(i_z) > self.half_z:
            raise IndexError(
                f"element index ({i_y}, {i_z}) outside "
                f"[-{self.half_y}, {self.half_y}] x [-{self.half_z}, {self.half_z}]"
            )


@dataclass(frozen=True)
class NodePosition:
    """A transmitter or receiver at spherical coordinates about the surface centre.

    ``zenith_theta`` is measured from +z, ``azimuth_phi`` from +x in the x-y
    plane.  Both open intervals keep the node strictly in front of the surface.
    """

    range_r: float
    zenith_theta: float
    azimuth_phi: float

    def __post_init__(self):
        r, th, ph = (float(v) for v in (self.range_r, self.zenith_theta, self.azimuth_phi))
        if not (math.isfinite(r) and r > 0):
            raise ValidationError(f"range must be positive, got {r!r}")
        if not 0.0 < th < math.pi:
            raise ValidationError(f"zenith angle must lie in (0, π), got {th!r}")
        if not -math.pi / 2 < ph < math.pi / 2:
            raise ValidationError(f"azimuth angle must lie in (-π/2, π/2), got {ph!r}")
        object.__setattr__(self, "range_r", r)
        object.__setattr__(self, "zenith_theta", th)
        object.__setattr__(self, "azimuth_phi", ph)
        if not self.cos_x > 0:
            raise ValidationError("node must lie strictly in front of the surface (x > 0)")

    # direction cosines along x, y and z
    @property
    def cos_x(self):
        return math.sin(self.zenith_theta) * math.cos(self.azimuth_phi)

    @property
    def cos_y(self):
        return math.sin(self.zenith_theta) * math.sin(self.azimuth_phi)

    @property
    def cos_z(self):
        return math.cos(self.zenith_theta)

    def epsilon(self, geom):
        """Element spacing relative to the node range, d / r."""
        return geom.spacing_d / self.range_r

    def mirrored(self):
        """The node reflected through the x axis: (cos_y, cos_z) -> (-cos_y, -cos_z)."""
        return NodePosition(self.range_r, math.pi - self.zenith_theta, -self.azimuth_phi)


def spherical_to_cartesian(node):
    r = node.range_r
    return Point3(r * node.cos_x, r * node.cos_y, r * node.cos_z)


def element_position(geom, i_y, i_z):
    geom.check_index(i_y, i_z)
    return Point3(0.0, i_y * geom.spacing_d, i_z * geom.spacing_d)


def distance_bracket(node, geom, i_y, i_z):
    """Squared distance to element (i_y, i_z) in units of the node range squared.

    Equals ``1 - 2 i_y eps cos_y - 2 i_z eps cos_z + (i_y^2 + i_z^2) eps^2``
    with ``eps = d / r``; works elementwise on index arrays.
    """
    eps = node.epsilon(geom)
    return 1.0 + eps * (eps * (i_y * i_y + i_z * i_z) - 2.0 * (i_y * node.cos_y + i_z * node.cos_z))


def element_distance(node, geom, i_y, i_z):
    """Exact distance from the node to the centre of element (i_y, i_z)."""
    geom.check_index(i_y, i_z)
    return node.range_r * math.sqrt(distance_bracket(node, geom, i_y, i_z))


def element_distance_direct(node, geom, i_y, i_z):
    """Same distance as a plain Euclidean norm of the difference vector."""
    w = element_position(geom, i_y, i_z)
    q = spherical_to_cartesian(node)
    return math.hypot(q.x - w.x, q.y - w.y, q.z - w.z)
