"""Reflection-circle configurations and their boundary-line reduction.

A group is specified by L >= 3 circles orthogonal to the unit circle with
pairwise disjoint closed discs.  Inversion in each circle restricts to the
unit circle; pushing that action through the Cayley transform
z -> i(1+z)/(1-z) turns each inversion into a real fractional-linear map
of the line, represented by a 2x2 matrix of determinant -1, together with
the interval cut out of the line by the circle.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    CayleyPoleInsideDisc,
    DisjointnessViolation,
    InvalidAngle,
    OrthogonalityViolation,
)

ORTHO_TOL = 1e-12
DISJOINT_TOL = 1e-12
INVOLUTION_TOL = 1e-10

# The Cayley transform z -> i(1+z)/(1-z) sends the unit disc to the upper
# half plane and the unit circle to the real line; z = 1 goes to infinity.
CAYLEY_POLE = 1.0 + 0.0j


@dataclass(frozen=True)
class Circle:
    """Circle orthogonal to the unit circle, in disc-model coordinates."""

    center: complex
    radius: float

    def orthogonality_residual(self) -> float:
        return abs(abs(self.center) ** 2 - (1.0 + self.radius**2))

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) <= self.radius


@dataclass(frozen=True)
class GroupConfig:
    """Validated reflection-circle configuration.

    Use :func:`build_symmetric` or :func:`group_from_circles` instead of
    constructing directly; both enforce the invariants.
    """

    circles: tuple[Circle, ...]
    angle_degrees: float | None = None
    rotation_offset: float = 0.0

    @property
    def num_circles(self) -> int:
        return len(self.circles)

    def fingerprint(self) -> str:
        """Hash of the exact circle data, used to key orbit-table caches."""
        h = hashlib.sha256(b"szeta-group-v1")
        for c in self.circles:
            for x in (c.center.real, c.center.imag, c.radius):
                h.update(float(x).hex().encode())
                h.update(b"|")
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class BoundaryMap:
    """Real 2x2 matrix acting on the line by x -> (ax+b)/(cx+d)."""

    a: float
    b: float
    c: float
    d: float
    det_sign: int

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def apply(self, x):
        return (self.a * x + self.b) / (self.c * x + self.d)

    def derivative(self, x):
        det = self.a * self.d - self.b * self.c
        return det / (self.c * x + self.d) ** 2


@dataclass(frozen=True)
class BoundaryInterval:
    """Image on the real line of the arc cut by one circle."""

    x1: float
    x2: float
    owner: int

    @property
    def center(self) -> float:
        return 0.5 * (self.x1 + self.x2)

    @property
    def radius(self) -> float:
        return 0.5 * (self.x2 - self.x1)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.x1 - slack <= x <= self.x2 + slack


@dataclass(frozen=True)
class GroupDiagnostics:
    """Result of :func:`validate`; purely informational."""

    orthogonality_residuals: tuple[float, ...]
    disc_gaps: tuple[float, ...]
    interval_gaps: tuple[float, ...]
    pole_outside_discs: bool
    passed: bool


def build_symmetric(theta_degrees: float, num_circles: int = 3,
                    rotation_offset: float | None = None) -> GroupConfig:
    """Build L symmetrically placed circles orthogonal to the unit circle.

    Each disc cuts an arc of subtended angle theta out of the unit circle,
    which fixes radius tan(theta/2) and center distance sec(theta/2).  The
    default rotation offset pi/L keeps every arc away from the Cayley pole
    at z = 1.
    """
    L = int(num_circles)
    if L < 3:
        raise InvalidAngle(f"need at least 3 circles, got {L}")
    if not (0.0 < theta_degrees < 180.0):
        raise InvalidAngle(
            f"theta must lie in (0, 180) degrees, got {theta_degrees}")
    theta = math.radians(theta_degrees)
    if rotation_offset is None:
        rotation_offset = math.pi / L
    dist = 1.0 / math.cos(theta / 2.0)
    radius = math.tan(theta / 2.0)
    circles = tuple(
        Circle(dist * cmath.exp(1j * (rotation_offset + 2.0 * math.pi * k / L)),
               radius)
        for k in range(L)
    )
    config = GroupConfig(circles, angle_degrees=float(theta_degrees),
                         rotation_offset=float(rotation_offset))
    _check_disjoint(config)
    return config


def group_from_circles(circles: Sequence[tuple[float, float, float]]) -> GroupConfig:
    """Build a configuration from explicit (center_re, center_im, radius)."""
    if len(circles) < 3:
        raise InvalidAngle(f"need at least 3 circles, got {len(circles)}")
    built = []
    for re, im, r in circles:
        if r <= 0:
            raise InvalidAngle(f"radius must be positive, got {r}")
        c = Circle(complex(re, im), float(r))
        res = c.orthogonality_residual()
        if res > ORTHO_TOL:
            raise OrthogonalityViolation(
                f"circle at {c.center} radius {c.radius}: "
                f"|center|^2 - 1 - radius^2 off by {res:.3e}")
        built.append(c)
    config = GroupConfig(tuple(built))
    _check_disjoint(config)
    return config


def _check_disjoint(config: GroupConfig) -> None:
    cs = config.circles
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            gap = abs(cs[i].center - cs[j].center) - (cs[i].radius + cs[j].radius)
            if gap <= DISJOINT_TOL:
                raise DisjointnessViolation(
                    f"closed discs {i} and {j} overlap (gap {gap:.3e})")


def cayley(z: complex) -> complex:
    """Disc-to-half-plane Cayley transform; real on the unit circle."""
    return 1j * (1.0 + z) / (1.0 - z)


def _arc_endpoint_angles(circle: Circle) -> tuple[float, float]:
    # Intersections of |z - c| = r with |z| = 1 are e^{i(alpha +/- w)}
    # where alpha = arg c and cos w = 1/|c| (orthogonality).
    alpha = cmath.phase(circle.center)
    w = math.acos(1.0 / abs(circle.center))
    return alpha - w, alpha + w


def to_boundary_maps(config: GroupConfig) -> tuple[tuple[BoundaryMap, ...],
                                                   tuple[BoundaryInterval, ...]]:
    """Reduce each circle inversion to its 2x2 line matrix and interval.

    The interval endpoints are the Cayley images of the arc endpoints; the
    inversion in the image circle (center p, radius rho on the real line)
    is [[p, rho^2 - p^2], [1, -p]] / rho, with determinant -1.
    """
    maps = []
    intervals = []
    for k, circle in enumerate(config.circles):
        if circle.contains(CAYLEY_POLE):
            raise CayleyPoleInsideDisc(
                f"disc {k} contains the Cayley pole z = 1")
        phi_a, phi_b = _arc_endpoint_angles(circle)
        xs = sorted((cayley(cmath.exp(1j * phi_a)).real,
                     cayley(cmath.exp(1j * phi_b)).real))
        x1, x2 = xs
        p = 0.5 * (x1 + x2)
        rho = 0.5 * (x2 - x1)
        maps.append(BoundaryMap(a=p / rho, b=(rho * rho - p * p) / rho,
                                c=1.0 / rho, d=-p / rho, det_sign=-1))
        intervals.append(BoundaryInterval(x1=x1, x2=x2, owner=k))
    return tuple(maps), tuple(intervals)


def generator_matrices(config: GroupConfig) -> np.ndarray:
    """All generator matrices stacked as an (L, 2, 2) array."""
    maps, _ = to_boundary_maps(config)
    return np.array([m.matrix for m in maps])


def validate(config: GroupConfig) -> GroupDiagnostics:
    """Diagnostic report on the configuration invariants; never raises."""
    cs = config.circles
    ortho = tuple(c.orthogonality_residual() for c in cs)
    disc_gaps = tuple(
        abs(cs[i].center - cs[j].center) - (cs[i].radius + cs[j].radius)
        for i in range(len(cs)) for j in range(i + 1, len(cs)))
    pole_ok = not any(c.contains(CAYLEY_POLE) for c in cs)
    interval_gaps: tuple[float, ...] = ()
    if pole_ok:
        try:
            _, intervals = to_boundary_maps(config)
            spans = sorted((iv.x1, iv.x2) for iv in intervals)
            interval_gaps = tuple(
                spans[i + 1][0] - spans[i][1] for i in range(len(spans) - 1))
        except CayleyPoleInsideDisc:  # pragma: no cover - guarded above
            pole_ok = False
    passed = (
        pole_ok
        and all(r <= ORTHO_TOL for r in ortho)
        and all(g > DISJOINT_TOL for g in disc_gaps)
        and all(g > 0.0 for g in interval_gaps)
    )
    return GroupDiagnostics(
        orthogonality_residuals=ortho,
        disc_gaps=disc_gaps,
        interval_gaps=interval_gaps,
        pole_outside_discs=pole_ok,
        passed=passed,
    )
