"""The omega and sigma distances, sigma-balls and quaternionic-analyticity regions.

Cross sections are described in the half plane ``(x, y) = (Re s, |Im s|)``
of a chosen slice.  Boundary curves are the hyperbola arcs ``H`` (bounding
the analyticity region of the omega part), ``K`` (bounding the region of the
slice disc, only on the slice of a nonreal center) and circles (sigma-ball
boundaries).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .quaternion import (
    ALIGN_TOL,
    ImaginaryUnit,
    Quaternion,
    alignment_deviation,
    imaginary_unit_of,
    same_slice,
)

BOUNDARY_REL_TOL = 1e-9
CURVE_RESIDUAL_TOL = 1e-9


class EmptyRegionError(ValueError):
    """Raised when a requested region (or its omega part) has no points."""


def omega(q: Quaternion, p: Quaternion) -> float:
    """``sqrt((Re q - Re p)^2 + (|Im q| + |Im p|)^2)``; symmetric and never below ``|q - p|``."""
    return math.hypot(q[0] - p[0], math.hypot(q[1], q[2], q[3]) + math.hypot(p[1], p[2], p[3]))


def sigma(
    q: Quaternion,
    p: Quaternion,
    realness_tol: Optional[float] = None,
    align_tol: float = ALIGN_TOL,
) -> float:
    """Euclidean distance on a shared complex line, :func:`omega` otherwise."""
    if same_slice(p, q, realness_tol, align_tol):
        return math.hypot(q[0] - p[0], q[1] - p[1], q[2] - p[2], q[3] - p[3])
    return omega(q, p)


def sigma_via_slice(q: Quaternion, p: Quaternion) -> float:
    """``max(|z - p|, |conj(z) - p|)`` with ``z`` the rotation of ``q`` onto the line of ``p``.

    Equals ``sigma(q, p)`` whenever ``q`` is off the line of ``p``; used as an
    independent cross check of the omega branch.
    """
    unit = imaginary_unit_of(p) or imaginary_unit_of(q)
    y = q.imag_norm()
    if unit is None:
        return abs(q - p)
    z = Quaternion(q[0]) + unit * y
    zb = z.conj()
    return max(abs(z - p), abs(zb - p))


class BranchInfo(NamedTuple):
    euclidean: float
    omega: float
    deviation: float


def sigma_branches(q: Quaternion, p: Quaternion) -> BranchInfo:
    """Both candidate values of sigma and how far ``q`` is from the line of ``p``."""
    return BranchInfo(abs(q - p), omega(q, p), alignment_deviation(p, q))


class Membership(enum.Enum):
    INSIDE_OMEGA = "inside_omega"
    INSIDE_SLICE_DISC = "inside_slice_disc"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"

    @property
    def inside(self) -> bool:
        return self in (Membership.INSIDE_OMEGA, Membership.INSIDE_SLICE_DISC)


@dataclass(frozen=True)
class SigmaBall:
    """The sigma-ball ``{q : sigma(q, center) < radius}``.

    ``slice`` is the unit of the complex line through the center, ``None``
    for a real center (every line qualifies).
    """

    center: Quaternion
    radius: float
    slice: Optional[ImaginaryUnit] = field(default=None)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"sigma-ball radius must be positive, got {self.radius}")
        center = Quaternion(*self.center)
        object.__setattr__(self, "center", center)
        unit = imaginary_unit_of(center)
        if unit is None:
            object.__setattr__(self, "slice", None)
        elif self.slice is None or not unit.same_line(self.slice):
            object.__setattr__(self, "slice", unit)

    @property
    def x0(self) -> float:
        return self.center[0]

    @property
    def y0(self) -> float:
        """``|Im p|``."""
        return self.center.imag_norm()

    @property
    def boundary_tol(self) -> float:
        return BOUNDARY_REL_TOL * max(1.0, self.radius)


def in_sigma_ball(ball: SigmaBall, s: Quaternion) -> Membership:
    """Classify ``s`` against ``ball = Omega(p, R) u B_I(p, R)``.

    Points within ``1e-9 max(1, R)`` of ``sigma(s, p) = R`` are ``BOUNDARY``.
    """
    p, r = ball.center, ball.radius
    sg = sigma(s, p)
    if abs(sg - r) <= ball.boundary_tol:
        return Membership.BOUNDARY
    if omega(s, p) < r:
        return Membership.INSIDE_OMEGA
    if same_slice(p, s) and abs(s - p) < r:
        return Membership.INSIDE_SLICE_DISC
    return Membership.OUTSIDE


def in_omega_ball(ball: SigmaBall, s: Quaternion) -> bool:
    return omega(s, ball.center) < ball.radius


def in_euclidean_ball(center: Quaternion, radius: float, s: Quaternion) -> bool:
    return abs(s - center) < radius


def omega_ball_nonempty(ball: SigmaBall) -> bool:
    return ball.radius > ball.y0


def omega_ball_contains_center(ball: SigmaBall) -> bool:
    return ball.radius > 2.0 * ball.y0


def in_analyticity_region_ball(radius: float, p: Quaternion) -> bool:
    """Membership of ``p`` in ``A(B(0, R)) = {2|Im p| < R - |p|}``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    return 2.0 * p.imag_norm() < radius - abs(p)


def _require_omega(ball: SigmaBall):
    if not omega_ball_nonempty(ball):
        raise EmptyRegionError(
            f"Omega(p, R) is empty: R = {ball.radius} <= |Im p| = {ball.y0}"
        )


def in_analyticity_region_sigma(ball: SigmaBall, s: Quaternion) -> bool:
    """Membership of ``s`` in ``A(Sigma(p, R))``, tested as ``2|Im s| < R - sigma(s, p)``.

    On the line of ``p`` the margin is ``R - |s - p|``; off it, ``R - omega(s, p)``.
    """
    _require_omega(ball)
    return 2.0 * s.imag_norm() < ball.radius - sigma(s, ball.center)


def in_analyticity_region_omega(ball: SigmaBall, s: Quaternion) -> bool:
    """Membership in ``A(Omega(p, R)) = {2|Im s| < R - omega(s, p)}``."""
    _require_omega(ball)
    return 2.0 * s.imag_norm() < ball.radius - omega(s, ball.center)


def in_analyticity_region_slice_disc(ball: SigmaBall, s: Quaternion) -> bool:
    """Membership in ``A(B_I(p, R))``: ``s`` on the line of ``p`` with ``2|Im s| < R - |s - p|``."""
    _require_omega(ball)
    if not same_slice(ball.center, s):
        return False
    return 2.0 * s.imag_norm() < ball.radius - abs(s - ball.center)


def analyticity_margin(ball: SigmaBall, s: Quaternion) -> float:
    """``R - sigma(s, p) - 2|Im s|``; positive inside ``A(Sigma(p, R))``."""
    return ball.radius - sigma(s, ball.center) - 2.0 * s.imag_norm()


# boundary curves ---------------------------------------------------------------


class RegionPoint(NamedTuple):
    x: float
    y: float
    curve: str  # "H", "K", "circle" or "none"
    inside: str  # "1", "0" or "boundary"


@dataclass(frozen=True)
class RegionSample:
    """Points of a ``(Re, |Im|)`` cross section in the slice ``slice``."""

    points: tuple
    slice: Optional[ImaginaryUnit] = None

    def curve(self, tag: str) -> list:
        return [pt for pt in self.points if pt.curve == tag]

    def lift(self, pt: RegionPoint, unit: Optional[Quaternion] = None) -> Quaternion:
        unit = unit if unit is not None else self.slice
        if unit is None:
            unit = Quaternion(0, 1, 0, 0)
        return Quaternion(pt.x) + unit * pt.y


def _hyperbola_h(ball: SigmaBall):
    # (x - x0)^2 - 3 (y - c)^2 + k = 0
    r, y0 = ball.radius, ball.y0
    return (y0 + 2.0 * r) / 3.0, (2.0 * y0 + r) ** 2 / 3.0


def _hyperbola_k(ball: SigmaBall):
    r, y0 = ball.radius, ball.y0
    return (2.0 * r - y0) / 3.0, (2.0 * y0 - r) ** 2 / 3.0


def curve_residual(ball: SigmaBall, curve: str, x: float, y: float, side: int = -1) -> float:
    """Residual of ``(x, y)`` in the defining equation of ``curve``.

    For ``"circle"`` the circle is centred at ``(x0, side * y0)``.
    """
    x0 = ball.x0
    if curve == "H":
        c, k = _hyperbola_h(ball)
        return (x - x0) ** 2 - 3.0 * (y - c) ** 2 + k
    if curve == "K":
        c, k = _hyperbola_k(ball)
        return (x - x0) ** 2 - 3.0 * (y - c) ** 2 + k
    if curve == "circle":
        return (x - x0) ** 2 + (y - side * ball.y0) ** 2 - ball.radius ** 2
    raise ValueError(f"unknown curve {curve!r}")


def _arc(x0: float, c: float, k: float, y_top: float, n: int, tag: str) -> list:
    ys = np.linspace(0.0, y_top, n)
    half = [math.sqrt(max(0.0, 3.0 * (y - c) ** 2 - k)) for y in ys]
    left = [RegionPoint(x0 - h, float(y), tag, "boundary") for y, h in zip(ys, half)]
    right = [RegionPoint(x0 + h, float(y), tag, "boundary") for y, h in zip(ys, half)]
    # one polyline: up the left branch, down the right one; the apex is shared
    return left + right[-2::-1]


def sample_boundary(ball: SigmaBall, slice_unit: Optional[ImaginaryUnit] = None, n_points: int = 64) -> RegionSample:
    """Sample the boundary of ``A(Sigma(p, R))`` in ``(Re, |Im|)`` coordinates.

    Returns the ``H`` arc (the boundary of ``A(Omega)``, and for a real center
    the whole boundary of ``A(B(p, R))``) and, when the center is nonreal, the
    ``K`` arc bounding ``A(B_I)`` on the ``+I`` side of the slice of ``p``.
    Both are parameterized uniformly in ``y``, solving for ``x`` in closed form.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    r, y0, x0 = ball.radius, ball.y0, ball.x0
    if not y0 < r:
        raise EmptyRegionError(f"no analyticity region: |Im p| = {y0} >= R = {r}")
    c, k = _hyperbola_h(ball)
    pts = _arc(x0, c, k, (r - y0) / 3.0, n_points, "H")
    if ball.slice is not None and y0 > 0.0:
        c, k = _hyperbola_k(ball)
        pts += _arc(x0, c, k, min(r - y0, (r + y0) / 3.0), n_points, "K")
    return RegionSample(tuple(pts), slice_unit)


def _slice_side(ball: SigmaBall, unit: Optional[ImaginaryUnit]) -> int:
    """+1 if ``unit`` equals the slice of the center, -1 otherwise (opposite side or off the line)."""
    if ball.slice is None or unit is None:
        return 0
    d = sum(a * b for a, b in zip(ball.slice[1:], unit[1:]))
    if unit.same_line(ball.slice) and d > 0:
        return 1
    return -1


def sample_sigma_ball_boundary(ball: SigmaBall, slice_unit: ImaginaryUnit, n_points: int = 128) -> RegionSample:
    """The boundary circle of ``Sigma(p, R)`` inside the ``y >= 0`` half of the slice ``slice_unit``."""
    side = _slice_side(ball, slice_unit)
    cy = side * ball.y0 if side else 0.0
    r = ball.radius
    pts = []
    for t in np.linspace(0.0, math.pi, 2 * n_points):
        x = ball.x0 + r * math.cos(t)
        y = cy + r * math.sin(t)
        if y >= 0.0:
            pts.append(RegionPoint(float(x), float(y), "circle", "boundary"))
    return RegionSample(tuple(pts), slice_unit)


def circle_side(ball: SigmaBall, slice_unit: ImaginaryUnit) -> int:
    side = _slice_side(ball, slice_unit)
    return side if side else -1


def cross_section(
    kind: str,
    ball: SigmaBall,
    slice_unit: ImaginaryUnit,
    resolution: int = 200,
    extent: Optional[tuple] = None,
) -> list:
    """Membership grid for ``kind`` in ``{"sigma-ball", "A-ball", "A-sigma"}``.

    ``A-ball`` uses ``A(B(x0, R))`` for a real center ``x0``.
    """
    if extent is None:
        x_lo, x_hi = ball.x0 - 1.1 * ball.radius, ball.x0 + 1.1 * ball.radius
        y_hi = ball.y0 + 1.1 * ball.radius
        extent = (x_lo, x_hi, 0.0, y_hi)
    x_lo, x_hi, y_lo, y_hi = extent
    if kind == "A-ball":
        shift = Quaternion(ball.x0)

        def test(s):
            return in_analyticity_region_ball(ball.radius, s - shift)

    elif kind == "A-sigma":
        _require_omega(ball)

        def test(s):
            return in_analyticity_region_sigma(ball, s)

    elif kind == "sigma-ball":

        def test(s):
            return in_sigma_ball(ball, s).inside

    else:
        raise ValueError(f"unknown region kind {kind!r}")
    out = []
    for y in np.linspace(y_lo, y_hi, resolution):
        for x in np.linspace(x_lo, x_hi, resolution):
            s = Quaternion(float(x)) + slice_unit * float(y)
            out.append(RegionPoint(float(x), float(y), "none", "1" if test(s) else "0"))
    return out
