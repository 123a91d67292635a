"""Representation formula and finite-difference regularity checks on slices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Protocol

from .quaternion import ONE, ImaginaryUnit, Quaternion
from .series import DomainError, RegularSeries, evaluate, formal_derivative

DEFAULT_REL_STEP = 1e-4


class Evaluable(Protocol):
    """Point evaluation plus a declared domain."""

    def __call__(self, q: Quaternion) -> Quaternion: ...

    def in_domain(self, q: Quaternion) -> bool: ...

    def contains_sphere(self, x: float, y: float) -> bool: ...


class SliceFunction:
    """Wrap a plain callable so the checks in this module can use it.

    ``domain`` is a predicate on points; ``None`` means all of H.  The sphere
    test samples the three coordinate units and their negatives, which is
    enough for the hand-written axially symmetric domains used in tests.
    """

    def __init__(self, func: Callable[[Quaternion], Quaternion], domain: Optional[Callable[[Quaternion], bool]] = None):
        self.func = func
        self.domain = domain

    def __call__(self, q):
        return self.func(q)

    def in_domain(self, q) -> bool:
        return True if self.domain is None else bool(self.domain(q))

    def contains_sphere(self, x, y) -> bool:
        if self.domain is None:
            return True
        units = [Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)]
        return all(self.domain(Quaternion(x) + u * (s * y)) for u in units for s in (1.0, -1.0))


@dataclass(frozen=True)
class SlicePoint:
    """``x + unit * y`` with ``y >= 0``."""

    x: float
    y: float
    unit: ImaginaryUnit

    def __post_init__(self):
        if self.y < 0:
            object.__setattr__(self, "y", -self.y)
            object.__setattr__(self, "unit", -self.unit)

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion(self.x) + self.unit * self.y


def _require_sphere(f: Evaluable, x: float, y: float):
    if not f.contains_sphere(x, y):
        raise DomainError(f"the sphere {x} + S*{y} leaves the domain of f")


def split_bc(f: Evaluable, x: float, y: float, unit: ImaginaryUnit) -> tuple[Quaternion, Quaternion]:
    """``(b, c)`` with ``f(x + I y) = b + I c``, from the values at ``x +- I y``."""
    _require_sphere(f, x, y)
    plus = f(Quaternion(x) + unit * y)
    minus = f(Quaternion(x) - unit * y)
    b = (plus + minus) * 0.5
    c = -unit * (plus - minus) * 0.5
    return b, c


def representation_eval(f: Evaluable, x: float, y: float, unit_i: ImaginaryUnit, unit_j: ImaginaryUnit) -> Quaternion:
    """``f(x + J y)`` reconstructed from the slice of ``I``: ``(1-JI)/2 f(x+Iy) + (1+JI)/2 f(x-Iy)``."""
    _require_sphere(f, x, y)
    ji = unit_j * unit_i
    plus = f(Quaternion(x) + unit_i * y)
    minus = f(Quaternion(x) - unit_i * y)
    return ((ONE - ji) * plus + (ONE + ji) * minus) * 0.5


def _step(pt: SlicePoint, h: Optional[float]) -> float:
    if h is not None:
        if not h > 0:
            raise ValueError("h must be positive")
        return h
    return DEFAULT_REL_STEP * max(1.0, math.hypot(pt.x, pt.y))


def _partials(f: Evaluable, unit: ImaginaryUnit, x: float, y: float, h: float):
    """Central differences of ``t -> f(x + I t)`` in ``x`` and ``y`` (``y`` may be signed)."""
    stencil = [
        Quaternion(x + h) + unit * y,
        Quaternion(x - h) + unit * y,
        Quaternion(x) + unit * (y + h),
        Quaternion(x) + unit * (y - h),
    ]
    for s in stencil:
        if not f.in_domain(s):
            raise DomainError(f"finite-difference stencil point {s!r} is outside the domain")
    fx1, fx0, fy1, fy0 = (f(s) for s in stencil)
    return (fx1 - fx0) * (0.5 / h), (fy1 - fy0) * (0.5 / h)


def _on_slice(pt: SlicePoint, unit: ImaginaryUnit) -> tuple[float, float]:
    # grid points are given on the slice of ``unit``; a point stored with -unit flips y
    d = sum(a * b for a, b in zip(pt.unit[1:], unit[1:]))
    return pt.x, pt.y if d >= 0 else -pt.y


def dbar_check(f: Evaluable, unit: ImaginaryUnit, grid: Iterable[SlicePoint], h: Optional[float] = None) -> float:
    """Largest ``|1/2 (d/dx + I d/dy) f_I|`` over ``grid`` by central differences.

    Zero up to ``O(h^2)`` for slice regular ``f``.
    """
    worst = 0.0
    for pt in grid:
        x, y = _on_slice(pt, unit)
        step = _step(pt, h)
        dx, dy = _partials(f, unit, x, y, step)
        worst = max(worst, abs((dx + unit * dy) * 0.5))
    return worst


def slice_derivative(f: Evaluable, unit: ImaginaryUnit, x: float, y: float, h: float) -> Quaternion:
    """Central-difference ``1/2 (d/dx - I d/dy) f_I`` at ``x + I y``."""
    dx, dy = _partials(f, unit, x, y, h)
    return (dx - unit * dy) * 0.5


def slice_derivative_check(f: RegularSeries, unit: ImaginaryUnit, grid: Iterable[SlicePoint], h: Optional[float] = None) -> float:
    """Largest deviation between the numerical slice derivative and the formal derivative."""
    fp = formal_derivative(f)
    worst = 0.0
    for pt in grid:
        x, y = _on_slice(pt, unit)
        step = _step(pt, h)
        numeric = slice_derivative(f, unit, x, y, step)
        exact = evaluate(fp, Quaternion(x) + unit * y).value
        worst = max(worst, abs(numeric - exact))
    return worst


def observed_order(residuals: list[float]) -> list[float]:
    """``log2`` of successive residual ratios along an h-halving ladder."""
    return [math.log2(a / b) for a, b in zip(residuals, residuals[1:])]
