"""Quaternion arithmetic and slice utilities.

A quaternion is stored as an immutable 4-tuple ``(w, x, y, z)`` standing for
``w + x i + y j + z k``.  Besides the division-algebra operations this module
knows about the complex lines ``L_I = R + I R`` through the real axis: which
unit ``I`` a point lies on, whether two points share a line, and how to move
between a line and ordinary Python complex numbers.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, NamedTuple, Optional

import numpy as np

ALIGN_TOL = 1e-10
REALNESS_REL_TOL = 1e-12
UNIT_TOL = 1e-12


class ZeroDivisionQuaternionError(ZeroDivisionError):
    """Raised when inverting the zero quaternion."""


class ArithmeticConsistencyError(ArithmeticError):
    """Raised when the component-recovery self test finds a nonreal residue."""


class _QuaternionBase(NamedTuple):
    w: float
    x: float
    y: float
    z: float


def _make(w, x, y, z):
    return tuple.__new__(Quaternion, (w, x, y, z))


class Quaternion(_QuaternionBase):
    """Immutable quaternion ``w + x i + y j + z k``.

    Real scalars mix freely with quaternions in ``+``, ``-``, ``*`` and ``/``
    (division only by a real scalar or, on the right, by a quaternion).
    """

    __slots__ = ()

    def __new__(cls, w=0.0, x=0.0, y=0.0, z=0.0):
        return tuple.__new__(cls, (float(w), float(x), float(y), float(z)))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, tuple):
            a, b, c, d = self
            e, f, g, h = other
            return _make(a + e, b + f, c + g, d + h)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _make(self[0] + other, self[1], self[2], self[3])
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, tuple):
            a, b, c, d = self
            e, f, g, h = other
            return _make(a - e, b - f, c - g, d - h)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _make(self[0] - other, self[1], self[2], self[3])
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _make(other - self[0], -self[1], -self[2], -self[3])
        return NotImplemented

    def __neg__(self):
        return _make(-self[0], -self[1], -self[2], -self[3])

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, tuple):
            a1, b1, c1, d1 = self
            a2, b2, c2, d2 = other
            return _make(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _make(self[0] * other, self[1] * other, self[2] * other, self[3] * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _make(other * self[0], other * self[1], other * self[2], other * self[3])
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, tuple):
            return self * inverse(other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _make(self[0] / other, self[1] / other, self[2] / other, self[3] / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return inverse(self) * other
        return NotImplemented

    def __pow__(self, n: int):
        return power(self, n)

    def __abs__(self) -> float:
        return math.hypot(*self)

    # accessors --------------------------------------------------------------

    @property
    def real(self) -> float:
        return self[0]

    @property
    def imag(self) -> "Quaternion":
        return _make(0.0, self[1], self[2], self[3])

    def imag_norm(self) -> float:
        return math.hypot(self[1], self[2], self[3])

    def conj(self) -> "Quaternion":
        return _make(self[0], -self[1], -self[2], -self[3])

    def norm2(self) -> float:
        a, b, c, d = self
        return a * a + b * b + c * c + d * d

    def to_json(self) -> list:
        return [float(v) for v in self]

    @classmethod
    def from_json(cls, data) -> "Quaternion":
        """Parse ``[w, x, y, z]`` (a list or a JSON string)."""
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            return cls(data)
        if not isinstance(data, (list, tuple)) or len(data) != 4:
            raise ValueError(f"expected a 4-array [w, x, y, z], got {data!r}")
        for v in data:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"quaternion component {v!r} is not a number")
        return cls(*data)

    def __repr__(self):
        return f"Quaternion({self[0]!r}, {self[1]!r}, {self[2]!r}, {self[3]!r})"

    def __str__(self):
        a, b, c, d = self
        return f"{a:.17g}{b:+.17g}i{c:+.17g}j{d:+.17g}k"


ZERO = Quaternion(0.0)
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


class ImaginaryUnit(Quaternion):
    """A purely imaginary quaternion of modulus one, i.e. an element of the unit sphere.

    ``ImaginaryUnit(0, 0, 1, 0)`` validates its input; use :meth:`normalize`
    to build one from an arbitrary nonzero imaginary direction.
    """

    __slots__ = ()

    def __new__(cls, w=0.0, x=0.0, y=0.0, z=0.0):
        self = tuple.__new__(cls, (float(w), float(x), float(y), float(z)))
        if abs(self[0]) > UNIT_TOL or abs(math.hypot(x, y, z) - 1.0) > UNIT_TOL:
            raise ValueError(f"{tuple(self)} is not a unit imaginary quaternion")
        return self

    @classmethod
    def normalize(cls, v) -> "ImaginaryUnit":
        _, x, y, z = v
        n = math.hypot(x, y, z)
        if n == 0.0:
            raise ValueError("cannot normalize a real quaternion to an imaginary unit")
        return tuple.__new__(cls, (0.0, x / n, y / n, z / n))

    @property
    def direction(self) -> Quaternion:
        return _make(*self)

    def __neg__(self):
        return tuple.__new__(ImaginaryUnit, (0.0, -self[1], -self[2], -self[3]))

    def same_line(self, other: "ImaginaryUnit", align_tol: float = ALIGN_TOL) -> bool:
        """True when ``L_self == L_other``; a unit and its negation give the same line."""
        return _aligned(self[1], self[2], self[3], other[1], other[2], other[3], align_tol) != 0

    def frame(self) -> tuple["ImaginaryUnit", "ImaginaryUnit"]:
        """Return units ``(J, K)`` such that ``(self, J, K)`` is right handed and ``self*J == K``."""
        _, a, b, c = self
        # cross with the basis axis least aligned with self
        ax = min(range(3), key=lambda t: abs((a, b, c)[t]))
        e = [0.0, 0.0, 0.0]
        e[ax] = 1.0
        u = (b * e[2] - c * e[1], c * e[0] - a * e[2], a * e[1] - b * e[0])
        jn = ImaginaryUnit.normalize((0.0, *u))
        _, d, f, g = jn
        kk = ImaginaryUnit.normalize((0.0, b * g - c * f, c * d - a * g, a * f - b * d))
        return jn, kk


def multiply(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a b``."""
    return a * b


def inverse(q: Quaternion) -> Quaternion:
    n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]
    if n2 == 0.0:
        raise ZeroDivisionQuaternionError("the zero quaternion has no inverse")
    return _make(q[0] / n2, -q[1] / n2, -q[2] / n2, -q[3] / n2)


def power(q: Quaternion, n: int) -> Quaternion:
    """``q**n`` by repeated squaring; negative ``n`` inverts first."""
    if n < 0:
        return power(inverse(q), -n)
    result = ONE
    base = q
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def recover_components(q: Quaternion) -> tuple[float, float, float, float]:
    """Recover ``(x0, x1, x2, x3)`` from ``q`` using only quaternion products.

    Uses ``x0 = (q - iqi - jqj - kqk)/4`` and its three analogues.  This is a
    self test of the multiplication table, not an accessor: each intermediate
    must be a real multiple of the unit it is divided by.
    """
    iqi = I * q * I
    jqj = J * q * J
    kqk = K * q * K
    scale = max(1.0, abs(q))
    parts = (
        (q - iqi - jqj - kqk, ONE),
        (q - iqi + jqj + kqk, I),
        (q + iqi - jqj + kqk, J),
        (q + iqi + jqj - kqk, K),
    )
    out = []
    for num, unit in parts:
        s = inverse(unit * 4.0) * num
        if s.imag_norm() > 1e-10 * scale:
            raise ArithmeticConsistencyError(
                f"nonreal residue {s.imag_norm():.3e} recovering components of {q!r}"
            )
        out.append(s[0])
    return tuple(out)


def _realness_tol(q, realness_tol: Optional[float]) -> float:
    if realness_tol is not None:
        return realness_tol
    return REALNESS_REL_TOL * max(1.0, abs(q))


def is_real(q: Quaternion, realness_tol: Optional[float] = None) -> bool:
    return q.imag_norm() <= _realness_tol(q, realness_tol)


def imaginary_unit_of(q: Quaternion, realness_tol: Optional[float] = None) -> Optional[ImaginaryUnit]:
    """The unit ``I`` with ``q`` on ``L_I``, or ``None`` when ``q`` counts as real."""
    if q.imag_norm() <= _realness_tol(q, realness_tol):
        return None
    return ImaginaryUnit.normalize(q)


def _aligned(a1, b1, c1, a2, b2, c2, align_tol) -> int:
    """+1 parallel, -1 antiparallel, 0 otherwise; inputs need not be normalized."""
    n1 = math.hypot(a1, b1, c1)
    n2 = math.hypot(a2, b2, c2)
    u1, v1, w1 = a1 / n1, b1 / n1, c1 / n1
    u2, v2, w2 = a2 / n2, b2 / n2, c2 / n2
    if math.hypot(u1 - u2, v1 - v2, w1 - w2) <= align_tol:
        return 1
    if math.hypot(u1 + u2, v1 + v2, w1 + w2) <= align_tol:
        return -1
    return 0


def alignment_deviation(p: Quaternion, q: Quaternion) -> float:
    """``min ||u_p - u_q||, ||u_p + u_q||`` for the normalized imaginary parts (nan if one is zero)."""
    np_, nq = p.imag_norm(), q.imag_norm()
    if np_ == 0.0 or nq == 0.0:
        return math.nan
    u = (p[1] / np_, p[2] / np_, p[3] / np_)
    v = (q[1] / nq, q[2] / nq, q[3] / nq)
    return min(
        math.hypot(u[0] - v[0], u[1] - v[1], u[2] - v[2]),
        math.hypot(u[0] + v[0], u[1] + v[1], u[2] + v[2]),
    )


def slice_frame(
    p: Quaternion,
    q: Quaternion,
    realness_tol: Optional[float] = None,
    align_tol: float = ALIGN_TOL,
) -> tuple[bool, Optional[ImaginaryUnit], Optional[ImaginaryUnit]]:
    """``(shared, I_p, I_q)``: whether ``p, q`` share a complex line, and their units.

    A unit is ``None`` for a point treated as real; a real point lies on
    every line.  Two nonreal points share a line when their normalized
    imaginary parts agree up to sign within ``align_tol``.
    """
    p0, p1, p2, p3 = p
    q0, q1, q2, q3 = q
    py = math.hypot(p1, p2, p3)
    qy = math.hypot(q1, q2, q3)
    if realness_tol is None:
        tp = REALNESS_REL_TOL * max(1.0, math.hypot(p0, py))
        tq = REALNESS_REL_TOL * max(1.0, math.hypot(q0, qy))
    else:
        tp = tq = realness_tol
    up = None if py <= tp else tuple.__new__(ImaginaryUnit, (0.0, p1 / py, p2 / py, p3 / py))
    uq = None if qy <= tq else tuple.__new__(ImaginaryUnit, (0.0, q1 / qy, q2 / qy, q3 / qy))
    if up is None or uq is None:
        return True, up, uq
    _, a1, b1, c1 = up
    _, a2, b2, c2 = uq
    shared = (
        math.hypot(a1 - a2, b1 - b2, c1 - c2) <= align_tol
        or math.hypot(a1 + a2, b1 + b2, c1 + c2) <= align_tol
    )
    return shared, up, uq


def same_slice(
    p: Quaternion,
    q: Quaternion,
    realness_tol: Optional[float] = None,
    align_tol: float = ALIGN_TOL,
) -> bool:
    """True iff ``p`` and ``q`` lie on a common complex line ``L_I``."""
    return slice_frame(p, q, realness_tol, align_tol)[0]


# complex-line coordinates ---------------------------------------------------


def on_line(c: complex, unit: Quaternion) -> Quaternion:
    """Embed the complex number ``a + b i`` as ``a + b I`` on ``L_I``."""
    a, b = c.real, c.imag
    return _make(a, b * unit[1], b * unit[2], b * unit[3])


def line_coordinate(q: Quaternion, unit: Quaternion) -> complex:
    """Project ``q`` onto ``L_I`` and return it as a complex number."""
    return complex(q[0], q[1] * unit[1] + q[2] * unit[2] + q[3] * unit[3])


def split_in_frame(coeffs: np.ndarray, unit: ImaginaryUnit) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Write each row ``a`` of an ``(n, 4)`` array as ``alpha + beta J`` with ``alpha, beta`` on ``L_I``.

    Returns complex arrays ``alpha, beta`` and the frame ``(I, J, K)`` used.
    Left multiplication by elements of ``L_I`` acts on ``alpha`` and ``beta``
    as complex multiplication, which is what makes slice evaluation cheap.
    """
    jj, kk = unit.frame()
    u = np.array(unit[1:])
    v = np.array(jj[1:])
    t = np.array(kk[1:])
    vec = coeffs[..., 1:]
    alpha = coeffs[..., 0] + 1j * (vec @ u)
    beta = (vec @ v) + 1j * (vec @ t)
    return alpha, beta, (unit, jj, kk)


def join_from_frame(alpha: complex, beta: complex, frame) -> Quaternion:
    """Inverse of :func:`split_in_frame` for a single pair."""
    unit, jj, kk = frame
    a0, a1 = alpha.real, alpha.imag
    b0, b1 = beta.real, beta.imag
    return _make(
        a0,
        a1 * unit[1] + b0 * jj[1] + b1 * kk[1],
        a1 * unit[2] + b0 * jj[2] + b1 * kk[2],
        a1 * unit[3] + b0 * jj[3] + b1 * kk[3],
    )


# array helpers ----------------------------------------------------------------


def as_array(qs: Iterable[Quaternion]) -> np.ndarray:
    arr = np.array([tuple(q) for q in qs], dtype=float)
    return arr.reshape(-1, 4)


def from_array(arr: np.ndarray) -> list[Quaternion]:
    return [_make(*map(float, row)) for row in np.asarray(arr, dtype=float).reshape(-1, 4)]


def qmul_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product over trailing axis of length 4."""
    a1, b1, c1, d1 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    a2, b2, c2, d2 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )
