"""Truncated regular power series ``sum (q - p)^{*n} a_n``.

Coefficients sit on the right of the star powers and are stored densely as
an ``(N + 1, 4)`` float array.  Evaluation never forms star powers one by
one: the slice of the center is used to split every coefficient into two
complex numbers, after which a centered series is two complex polynomials
evaluated at ``z - p`` and ``conj(z) - p`` and recombined with the weights
``(1 - JI)/2`` and ``(1 + JI)/2``.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from .quaternion import (
    ONE,
    ZERO,
    ImaginaryUnit,
    Quaternion,
    imaginary_unit_of,
    join_from_frame,
    line_coordinate,
    on_line,
    power,
    is_real,
    slice_frame,
    split_in_frame,
)
from .sigma import omega, sigma

MAX_ORDER = 2 ** 16
DEFAULT_WINDOW = 10
BRANCH_AGREEMENT_TOL = 1e-6
_DEFAULT_UNIT = ImaginaryUnit(0.0, 1.0, 0.0, 0.0)


class CenterMismatchError(ValueError):
    """Raised when combining series expanded about different centers."""


class DomainError(ValueError):
    """Raised when a point or sphere lies outside a declared convergence domain."""


class BranchMismatchError(ArithmeticError):
    """The on-slice and off-slice evaluation formulas disagree near the slice of the center."""


@dataclass(frozen=True, eq=False)
class RegularSeries:
    """``sum_{n<=N} (q - center)^{*n} coeffs[n]``.

    ``declared_radius`` is the user-asserted sigma-radius of convergence of
    the underlying infinite series (``None`` when unknown, ``inf`` for
    polynomials and entire functions).
    """

    center: Quaternion
    coeffs: np.ndarray
    declared_radius: Optional[float] = None

    def __post_init__(self):
        center = Quaternion(*self.center)
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim == 1 and arr.size == 4 and not isinstance(self.coeffs[0], (tuple, list, np.ndarray)):
            arr = arr.reshape(1, 4)
        if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] < 1:
            raise ValueError(f"coefficients must have shape (N+1, 4) with N >= 0, got {arr.shape}")
        if arr.shape[0] - 1 > MAX_ORDER:
            raise ValueError(f"order {arr.shape[0] - 1} exceeds the cap {MAX_ORDER}")
        arr.setflags(write=False)
        radius = self.declared_radius
        if radius is not None:
            radius = float(radius)
            if not radius > 0:
                raise ValueError("declared radius must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "declared_radius", radius)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def coefficient(self, n: int) -> Quaternion:
        return Quaternion(*self.coeffs[n])

    def __len__(self):
        return self.coeffs.shape[0]

    def __call__(self, q: Quaternion) -> Quaternion:
        return evaluate(self, q).value

    def __add__(self, other: "RegularSeries") -> "RegularSeries":
        _check_centers(self, other)
        n = max(len(self), len(other))
        out = np.zeros((n, 4))
        out[: len(self)] += self.coeffs
        out[: len(other)] += other.coeffs
        return RegularSeries(self.center, out, _min_radius(self, other))

    def __mul__(self, other: "RegularSeries") -> "RegularSeries":
        return star_multiply(self, other)

    def in_domain(self, q: Quaternion) -> bool:
        if self.declared_radius is None:
            return True
        return sigma(q, self.center) < self.declared_radius

    def contains_sphere(self, x: float, y: float) -> bool:
        """Whether the whole 2-sphere ``x + S y`` lies in ``Sigma(center, R)``."""
        if self.declared_radius is None:
            return True
        # off the slice of the center sigma is omega, which bounds the on-slice values
        return omega(Quaternion(x, abs(y)), self.center) < self.declared_radius

    @functools.cached_property
    def _tail(self) -> "TailModel":
        return tail_model(self, DEFAULT_WINDOW)

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        r = self.declared_radius
        if r is not None and math.isinf(r):
            r = "inf"
        return {
            "center": self.center.to_json(),
            "radius": r,
            "coeffs": [[float(v) for v in row] for row in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> "RegularSeries":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            center = Quaternion.from_json(data["center"])
            coeffs = [Quaternion.from_json(c) for c in data["coeffs"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed series JSON: {exc}") from exc
        radius = data.get("radius")
        if isinstance(radius, str):
            if radius.lower() not in ("inf", "infinity"):
                raise ValueError(f"bad radius {radius!r}")
            radius = math.inf
        elif radius is not None and (isinstance(radius, bool) or not isinstance(radius, (int, float))):
            raise ValueError(f"bad radius {radius!r}")
        if not coeffs:
            raise ValueError("a series needs at least one coefficient")
        return cls(center, np.array(coeffs, dtype=float), radius)


def load_series(path: Union[str, Path]) -> RegularSeries:
    with open(path) as fh:
        return RegularSeries.from_json(json.load(fh))


def save_series(f: RegularSeries, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(f.to_json(), fh)
        fh.write("\n")


def from_coefficients(coeffs, center=ZERO, radius=None) -> RegularSeries:
    """Build a series from a list of quaternions (or 4-sequences)."""
    return RegularSeries(center, np.array([tuple(Quaternion(*c)) for c in coeffs], dtype=float), radius)


def geometric_series(order: int, scale: float = 1.0) -> RegularSeries:
    """``sum_{n<=N} q^n scale^n``, radius ``1/scale``."""
    arr = np.zeros((order + 1, 4))
    arr[:, 0] = scale ** np.arange(order + 1)
    return RegularSeries(ZERO, arr, 1.0 / scale)


def lacunary_series(levels: int) -> RegularSeries:
    """``sum_{n<=levels} q^(2^n)`` stored densely up to index ``2^levels``."""
    arr = np.zeros((2 ** levels + 1, 4))
    arr[2 ** np.arange(levels + 1), 0] = 1.0
    return RegularSeries(ZERO, arr, 1.0)


def _check_centers(f: RegularSeries, g: RegularSeries):
    if tuple(f.center) != tuple(g.center):
        raise CenterMismatchError(f"centers differ: {f.center!r} vs {g.center!r}")


def _min_radius(f: RegularSeries, g: RegularSeries) -> Optional[float]:
    if f.declared_radius is None or g.declared_radius is None:
        return None
    return min(f.declared_radius, g.declared_radius)


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion convolution ``c_n = sum_k a_k b_{n-k}`` via 16 real convolutions."""
    a0, a1, a2, a3 = a.T
    b0, b1, b2, b3 = b.T
    cv = np.convolve
    return np.stack(
        [
            cv(a0, b0) - cv(a1, b1) - cv(a2, b2) - cv(a3, b3),
            cv(a0, b1) + cv(a1, b0) + cv(a2, b3) - cv(a3, b2),
            cv(a0, b2) - cv(a1, b3) + cv(a2, b0) + cv(a3, b1),
            cv(a0, b3) + cv(a1, b2) - cv(a2, b1) + cv(a3, b0),
        ],
        axis=1,
    )


def star_multiply(f: RegularSeries, g: RegularSeries) -> RegularSeries:
    """Regular (star) product: coefficient convolution, order ``N_f + N_g``."""
    _check_centers(f, g)
    return RegularSeries(f.center, _convolve(f.coeffs, g.coeffs), _min_radius(f, g))


def star_power_series(p: Quaternion, n: int) -> RegularSeries:
    """Expanded coefficients of ``(q - p)^{*n}`` about 0, by repeated star products."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    binomial = RegularSeries(ZERO, [tuple(-Quaternion(*p)), tuple(ONE)], math.inf)
    out = RegularSeries(ZERO, [tuple(ONE)], math.inf)
    for _ in range(n):
        out = star_multiply(out, binomial)
    return out


def binomial_expand(m: int, p: Quaternion) -> RegularSeries:
    """``q^m = sum_k (q - p)^{*k} p^(m-k) C(m, k)`` as a series centered at ``p``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    p = Quaternion(*p)
    coeffs = [tuple(power(p, m - k) * float(math.comb(m, k))) for k in range(m + 1)]
    return RegularSeries(p, np.array(coeffs, dtype=float), math.inf)


def formal_derivative(f: RegularSeries) -> RegularSeries:
    """``sum q^n a_{n+1} (n+1)``; a constant series differentiates to the zero series."""
    if f.order == 0:
        return RegularSeries(f.center, np.zeros((1, 4)), f.declared_radius)
    k = np.arange(1, f.order + 1, dtype=float)[:, None]
    return RegularSeries(f.center, f.coeffs[1:] * k, f.declared_radius)


def derivative(f: RegularSeries, n: int) -> RegularSeries:
    for _ in range(n):
        f = formal_derivative(f)
    return f


def radius_estimate(f: RegularSeries, window: int = 20) -> float:
    """Finite-sample proxy ``1 / max |a_n|^(1/n)`` over the last ``window`` indices.

    An estimate of the limsup, not a certificate.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    if f.order < window:
        raise ValueError(f"need order >= window, got order {f.order} < window {window}")
    idx = np.arange(f.order - window + 1, f.order + 1)
    mags = np.linalg.norm(f.coeffs[idx], axis=1)
    nz = mags > 0
    if not nz.any():
        return math.inf
    roots = np.exp(np.log(mags[nz]) / idx[nz])
    return float(1.0 / roots.max())


# tail control ----------------------------------------------------------------


class TailModel(NamedTuple):
    """Geometric majorant ``|a_n| <= C rho^n`` for the discarded coefficients."""

    log_c: float  # -inf for a vanishing tail
    rho: float


def tail_model(f: RegularSeries, window: int = DEFAULT_WINDOW) -> TailModel:
    """Fit ``C rho^n`` to the last ``window`` nonzero coefficients.

    ``rho`` is the least-squares growth rate, raised to ``1/R`` when a radius
    is declared; ``C`` covers every windowed coefficient with a factor 2 of
    safety.
    """
    mags = np.linalg.norm(f.coeffs, axis=1)
    idx = np.nonzero(mags > 0)[0][-window:]
    if idx.size == 0:
        return TailModel(-math.inf, 0.0)
    logs = np.log(mags[idx])
    if idx.size >= 2:
        rho = math.exp(np.polyfit(idx.astype(float), logs, 1)[0])
    elif idx[0] > 0:
        rho = math.exp(logs[0] / idx[0])
    else:
        rho = 0.0
    r = f.declared_radius
    if r is not None and not math.isinf(r):
        rho = max(rho, 1.0 / r)
    if rho == 0.0:
        return TailModel(-math.inf, 0.0)
    log_c = math.log(2.0) + float(np.max(logs - idx * math.log(rho)))
    return TailModel(log_c, rho)


def tail_bound(f: RegularSeries, sg: float, model: Optional[TailModel] = None) -> float:
    """``2 sum_{n>N} sigma^n C rho^n``, or ``inf`` outside the declared ball."""
    r = f.declared_radius
    if r is None or sg >= r:
        return math.inf
    if sg == 0.0:
        return 0.0
    model = model or f._tail
    if model.log_c == -math.inf:
        return 0.0
    t = model.rho * sg
    if t >= 1.0:
        return math.inf
    log_b = math.log(2.0) + model.log_c + (f.order + 1) * math.log(t) - math.log1p(-t)
    return math.exp(log_b) if log_b < 700 else math.inf


@dataclass(frozen=True)
class EvalResult:
    value: Quaternion
    tail_bound: float


# evaluation ------------------------------------------------------------------


def _cpow(w: complex, n: int) -> complex:
    try:
        return w ** n
    except OverflowError:
        with np.errstate(over="ignore", invalid="ignore"):
            return complex(np.complex128(w) ** n)


def _asq(q) -> Quaternion:
    return q if type(q) is Quaternion else Quaternion(*q)


def _geometry(p: Quaternion, q: Quaternion):
    """Classify ``q`` relative to the center ``p``.

    Returns ``(True, unit, w, None, None)`` on a shared line, with ``w`` the
    line coordinate of ``q - p``, and ``(False, I_p, z - p, conj(z) - p, JI)``
    otherwise, where ``q = x + J y`` and ``z = x + I_p y``.
    """
    shared, unit_p, unit_q = slice_frame(p, q)
    if shared:
        unit = unit_p or unit_q or _DEFAULT_UNIT
        return True, unit, line_coordinate(q, unit) - line_coordinate(p, unit), None, None
    dx = q[0] - p[0]
    y = math.hypot(q[1], q[2], q[3])
    y0 = math.hypot(p[1], p[2], p[3])
    return False, unit_p, complex(dx, y - y0), complex(dx, -y - y0), unit_q * unit_p


def _combine(ji: Quaternion, a: Quaternion, b: Quaternion) -> Quaternion:
    """``(1 - JI)/2 a + (1 + JI)/2 b``."""
    return (a + b) * 0.5 + ji * ((b - a) * 0.5)


def star_power_eval(p: Quaternion, n: int, q: Quaternion) -> Quaternion:
    """``(q - p)^{*n}`` evaluated at ``q`` in closed form.

    On a common slice this is the ordinary power ``(q - p)^n``; otherwise
    ``(1 - JI)/2 (z - p)^n + (1 + JI)/2 (conj(z) - p)^n`` with ``z`` the
    rotation of ``q`` onto the slice of ``p``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    shared, unit, w1, w2, ji = _geometry(_asq(p), _asq(q))
    if shared:
        return on_line(_cpow(w1, n), unit)
    return _combine(ji, on_line(_cpow(w1, n), unit), on_line(_cpow(w2, n), unit))


def star_power_values(p: Quaternion, q: Quaternion, n_max: int) -> list[Quaternion]:
    """``[(q - p)^{*n} at q for n = 0..n_max]``, sharing the slice geometry across ``n``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    shared, unit, w1, w2, ji = _geometry(_asq(p), _asq(q))
    out = []
    a = b = 1 + 0j
    for n in range(n_max + 1):
        if shared:
            out.append(on_line(a, unit))
        else:
            out.append(_combine(ji, on_line(a, unit), on_line(b, unit)))
        a *= w1
        if not shared:
            b *= w2
    return out


def star_power_nth_root(p: Quaternion, n: int, q: Quaternion) -> float:
    """``|(q - p)^{*n}|^(1/n)`` computed without overflow, for large ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    shared, unit, w1, w2, ji = _geometry(_asq(p), _asq(q))
    if shared:
        return abs(w1)
    if abs(w1) > abs(w2):
        w1, w2, ji = w2, w1, -ji
    if w2 == 0:
        return 0.0
    ratio = _cpow(w1 / w2, n)
    bracket = abs(_combine(ji, on_line(ratio, unit), ONE))
    if bracket == 0.0:
        return 0.0
    return abs(w2) * math.exp(math.log(bracket) / n)


def _line_sum(alpha, beta, frame, w: complex) -> Quaternion:
    """``sum w^n a_n`` for ``w`` on the line of ``frame[0]`` and ``a_n = alpha_n + beta_n J``."""
    with np.errstate(over="ignore", invalid="ignore"):
        a = complex(npoly.polyval(w, alpha))
        b = complex(npoly.polyval(w, beta))
    return join_from_frame(a, b, frame)


def _evaluate_value(f: RegularSeries, q: Quaternion) -> Quaternion:
    p = f.center
    if tuple(q) == tuple(p):
        # every star power but the zeroth vanishes; skip the frame round trip
        return Quaternion(*f.coeffs[0])
    shared, unit, w1, w2, ji = _geometry(p, q)
    alpha, beta, frame = split_in_frame(f.coeffs, unit)
    if not shared:
        return _combine(ji, _line_sum(alpha, beta, frame, w1), _line_sum(alpha, beta, frame, w2))
    value = _line_sum(alpha, beta, frame, w1)
    if not is_real(p) and not is_real(q):
        _check_branches(f, q, alpha, beta, frame, value)
    return value


def _check_branches(f, q, alpha, beta, frame, value):
    # Both formulas agree inside the convergence region.  In the part of the
    # slice disc outside Omega the mirror point falls outside the disc of
    # convergence, so the off-line formula is meaningless there.
    r = f.declared_radius
    if r is not None and omega(q, f.center) >= r:
        return
    p = f.center
    dx = q[0] - p[0]
    y, y0 = q.imag_norm(), p.imag_norm()
    w1, w2 = complex(dx, y - y0), complex(dx, -y - y0)
    s1 = _line_sum(alpha, beta, frame, w1)
    s2 = _line_sum(alpha, beta, frame, w2)
    ji = ImaginaryUnit.normalize(q) * imaginary_unit_of(p)
    other = _combine(ji, s1, s2)
    scale = max(1.0, abs(value), abs(s1), abs(s2))
    if math.isfinite(scale) and abs(other - value) > BRANCH_AGREEMENT_TOL * scale:
        raise BranchMismatchError(
            f"slice and off-slice formulas differ by {abs(other - value):.3e} at q={q!r}"
        )


def evaluate(f: RegularSeries, q: Quaternion, window: Optional[int] = None) -> EvalResult:
    """Value of the truncated series at ``q`` plus a model-based tail bound.

    Points outside the declared sigma-ball still get the truncated value,
    with ``tail_bound = inf``.
    """
    q = _asq(q)
    value = _evaluate_value(f, q)
    model = None if window is None else tail_model(f, window)
    return EvalResult(value, tail_bound(f, sigma(q, f.center), model))


# re-expansion ----------------------------------------------------------------


def _taylor_shift(c: list, pi: complex, order: int) -> list:
    """Coefficients ``sum_m C(m, k) pi^(m-k) c_m`` for ``k <= order`` (repeated synthetic division)."""
    c = list(c)
    n = len(c) - 1
    for i in range(min(order + 1, n)):
        for j in range(n - 1, i - 1, -1):
            c[j] += pi * c[j + 1]
    return c[: order + 1]


def reexpand(f: RegularSeries, p: Quaternion, order: Optional[int] = None) -> RegularSeries:
    """Expand a series centered at 0 about ``p``: ``b_n = f^(n)(p) / n!``.

    The result is centered at ``p`` with declared radius ``R - |p|``.
    """
    if tuple(f.center) != (0.0, 0.0, 0.0, 0.0):
        raise CenterMismatchError("re-expansion is only defined for series centered at 0")
    p = Quaternion(*p)
    order = f.order if order is None else order
    if not 0 <= order <= f.order:
        raise ValueError(f"order must lie in [0, {f.order}], got {order}")
    r = f.declared_radius
    if r is not None and not abs(p) < r:
        raise DomainError(f"|p| = {abs(p)} is not below the declared radius {r}")
    unit = imaginary_unit_of(p) or _DEFAULT_UNIT
    alpha, beta, frame = split_in_frame(f.coeffs, unit)
    pi = line_coordinate(p, unit)
    ta = _taylor_shift([complex(v) for v in alpha], pi, order)
    tb = _taylor_shift([complex(v) for v in beta], pi, order)
    coeffs = [tuple(join_from_frame(a, b, frame)) for a, b in zip(ta, tb)]
    new_r = None if r is None else r - abs(p)
    return RegularSeries(p, np.array(coeffs, dtype=float), new_r)
