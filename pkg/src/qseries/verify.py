"""Seeded property sweeps behind ``qseries verify``.

Every sweep returns :class:`PropertyResult` records: the largest residual
seen, the tolerance it is held to and the sample that produced it, so a
failure can be reproduced by hand.  Residuals are made relative to the
natural magnitude of the computation (stated per property).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quaternion import ONE, ZERO, ImaginaryUnit, Quaternion, imaginary_unit_of, power, same_slice
from .series import (
    RegularSeries,
    binomial_expand,
    evaluate,
    formal_derivative,
    geometric_series,
    lacunary_series,
    radius_estimate,
    reexpand,
    star_multiply,
    star_power_eval,
    star_power_values,
    star_power_nth_root,
    star_power_series,
)
from .sigma import (
    SigmaBall,
    analyticity_margin,
    curve_residual,
    in_analyticity_region_ball,
    in_analyticity_region_omega,
    in_analyticity_region_sigma,
    in_analyticity_region_slice_disc,
    in_sigma_ball,
    Membership,
    omega,
    omega_ball_contains_center,
    sample_boundary,
    sigma,
    sigma_via_slice,
)
from .slices import SlicePoint, dbar_check, observed_order, representation_eval, slice_derivative_check, split_bc

SHARED_SLICE_FRACTION = 0.2
REAL_FRACTION = 0.1
BOX = 2.0


@dataclass
class PropertyResult:
    name: str
    max_residual: float
    tolerance: float
    sample: object = None
    comparison: str = "<="
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.comparison == ">=":
            self.passed = self.max_residual >= self.tolerance
        else:
            self.passed = self.max_residual <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<40s} residual={self.max_residual:.3e}  {self.comparison} tol={self.tolerance:.1e}"


class _Worst:
    """Track the maximum residual and the sample that produced it."""

    def __init__(self):
        self.value = -math.inf
        self.sample = None

    def update(self, residual: float, sample):
        if residual > self.value or (math.isnan(residual) and not math.isnan(self.value)):
            self.value = residual
            self.sample = sample

    def result(self, name, tol, comparison="<="):
        value = 0.0 if self.value == -math.inf else self.value
        return PropertyResult(name, value, tol, self.sample, comparison)


# sampling ---------------------------------------------------------------------


def random_unit(rng: np.random.Generator) -> ImaginaryUnit:
    v = rng.normal(size=3)
    return ImaginaryUnit.normalize((0.0, *v))


def random_quaternion(rng: np.random.Generator, box: float = BOX) -> Quaternion:
    return Quaternion(*rng.uniform(-box, box, size=4))


def related_quaternion(rng: np.random.Generator, anchor: Quaternion, box: float = BOX) -> Quaternion:
    """A random point that is real 10% of the time and on the slice of ``anchor`` 20% of the time."""
    u = rng.random()
    if u < REAL_FRACTION:
        return Quaternion(rng.uniform(-box, box))
    if u < REAL_FRACTION + SHARED_SLICE_FRACTION:
        unit = imaginary_unit_of(anchor) or random_unit(rng)
        return Quaternion(rng.uniform(-box, box)) + unit * rng.uniform(-box, box)
    return random_quaternion(rng, box)


def random_pair(rng, box=BOX):
    p = related_quaternion(rng, ONE, box) if rng.random() < REAL_FRACTION else random_quaternion(rng, box)
    return p, related_quaternion(rng, p, box)


def random_triple(rng, box=BOX):
    p, q = random_pair(rng, box)
    return q, related_quaternion(rng, p, box), p


def random_series(rng, order: int, center=ZERO, radius: Optional[float] = 1.0) -> RegularSeries:
    return RegularSeries(center, rng.uniform(-1.0, 1.0, size=(order + 1, 4)), radius)


def sample_in_sigma_ball(rng, ball: SigmaBall, tries: int = 1000) -> Quaternion:
    """Half on the slice disc, half (when nonempty) in the omega ball by rejection."""
    p, r = ball.center, ball.radius
    unit = ball.slice or random_unit(rng)
    if rng.random() < 0.5 or r <= ball.y0:
        rad = r * math.sqrt(rng.random())
        t = rng.uniform(0, 2 * math.pi)
        return p + Quaternion(rad * math.cos(t)) + unit * (rad * math.sin(t))
    # Omega is the set x + J y (y >= 0, any J) with (x - x0)^2 + (y + y0)^2 < r^2
    x0, y0 = p[0], ball.y0
    top = r - y0
    half = math.sqrt(r * r - y0 * y0)
    for _ in range(tries):
        x = rng.uniform(x0 - half, x0 + half)
        y = rng.uniform(0.0, top)
        if (x - x0) ** 2 + (y + y0) ** 2 < r * r:
            s = Quaternion(x) + random_unit(rng) * y
            if omega(s, p) < r:
                return s
    raise RuntimeError("rejection sampling of the omega ball failed")


# naive oracles ----------------------------------------------------------------


def naive_eval(f: RegularSeries, q: Quaternion) -> tuple[Quaternion, float]:
    """``sum q^n a_n`` by explicit powers (center 0 only), and the scale ``sum |q|^n |a_n|``."""
    assert tuple(f.center) == (0.0, 0.0, 0.0, 0.0)
    total = ZERO
    scale = 0.0
    qn = ONE
    for row in f.coeffs:
        a = Quaternion(*row)
        total = total + qn * a
        scale += abs(qn) * abs(a)
        qn = qn * q
    return total, scale


# suites -----------------------------------------------------------------------


def metric_suite(rng, n_samples: int = 100_000) -> list[PropertyResult]:
    sym, ident, nonneg, tri, sand, cross = (_Worst() for _ in range(6))
    for _ in range(n_samples):
        q, o, p = random_triple(rng)
        s_qp = sigma(q, p)
        s_pq = sigma(p, q)
        s_qo = sigma(q, o)
        s_op = sigma(o, p)
        sym.update(abs(s_qp - s_pq), (q, p))
        ident.update(sigma(q, q) + (1.0 if (s_qp == 0.0) != (q == p) else 0.0), (q, p))
        nonneg.update(-min(s_qp, s_qo, s_op), (q, o, p))
        tri.update(s_qp - s_qo - s_op, (q, o, p))
        e = abs(q - p)
        w = omega(q, p)
        sand.update(max(e - s_qp, s_qp - w) / max(1.0, w), (q, p))
        if not same_slice(p, q):
            cross.update(abs(s_qp - sigma_via_slice(q, p)) / max(1.0, s_qp), (q, p))
    return [
        sym.result("metric/symmetry", 0.0),
        ident.result("metric/identity", 0.0),
        nonneg.result("metric/nonnegativity", 0.0),
        tri.result("metric/triangle", 1e-10),
        sand.result("metric/sandwich", 1e-12),
        cross.result("metric/omega-vs-slice-rotation", 1e-12),
    ]


def _limit_pair(rng):
    while True:
        p = random_quaternion(rng)
        q = random_quaternion(rng)
        if same_slice(p, q):
            continue
        dx = q[0] - p[0]
        y, y0 = q.imag_norm(), p.imag_norm()
        if abs(complex(dx, y - y0)) / abs(complex(dx, -y - y0)) <= 0.9:
            return p, q


def star_power_bound(rng, n_samples: int = 10_000, max_power: int = 50) -> PropertyResult:
    """Relative excess of ``|(q - p)^{*n}|`` over ``2 sigma^n`` (negative means slack)."""
    bound = _Worst()
    for _ in range(n_samples):
        p, q = random_pair(rng)
        sg = sigma(q, p)
        values = star_power_values(p, q, max_power)
        for n in range(1, max_power + 1):
            val = abs(values[n])
            cap = 2.0 * sg ** n
            bound.update(val / cap - 1.0 if cap > 0 else (math.inf if val > 0 else -1.0), (p, q, n))
    return bound.result("star-power/bound 2*sigma^n", 1e-12)


def star_power_limit(rng, n_samples: int = 1_000, power: int = 1000) -> PropertyResult:
    limit = _Worst()
    for _ in range(n_samples):
        p, q = _limit_pair(rng)
        sg = sigma(q, p)
        root = star_power_nth_root(p, power, q)
        limit.update(abs(root - sg) / sg, (p, q))
    return limit.result(f"star-power/nth-root limit (n={power})", 0.02)


def star_power_consistency(rng, n_samples: int = 1_000, max_power: int = 30) -> PropertyResult:
    """Closed form against explicit powers of the convolved coefficients."""
    agree = _Worst()
    for _ in range(n_samples):
        p, q = random_pair(rng)
        step = star_power_series(p, 1)
        s = star_power_series(p, 0)
        for n in range(max_power + 1):
            if n:
                s = star_multiply(s, step)
            fast = star_power_eval(p, n, q)
            slow, scale = naive_eval(s, q)
            agree.update(abs(fast - slow) / max(abs(slow), scale, 1e-300), (p, q, n))
    return agree.result("star-power/closed-form vs convolution", 1e-10)


def star_power_suite(rng, n_samples: Optional[int] = None) -> list[PropertyResult]:
    if n_samples is None:
        return [star_power_bound(rng), star_power_limit(rng), star_power_consistency(rng)]
    return [
        star_power_bound(rng, n_samples),
        star_power_limit(rng, n_samples),
        star_power_consistency(rng, n_samples),
    ]


def binomial_suite(rng, n_samples: int = 1_000, max_m: int = 10) -> list[PropertyResult]:
    worst = _Worst()
    for _ in range(n_samples):
        # box 1: for |p| up to 2 the expansion cancels terms of size (2|p|)^m
        p, q = random_pair(rng, 1.0)
        for m in range(max_m + 1):
            got = evaluate(binomial_expand(m, p), q).value
            want = power(q, m)
            worst.update(abs(got - want) / max(1.0, abs(q) ** m), (p, q, m))
    return [worst.result("binomial/expansion reproduces q^m", 1e-9)]


def _abs_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1))


def leibniz_suite(rng, n_samples: int = 100, max_order: int = 20) -> list[PropertyResult]:
    worst = _Worst()
    for _ in range(n_samples):
        f = random_series(rng, int(rng.integers(0, max_order + 1)))
        g = random_series(rng, int(rng.integers(0, max_order + 1)))
        lhs = formal_derivative(star_multiply(f, g)).coeffs
        rhs = (star_multiply(formal_derivative(f), g) + star_multiply(f, formal_derivative(g))).coeffs
        n = max(len(lhs), len(rhs))
        diff = np.zeros((n, 4))
        diff[: len(lhs)] += lhs
        diff[: len(rhs)] -= rhs
        # scale: sum_k (n+1)|a_k||b_{n+1-k}|
        scale = np.zeros(n)
        ab = _abs_convolution(f.coeffs, g.coeffs)[1:]
        scale[: len(ab)] = ab * np.arange(1, len(ab) + 1)
        scale = np.maximum(scale, 1e-300)
        rel = np.linalg.norm(diff, axis=1) / scale
        worst.update(float(rel.max()), (f.coeffs.tolist(), g.coeffs.tolist()))
    return [worst.result("leibniz/(f*g)' = f'*g + f*g'", 1e-12)]


def representation_suite(rng, n_samples: int = 1_000, order: int = 20, reach: float = 0.8) -> list[PropertyResult]:
    indep, recon = _Worst(), _Worst()
    f = random_series(rng, order, radius=1.0)
    mags = np.linalg.norm(f.coeffs, axis=1)
    for _ in range(n_samples):
        rad = reach * math.sqrt(rng.random())
        t = rng.uniform(0, math.pi)
        x, y = rad * math.cos(t), rad * math.sin(t)
        scale = float(np.sum(mags * rad ** np.arange(len(mags))))
        ui, uj = random_unit(rng), random_unit(rng)
        b1, c1 = split_bc(f, x, y, ui)
        b2, c2 = split_bc(f, x, y, uj)
        indep.update(max(abs(b1 - b2), abs(c1 - c2)) / scale, (x, y, ui, uj))
        rebuilt = representation_eval(f, x, y, ui, uj)
        direct, _ = naive_eval(f, Quaternion(x) + uj * y)
        recon.update(abs(rebuilt - direct) / scale, (x, y, ui, uj))
    return [
        indep.result("representation/(b,c) independent of I", 1e-9),
        recon.result("representation/two-point reconstruction", 1e-9),
    ]


ROUNDING_ALLOWANCE = 1e-12


def reexpand_suite(
    rng,
    n_centers: int = 50,
    n_points: int = 100,
    order: int = 60,
    max_center: float = 0.6,
    partial_order: int = 40,
) -> list[PropertyResult]:
    f = geometric_series(order)
    agree_full, agree_partial, real_coeffs = _Worst(), _Worst(), _Worst()
    for _ in range(n_centers):
        if rng.random() < 0.2:
            p = Quaternion(rng.uniform(-max_center, max_center))
        else:
            v = rng.normal(size=4)
            p = Quaternion(*(v / np.linalg.norm(v) * max_center * rng.random() ** 0.25))
        ball = SigmaBall(p, 1.0 - abs(p))
        gs = [(reexpand(f, p), agree_full), (reexpand(f, p, partial_order), agree_partial)]
        for _ in range(n_points):
            q = sample_in_sigma_ball(rng, ball)
            rf = evaluate(f, q)
            for g, worst in gs:
                rg = evaluate(g, q)
                allowed = rf.tail_bound + rg.tail_bound + ROUNDING_ALLOWANCE * max(1.0, abs(rf.value))
                worst.update(abs(rg.value - rf.value) / allowed, (p, q, g.order))
        if imaginary_unit_of(p) is None:
            x = p[0]
            g = gs[0][0]
            for n, row in enumerate(g.coeffs):
                exact = (1.0 - x) ** (-(n + 1))
                # the truncated sum differs from the infinite one by sum_{m>N} C(m,n) x^(m-n)
                gap = _truncation_gap(order, n, x)
                if gap > 1e-10 * exact:
                    break
                real_coeffs.update(abs(row[0] - exact) / exact + float(np.linalg.norm(row[1:])), (p, n))
    return [
        agree_full.result("reexpand/agreement within tails (order N)", 1.0),
        agree_partial.result(f"reexpand/agreement within tails (order {partial_order})", 1.0),
        real_coeffs.result("reexpand/real center b_n = (1-p)^-(n+1)", 1e-9),
    ]


def _truncation_gap(order: int, n: int, x: float) -> float:
    """``sum_{m>order} C(m, n) |x|^(m-n)``, summed until negligible."""
    total = 0.0
    m = order + 1
    term = math.comb(m, n) * abs(x) ** (m - n)
    while term > 0 and (term > 1e-30 * total or total == 0.0) and m < order + 10_000:
        total += term
        m += 1
        term = term * m / (m - n) * abs(x)
    return total


def dbar_suite(rng, n_grid: int = 25, base_h: float = 1e-2) -> list[PropertyResult]:
    f = geometric_series(40)
    order_w, deriv = _Worst(), _Worst()
    min_order = math.inf
    for _ in range(4):
        unit = random_unit(rng)
        grid = []
        for _ in range(n_grid):
            rad = 0.5 * math.sqrt(rng.random())
            t = rng.uniform(0, math.pi)
            grid.append(SlicePoint(rad * math.cos(t), rad * math.sin(t), unit))
        res = [dbar_check(f, unit, grid, base_h / 2 ** k) for k in range(3)]
        obs = min(observed_order(res))
        if obs < min_order:
            min_order = obs
            order_w.sample = (unit, res)
        deriv.update(slice_derivative_check(f, unit, grid, 1e-4), unit)
    order_w.value = min_order
    return [
        order_w.result("dbar/observed order under h-halving", 1.9, ">="),
        deriv.result("dbar/slice derivative = formal derivative", 1e-6),
    ]


def _grid_case(ball: SigmaBall, unit: ImaginaryUnit, resolution: int):
    mismatch = 0
    r = ball.radius
    xs = np.linspace(ball.x0 - 1.1 * r, ball.x0 + 1.1 * r, resolution)
    ys = np.linspace(0.0, ball.y0 + 1.1 * r, resolution)
    worst = None
    for y in ys:
        for x in xs:
            s = Quaternion(float(x)) + unit * float(y)
            margin = analyticity_margin(ball, s)
            if abs(margin) <= 1e-9:
                continue
            a = in_analyticity_region_sigma(ball, s)
            b = in_analyticity_region_omega(ball, s) or in_analyticity_region_slice_disc(ball, s)
            if a != b:
                mismatch += 1
                worst = s
    return mismatch, worst


def regions_suite(rng, resolution: int = 200, n_boundary: int = 400) -> list[PropertyResult]:
    resid = _Worst()
    ball0 = SigmaBall(ZERO, 1.0)
    sample = sample_boundary(ball0, None, n_boundary)
    for pt in sample.points:
        s = Quaternion(pt.x) + random_unit(rng) * pt.y
        resid.update(abs(2.0 * s.imag_norm() - (1.0 - abs(s))), (pt.x, pt.y))
        resid.update(abs(curve_residual(ball0, "H", pt.x, pt.y)), (pt.x, pt.y))
    onb = _Worst()
    for x in (-1.0, 1.0):
        s = Quaternion(x)
        onb.update(abs(2.0 * s.imag_norm() - (1.0 - abs(s))) + float(in_analyticity_region_ball(1.0, s)), x)
    curves = _Worst()
    mism = _Worst()
    total = 0
    for p, r in [(Quaternion(0.2, 0.5), 1.0), (Quaternion(-0.3, 0.0, 0.3, 0.4), 1.2), (Quaternion(0.1, 0.0, 0.0, 0.7), 1.0)]:
        ball = SigmaBall(p, r)
        for pt in sample_boundary(ball, None, n_boundary).points:
            curves.update(abs(curve_residual(ball, pt.curve, pt.x, pt.y)), (p, r, pt))
        _, kk = ball.slice.frame()
        for unit in (ball.slice, -ball.slice, kk, random_unit(rng)):
            count, where = _grid_case(ball, unit, resolution)
            total += count
            if count:
                mism.update(float(count), where)
    mism.value = float(total)
    return [
        resid.result("regions/A(B) boundary: 2|Im p| = 1-|p|", 1e-9),
        onb.result("regions/(+-1, 0) on the boundary, excluded", 1e-9),
        curves.result("regions/H and K arc residuals", 1e-9),
        mism.result("regions/A(Sigma) formula vs union of parts", 0.0),
    ]


def lacunary_suite(rng, n_samples: int = 2_000, levels: int = 10) -> list[PropertyResult]:
    f = lacunary_series(levels)
    est = radius_estimate(f, 20)
    radius = PropertyResult("lacunary/radius estimate |R-1|", abs(est - 1.0), 0.01, est)
    wrong = _Worst()
    bad = 0
    for _ in range(n_samples):
        v = rng.normal(size=4)
        p = Quaternion(*(v / np.linalg.norm(v) * rng.random() ** 0.25))
        if rng.random() < 0.1:
            p = Quaternion(p[0])
        r = 1.0 - abs(p)
        if not r > 0:
            continue
        ball = SigmaBall(p, r)
        in_a = in_analyticity_region_ball(1.0, p)
        interior = omega_ball_contains_center(ball)
        centre_class = in_sigma_ball(ball, p)
        consistent = interior == in_a and (centre_class is Membership.INSIDE_OMEGA) == in_a
        if 2.0 * p.imag_norm() >= r:
            # off-slice probe next to p must leave Sigma(p, r)
            unit = ball.slice or random_unit(rng)
            jj, _ = unit.frame()
            probe = p + jj * min(1e-6, r / 4)
            consistent = consistent and not in_sigma_ball(ball, probe).inside
        if not consistent:
            bad += 1
            wrong.sample = p
    wrong.value = float(bad)
    return [radius, wrong.result("lacunary/interior classification errors", 0.0)]


SUITES: dict[str, Callable] = {
    "metric": metric_suite,
    "star-power": star_power_suite,
    "binomial": binomial_suite,
    "leibniz": leibniz_suite,
    "representation": representation_suite,
    "reexpand": reexpand_suite,
    "dbar": dbar_suite,
    "regions": regions_suite,
    "lacunary": lacunary_suite,
}


def run_suite(name: str, seed: int, n_samples: Optional[int] = None) -> list[PropertyResult]:
    """Run one suite (or ``"all"``) with a fresh generator per suite.

    ``n_samples`` overrides the primary sample count of each suite.
    """
    names = list(SUITES) if name == "all" else [name]
    out = []
    for nm in names:
        if nm not in SUITES:
            raise KeyError(f"unknown suite {nm!r}; choose from {sorted(SUITES)} or 'all'")
        rng = np.random.default_rng([seed, list(SUITES).index(nm)])
        fn = SUITES[nm]
        if n_samples is None:
            out.extend(fn(rng))
        else:
            out.extend(fn(rng, n_samples))
    return out
