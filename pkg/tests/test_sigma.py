import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qseries.quaternion import I, J, ImaginaryUnit, Quaternion
from qseries.sigma import (
    EmptyRegionError,
    Membership,
    SigmaBall,
    cross_section,
    curve_residual,
    in_analyticity_region_ball,
    in_analyticity_region_omega,
    in_analyticity_region_sigma,
    in_analyticity_region_slice_disc,
    in_euclidean_ball,
    in_omega_ball,
    in_sigma_ball,
    omega,
    omega_ball_contains_center,
    omega_ball_nonempty,
    sample_boundary,
    sample_sigma_ball_boundary,
    sigma,
    sigma_via_slice,
)
from qseries.verify import random_quaternion, random_unit, related_quaternion

finite = st.floats(-2, 2, allow_nan=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)


# omega and sigma


def test_omega_examples():
    assert omega(J, I) == 2.0
    assert omega(Quaternion(3), Quaternion(3)) == 0.0
    assert omega(Quaternion(1, 1), Quaternion(1, 1)) == 2.0


def test_sigma_examples():
    assert sigma(I, Quaternion(0, 2)) == 1.0
    assert sigma(J, I) == 2.0
    p = Quaternion(0.3, -0.4, 1.2, 0.1)
    assert sigma(Quaternion(1.5), p) == pytest.approx(abs(Quaternion(1.5) - p), abs=1e-15)


def test_sigma_jumps_across_the_slice_predicate():
    p = Quaternion(0, 1)
    on = Quaternion(0, 1, 0)
    tilted = Quaternion(0, 1, 1e-7)
    assert sigma(on, p) == 0.0
    assert sigma(tilted, p) == pytest.approx(2.0, rel=1e-12)


@given(quats, quats)
def test_sandwich(q, p):
    s = sigma(q, p)
    assert abs(q - p) <= s * (1 + 1e-15) + 1e-15
    assert s <= omega(q, p) * (1 + 1e-15) + 1e-15


@given(quats, quats)
def test_symmetry_exact(q, p):
    assert sigma(q, p) == sigma(p, q)


def test_triangle_inequality_mixed_regimes():
    rng = np.random.default_rng(11)
    worst = -math.inf
    for _ in range(20_000):
        p = random_quaternion(rng)
        q = related_quaternion(rng, p)
        o = related_quaternion(rng, p)
        worst = max(worst, sigma(q, p) - sigma(q, o) - sigma(o, p))
    assert worst <= 1e-10


def test_omega_branch_matches_rotation_onto_the_slice():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        p, q = random_quaternion(rng), random_quaternion(rng)
        assert abs(sigma(q, p) - sigma_via_slice(q, p)) <= 1e-12 * max(1.0, sigma(q, p))


# balls


def test_in_sigma_ball_examples():
    small = SigmaBall(I, 0.5)
    assert in_sigma_ball(small, I + 0.2) is Membership.INSIDE_SLICE_DISC
    assert in_sigma_ball(small, J) is Membership.OUTSIDE
    unit_ball = SigmaBall(Quaternion(0), 1.0)
    assert in_sigma_ball(unit_ball, Quaternion(0, 0, 0.5)) is Membership.INSIDE_OMEGA


def test_boundary_band():
    ball = SigmaBall(Quaternion(0), 1.0)
    assert in_sigma_ball(ball, Quaternion(1.0)) is Membership.BOUNDARY
    assert in_sigma_ball(ball, Quaternion(1.0 + 5e-10)) is Membership.BOUNDARY
    assert in_sigma_ball(ball, Quaternion(1.0 + 5e-9)) is Membership.OUTSIDE


@pytest.mark.parametrize(
    "radius, expected",
    [(0.5, (False, False)), (1.5, (True, False)), (2.5, (True, True))],
)
def test_omega_ball_emptiness_and_center(radius, expected):
    ball = SigmaBall(I, radius)
    assert (omega_ball_nonempty(ball), omega_ball_contains_center(ball)) == expected


def test_ball_nesting_on_samples():
    rng = np.random.default_rng(2)
    for _ in range(200):
        p = random_quaternion(rng, 1.0)
        ball = SigmaBall(p, rng.uniform(0.1, 2.0))
        for _ in range(20):
            s = related_quaternion(rng, p)
            if in_omega_ball(ball, s):
                assert in_sigma_ball(ball, s).inside or in_sigma_ball(ball, s) is Membership.BOUNDARY
            if in_sigma_ball(ball, s).inside:
                assert in_euclidean_ball(p, ball.radius, s)


def test_omega_membership_is_axially_symmetric():
    rng = np.random.default_rng(4)
    ball = SigmaBall(Quaternion(0.2, 0.3, -0.1, 0.2), 1.1)
    for _ in range(200):
        x, y = rng.uniform(-1.5, 1.5), rng.uniform(0, 1.5)
        verdicts = {in_omega_ball(ball, Quaternion(x) + random_unit(rng) * y) for _ in range(8)}
        assert len(verdicts) == 1


def test_radius_must_be_positive():
    with pytest.raises(ValueError):
        SigmaBall(I, 0.0)


# analyticity regions


def test_analyticity_ball_examples():
    assert in_analyticity_region_ball(1.0, Quaternion(0.5))
    assert not in_analyticity_region_ball(1.0, Quaternion(0, 0.9))
    assert not in_analyticity_region_ball(1.0, Quaternion(1.0))
    assert not in_analyticity_region_ball(1.0, Quaternion(-1.0))


def test_analyticity_sigma_examples():
    assert in_analyticity_region_sigma(SigmaBall(Quaternion(0), 1.0), Quaternion(0.2))
    half_i = Quaternion(0, 0.5)
    ball = SigmaBall(half_i, 1.0)
    s = Quaternion(0.1, 0, 0.1)
    assert omega(s, half_i) == pytest.approx(math.sqrt(0.37), rel=1e-15)
    assert in_analyticity_region_sigma(ball, s)
    assert not in_analyticity_region_sigma(ball, half_i)


def test_analyticity_sigma_requires_nonempty_omega():
    with pytest.raises(EmptyRegionError):
        in_analyticity_region_sigma(SigmaBall(I, 0.5), Quaternion(0))


def test_real_center_reduces_to_shifted_ball():
    rng = np.random.default_rng(9)
    x0 = 0.4
    ball = SigmaBall(Quaternion(x0), 1.3)
    for _ in range(2000):
        s = random_quaternion(rng, 1.5)
        assert in_analyticity_region_sigma(ball, s) == in_analyticity_region_ball(1.3, s - x0)


def test_omega_part_lies_in_slice_part_on_the_slice():
    rng = np.random.default_rng(12)
    ball = SigmaBall(Quaternion(0.1, 0.2, 0.0, 0.3), 1.0)
    for _ in range(5000):
        s = Quaternion(rng.uniform(-1, 1)) + ball.slice * rng.uniform(-1.5, 1.5)
        if in_analyticity_region_omega(ball, s):
            assert in_analyticity_region_slice_disc(ball, s)


# boundary curves


def test_hyperbola_for_unit_ball_passes_through_plus_minus_one():
    ball = SigmaBall(Quaternion(0), 1.0)
    for x in (-1.0, 1.0):
        assert curve_residual(ball, "H", x, 0.0) == pytest.approx(0.0, abs=1e-15)
    # apex on the symmetry axis, lower branch
    assert curve_residual(ball, "H", 0.0, 1.0 / 3.0) == pytest.approx(0.0, abs=1e-15)
    pts = sample_boundary(ball, None, 65).curve("H")
    assert pts[0].x == pytest.approx(-1.0, abs=1e-15) and pts[0].y == 0.0
    assert pts[-1].x == pytest.approx(1.0, abs=1e-15) and pts[-1].y == 0.0
    apex = max(pts, key=lambda pt: pt.y)
    assert apex.y == pytest.approx(1.0 / 3.0, abs=1e-15) and apex.x == pytest.approx(0.0, abs=1e-12)


def test_sampled_boundary_satisfies_the_region_equation():
    ball = SigmaBall(Quaternion(0), 1.0)
    for pt in sample_boundary(ball, None, 200).points:
        s = Quaternion(pt.x, pt.y)
        assert abs(2 * s.imag_norm() - (1 - abs(s))) <= 1e-9


@pytest.mark.parametrize("center, radius", [(Quaternion(0.2, 0.5), 1.0), (Quaternion(-0.3, 0, 0.3, 0.4), 1.2)])
def test_arcs_are_on_their_curves_and_on_the_margin_zero_set(center, radius):
    ball = SigmaBall(center, radius)
    sample = sample_boundary(ball, None, 128)
    assert sample.curve("H") and sample.curve("K")
    for pt in sample.points:
        assert abs(curve_residual(ball, pt.curve, pt.x, pt.y)) <= 1e-9
    jj, _ = ball.slice.frame()
    for pt in sample.curve("H"):
        s = Quaternion(pt.x) + jj * pt.y
        assert abs(2 * pt.y - (radius - omega(s, center))) <= 1e-9
    for pt in sample.curve("K"):
        s = Quaternion(pt.x) + ball.slice * pt.y
        assert abs(2 * pt.y - (radius - abs(s - center))) <= 1e-9


def test_k_arc_degenerates_to_h_for_small_imaginary_part():
    x0 = 0.3
    ball = SigmaBall(Quaternion(x0, 1e-9), 1.0)
    flat = SigmaBall(Quaternion(0), 1.0)
    for pt in sample_boundary(ball, None, 64).points:
        assert abs(curve_residual(flat, "H", pt.x - x0, pt.y)) <= 1e-8


def test_sample_boundary_rejects_empty_omega():
    with pytest.raises(EmptyRegionError):
        sample_boundary(SigmaBall(I, 0.5))


def test_sigma_ball_circle_in_each_half_of_the_slice():
    ball = SigmaBall(Quaternion(0, 0.5), 1.0)
    same = sample_sigma_ball_boundary(ball, ball.slice, 64)
    other = sample_sigma_ball_boundary(ball, -ball.slice, 64)
    for pt in same.points:
        assert abs(curve_residual(ball, "circle", pt.x, pt.y, side=1)) <= 1e-12
    for pt in other.points:
        assert abs(curve_residual(ball, "circle", pt.x, pt.y, side=-1)) <= 1e-12


def test_cross_section_sigma_ball_with_empty_omega_is_the_disc():
    ball = SigmaBall(I, 0.5)
    grid = cross_section("sigma-ball", ball, ball.slice, 41)
    for pt in grid:
        expected = math.hypot(pt.x, pt.y - 1.0) < 0.5
        if abs(math.hypot(pt.x, pt.y - 1.0) - 0.5) > 1e-9:
            assert (pt.inside == "1") == expected
    off = cross_section("sigma-ball", ball, ImaginaryUnit(0, 0, 1, 0), 41)
    assert all(pt.inside == "0" for pt in off)


def test_cross_section_rejects_unknown_kind():
    with pytest.raises(ValueError):
        cross_section("torus", SigmaBall(I, 2.0), ImaginaryUnit(0, 1, 0, 0), 4)
