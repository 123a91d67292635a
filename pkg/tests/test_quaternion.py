import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qseries.quaternion import (
    ONE,
    ArithmeticConsistencyError,
    I,
    ImaginaryUnit,
    J,
    K,
    Quaternion,
    ZeroDivisionQuaternionError,
    alignment_deviation,
    imaginary_unit_of,
    inverse,
    is_real,
    join_from_frame,
    line_coordinate,
    multiply,
    on_line,
    power,
    recover_components,
    same_slice,
    split_in_frame,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)


def close(a, b, tol=1e-12):
    return abs(Quaternion(*a) - Quaternion(*b)) <= tol * max(1.0, abs(Quaternion(*a)), abs(Quaternion(*b)))


# multiplication table and worked products


def test_basis_products():
    assert multiply(I, J) == K
    assert multiply(J, I) == -K
    assert multiply(J, K) == I
    assert multiply(K, I) == J
    for u in (I, J, K):
        assert multiply(u, u) == -ONE


def test_square_of_1_2_3_4():
    q = Quaternion(1, 2, 3, 4)
    assert q * q == Quaternion(-28, 4, 6, 8)


@given(quats)
def test_one_is_neutral(q):
    assert q * ONE == q
    assert ONE * q == q


def test_inverse_examples():
    assert inverse(I) == -I
    assert inverse(Quaternion(2)) == Quaternion(0.5)
    assert close(inverse(Quaternion(1, 1)), Quaternion(0.5, -0.5))
    assert close(1 / Quaternion(1, 1), Quaternion(0.5, -0.5))


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionQuaternionError):
        inverse(Quaternion(0))
    with pytest.raises(ZeroDivisionError):
        Quaternion(1, 2) / Quaternion(0)


@given(quats)
def test_inverse_is_two_sided(q):
    if abs(q) < 1e-3:
        return
    assert close(q * inverse(q), ONE, 1e-12)
    assert close(inverse(q) * q, ONE, 1e-12)


def test_power_matches_repeated_product():
    q = Quaternion(0.3, -0.2, 0.5, 0.1)
    acc = ONE
    for n in range(8):
        assert close(power(q, n), acc, 1e-14)
        acc = acc * q
    assert close(power(q, -2), inverse(q * q))


# algebraic invariants


@settings(max_examples=300)
@given(quats, quats, quats)
def test_associativity(a, b, c):
    lhs, rhs = (a * b) * c, a * (b * c)
    scale = abs(a) * abs(b) * abs(c)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, scale)


@given(quats, quats)
def test_modulus_is_multiplicative(a, b):
    assert abs(abs(a * b) - abs(a) * abs(b)) <= 1e-12 * max(1.0, abs(a) * abs(b))


@given(quats, quats)
def test_conjugate_reverses_products(a, b):
    lhs = (a * b).conj()
    rhs = b.conj() * a.conj()
    for u, v in zip(lhs, rhs):
        assert abs(u - v) <= 4 * np.spacing(max(1.0, abs(a) * abs(b)))


def test_associativity_sweep():
    rng = np.random.default_rng(7)
    a, b, c = (rng.uniform(-2, 2, size=(100_000, 4)) for _ in range(3))
    from qseries.quaternion import qmul_arrays

    lhs = qmul_arrays(qmul_arrays(a, b), c)
    rhs = qmul_arrays(a, qmul_arrays(b, c))
    scale = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1) * np.linalg.norm(c, axis=1)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * np.maximum(1.0, scale)[:, None])


# component recovery


def test_recover_components_examples():
    assert recover_components(Quaternion(1, 2, 3, 4)) == pytest.approx((1, 2, 3, 4), abs=1e-15)
    assert recover_components(Quaternion(0)) == (0.0, 0.0, 0.0, 0.0)
    assert recover_components(Quaternion(7)) == (7.0, 0.0, 0.0, 0.0)


@given(quats)
def test_recover_components_round_trip(q):
    got = recover_components(q)
    for u, v in zip(got, q):
        assert abs(u - v) <= 1e-14 * max(1.0, abs(q))


def test_recover_components_detects_broken_arithmetic(monkeypatch):
    # a product that drops the cross terms makes the nonreal residue visible
    good_mul = Quaternion.__mul__

    def bad_mul(self, other):
        if not isinstance(other, tuple):
            return good_mul(self, other)
        a1, b1, c1, d1 = self
        a2, b2, c2, d2 = other
        return Quaternion(a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2, a1 * b2 + b1 * a2, a1 * c2 + c1 * a2, a1 * d2 + d1 * a2 + 0.5)

    monkeypatch.setattr(Quaternion, "__mul__", bad_mul)
    with pytest.raises(ArithmeticConsistencyError):
        recover_components(Quaternion(1, 2, 3, 4))


# slices


def test_imaginary_unit_examples():
    assert imaginary_unit_of(Quaternion(3, 0, 4, 0)) == J
    assert imaginary_unit_of(Quaternion(5)) is None
    u = imaginary_unit_of(Quaternion(1, 1, 1, 0), 1e-12)
    assert close(u, Quaternion(0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0), 1e-15)


def test_realness_threshold_is_relative():
    assert is_real(Quaternion(1e6, 1e-7))
    assert not is_real(Quaternion(1e-3, 1e-9))
    assert is_real(Quaternion(1.0, 1e-3), realness_tol=1e-2)


def test_same_slice_examples():
    assert same_slice(I, Quaternion(2, 3))
    assert same_slice(I, Quaternion(2, -5))
    assert not same_slice(I, J)


def test_real_points_lie_on_every_slice():
    assert same_slice(Quaternion(3), J)
    assert same_slice(Quaternion(0.5, 0.1, 0.2, 0.3), Quaternion(-1))


def test_same_slice_alignment_threshold():
    p = Quaternion(0, 1)
    near = Quaternion(0, 1, 5e-11, 0)
    far = Quaternion(0, 1, 1e-8, 0)
    assert same_slice(p, near)
    assert not same_slice(p, far)
    assert same_slice(p, far, align_tol=1e-6)
    assert alignment_deviation(p, far) == pytest.approx(1e-8, rel=1e-6)
    assert math.isnan(alignment_deviation(p, Quaternion(2)))


@given(quats, quats)
def test_same_slice_reflexive_symmetric(p, q):
    assert same_slice(p, p)
    assert same_slice(p, q) == same_slice(q, p)


@given(quats, st.floats(-3, 3), st.floats(-3, 3))
def test_same_slice_transitive_on_a_line(p, s, t):
    if is_real(p):
        return
    u = imaginary_unit_of(p)
    q = Quaternion(s) + u * (t if t else 1.0)
    r = Quaternion(t) - u * (s if s else 1.0)
    assert same_slice(p, q) and same_slice(q, r) and same_slice(p, r)


def test_imaginary_unit_validation_and_frame():
    with pytest.raises(ValueError):
        ImaginaryUnit(0, 1, 1, 0)
    u = ImaginaryUnit.normalize((0, 1, -2, 0.5))
    jj, kk = u.frame()
    assert close(u * jj, kk, 1e-15)
    assert abs((u * jj)[0]) < 1e-15
    assert u.same_line(-u)


def test_line_round_trip():
    u = ImaginaryUnit.normalize((0, 1, 2, 3))
    c = complex(0.25, -1.5)
    assert line_coordinate(on_line(c, u), u) == pytest.approx(c, abs=1e-15)


def test_frame_split_round_trip():
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=(6, 4))
    u = ImaginaryUnit.normalize((0, *rng.normal(size=3)))
    alpha, beta, frame = split_in_frame(coeffs, u)
    for row, a, b in zip(coeffs, alpha, beta):
        assert close(join_from_frame(a, b, frame), row, 1e-14)


# serialization


def test_json_accepts_integers_and_floats():
    assert Quaternion.from_json("[1, 2.5, -3, 4e-1]") == Quaternion(1, 2.5, -3, 0.4)
    assert Quaternion.from_json([0, 0, 0, 1]) == K


@pytest.mark.parametrize("bad", ["[1,2,3]", '["a",0,0,0]', "[true,0,0,0]", '{"w":1}'])
def test_json_rejects_malformed(bad):
    with pytest.raises(ValueError):
        Quaternion.from_json(bad)


@given(quats)
def test_json_round_trip_is_exact(q):
    assert Quaternion.from_json(json.dumps(q.to_json())) == q
