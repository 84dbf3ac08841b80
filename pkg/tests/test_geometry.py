"""Metrics, Gramians, cross products and complement duality."""

import random

import pytest

from pnforge.errors import DegenerateFrame, DimensionMismatch, NotOrthogonal
from pnforge.geometry import (
    EUCLIDEAN3,
    MINKOWSKI31,
    Metric,
    complement_duality_check,
    cross3,
    cross4,
    gram_det,
    inner,
    reduced_gram_det,
)
from pnforge.polyalg import BiPoly, PolyVec, Q, u, v

from conftest import rand_polyvec


def test_euclidean_norm_of_sphere_field():
    n = PolyVec([2 * u, 2 * v, u ** 2 + v ** 2 - 1])
    s = u ** 2 + v ** 2 + 1
    assert inner(n, n, EUCLIDEAN3) == s * s


def test_minkowski_isotropic_field():
    n = PolyVec([2 * u, 2 * v, u ** 2 + v ** 2 - 1, u ** 2 + v ** 2 + 1])
    assert inner(n, n, MINKOWSKI31).is_zero()


def test_inner_with_zero():
    a = PolyVec([u, v, 1])
    z = PolyVec([0, 0, 0])
    assert inner(a, z, EUCLIDEAN3).is_zero()


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inner(PolyVec([u, v]), PolyVec([u, v]), EUCLIDEAN3)


def test_cross3_module_basis_gives_normal():
    q = PolyVec([u ** 2 - 1, u * v, 2 * u])
    r = PolyVec([u * v, v ** 2 - 1, 2 * v])
    assert cross3(q, r) == PolyVec([2 * u, 2 * v, 1 - u ** 2 - v ** 2])


def test_cross3_self_and_units():
    a = PolyVec([u, v ** 2, 1 - u])
    assert cross3(a, a).is_zero()
    e1 = PolyVec([1, 0, 0])
    e2 = PolyVec([0, 1, 0])
    assert cross3(e1, e2) == PolyVec([0, 0, 1])


def test_cross3_orthogonality_random():
    rng = random.Random(99)
    for _ in range(100):
        a = rand_polyvec(rng, 3, 2, scale=3)
        b = rand_polyvec(rng, 3, 2, scale=3)
        c = cross3(a, b)
        assert inner(c, a, EUCLIDEAN3).is_zero()
        assert inner(c, b, EUCLIDEAN3).is_zero()


def test_gram_equals_cross_norm_random():
    rng = random.Random(5)
    for _ in range(100):
        a = rand_polyvec(rng, 3, 2, scale=3)
        b = rand_polyvec(rng, 3, 2, scale=3)
        c = cross3(a, b)
        assert gram_det([a, b], EUCLIDEAN3) == inner(c, c, EUCLIDEAN3)


def test_gram_det_examples():
    q = PolyVec([u ** 2 - 1, u * v, 2 * u])
    r = PolyVec([u * v, v ** 2 - 1, 2 * v])
    s = u ** 2 + v ** 2 + 1
    assert gram_det([q, r], EUCLIDEAN3) == s * s
    iso = PolyVec([2 * u, 2 * v, u ** 2 + v ** 2 - 1, u ** 2 + v ** 2 + 1])
    assert gram_det([iso], MINKOWSKI31).is_zero()
    assert gram_det(
        [PolyVec([1, 0, 0]), PolyVec([0, 1, 0])], EUCLIDEAN3
    ) == BiPoly.const(1)


def test_reduced_gram_kills_squares():
    q = PolyVec([u ** 2 - 1, u * v, 2 * u])
    r = PolyVec([u * v, v ** 2 - 1, 2 * v])
    assert reduced_gram_det([q, r], EUCLIDEAN3) == BiPoly.const(1)
    assert reduced_gram_det(
        [PolyVec([1, 0, 0]), PolyVec([0, 1, 0])], EUCLIDEAN3
    ) == BiPoly.const(1)


def test_reduced_gram_degenerate():
    a = PolyVec([u, v, 0])
    with pytest.raises(DegenerateFrame):
        reduced_gram_det([a, a], EUCLIDEAN3)


def test_reduced_gram_basis_change_invariance():
    rng = random.Random(11)
    for _ in range(25):
        a = rand_polyvec(rng, 3, 1, scale=2)
        b = rand_polyvec(rng, 3, 1, scale=2)
        if gram_det([a, b], EUCLIDEAN3).is_zero():
            continue
        # random polynomial change of basis with nonzero determinant
        m11, m12 = rand_polyvec(rng, 2, 1, scale=2)
        m21, m22 = rand_polyvec(rng, 2, 1, scale=2)
        det = m11 * m22 - m12 * m21
        if det.is_zero():
            continue
        a2 = PolyVec([m11 * a[i] + m12 * b[i] for i in range(3)])
        b2 = PolyVec([m21 * a[i] + m22 * b[i] for i in range(3)])
        if gram_det([a2, b2], EUCLIDEAN3).is_zero():
            continue
        assert reduced_gram_det([a2, b2], EUCLIDEAN3) == reduced_gram_det(
            [a, b], EUCLIDEAN3
        )


def test_duality_trivial_frames():
    V = [PolyVec([1, 0, 0])]
    W = [PolyVec([0, 1, 0]), PolyVec([0, 0, 1])]
    assert complement_duality_check(V, W, EUCLIDEAN3) == 1


def test_duality_minkowski_constant_frames():
    V = [PolyVec([1, 0, 0, 0]), PolyVec([0, 1, 0, 0])]
    W = [PolyVec([0, 0, 1, 0]), PolyVec([0, 0, 0, 1])]
    c = complement_duality_check(V, W, MINKOWSKI31)
    assert c is not None and c != 0
    assert c == -1  # the complement is Lorentzian


def test_duality_sphere_example():
    q = PolyVec([u ** 2 - 1, u * v, 2 * u])
    r = PolyVec([u * v, v ** 2 - 1, 2 * v])
    n = PolyVec([2 * u, 2 * v, 1 - u ** 2 - v ** 2])
    c = complement_duality_check([q, r], [n], EUCLIDEAN3)
    assert c is not None and c != 0


def test_duality_not_orthogonal_raises():
    with pytest.raises(NotOrthogonal):
        complement_duality_check(
            [PolyVec([1, 0, 0])], [PolyVec([1, 1, 0]), PolyVec([0, 0, 1])], EUCLIDEAN3
        )


def test_cross4_orthogonality():
    rng = random.Random(3)
    for _ in range(30):
        a = rand_polyvec(rng, 4, 1, scale=2)
        b = rand_polyvec(rng, 4, 1, scale=2)
        c = rand_polyvec(rng, 4, 1, scale=2)
        d = cross4(a, b, c)
        for x in (a, b, c):
            assert inner(d, x, MINKOWSKI31).is_zero()


def test_metric_signature():
    m = Metric(3, 1)
    assert m.dim == 4
    assert [m.sign(i) for i in range(4)] == [1, 1, 1, -1]
