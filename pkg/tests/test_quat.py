import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrange.quat import (I, J, K, ONE, Quaternion, SimilarityClass, UpperPoint, aligning_rotation,
                         hamilton_product, qmul, rotate_to_slice, similar, similarity_class,
                         upper_representative)

coef = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, coef, coef, coef, coef)


def unit(q: Quaternion) -> Quaternion:
    return q / q.norm()


# -- product ---------------------------------------------------------------

def test_basis_relations():
    assert hamilton_product(I, J) == K
    for u in (I, J, K):
        assert u * u == Quaternion(-1.0)
    assert I * J * K == Quaternion(-1.0)
    assert J * I == -K


def test_identity_element():
    q = Quaternion(2, 3, 0, -1)
    assert hamilton_product(ONE, q) == q
    assert hamilton_product(q, ONE) == q


def test_product_with_conjugate_is_squared_norm():
    p = Quaternion(1, 1, 1, 1)
    assert hamilton_product(p, p.conjugate()) == Quaternion(4.0)


@given(quats, quats)
def test_norm_is_multiplicative(p, q):
    assert math.isclose((p * q).norm(), p.norm() * q.norm(), rel_tol=1e-12, abs_tol=1e-12)


@given(quats, quats, quats)
def test_associative_and_distributive(p, q, r):
    scale = 1.0 + p.norm() * q.norm() * r.norm()
    assert ((p * q) * r).isclose(p * (q * r), 1e-12 * scale)
    assert (p * (q + r)).isclose(p * q + p * r, 1e-12 * scale)


def test_vectorized_product_matches_scalar():
    rng = np.random.default_rng(0)
    P, Q = rng.standard_normal((2, 50, 4))
    out = qmul(P, Q)
    for k in range(50):
        expect = Quaternion(*P[k]) * Quaternion(*Q[k])
        assert np.allclose(out[k], expect.to_array(), atol=1e-14)


# -- similarity ------------------------------------------------------------

@pytest.mark.parametrize("p, q, expected", [
    (Quaternion(1, 2, 0, 0), Quaternion(1, 0, 0, -2), True),
    (Quaternion(0, 1, 0, 0), Quaternion(0, 2, 0, 0), False),
    (Quaternion(3, 0, -4, 0), Quaternion(3, 4, 0, 0), True),
])
def test_similar_examples(p, q, expected):
    assert similar(p, q) is expected


@given(quats, quats)
def test_conjugation_preserves_class(q, s):
    if s.norm() < 1e-3:
        return
    s = unit(s)
    assert similar(s.conjugate() * q * s, q, eps=1e-12 * (1 + q.norm()))


@given(st.lists(quats, min_size=1, max_size=6))
def test_similar_is_equivalence(qs):
    # build a sample with guaranteed related pairs
    sample = qs + [Quaternion(q.a0, q.a3, q.a1, q.a2) for q in qs]
    for p in sample:
        assert similar(p, p)
        for q in sample:
            assert similar(p, q) == similar(q, p)
            if similar(p, q):
                for r in sample:
                    if similar(q, r):
                        assert similar(p, r)


def test_similarity_class_fields():
    c = similarity_class(Quaternion(3, 0, -4, 0))
    assert c == SimilarityClass(3.0, 4.0)
    assert c.matches(Quaternion(3, 4, 0, 0))
    with pytest.raises(ValueError):
        SimilarityClass(0.0, -1.0)


# -- representatives and slices --------------------------------------------

@pytest.mark.parametrize("q, expected", [
    (Quaternion(3, 0, -4, 0), (3.0, 4.0)),
    (Quaternion(5), (5.0, 0.0)),
    (Quaternion(1, 1, 1, 1), (1.0, math.sqrt(3.0))),
])
def test_upper_representative_examples(q, expected):
    p = upper_representative(q)
    assert p.x == pytest.approx(expected[0], abs=1e-15)
    assert p.y == pytest.approx(expected[1], abs=1e-15)


def test_upper_point_rejects_lower_half():
    with pytest.raises(ValueError):
        UpperPoint(0.0, -1e-3)


@pytest.mark.parametrize("u, expected", [
    (K, Quaternion(3, 0, 0, 4)),
    (I, Quaternion(3, 4, 0, 0)),
])
def test_rotate_to_slice_examples(u, expected):
    assert rotate_to_slice(UpperPoint(3, 4), u) == expected


def test_rotate_apex_into_j_slice():
    assert rotate_to_slice((0.5, 0.375), J) == Quaternion(0.5, 0, 0.375, 0)


@pytest.mark.parametrize("u", [Quaternion(0, 2, 0, 0), Quaternion(0.1, 1, 0, 0), Quaternion(1)])
def test_rotate_to_slice_rejects_bad_direction(u):
    with pytest.raises(ValueError):
        rotate_to_slice(UpperPoint(1, 1), u)


@given(coef, st.floats(0, 10), st.tuples(coef, coef, coef))
def test_slice_round_trip(x, y, v):
    v = np.array(v)
    if np.linalg.norm(v) < 1e-3:
        return
    v = v / np.linalg.norm(v)
    q = rotate_to_slice(UpperPoint(x, y), Quaternion(0.0, *v))
    p = upper_representative(q)
    assert abs(p.x - x) <= 1e-12 and abs(p.y - y) <= 1e-12 * (1 + y)


@given(st.tuples(coef, coef, coef))
@settings(max_examples=200)
def test_aligning_rotation_moves_vector_onto_i(v):
    v = np.array(v)
    if np.linalg.norm(v) < 1e-6:
        return
    s = aligning_rotation(v)
    assert abs(np.linalg.norm(s) - 1.0) < 1e-12
    out = qmul(qmul(s * np.array([1, -1, -1, -1]), np.concatenate([[0.0], v])), s)
    assert np.allclose(out, [0.0, np.linalg.norm(v), 0.0, 0.0], atol=1e-9 * (1 + np.linalg.norm(v)))


def test_json_form():
    q = Quaternion.from_array([1, 2, 3, 4])
    assert q.to_list() == [1.0, 2.0, 3.0, 4.0]
    with pytest.raises(ValueError):
        Quaternion.from_array([1, 2, 3])
