import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrange.geometry2d import polygon_area
from qrange.qmatrix import QMatrix, form_value, real_point
from qrange.quat import Quaternion, upper_representative
from qrange.sampler import (BildEstimate, evaluate_form, membership, range_sample, sample_sphere,
                            support_upper_bild, upper_hull)

from conftest import BIG_M_EX, M_EX, a_ex, random_qmatrix

HERM = QMatrix.from_components(np.diag([1.0, 2.0]))


# -- evaluation ---------------------------------------------------------------

def test_evaluate_basis_vectors():
    A = a_ex()
    e1 = np.array([[1.0, 0, 0, 0], [0, 0, 0, 0]])
    e2 = e1[::-1].copy()
    assert evaluate_form(A, e1) == Quaternion(0, 0.125, 0, 0)
    s = range_sample(A, e2)
    assert s.value == Quaternion(1, 0.125, 0, 0)
    assert s.bild_point.as_tuple() == (1.0, 0.125)


def test_evaluate_hermitian_mixture():
    x = np.array([[1, 0, 0, 0], [1, 0, 0, 0]]) / math.sqrt(2)
    assert evaluate_form(HERM, x).real == pytest.approx(1.5, abs=1e-15)


def test_evaluate_rejects_non_unit():
    with pytest.raises(ValueError):
        evaluate_form(HERM, np.array([[1.0, 0, 0, 0], [1.0, 0, 0, 0]]))


# -- sphere sampling ----------------------------------------------------------

def test_sample_sphere_units():
    X = sample_sphere(1, 3, 42)
    assert X.shape == (3, 1, 4)
    assert np.allclose(np.linalg.norm(X.reshape(3, -1), axis=1), 1.0, atol=1e-12)


def test_sample_sphere_determinism():
    a = sample_sphere(2, 100_000, 7)
    b = sample_sphere(2, 100_000, 7)
    c = sample_sphere(2, 100_000, 8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_sphere_prefix_stable():
    assert np.array_equal(sample_sphere(3, 50, 1), sample_sphere(3, 500, 1)[:50])


def test_sample_sphere_rejects_empty():
    with pytest.raises(ValueError):
        sample_sphere(2, 0, 0)


# -- supports -----------------------------------------------------------------

def test_support_apex_height():
    h, w = support_upper_bild(a_ex(), math.pi / 2)
    assert abs(h - 0.375) <= 5e-3
    assert w.bild_point.y == pytest.approx(h, abs=1e-9)


def test_support_hermitian():
    h, _ = support_upper_bild(HERM, 0.0)
    assert abs(h - 2.0) <= 1e-9


def test_support_right_projection():
    h, _ = support_upper_bild(a_ex(), 0.0)
    assert abs(h - 1.0) <= 5e-3


def test_support_theta_domain():
    with pytest.raises(ValueError):
        support_upper_bild(HERM, 4.0)


@pytest.mark.parametrize("theta", [-3 * math.pi / 4, -math.pi / 3, -0.2])
def test_support_lower_directions_monotone_in_budget(theta):
    A = a_ex()
    vals = [support_upper_bild(A, theta, budget=b, samples=512)[0] for b in (0, 5, 50)]
    assert vals[0] <= vals[1] + 1e-15 <= vals[2] + 2e-15


def test_support_monotone_in_samples():
    A = a_ex()
    for theta in (-2.5, -1.0, 0.7, 2.0):
        lo = support_upper_bild(A, theta, samples=256, budget=0)[0]
        hi = support_upper_bild(A, theta, samples=4096, budget=0)[0]
        assert hi >= lo - 1e-12


def test_support_lower_direction_matches_oracle():
    # lower-left tangent of the mirrored ellipse cap: the point (m, 0) is extreme
    # for any direction between the cap's tangent and straight down-left
    A = a_ex()
    theta = -math.pi / 2 - 0.3
    h, w = support_upper_bild(A, theta)
    c, s = math.cos(theta), math.sin(theta)
    assert h == pytest.approx(c * M_EX, abs=1e-6)
    assert w.bild_point.y == pytest.approx(0.0, abs=1e-4)


# -- hull ---------------------------------------------------------------------

def test_hull_example(est_ex):
    assert abs(est_ex.m - M_EX) <= 5e-3
    assert abs(est_ex.M - BIG_M_EX) <= 5e-3
    assert abs(est_ex.pi_m) <= 5e-3
    assert abs(est_ex.pi_M - 1.0) <= 5e-3
    assert abs(est_ex.y_M - 0.375) <= 5e-3


def test_hull_invariants(est_ex):
    h = est_ex.hull
    assert np.all(h[:, 1] >= 0.0)
    assert polygon_area(h) > 0
    assert est_ex.pi_m <= est_ex.m <= est_ex.M <= est_ex.pi_M
    assert est_ex.y_M == h[:, 1].max() and est_ex.y_m == -est_ex.y_M
    on_axis = h[h[:, 1] == 0.0, 0]
    assert on_axis.min() == est_ex.m and on_axis.max() == est_ex.M


def test_hull_vertices_are_genuine(A_ex, est_ex):
    for p, x in zip(est_ex.hull, est_ex.witnesses):
        assert abs(np.linalg.norm(x) - 1.0) <= 1e-12
        q = upper_representative(Quaternion(*form_value(A_ex, x)))
        assert abs(q.x - p[0]) <= 1e-12
        assert abs(q.y - p[1]) <= 1e-9


def test_hull_hermitian(est_hermitian):
    e = est_hermitian
    assert e.y_M <= 1e-9
    assert e.m == pytest.approx(1.0, abs=1e-12) and e.pi_m == pytest.approx(1.0, abs=1e-12)
    assert e.M == pytest.approx(2.0, abs=1e-12) and e.pi_M == pytest.approx(2.0, abs=1e-12)
    assert len(e.hull) == 2


def test_hull_vertical_segment():
    A = QMatrix(np.array([[[0, 1, 0, 0], [0, 0, 0, 0]], [[0, 0, 0, 0], [0, 1, 0, 0]]], float))
    e = upper_hull(A, theta_steps=64, samples=5000)
    assert e.m == 0.0 and e.M == 0.0
    assert abs(e.pi_m) <= 1e-9 and abs(e.pi_M) <= 1e-9
    assert e.y_M == pytest.approx(1.0, abs=1e-9)
    # dense sampling oracle: every value is pure with norm at most 1
    X = sample_sphere(2, 20000, 1)
    vals = np.array([form_value(A, x) for x in X[:2000]])
    assert np.abs(vals[:, 0]).max() <= 1e-12
    assert np.linalg.norm(vals[:, 1:], axis=1).max() <= 1 + 1e-12


def test_hull_deterministic():
    A = random_qmatrix(np.random.default_rng(5), 2)
    e1 = upper_hull(A, theta_steps=32, samples=2000, seed=3)
    e2 = upper_hull(A, theta_steps=32, samples=2000, seed=3)
    assert np.array_equal(e1.hull, e2.hull)
    assert (e1.m, e1.M, e1.pi_m, e1.pi_M, e1.y_M) == (e2.m, e2.M, e2.pi_m, e2.pi_M, e2.y_M)


def test_hull_rejects_few_directions():
    with pytest.raises(ValueError):
        upper_hull(HERM, theta_steps=4)


@given(st.integers(0, 10_000), st.integers(2, 3))
@settings(max_examples=8, deadline=None)
def test_hull_contains_samples_and_real_point(seed, n):
    A = random_qmatrix(np.random.default_rng(seed), n)
    est = upper_hull(A, theta_steps=48, samples=3000, seed=seed)
    assert est.m >= est.pi_m - 1e-6 and est.M <= est.pi_M + 1e-6
    r = real_point(A).value
    assert membership(Quaternion(r), est, 1e-9)
    X = sample_sphere(n, 500, seed + 1)
    for x in X[:100]:
        assert membership(Quaternion(*form_value(A, x)), est, 5e-2)


def test_hermitian_extremes_are_eigenvalues():
    rng = np.random.default_rng(9)
    B = random_qmatrix(rng, 3)
    H = (B + B.adjoint()).scale(0.5)
    est = upper_hull(H, theta_steps=32, samples=2000)
    from qrange.qmatrix import complex_adjoint
    ev = np.linalg.eigvalsh(complex_adjoint(H))
    assert est.y_M <= 1e-9
    assert est.m == pytest.approx(ev[0], abs=1e-9) and est.M == pytest.approx(ev[-1], abs=1e-9)


# -- membership ---------------------------------------------------------------

def test_membership_examples(est_ex):
    assert membership(Quaternion(0.5, 0, 0.375, 0), est_ex, 1e-2)
    assert not membership(Quaternion(2.0), est_ex, 1e-2)
    assert membership(Quaternion(real_point(a_ex()).value), est_ex, 1e-2)


def test_from_polygon():
    est = BildEstimate.from_polygon([[0, 0], [1, 0], [0.5, 1], [-0.2, 0.5]])
    assert (est.m, est.M, est.pi_m, est.pi_M, est.y_M) == (0.0, 1.0, -0.2, 1.0, 1.0)
