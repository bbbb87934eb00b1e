"""Sampling of x* A x on the unit sphere and reconstruction of the upper bild.

The upper bild B+ (class representatives ``(q_r, |q_v|)`` of W(A)) is convex,
so it is recovered from its support function ``h(theta)``. Two regimes:

* ``sin(theta) >= 0``: because W(A) is a union of similarity classes, the
  support equals the top eigenvalue of ``cos(theta) Q0 + sin(theta) Q1``,
  where ``Q_k`` are the real quadratic forms of the components of x* A x.
  The top eigenvector is an exact witness.
* ``sin(theta) < 0``: the support is a nonconvex problem. Starting points
  (best samples plus a warm start from the neighbouring direction) are moved
  into the span{1, i} slice and refined with SLSQP on
  ``max c Q0 - |s| Q1  s.t.  Q2 = Q3 = 0, Q1 >= 0, |x| = 1``.

Every reported witness is re-evaluated as ``(Re f, |Im f|)`` on the
normalized vector, so hull vertices are genuine points of B+.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .geometry2d import convex_hull, distance_to_polygon
from .qmatrix import EmptyRealPart, QMatrix, form_value, real_point
from .quat import Quaternion, UpperPoint, aligning_rotation, qmul, upper_representative

log = logging.getLogger(__name__)

UNIT_TOL = 1e-9
DEFAULT_SAMPLES = 200_000
DEFAULT_THETA_STEPS = 720
DEFAULT_BUDGET = 50
DEFAULT_TOL = 1e-2
TOP_STARTS = 2


@dataclass(frozen=True, eq=False)
class RangeSample:
    x: np.ndarray
    value: Quaternion
    bild_point: UpperPoint


@dataclass(frozen=True, eq=False)
class BildEstimate:
    hull: np.ndarray                      # (k, 2) counterclockwise
    m: float
    M: float
    pi_m: float
    pi_M: float
    y_M: float
    sample_count: int
    seed: int
    witnesses: np.ndarray = field(repr=False, default=None)   # (k, n, 4), one per hull vertex
    theta_steps: int = 0
    budget: int = 0

    @property
    def y_m(self) -> float:
        return -self.y_M

    def is_degenerate(self, tol: float = DEFAULT_TOL) -> bool:
        return self.y_M < tol

    @classmethod
    def from_polygon(cls, poly, seed: int = 0) -> BildEstimate:
        """Wrap an externally known B+ polygon (e.g. an exact model) as an estimate."""
        pts = np.asarray(poly, dtype=float)
        hull = convex_hull(pts)
        on_axis = hull[:, 1] == 0.0
        if np.any(on_axis):
            m, M = float(hull[on_axis, 0].min()), float(hull[on_axis, 0].max())
        else:
            m = M = float("nan")
        return cls(hull=hull, m=m, M=M, pi_m=float(hull[:, 0].min()),
                   pi_M=float(hull[:, 0].max()), y_M=float(hull[:, 1].max()),
                   sample_count=0, seed=seed)

    def lower_polygon(self) -> np.ndarray:
        """Conjugate hull (the lower bild), counterclockwise."""
        refl = self.hull * np.array([1.0, -1.0])
        return refl[::-1].copy()


# ---------------------------------------------------------------------------
# evaluation and sampling
# ---------------------------------------------------------------------------

def evaluate_form(A: QMatrix, x: np.ndarray) -> Quaternion:
    x = np.asarray(x, dtype=float).reshape(A.n, 4)
    nx = np.linalg.norm(x)
    if abs(nx - 1.0) > UNIT_TOL:
        raise ValueError(f"x must be a unit vector, |x| = {nx!r}")
    return Quaternion.from_array(form_value(A, x))


def range_sample(A: QMatrix, x: np.ndarray) -> RangeSample:
    q = evaluate_form(A, x)
    return RangeSample(np.asarray(x, dtype=float).reshape(A.n, 4), q, upper_representative(q))


def sample_sphere(n: int, count: int, seed: int) -> np.ndarray:
    """``count`` uniform unit vectors of H^n as an array ``(count, n, 4)``.

    Rows are drawn sequentially from one generator, so a larger ``count``
    with the same seed extends (never reshuffles) a smaller draw.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 4 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g.reshape(count, n, 4)


class _Forms:
    """Quadratic forms of x* A x on flattened real coordinates."""

    def __init__(self, A: QMatrix):
        self.A = A
        self.Q = A.quadratic_forms()
        self.dim = 4 * A.n

    def values(self, X: np.ndarray) -> np.ndarray:
        X = X.reshape(-1, self.dim)
        return np.einsum("np,kpq,nq->nk", X, self.Q, X, optimize=True)

    def points(self, X: np.ndarray) -> np.ndarray:
        v = self.values(X)
        return np.stack([v[:, 0], np.linalg.norm(v[:, 1:], axis=1)], axis=1)

    def align(self, z: np.ndarray) -> np.ndarray:
        """Right-multiply by a unit quaternion so that Im(x* A x) is along +i."""
        x = z.reshape(self.A.n, 4)
        val = form_value(self.A, x)
        s = aligning_rotation(val[1:])
        return qmul(x, s[None, :]).ravel()


def range_values(A: QMatrix, X: np.ndarray) -> np.ndarray:
    """``x* A x`` as ``(count, 4)`` arrays for unit vectors ``X`` of shape ``(count, n, 4)``."""
    return _Forms(A).values(np.asarray(X, dtype=float))


def bild_points(A: QMatrix, X: np.ndarray) -> np.ndarray:
    """``(Re f, |Im f|)`` for each unit vector in ``X`` (shape ``(count, n, 4)``)."""
    return _Forms(A).points(np.asarray(X, dtype=float))


def _direction(theta: float) -> tuple[float, float]:
    return math.cos(theta), math.sin(theta)


def _upper_support(forms: _Forms, c: float, s: float) -> np.ndarray:
    _, vecs = np.linalg.eigh(c * forms.Q[0] + s * forms.Q[1])
    return vecs[:, -1]


def _refine_lower(forms: _Forms, c: float, s: float, z0: np.ndarray, budget: int):
    """SLSQP from ``z0`` inside the i-slice; returns the best iterate seen."""
    Q0, Q1, Q2, Q3 = forms.Q
    d = np.array([c, s])

    def score(z):
        z = z / np.linalg.norm(z)
        return float(forms.points(z)[0] @ d)

    best_z = z0 / np.linalg.norm(z0)
    best = score(best_z)
    if budget <= 0:
        return best, best_z

    def track(z):
        nonlocal best, best_z
        val = score(z)
        if val > best:
            best, best_z = val, z / np.linalg.norm(z)

    G = c * Q0 + s * Q1
    cons = [
        {"type": "eq", "fun": lambda z: z @ Q2 @ z, "jac": lambda z: 2.0 * Q2 @ z},
        {"type": "eq", "fun": lambda z: z @ Q3 @ z, "jac": lambda z: 2.0 * Q3 @ z},
        {"type": "eq", "fun": lambda z: z @ z - 1.0, "jac": lambda z: 2.0 * z},
        {"type": "ineq", "fun": lambda z: z @ Q1 @ z, "jac": lambda z: 2.0 * Q1 @ z},
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            res = minimize(
                lambda z: -(z @ G @ z), z0, jac=lambda z: -2.0 * G @ z,
                method="SLSQP", constraints=cons, callback=track,
                options={"maxiter": budget, "ftol": 1e-15},
            )
            track(res.x)
        except (ValueError, np.linalg.LinAlgError) as exc:   # singular LSQ subproblem
            log.debug("SLSQP failed at theta=(%g, %g): %s", c, s, exc)
    return best, best_z


def _support_all(A: QMatrix, thetas: np.ndarray, X: np.ndarray, budget: int):
    """Support values and witnesses for every direction in ``thetas``."""
    forms = _Forms(A)
    Z = X.reshape(len(X), forms.dim)
    pts = forms.points(Z)
    hvals = np.empty(len(thetas))
    wit = np.empty((len(thetas), forms.dim))
    hermitian = A.is_hermitian(1e-14)

    upper = [t for t in range(len(thetas)) if math.sin(thetas[t]) >= 0.0]
    for t in upper:
        c, s = _direction(thetas[t])
        z = _upper_support(forms, c, s)
        val = float(forms.points(z)[0] @ (c, s))
        samp = pts @ (c, s)
        k = int(np.argmax(samp))
        if samp[k] > val:
            val, z = float(samp[k]), Z[k]
        hvals[t], wit[t] = val, z

    lower = [t for t in range(len(thetas)) if math.sin(thetas[t]) < 0.0]
    # two continuation chains: from theta=0 down to -pi/2, and from -pi up to -pi/2
    right = sorted((t for t in lower if math.cos(thetas[t]) >= 0.0), key=lambda t: -thetas[t])
    left = sorted((t for t in lower if math.cos(thetas[t]) < 0.0), key=lambda t: thetas[t])
    for chain, anchor in ((right, 0.0), (left, math.pi)):
        warm = _upper_support(forms, *_direction(anchor))
        for t in chain:
            c, s = _direction(thetas[t])
            samp = pts @ (c, s)
            top = np.argpartition(-samp, min(TOP_STARTS, len(samp) - 1))[:TOP_STARTS]
            best_val, best_z = -np.inf, None
            if hermitian:
                starts = [warm] + [Z[k] for k in top]
                for z in starts:
                    v = float(forms.points(z)[0] @ (c, s))
                    if v > best_val:
                        best_val, best_z = v, z
            else:
                for z in [warm] + [Z[k] for k in top]:
                    v, zr = _refine_lower(forms, c, s, forms.align(z), budget)
                    if v > best_val:
                        best_val, best_z = v, zr
            k = int(np.argmax(samp))
            if samp[k] > best_val:
                best_val, best_z = float(samp[k]), Z[k]
            hvals[t], wit[t] = best_val, best_z
            warm = best_z
    return hvals, wit, forms


def support_upper_bild(A: QMatrix, theta: float, budget: int = DEFAULT_BUDGET,
                       samples: int = 4096, seed: int = 0) -> tuple[float, RangeSample]:
    """Support value of B+ in direction ``theta`` and a witness attaining it."""
    if not -math.pi - 1e-12 <= theta <= math.pi + 1e-12:
        raise ValueError("theta must lie in [-pi, pi]")
    X = sample_sphere(A.n, samples, seed)
    hvals, wit, _ = _support_all(A, np.array([theta]), X, budget)
    x = wit[0].reshape(A.n, 4)
    x = x / np.linalg.norm(x)
    return float(hvals[0]), range_sample(A, x)


def upper_hull(A: QMatrix, theta_steps: int = DEFAULT_THETA_STEPS,
               samples: int = DEFAULT_SAMPLES, seed: int = 0,
               budget: int = DEFAULT_BUDGET) -> BildEstimate:
    """Convex polygon approximation of B+ with its extreme scalars."""
    if theta_steps < 8:
        raise ValueError("theta_steps must be at least 8")
    thetas = -math.pi + 2.0 * math.pi * np.arange(theta_steps) / theta_steps
    X = sample_sphere(A.n, samples, seed)
    _, wit, forms = _support_all(A, thetas, X, budget)
    wit = wit / np.linalg.norm(wit, axis=1, keepdims=True)

    cand = [w for w in wit]
    try:
        rp = real_point(A)
        cand.append(rp.x.ravel() / np.linalg.norm(rp.x))
    except EmptyRealPart:
        log.warning("no real point for a 1x1 nonreal matrix; hull is a single point")
    # the four axis directions, computed exactly
    for c, s in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)):
        cand.append(_upper_support(forms, c, s))
    Z = np.array(cand)
    pts = forms.points(Z)

    scale = 1.0 + float(np.max(np.abs(pts)))
    snap = 1e-9 * scale
    pts[pts[:, 1] <= snap, 1] = 0.0

    hull_idx = convex_hull(pts, return_indices=True)
    hull = pts[hull_idx]
    on_axis = hull[:, 1] == 0.0
    if np.any(on_axis):
        m, M = float(hull[on_axis, 0].min()), float(hull[on_axis, 0].max())
    else:
        # only possible for a 1x1 nonreal matrix
        m = M = float("nan")
    return BildEstimate(
        hull=hull,
        m=m,
        M=M,
        pi_m=float(hull[:, 0].min()),
        pi_M=float(hull[:, 0].max()),
        y_M=float(hull[:, 1].max()),
        sample_count=samples,
        seed=seed,
        witnesses=Z[hull_idx].reshape(len(hull_idx), A.n, 4),
        theta_steps=theta_steps,
        budget=budget,
    )


def membership(q: Quaternion, est: BildEstimate, eps: float = DEFAULT_TOL) -> bool:
    """Is ``q`` in W(A) up to ``eps``? Decided on its class representative."""
    p = upper_representative(q)
    return distance_to_polygon((p.x, p.y), est.hull) <= eps
