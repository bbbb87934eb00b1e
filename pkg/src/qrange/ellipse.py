"""Closed-form bild of the matrices ``[[k1 i, alpha], [-alpha, 1 + k2 i]]``.

For ``alpha^2 > k1 k2`` the lower bild is bounded by an ellipse through
``(0, -k1)`` and ``(1, -k2)`` with vertical tangents there, and by the real
segment ``[m, M]``. The conic is recovered from a homogeneous linear system;
``m`` and ``M`` are the real values ``x* A x`` can take.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import KITE_LIKE, CenterRegion, Line, clip_between
from .geometry2d import convex_hull
from .qmatrix import QMatrix
from .sampler import BildEstimate


@dataclass(frozen=True)
class EllipseModel:
    coefficients: tuple[float, float, float, float, float, float]   # A, B, C, D, E, F
    m: float
    M: float
    y_m: float
    a: float
    b: float
    alpha: float
    k1: float
    k2: float

    def value(self, x, y):
        A, B, C, D, E, F = self.coefficients
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return A * x * x + B * x * y + C * y * y + D * x + E * y + F

    def gradient(self, x: float, y: float) -> tuple[float, float]:
        A, B, C, D, E, _ = self.coefficients
        return 2 * A * x + B * y + D, B * x + 2 * C * y + E

    def reduced_form(self):
        """``(center, semi_axes, axes)``: the ellipse is ``center + axes @ (r1 cos t, r2 sin t)``."""
        A, B, C, D, E, F = self.coefficients
        H = np.array([[A, B / 2], [B / 2, C]])
        center = np.linalg.solve(2 * H, -np.array([D, E]))
        f0 = float(self.value(*center))
        lam, vecs = np.linalg.eigh(H)
        return center, np.sqrt(-f0 / lam), vecs

    def boundary(self, count: int = 4096) -> np.ndarray:
        """``count`` points on the ellipse, counterclockwise."""
        center, r, vecs = self.reduced_form()
        t = 2 * math.pi * np.arange(count) / count
        local = np.stack([r[0] * np.cos(t), r[1] * np.sin(t)], axis=1)
        pts = center + local @ vecs.T
        if np.linalg.det(vecs) < 0:
            pts = pts[::-1]
        return pts

    def upper_polygon(self, count: int = 4096) -> np.ndarray:
        """Polygon of B+: the mirrored part of the ellipse below the real axis."""
        pts = self.boundary(count)
        low = pts[pts[:, 1] < 0.0]
        cap = np.vstack([low, [[self.m, 0.0], [self.M, 0.0]]]) * np.array([1.0, -1.0])
        cap[cap[:, 1] == -0.0, 1] = 0.0
        return convex_hull(cap)

    def estimate(self, count: int = 4096) -> BildEstimate:
        return BildEstimate.from_polygon(self.upper_polygon(count))

    def contains_lower(self, x, y, tol: float = 0.0):
        return (self.value(x, y) <= tol) & (np.asarray(y) <= 0.0)


def family_matrix(alpha: float, k1: float, k2: float) -> QMatrix:
    return QMatrix.from_components([[0.0, alpha], [-alpha, 1.0]], [[k1, 0.0], [0.0, k2]])


def _check_params(alpha: float, k1: float, k2: float) -> None:
    for name, v in (("alpha", alpha), ("k1", k1), ("k2", k2)):
        if not (math.isfinite(v) and v > 0.0):
            raise ValueError(f"{name} must be a positive real, got {v!r}")
    if alpha * alpha <= k1 * k2:
        raise ValueError("need alpha^2 > k1*k2")


def real_segment(alpha: float, k1: float, k2: float) -> tuple[float, float]:
    """Endpoints of {x* A x real}: roots of ``D t^2 - (4a^2 - 2k1(k2-k1)) t + k1^2``.

    With x = (sqrt(1-t), sqrt(t) u) the value is real iff
    ``k1 (1-t) + k2 t <= 2 alpha sqrt(t (1-t))``.
    """
    d = k2 - k1
    den = d * d + 4 * alpha * alpha
    root = 2 * alpha * math.sqrt(alpha * alpha - k1 * k2)
    mid = 2 * alpha * alpha - k1 * d
    return (mid - root) / den, (mid + root) / den


def _row_point(x: float, y: float):
    return [x * x, x * y, y * y, x, y, 1.0]


def _row_vertical_tangent(x: float, y: float):
    # d/dy of the conic vanishes
    return [0.0, x, 2 * y, 0.0, 1.0, 0.0]


def st_ellipse(alpha: float, k1: float, k2: float) -> EllipseModel:
    _check_params(alpha, k1, k2)
    m0, M0 = real_segment(alpha, k1, k2)
    rows = np.array([
        _row_point(0.0, -k1), _row_vertical_tangent(0.0, -k1),
        _row_point(1.0, -k2), _row_vertical_tangent(1.0, -k2),
        _row_point(m0, 0.0), _row_point(M0, 0.0),
    ])
    _, sv, vt = np.linalg.svd(rows)
    coef = vt[-1] / vt[-1][0]
    A, B, C, D, E, F = (float(c) for c in coef)
    # m, M from the conic on y = 0: x^2 + D x + F = 0
    disc = math.sqrt(max(D * D - 4 * F, 0.0))
    m, M = (-D - disc) / 2, (-D + disc) / 2
    # lowest point: dF/dx = 0 gives x = -(B y + D) / 2, then a quadratic in y
    qa = C - B * B / 4
    qb = E - B * D / 2
    qc = F - D * D / 4
    y_m = (-qb - math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    partial = EllipseModel((A, B, C, D, E, F), m, M, y_m, math.nan, math.nan, alpha, k1, k2)
    a, b = st_derivatives(partial, k1, k2)
    return EllipseModel((A, B, C, D, E, F), m, M, y_m, a, b, alpha, k1, k2)


def st_derivatives(model: EllipseModel, k1: float | None = None,
                   k2: float | None = None) -> tuple[float, float]:
    """Left derivatives of ``x1`` and ``x2`` at 0 from their closed forms."""
    k1 = model.k1 if k1 is None else k1
    k2 = model.k2 if k2 is None else k2
    m, M = model.m, model.M
    if not M > m:
        raise ValueError("derivatives need m < M (vertical tangent otherwise)")
    a = 2 * m * M * (k1 + (k2 - k1) * m) / (k1 * k1 * (M - m))
    b = -2 * m * M * (k1 + (k2 - k1) * M) / (k1 * k1 * (M - m))
    return a, b


def implicit_derivatives(model: EllipseModel) -> tuple[float, float]:
    """dx/dy of the conic at (m, 0) and (M, 0)."""
    out = []
    for x in (model.m, model.M):
        gx, gy = model.gradient(x, 0.0)
        out.append(-gy / gx)
    return out[0], out[1]


def st_center(model: EllipseModel, count: int = 4096) -> CenterRegion:
    """Exact upper star-center: the triangle cut out by the two tangents."""
    m, M, a, b = model.m, model.M, model.a, model.b
    l, L = Line(a, m), Line(b, M)
    ya = (M - m) / (a - b)
    apex = (m + a * ya, ya)
    if model.value(apex[0], -apex[1]) <= 1e-12:
        region = np.array([[m, 0.0], [M, 0.0], [apex[0], apex[1]]])
    else:
        region = clip_between(model.upper_polygon(count), l, L)
    return CenterRegion(KITE_LIKE, region, (float(apex[0]), float(apex[1])), l, L)
