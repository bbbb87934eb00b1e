"""Boundary functions, tangent lines and the star-center of the bild.

Conventions: points are ``(x, y)`` with ``x`` the real part. The lower bild
B- is the mirror image of the estimated upper hull, and on ``[y_m, 0]``

    x1(y) = min{x : (x, y) in B-},   x2(y) = max{x : (x, y) in B-}.

``x1`` is convex, ``x2`` concave. Their left derivatives at 0 give the lines
``l(y) = a y + m`` and ``L(y) = b y + M``; the upper star-center is the part
of B+ squeezed between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry2d import (clip_halfplane, convex_hull, distances_to_polygon,
                         inside_convex, reflect_y)
from .quat import Quaternion, upper_representative
from .sampler import DEFAULT_TOL, BildEstimate

WHOLE_BILD = "whole_bild"
POINT = "point"
VERTICAL_SEGMENT = "vertical_segment"
KITE_LIKE = "kite_like"

DEFAULT_PROBES = (1 / 8, 1 / 16, 1 / 32, 1 / 64)
DEFAULT_TAU_SLOPE = 1e-2
# a line counts as entering the interior only if it clears x1/x2 by this much
DEFAULT_BAND = 1e-6


class DegenerateBildError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    """The graph ``x = slope * y + intercept``, optionally restricted in y."""

    slope: float
    intercept: float
    y_lo: float = -math.inf
    y_hi: float = math.inf

    def __call__(self, y):
        return self.slope * np.asarray(y, dtype=float) + self.intercept

    @classmethod
    def through(cls, p, q, segment: bool = False) -> Line:
        (x0, y0), (x1, y1) = p, q
        if y0 == y1:
            raise ValueError("horizontal lines cannot be written as x = f(y)")
        slope = (x1 - x0) / (y1 - y0)
        lo, hi = (min(y0, y1), max(y0, y1)) if segment else (-math.inf, math.inf)
        return cls(slope, x0 - slope * y0, lo, hi)

    def sample(self, y0: float, y1: float, count: int = 2) -> np.ndarray:
        ys = np.linspace(y0, y1, count)
        return np.stack([self(ys), ys], axis=1)


# ---------------------------------------------------------------------------
# boundary functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundaryFunctions:
    """Piecewise-linear ``x1``/``x2`` of the lower bild.

    Stored as the left/right chains of the upper hull, parametrized by the
    height ``h = -y >= 0`` (ascending).
    """

    left_h: np.ndarray
    left_x: np.ndarray
    right_h: np.ndarray
    right_x: np.ndarray
    m: float
    M: float
    y_m: float

    def x1(self, y):
        return np.interp(-np.asarray(y, dtype=float), self.left_h, self.left_x)

    def x2(self, y):
        return np.interp(-np.asarray(y, dtype=float), self.right_h, self.right_x)

    @property
    def breakpoints(self) -> np.ndarray:
        """All y in [y_m, 0] where x1 or x2 has a kink (ascending)."""
        return np.unique(-np.concatenate([self.left_h, self.right_h]))

    @classmethod
    def from_chains(cls, left, right) -> BoundaryFunctions:
        """Build from explicit lower-bild chains ``[(x, y), ...]`` with y <= 0."""
        left = np.asarray(left, dtype=float)
        right = np.asarray(right, dtype=float)
        lo = np.argsort(-left[:, 1], kind="stable")
        ro = np.argsort(-right[:, 1], kind="stable")
        lh, lx = -left[lo, 1], left[lo, 0]
        rh, rx = -right[ro, 1], right[ro, 0]
        return cls(lh, lx, rh, rx, float(lx[0]), float(rx[0]), float(-max(lh[-1], rh[-1])))


def _chains(hull: np.ndarray):
    """Left and right boundary chains of a CCW convex polygon above y=0."""
    k = len(hull)
    ys = hull[:, 1]
    ymax, ymin = ys.max(), ys.min()
    top = [i for i in range(k) if ys[i] == ymax]
    bot = [i for i in range(k) if ys[i] == ymin]
    top_left = min(top, key=lambda i: hull[i, 0])
    top_right = max(top, key=lambda i: hull[i, 0])
    bot_left = min(bot, key=lambda i: hull[i, 0])
    bot_right = max(bot, key=lambda i: hull[i, 0])

    def walk(start, stop):
        out = [start]
        i = start
        while i != stop:
            i = (i + 1) % k
            out.append(i)
        return out

    # CCW: top_left -> ... -> bot_left is the left side, bot_right -> top_right the right side
    left = walk(top_left, bot_left)[::-1]
    right = walk(bot_right, top_right)
    return hull[left], hull[right]


def boundary_functions(est: BildEstimate, tol: float = DEFAULT_TOL) -> BoundaryFunctions:
    hull = np.asarray(est.hull, dtype=float)
    if not np.isfinite(est.m) or not np.any(hull[:, 1] == 0.0):
        raise DegenerateBildError("hull has no real segment; x1/x2 are undefined")
    if est.y_M <= 0.0:
        # the bild is the real segment [m, M]; x1, x2 live on the domain {0}
        return BoundaryFunctions(np.array([0.0]), np.array([est.m]), np.array([0.0]),
                                 np.array([est.M]), est.m, est.M, 0.0)
    left, right = _chains(hull)
    return BoundaryFunctions(
        left_h=left[:, 1].copy(), left_x=left[:, 0].copy(),
        right_h=right[:, 1].copy(), right_x=right[:, 0].copy(),
        m=est.m, M=est.M, y_m=-est.y_M,
    )


# ---------------------------------------------------------------------------
# tangents
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TangentPair:
    a: float
    b: float
    m: float
    M: float
    secants_a: np.ndarray = field(repr=False)
    secants_b: np.ndarray = field(repr=False)
    steps: np.ndarray = field(repr=False)
    bracket_a: float = 0.0
    bracket_b: float = 0.0

    @property
    def l(self) -> Line:
        return Line(self.a, self.m)

    @property
    def L(self) -> Line:
        return Line(self.b, self.M)


def _extrapolate(steps: np.ndarray, sec: np.ndarray) -> float:
    # secants of a smooth convex curve behave like s(eps) = s0 + c eps
    if len(sec) < 2:
        return float(sec[-1])
    e1, e0 = steps[-1], steps[-2]
    return float(sec[-1] + (sec[-1] - sec[-2]) * e1 / (e0 - e1))


def left_derivatives(bf: BoundaryFunctions, probe: Sequence[float] | None = None) -> TangentPair:
    """One-sided slopes of ``x1``, ``x2`` at 0 from shrinking secants.

    ``probe`` lists step sizes (absolute); by default ``y_M/8 ... y_M/64``.
    For convex ``x1`` the secants ``(x1(0) - x1(-eps)) / eps`` increase as
    ``eps`` shrinks; the reported slope is the linear extrapolation of the
    last two, and the bracket is its distance from the last secant.
    """
    depth = -bf.y_m
    if depth <= 0.0:
        raise DegenerateBildError("boundary functions have an empty domain")
    if probe is None:
        probe = [depth * f for f in DEFAULT_PROBES]
    steps = np.array(sorted((e for e in probe if 0.0 < e <= depth), reverse=True))
    if len(steps) < 2:
        raise ValueError("need at least two usable probe steps")
    sa = (bf.x1(0.0) - bf.x1(-steps)) / steps
    sb = (bf.x2(0.0) - bf.x2(-steps)) / steps
    a = _extrapolate(steps, sa)
    b = _extrapolate(steps, sb)
    return TangentPair(a=a, b=b, m=bf.m, M=bf.M, secants_a=sa, secants_b=sb, steps=steps,
                       bracket_a=abs(a - sa[-1]), bracket_b=abs(b - sb[-1]))


def tangent_lines(tp: TangentPair, y_range: tuple[float, float] | None = None):
    """The lines ``l`` and ``L``; restricted to ``y_range`` when given."""
    lo, hi = y_range if y_range is not None else (-math.inf, math.inf)
    return Line(tp.a, tp.m, lo, hi), Line(tp.b, tp.M, lo, hi)


# ---------------------------------------------------------------------------
# center region
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CenterRegion:
    kind: str
    upper_region: np.ndarray            # convex, CCW
    apex: tuple[float, float] | None
    l: Line | None = None
    L: Line | None = None

    @property
    def polygon(self) -> np.ndarray:
        return center_full(self)

    def contains_upper(self, p, eps: float = 0.0) -> bool:
        return bool(distances_to_polygon(np.asarray(p, dtype=float)[None, :],
                                         self.upper_region)[0] <= eps)

    def contains(self, p, eps: float = 0.0) -> bool:
        x, y = p
        return self.contains_upper((x, abs(y)), eps)


def is_convex(est: BildEstimate, eps: float = DEFAULT_TOL) -> bool:
    """W(A) is convex iff the real-projection extremes are attained on the reals."""
    return abs(est.pi_m - est.m) <= eps and abs(est.pi_M - est.M) <= eps


def _segment(p, q) -> np.ndarray:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if np.array_equal(p, q):
        return p[None, :]
    return np.array([p, q])


def clip_between(poly: np.ndarray, l: Line, L: Line) -> np.ndarray:
    """``{(x, y) in poly : l(y) <= x <= L(y)}``."""
    # x >= a y + m  <=>  (-1, a).p <= -m ;  x <= b y + M  <=>  (1, -b).p <= M
    out = clip_halfplane(poly, (-1.0, l.slope), -l.intercept)
    return clip_halfplane(out, (1.0, -L.slope), L.intercept)


def center_upper(est: BildEstimate, tp: TangentPair | None, tol: float = DEFAULT_TOL,
                 tau_eq: float | None = None,
                 tau_slope: float = DEFAULT_TAU_SLOPE) -> CenterRegion:
    """Upper star-center ``{w in B+ : l(w_y) <= w_x <= L(w_y)}`` with its case label."""
    hull = np.asarray(est.hull, dtype=float)
    if tau_eq is None:
        tau_eq = 1e-3 * (est.pi_M - est.pi_m + 1.0)
    m, M = est.m, est.M

    if est.is_degenerate(tol):
        return CenterRegion(WHOLE_BILD, _segment((m, 0.0), (M, 0.0)), None)

    if M - m <= tau_eq:
        mid = 0.5 * (m + M)
        if est.pi_M - est.pi_m <= tau_eq:
            return CenterRegion(VERTICAL_SEGMENT, _segment((mid, 0.0), (mid, est.y_M)), None,
                                Line(0.0, mid), Line(0.0, mid))
        lines = (tp.l, tp.L) if tp is not None else (None, None)
        return CenterRegion(POINT, np.array([[mid, 0.0]]), None, *lines)

    if tp is None:
        raise ValueError("tangent pair required for a non-degenerate bild")
    l, L = tp.l, tp.L
    if is_convex(est, tol):
        return CenterRegion(WHOLE_BILD, hull.copy(), None, l, L)
    region = clip_between(hull, l, L)
    apex = None
    if tp.a - tp.b > tau_slope:
        ya = (M - m) / (tp.a - tp.b)
        apex = (float(m + tp.a * ya), float(ya))
    return CenterRegion(KITE_LIKE, region, apex, l, L)


def center_full(cr: CenterRegion) -> np.ndarray:
    """The whole center: upper region together with its mirror image.

    The result is exactly symmetric under ``y -> -y``.
    """
    up = np.asarray(cr.upper_region, dtype=float)
    if len(up) == 1:
        return up.copy()
    if np.all(up[:, 1] == 0.0):
        return up.copy()
    pts = np.vstack([up, up * np.array([1.0, -1.0])])
    hull = convex_hull(pts)
    # enforce exact mirror symmetry (hull of a symmetric set is symmetric)
    upper = hull[hull[:, 1] >= 0.0]
    lower = upper[upper[:, 1] > 0.0] * np.array([1.0, -1.0])
    full = np.vstack([upper, lower])
    return convex_hull(full)


def center_membership_W(q: Quaternion, cr: CenterRegion, eps: float = DEFAULT_TOL) -> bool:
    """Is the quaternion ``q`` in the star-center of W(A)?"""
    p = upper_representative(q)
    return cr.contains_upper((p.x, p.y), eps)


# ---------------------------------------------------------------------------
# line vs interior of the lower bild
# ---------------------------------------------------------------------------

def line_interior_test(line: Line, est: BildEstimate | BoundaryFunctions,
                       band: float = DEFAULT_BAND) -> bool:
    """Does ``line`` meet the interior of the lower bild?

    The interior is ``y_m < y < 0, x1(y) < x < x2(y)``; ``band`` is the margin
    by which the strict inequalities must hold.
    """
    bf = est if isinstance(est, BoundaryFunctions) else boundary_functions(est)
    lo = max(bf.y_m, line.y_lo)
    hi = min(0.0, line.y_hi)
    if not lo < hi:
        return False
    ys = bf.breakpoints
    ys = np.unique(np.concatenate([[lo, hi], ys[(ys > lo) & (ys < hi)]]))
    g1 = line(ys) - bf.x1(ys)
    g2 = bf.x2(ys) - line(ys)
    best = np.minimum(g1, g2).max()
    # g1, g2 are linear on each interval: check where they cross
    d1, d2 = np.diff(g1), np.diff(g2)
    den = d1 - d2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(den != 0.0, (g2[:-1] - g1[:-1]) / den, -1.0)
    ok = (t > 0.0) & (t < 1.0)
    if np.any(ok):
        cross = g1[:-1][ok] + t[ok] * d1[ok]
        best = max(best, cross.max())
    return bool(best > band)


def pointwise_equivalence(est: BildEstimate, cr: CenterRegion, band: float,
                          bf: BoundaryFunctions | None = None):
    """Compare the strip test with the line/interior test on the hull vertices.

    Returns ``(checked, mismatches)``; vertices within ``band`` of either
    line, or on the real axis, are skipped.
    """
    bf = bf or boundary_functions(est)
    checked, bad = 0, []
    for w1, w2 in np.asarray(est.hull):
        if w2 <= 0.0:
            continue
        dl = w1 - cr.l(w2)
        dL = cr.L(w2) - w1
        if abs(dl) <= band or abs(dL) <= band:
            continue
        in_strip = dl >= 0.0 and dL >= 0.0
        lw = Line.through((est.m, 0.0), (w1, w2))
        Lw = Line.through((est.M, 0.0), (w1, w2))
        meets = line_interior_test(lw, bf) or line_interior_test(Lw, bf)
        checked += 1
        if in_strip == meets:
            bad.append((float(w1), float(w2)))
    return checked, bad


def reflect(poly) -> np.ndarray:
    return reflect_y(poly)


def inside_full(P, cr: CenterRegion, eps: float = 0.0) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.stack([P[:, 0], np.abs(P[:, 1])], axis=1)
    return inside_convex(Q, cr.upper_region, eps)
