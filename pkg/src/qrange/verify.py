"""Brute-force oracles and randomized property checks for the bild pipeline."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import CenterRegion, center_full, is_convex
from .geometry2d import distances_to_polygon, polygon_area, resample_boundary
from .qmatrix import QMatrix
from .sampler import BildEstimate, range_values, sample_sphere

SEGMENT_POINTS = 64
GRID = 200


@dataclass
class PropertyReport:
    name: str
    trials: int
    failures: int
    worst_violation: float
    seed: int
    witness: list | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def merge(self, other: PropertyReport) -> PropertyReport:
        if other.name != self.name:
            raise ValueError("can only merge reports of the same property")
        return PropertyReport(self.name, self.trials + other.trials,
                              self.failures + other.failures,
                              max(self.worst_violation, other.worst_violation), self.seed,
                              self.witness or other.witness, {**other.details, **self.details})


# ---------------------------------------------------------------------------
# exact membership in a symmetric bild
# ---------------------------------------------------------------------------

class _SymmetricBild:
    """Membership in ``P ∪ conj(P)`` for a convex polygon ``P`` in ``y >= 0``.

    At each height the convex polygon is an interval; its endpoints are
    piecewise linear between vertex heights, so interpolating them is exact.
    """

    def __init__(self, upper: np.ndarray):
        upper = np.asarray(upper, dtype=float)
        self.poly = upper
        ys = np.unique(upper[:, 1])
        self.h = ys
        self.top = ys[-1]
        self.bottom = ys[0]
        k = len(upper)
        if k == 1:
            self.lo = self.hi = np.array([upper[0, 0]])
            return
        p = upper
        q = np.roll(upper, -1, axis=0)
        lo = np.full(len(ys), np.inf)
        hi = np.full(len(ys), -np.inf)
        for a, b in zip(p, q):
            y0, y1 = min(a[1], b[1]), max(a[1], b[1])
            sel = (ys >= y0) & (ys <= y1)
            if a[1] == b[1]:
                xs = np.array([a[0], b[0]])
                lo[sel] = np.minimum(lo[sel], xs.min())
                hi[sel] = np.maximum(hi[sel], xs.max())
                continue
            t = (ys[sel] - a[1]) / (b[1] - a[1])
            x = a[0] + t * (b[0] - a[0])
            lo[sel] = np.minimum(lo[sel], x)
            hi[sel] = np.maximum(hi[sel], x)
        self.lo, self.hi = lo, hi

    def violation(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """How far (in x, or in height beyond the top) a point lies outside; <= 0 inside."""
        h = np.abs(y)
        if len(self.h) == 1:
            lo = np.full_like(h, self.lo[0])
            hi = np.full_like(h, self.hi[0])
        else:
            lo = np.interp(h, self.h, self.lo)
            hi = np.interp(h, self.h, self.hi)
        out = np.maximum(lo - x, x - hi)
        return np.maximum(out, np.maximum(h - self.top, self.bottom - h))

    def contains(self, x, y, slack: float = 0.0):
        return self.violation(np.asarray(x, float), np.asarray(y, float)) <= slack

    def lookup(self, size: int = 1 << 15) -> _Table:
        return _Table(self, size)


class _Table:
    """Uniform-height table of the row extents, linear between nodes.

    Used as a conservative fast accept: each cell carries a bound on its
    interpolation error, and every rejection is re-checked exactly.
    """

    def __init__(self, bild: _SymmetricBild, size: int):
        self.top = bild.top
        self.exact = bild
        self.flat = bild.top <= 0.0 or len(bild.h) == 1
        if self.flat:
            return
        hs = np.linspace(0.0, bild.top, size)
        self.dh = hs[1]
        self.size = size
        self.lo = np.interp(hs, bild.h, bild.lo)
        self.hi = np.interp(hs, bild.h, bild.hi)
        self.dlo = np.append(np.diff(self.lo), 0.0)
        self.dhi = np.append(np.diff(self.hi), 0.0)
        # worst table error per cell: attained at the polygon vertices inside it
        cells = np.minimum((bild.h / self.dh).astype(np.intp), size - 1)
        frac = bild.h / self.dh - cells
        self.elo = np.zeros(size)
        self.ehi = np.zeros(size)
        np.maximum.at(self.elo, cells, np.abs(self.lo[cells] + frac * self.dlo[cells] - bild.lo))
        np.maximum.at(self.ehi, cells, np.abs(self.hi[cells] + frac * self.dhi[cells] - bild.hi))

    def contains(self, x, y, slack: float = 0.0):
        if self.flat:
            return self.exact.contains(x, y, slack)
        h = np.abs(y)
        u = h / self.dh
        i = np.minimum(u.astype(np.intp), self.size - 1)
        f = u - i
        lo = self.lo[i] + f * self.dlo[i]
        hi = self.hi[i] + f * self.dhi[i]
        inside = ((x >= lo + self.elo[i] - slack) & (x <= hi - self.ehi[i] + slack)
                  & (h <= self.top + slack))
        # the table can be off near vertices; settle its rejections exactly
        miss = ~inside
        if miss.any():
            inside[miss] = self.exact.contains(x[miss], y[miss], slack)
        return inside


@dataclass(frozen=True, eq=False)
class BruteCenter:
    points: np.ndarray          # kept grid points
    bild_points: np.ndarray     # all grid points inside the bild
    cell: float

    def __len__(self) -> int:
        return len(self.points)


def _grid(upper: np.ndarray, grid: int):
    x0, x1 = upper[:, 0].min(), upper[:, 0].max()
    ymax = upper[:, 1].max()
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(-ymax, ymax, grid)
    X, Y = np.meshgrid(xs, ys)
    cell = max(x1 - x0, 2 * ymax) / max(grid - 1, 1)
    return np.stack([X.ravel(), Y.ravel()], axis=1), cell


def _boundary_samples(upper: np.ndarray, count: int) -> np.ndarray:
    """Boundary points of the bild, densest near the real axis.

    Evenly spaced in arclength, plus the polygon vertices in the lowest
    5% of the height range (where the bild pinches), listed first so that
    failing segments are found early.
    """
    flip = np.array([1.0, -1.0])
    if len(upper) >= 3 and polygon_area(upper) > 0.0:
        top = upper[:, 1].max()
        low = upper[upper[:, 1] <= 0.05 * top]
        if len(low) > count // 2:
            low = low[np.linspace(0, len(low) - 1, count // 2).astype(int)]
        bnd = resample_boundary(upper, count)
        V = np.vstack([low, low * flip, bnd, bnd * flip])
    else:
        V = np.vstack([upper, upper * flip])
        if len(upper) == 2:
            t = np.linspace(0.0, 1.0, count)[:, None]
            seg = upper[0] + t * (upper[1] - upper[0])
            V = np.vstack([V, seg, seg * flip])
    _, first = np.unique(V, axis=0, return_index=True)
    return V[np.sort(first)]


def brute_center(upper_hull, grid: int = GRID, boundary_samples: int = 96,
                 segment_points: int = SEGMENT_POINTS, slack: float = 1e-6,
                 block: int = 256, chunk: int = 16) -> BruteCenter:
    """Grid points of the bild that see every boundary sample inside the bild.

    ``upper_hull`` is the convex B+ polygon; the bild is its union with the
    mirror image. Each segment ``[p, v]`` is checked at ``segment_points``
    evenly spaced parameters plus its crossing of the real axis, where the
    bild pinches to a segment.
    """
    upper = np.asarray(upper_hull, dtype=float)
    bild = _SymmetricBild(upper)
    G, cell = _grid(upper, grid)
    G = np.unique(G, axis=0)
    inside = bild.contains(G[:, 0], G[:, 1], slack)
    cand = G[inside]

    V = _boundary_samples(upper, boundary_samples)
    table = bild.lookup()
    ts = np.linspace(0.0, 1.0, segment_points)
    keep = np.ones(len(cand), dtype=bool)
    for start in range(0, len(cand), block):
        alive = np.arange(start, min(start + block, len(cand)))
        for v0 in range(0, len(V), chunk):
            if len(alive) == 0:
                break
            P = cand[alive]
            W = V[v0:v0 + chunk]
            D = W[None, :, :] - P[:, None, :]                 # (b, v, 2)
            X = P[:, None, None, 0] + ts[None, None, :] * D[:, :, None, 0]
            Y = P[:, None, None, 1] + ts[None, None, :] * D[:, :, None, 1]
            ok = table.contains(X, Y, slack).all(axis=(1, 2))
            # the real-axis crossing of segments joining the two halves
            with np.errstate(divide="ignore", invalid="ignore"):
                tc = P[:, None, 1] / (P[:, None, 1] - W[None, :, 1])
            cross = np.isfinite(tc) & (tc > 0.0) & (tc < 1.0)
            xc = P[:, None, 0] + np.where(cross, tc, 0.0) * D[:, :, 0]
            okc = (bild.contains(xc, np.zeros_like(xc), slack) | ~cross).all(axis=1)
            good = ok & okc
            keep[alive[~good]] = False
            alive = alive[good]
    return BruteCenter(cand[keep], cand, cell)


def region_samples(cr_or_poly, grid_points: np.ndarray | None = None,
                   boundary: int = 512, eps: float = 1e-9) -> np.ndarray:
    """Dense points of a center polygon: its boundary and the grid points inside."""
    poly = center_full(cr_or_poly) if isinstance(cr_or_poly, CenterRegion) else np.asarray(cr_or_poly)
    pts = [resample_boundary(poly, boundary)]
    if grid_points is not None and len(grid_points):
        d = distances_to_polygon(grid_points, poly)
        pts.append(grid_points[d <= eps])
    return np.vstack(pts)


# ---------------------------------------------------------------------------
# star-shapedness
# ---------------------------------------------------------------------------

def _sample_polygon(poly: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in a convex polygon (or on a segment / at a point)."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) == 1:
        return np.repeat(poly, count, axis=0)
    if len(poly) == 2 or polygon_area(poly) <= 0.0:
        t = rng.random((count, 1))
        a, b = poly[0], poly[-1]
        return a + t * (b - a)
    # fan triangulation weighted by area
    a = poly[0]
    tris = [(a, poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]
    areas = np.array([abs((q[0] - a[0]) * (r[1] - a[1]) - (q[1] - a[1]) * (r[0] - a[0]))
                      for _, q, r in tris])
    idx = rng.choice(len(tris), size=count, p=areas / areas.sum())
    u = rng.random((count, 2))
    flip = u.sum(axis=1) > 1.0
    u[flip] = 1.0 - u[flip]
    out = np.empty((count, 2))
    for k, (p0, p1, p2) in enumerate(tris):
        sel = idx == k
        out[sel] = p0 + u[sel, :1] * (p1 - p0) + u[sel, 1:] * (p2 - p0)
    return out


def check_star_shaped(A: QMatrix, est: BildEstimate, cr: CenterRegion | None, trials: int,
                      seed: int = 0, eps: float = 2e-2, reals_only: bool = False) -> PropertyReport:
    """Segments from center points to sampled values of x* A x stay in W(A).

    With ``reals_only`` the center points are drawn from ``W ∩ R = [m, M]``.
    """
    rng = np.random.default_rng(seed)
    X = sample_sphere(A.n, trials, seed)
    W = range_values(A, X)                                   # (trials, 4)
    if reals_only:
        C = np.stack([est.m + (est.M - est.m) * rng.random(trials), np.zeros(trials)], axis=1)
    else:
        C = _sample_polygon(cr.upper_region, trials, rng)
    ts = rng.random(trials)
    U = rng.standard_normal((trials, 3))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    # c placed in a random slice span{1, u}
    CQ = np.concatenate([C[:, :1], np.maximum(C[:, 1:], 0.0) * U], axis=1)
    Q = (1.0 - ts)[:, None] * CQ + ts[:, None] * W
    P = np.stack([Q[:, 0], np.linalg.norm(Q[:, 1:], axis=1)], axis=1)
    d = np.concatenate([distances_to_polygon(P[i:i + 2048], est.hull)
                        for i in range(0, trials, 2048)])
    bad = np.flatnonzero(d > eps)
    failures = len(bad)
    worst = float(d.max()) if trials else 0.0
    witness = None
    if failures:
        k = bad[0]
        witness = [C[k].tolist(), W[k].tolist(), float(ts[k])]
    name = "star_shaped_reals" if reals_only else "star_shaped"
    return PropertyReport(name, trials, failures, worst, seed, witness,
                          {"eps": eps, "kind": None if cr is None else cr.kind})


# ---------------------------------------------------------------------------
# convexity
# ---------------------------------------------------------------------------

def check_convexity_equivalence(A: QMatrix, est: BildEstimate, trials: int, seed: int = 0,
                                eps: float = 2e-2) -> PropertyReport:
    """Convex bild criterion vs. the midpoint behaviour of W(A).

    For a convex verdict, midpoints of random pairs of values must stay in
    W. Otherwise a witness pair of bild points with an outside midpoint is
    recorded; the leftmost and rightmost hull vertices with their conjugates
    are tried first, then random hull vertex pairs.
    """
    convex = is_convex(est, eps)
    rng = np.random.default_rng(seed)
    if convex:
        X = sample_sphere(A.n, 2 * trials, seed)
        W = range_values(A, X).reshape(trials, 2, 4)
        mid = 0.5 * (W[:, 0] + W[:, 1])
        pts = np.stack([mid[:, 0], np.linalg.norm(mid[:, 1:], axis=1)], axis=1)
        d = distances_to_polygon(pts, est.hull)
        fails = int(np.sum(d > eps))
        return PropertyReport("convexity", trials, fails, float(d.max()), seed, None,
                              {"convex": True, "eps": eps})

    hull = est.hull
    lower = hull * np.array([1.0, -1.0])
    pairs = []
    for k in (int(np.argmin(hull[:, 0])), int(np.argmax(hull[:, 0]))):
        pairs.append((hull[k], lower[k]))
    for _ in range(trials):
        i, j = rng.integers(len(hull), size=2)
        pairs.append((hull[i], lower[j]))
    best, witness = 0.0, None
    for p, q in pairs:
        mid = 0.5 * (p + q)
        d = _bild_distance(mid, hull)
        if d > best:
            best, witness = d, [list(map(float, p)), list(map(float, q)), list(map(float, mid))]
    found = best > eps
    return PropertyReport("convexity", len(pairs), 0 if found else 1, float(best), seed,
                          witness, {"convex": False, "eps": eps})


def _bild_distance(p: np.ndarray, hull: np.ndarray) -> float:
    """Distance from a complex point to the bild ``B+ ∪ conj(B+)``."""
    x, y = float(p[0]), float(p[1])
    d_up = distances_to_polygon(np.array([[x, y]]), hull)[0]
    d_lo = distances_to_polygon(np.array([[x, -y]]), hull)[0]
    return float(min(d_up, d_lo))


def hausdorff_to_center(bc: BruteCenter, cr: CenterRegion) -> float:
    from .geometry2d import hausdorff

    ref = region_samples(cr, bc.bild_points)
    if len(bc.points) == 0:
        return math.inf
    return hausdorff(bc.points, ref)
