"""Small planar geometry kit: hulls, clipping, distances, rasterization.

Polygons are ``(k, 2)`` float arrays, counterclockwise, without a repeated
closing vertex. Degenerate polygons (a single point or a segment given by two
vertices) are allowed everywhere.
"""

from __future__ import annotations

import numpy as np


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, return_indices: bool = False):
    """Andrew's monotone chain; collinear points are dropped.

    Returns the CCW hull vertices (or their indices into ``points``).
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    # drop exact duplicates
    keep = [order[0]]
    for k in order[1:]:
        if not np.array_equal(pts[k], pts[keep[-1]]):
            keep.append(k)
    if len(keep) <= 2:
        idx = np.array(keep)
        return idx if return_indices else pts[idx]

    def chain(seq):
        out: list[int] = []
        for k in seq:
            while len(out) >= 2 and _cross(pts[out[-2]], pts[out[-1]], pts[k]) <= 0.0:
                out.pop()
            out.append(k)
        return out

    lower = chain(keep)
    upper = chain(keep[::-1])
    idx = np.array(lower[:-1] + upper[:-1])
    if len(idx) < 2:
        idx = np.array([keep[0], keep[-1]])
    return idx if return_indices else pts[idx]


def polygon_area(poly) -> float:
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_perimeter(poly) -> float:
    p = np.asarray(poly, dtype=float)
    if len(p) < 2:
        return 0.0
    if len(p) == 2:
        return 2.0 * float(np.linalg.norm(p[1] - p[0]))
    return float(np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1).sum())


def segment_distances(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``P`` (m, 2) to segments ``a[i]-b[i]`` -> (m, k)."""
    P = np.atleast_2d(P)[:, None, :]
    ab = (b - a)[None, :, :]
    ap = P - a[None, :, :]
    L2 = np.einsum("mkd,mkd->mk", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(L2 > 0, np.einsum("mkd,mkd->mk", ap, ab) / L2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab
    return np.linalg.norm(P - proj, axis=2)


def _edges(poly: np.ndarray):
    if len(poly) == 1:
        return poly, poly
    return poly, np.roll(poly, -1, axis=0)


def inside_convex(P, poly, slack: float = 0.0) -> np.ndarray:
    """Boolean mask: points within ``slack`` of the half-planes of a CCW convex polygon."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3 or abs(polygon_area(poly)) == 0.0:
        return distances_to_polygon(P, poly) <= slack
    a, b = _edges(poly)
    e = b - a
    L = np.linalg.norm(e, axis=1)
    # signed distance, positive outside (to the right of a CCW edge)
    sd = ((P[:, None, 0] - a[None, :, 0]) * e[None, :, 1]
          - (P[:, None, 1] - a[None, :, 1]) * e[None, :, 0]) / L[None, :]
    return np.all(sd <= slack, axis=1)


def distances_to_polygon(P, poly) -> np.ndarray:
    """Euclidean distance from each point to a convex polygon region (0 inside)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    poly = np.asarray(poly, dtype=float)
    a, b = _edges(poly)
    d = segment_distances(P, a, b).min(axis=1)
    if len(poly) >= 3 and abs(polygon_area(poly)) > 0.0:
        d = np.where(inside_convex(P, poly), 0.0, d)
    return d


def distance_to_polygon(p, poly) -> float:
    return float(distances_to_polygon(np.asarray(p, dtype=float)[None, :], poly)[0])


def clip_halfplane(poly, normal, offset, eps: float = 0.0) -> np.ndarray:
    """Sutherland-Hodgman clip of ``poly`` to ``{p : normal . p <= offset}``."""
    poly = np.asarray(poly, dtype=float)
    normal = np.asarray(normal, dtype=float)
    if len(poly) == 0:
        return poly.reshape(0, 2)
    val = poly @ normal - offset
    if len(poly) == 1:
        return poly if val[0] <= eps else poly[:0]
    out = []
    k = len(poly)
    for idx in range(k):
        cur, nxt = poly[idx], poly[(idx + 1) % k]
        vc, vn = val[idx], val[(idx + 1) % k]
        if vc <= eps:
            out.append(cur)
        if (vc <= eps) != (vn <= eps) and vc != vn:
            t = vc / (vc - vn)
            out.append(cur + t * (nxt - cur))
        if k == 2:
            # a segment: one pass over its single edge is enough
            if vn <= eps:
                out.append(nxt)
            break
    if not out:
        return poly[:0]
    res = np.array(out)
    # collapse consecutive duplicates
    keep = [0] + [q for q in range(1, len(res)) if not np.allclose(res[q], res[q - 1], atol=1e-15)]
    res = res[keep]
    if len(res) > 1 and np.allclose(res[0], res[-1], atol=1e-15):
        res = res[:-1]
    return res


def reflect_y(poly) -> np.ndarray:
    """Mirror across the real axis, keeping counterclockwise orientation."""
    p = np.asarray(poly, dtype=float) * np.array([1.0, -1.0])
    return p[::-1].copy()


def resample_boundary(poly, count: int) -> np.ndarray:
    """``count`` points evenly spaced in arclength along the closed boundary."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) == 1:
        return np.repeat(poly, count, axis=0)
    closed = np.vstack([poly, poly[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] == 0.0:
        return np.repeat(poly[:1], count, axis=0)
    s = np.linspace(0.0, cum[-1], count, endpoint=False)
    x = np.interp(s, cum, closed[:, 0])
    y = np.interp(s, cum, closed[:, 1])
    return np.stack([x, y], axis=1)


def hausdorff(A, B) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    from scipy.spatial.distance import directed_hausdorff

    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])
