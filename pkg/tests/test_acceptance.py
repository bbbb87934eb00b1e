"""End-to-end acceptance checks; each test records a PASS/FAIL line with its numbers."""

import math
import time

import numpy as np

from qrange.ellipse import st_center, st_derivatives, st_ellipse
from qrange.geometry import (boundary_functions, center_full, center_membership_W, center_upper,
                             is_convex, left_derivatives, pointwise_equivalence)
from qrange.qmatrix import QMatrix, complex_adjoint, form_value, real_point
from qrange.quat import Quaternion, rotate_to_slice
from qrange.sampler import support_upper_bild, upper_hull
from qrange.verify import brute_center, check_star_shaped, hausdorff_to_center

from conftest import (ACCEPTANCE_LINES, BIG_M_EX, M_EX, SLOPE_EX, SQRT3, a_ex, random_hermitian,
                      random_qmatrix)

EPS = 1e-2          # default geometric tolerance
STAR_EPS = 2e-2     # violation budget of the star-shapedness suite
RANDOM_THETA, RANDOM_SAMPLES = 240, 20_000


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def ray_cast_inside(p, poly) -> bool:
    """Even-odd rule, written independently of the package's convex tests."""
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if x < xc:
                inside = not inside
    return inside


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_oracle_exactness():
    t0 = time.perf_counter()
    model = st_ellipse(0.25, 0.125, 0.125)
    a, b = st_derivatives(model, 0.125, 0.125)
    cr = st_center(model)
    full = center_full(cr)
    elapsed = time.perf_counter() - t0

    errs = {
        "conic": float(np.max(np.abs(np.array(model.coefficients) - [1, 0, 4, -1, 1, 1 / 16]))),
        "m": abs(model.m - M_EX),
        "M": abs(model.M - BIG_M_EX),
        "a": abs(a - SLOPE_EX),
        "b": abs(b + SLOPE_EX),
        "apex": math.dist(cr.apex, (0.5, 0.375)),
    }
    kite = [(M_EX, 0.0), (BIG_M_EX, 0.0), (0.5, 0.375), (0.5, -0.375)]
    errs["kite"] = max(min(math.dist(v, k) for k in kite) for v in full)
    # kite inequality on a grid, away from its boundary
    xs, ys = np.meshgrid(np.linspace(-0.05, 1.05, 111), np.linspace(-0.45, 0.45, 91))
    P = np.column_stack([xs.ravel(), ys.ravel()])
    g = SQRT3 / 4 - SLOPE_EX * np.abs(P[:, 1]) - np.abs(P[:, 0] - 0.5)
    keep = np.abs(g) > 1e-9
    agree = all(cr.contains(p) == (gi >= 0) for p, gi in zip(P[keep], g[keep]))
    worst = max(errs.values())
    ok = worst <= 1e-10 and agree and elapsed < 1.0
    record(1, "oracle exactness", ok,
           f"max err {worst:.2e} (tol 1e-10), kite inequality agrees={agree}, "
           f"runtime {elapsed:.3f}s (< 1s)")


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_pipeline_vs_oracle():
    t0 = time.perf_counter()
    est = upper_hull(a_ex())
    bf = boundary_functions(est)
    tp = left_derivatives(bf)
    cr = center_upper(est, tp)
    elapsed = time.perf_counter() - t0

    d = {"m": abs(est.m - M_EX), "M": abs(est.M - BIG_M_EX), "pi_m": abs(est.pi_m),
         "pi_M": abs(est.pi_M - 1.0), "y_M": abs(est.y_M - 0.375)}
    slope = max(abs(tp.a - SLOPE_EX), abs(tp.b + SLOPE_EX))
    apex = math.dist(cr.apex, (0.5, 0.375)) if cr.apex else math.inf
    ok = max(d.values()) <= 5e-3 and slope <= 5e-2 and apex <= 1e-2 and elapsed <= 60.0
    record(2, "pipeline vs oracle on A_ex", ok,
           ", ".join(f"|d{k}|={v:.1e}" for k, v in d.items()) + " (tol 5e-3), "
           f"slopes {slope:.1e} (tol 5e-2), apex {apex:.1e} (tol 1e-2), "
           f"runtime {elapsed:.1f}s (<= 60s)")


# -- 3 ---------------------------------------------------------------------------

def test_criterion_3_convexity_and_hermitian_centers():
    est_ex = upper_hull(a_ex(), theta_steps=RANDOM_THETA, samples=RANDOM_SAMPLES)
    herm = QMatrix.from_components(np.diag([1.0, 2.0]))
    est_h = upper_hull(herm, theta_steps=64, samples=2000)
    verdicts = (is_convex(est_ex), is_convex(est_h))

    rng = np.random.default_rng(303)
    worst = 0.0
    for k in range(20):
        n = int(rng.integers(1, 5))
        H = random_hermitian(rng, n)
        ev = np.linalg.eigvalsh(complex_adjoint(H))
        est = upper_hull(H, theta_steps=32, samples=2000, seed=k)
        full = np.asarray(center_full(center_upper(est, None)))
        dev = max(max(np.abs(full[:, 1])),
                  abs(full[:, 0].min() - ev[0]), abs(full[:, 0].max() - ev[-1]))
        worst = max(worst, dev)
    ok = verdicts == (False, True) and worst <= EPS
    record(3, "convexity criterion and hermitian centers", ok,
           f"is_convex(A_ex)={verdicts[0]}, is_convex(diag(1,2))={verdicts[1]}, "
           f"20 hermitian: max deviation from eigen-segment {worst:.1e} (tol {EPS})")


# -- 4 ---------------------------------------------------------------------------

def _star_matrices():
    rng = np.random.default_rng(2024)
    out = [("A_ex", a_ex(), 0)]
    for k in range(20):
        n = 2 + k % 2
        out.append((f"random[{k}] n={n}", random_qmatrix(rng, n), k))
    return out


def test_criterion_4_star_shapedness():
    failures, worst = 0, 0.0
    for name, A, seed in _star_matrices():
        if name == "A_ex":
            est = upper_hull(A)
        else:
            est = upper_hull(A, theta_steps=RANDOM_THETA, samples=RANDOM_SAMPLES, seed=seed)
        bf = boundary_functions(est)
        tp = left_derivatives(bf) if not est.is_degenerate(EPS) and est.M > est.m else None
        cr = center_upper(est, tp)
        for reals_only in (False, True):
            rep = check_star_shaped(A, est, cr, 10_000, seed=seed, eps=STAR_EPS,
                                    reals_only=reals_only)
            failures += rep.failures
            worst = max(worst, rep.worst_violation)
    record(4, "star-shapedness suite", failures == 0,
           f"21 matrices x 2 variants x 1e4 trials: {failures} failures, "
           f"worst violation {worst:.1e} (eps {STAR_EPS})")


# -- 5 ---------------------------------------------------------------------------

def test_criterion_5_center_characterization():
    model = st_ellipse(0.25, 0.125, 0.125)
    cr_oracle = st_center(model)
    bc = brute_center(model.upper_polygon(), grid=200)
    hd = hausdorff_to_center(bc, cr_oracle)
    bound = max(2 * bc.cell, 3 * EPS)

    est = upper_hull(a_ex())
    bf = boundary_functions(est)
    cr = center_upper(est, left_derivatives(bf))
    checked, bad = pointwise_equivalence(est, cr, 2 * EPS, bf)
    ok = hd <= bound and checked > 0 and not bad
    record(5, "center characterization", ok,
           f"Hausdorff {hd:.2e} (bound {bound:.2e}, {len(bc)} center grid points), "
           f"line test on {checked} hull vertices: {len(bad)} mismatches")


# -- 6 ---------------------------------------------------------------------------

def _mirror_exact(poly) -> bool:
    poly = np.asarray(poly)
    return sorted(map(tuple, poly)) == sorted(map(tuple, poly * np.array([1.0, -1.0])))


def test_criterion_6_symmetry():
    est = upper_hull(a_ex(), theta_steps=RANDOM_THETA, samples=RANDOM_SAMPLES)
    cr = center_upper(est, left_derivatives(boundary_functions(est)))
    full = np.asarray(center_full(cr))
    symmetric = _mirror_exact(full)
    rng = np.random.default_rng(66)
    for k in range(5):
        e = upper_hull(random_qmatrix(rng, 2 + k % 2), theta_steps=64, samples=4000, seed=k)
        tp = left_derivatives(boundary_functions(e)) if e.M > e.m else None
        symmetric &= _mirror_exact(center_full(center_upper(e, tp)))

    rng = np.random.default_rng(606)
    lo, hi = full.min(axis=0), full.max(axis=0)
    agree, inside_count, total = 0, 0, 0
    while total < 100:
        if total % 2 == 0:
            x, y = rng.uniform(lo[0], hi[0]), rng.uniform(0.0, hi[1])
        else:
            x, y = rng.uniform(lo[0] - 0.3, hi[0] + 0.3), rng.uniform(0.0, hi[1] + 0.3)
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        q = rotate_to_slice((x, y), Quaternion(0.0, *u))
        planar = ray_cast_inside((q.real, q.vector_norm), full)
        agree += center_membership_W(q, cr, 0.0) == planar
        inside_count += planar
        total += 1
    ok = symmetric and agree == 100 and 0 < inside_count < 100
    record(6, "conjugation and class symmetry", ok,
           f"exact y-symmetry (A_ex + 5 random)={symmetric}, membership agrees {agree}/100 "
           f"({inside_count} inside, {100 - inside_count} outside)")


# -- 7 ---------------------------------------------------------------------------

def test_criterion_7_real_point():
    rng = np.random.default_rng(707)
    worst_imag, worst_out = 0.0, 0.0
    for k in range(50):
        n = int(rng.integers(2, 5))
        A = random_qmatrix(rng, n)
        rp = real_point(A)
        val = form_value(A, rp.x)
        worst_imag = max(worst_imag, float(np.linalg.norm(val[1:])))
        pi_M = support_upper_bild(A, 0.0, seed=k)[0]
        pi_m = -support_upper_bild(A, math.pi, seed=k)[0]
        worst_out = max(worst_out, pi_m - 1e-3 - rp.value, rp.value - pi_M - 1e-3)
    ex = abs(real_point(a_ex()).value - M_EX)
    ok = worst_imag <= 1e-9 and worst_out <= 0.0 and ex <= 1e-9
    record(7, "real-point construction", ok,
           f"50 random: max |Im| {worst_imag:.1e} (tol 1e-9), "
           f"range excess {max(worst_out, 0.0):.1e} (slack 1e-3); A_ex |r - m| {ex:.1e} (tol 1e-9)")
