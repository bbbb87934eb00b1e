"""Command-line front end: ``python3 -m qrange <command> ...``."""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry as geo
from .ellipse import st_center, st_ellipse
from .qmatrix import EmptyRealPart, QMatrix, real_point
from .sampler import (DEFAULT_BUDGET, DEFAULT_SAMPLES, DEFAULT_THETA_STEPS, DEFAULT_TOL,
                      BildEstimate, bild_points, sample_sphere, upper_hull)
from .verify import check_convexity_equivalence, check_star_shaped

COMMANDS = ("bild", "center", "convexity", "realpoint", "oracle", "verify")
FORMATS = ("json", "csv", "svg")


class InputError(Exception):
    """Malformed input or configuration (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    samples: int = DEFAULT_SAMPLES
    theta_steps: int = DEFAULT_THETA_STEPS
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    tol: float = DEFAULT_TOL
    format: str = "json"
    out: Path | None = None
    alpha: float | None = None
    k1: float | None = None
    k2: float | None = None
    trials: int = 10_000
    samples_csv: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise InputError("--samples must be at least 1")
        if self.theta_steps < 8:
            raise InputError("--theta-steps must be at least 8")
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.format not in FORMATS:
            raise InputError(f"--format must be one of {', '.join(FORMATS)}")
        if self.trials < 1:
            raise InputError("--trials must be at least 1")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _num(v: float) -> str:
    return repr(float(v))


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv(points, header=("x", "y")) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in np.atleast_2d(points):
        buf.write(",".join(_num(v) for v in row) + "\n")
    return buf.getvalue()


def _svg(layers: list[tuple[str, np.ndarray, str]], lines=()) -> str:
    """Polygons in data coordinates; y is flipped by the group transform."""
    pts = np.vstack([np.atleast_2d(p) for _, p, _ in layers])
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    w, h = x1 - x0, y1 - y0
    stroke = 0.004 * max(w, h)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="800" height="{int(800 * h / w) if w > 0 else 800}" '
        f'viewBox="{_num(x0)} {_num(-y1)} {_num(w)} {_num(h)}">',
        f'<g transform="scale(1,-1)" stroke-width="{_num(stroke)}">',
    ]
    for name, poly, style in layers:
        coords = " ".join(f"{_num(x)},{_num(y)}" for x, y in np.atleast_2d(poly))
        out.append(f'<polygon id="{name}" points="{coords}" {style}/>')
    for name, (p, q), style in lines:
        out.append(f'<line id="{name}" x1="{_num(p[0])}" y1="{_num(p[1])}" '
                   f'x2="{_num(q[0])}" y2="{_num(q[1])}" {style}/>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def load_matrix(path: Path) -> QMatrix:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {path}: no such file") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc
    try:
        return QMatrix.from_json(obj)
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad matrix in {path}: {exc}") from exc


def _estimate(cfg: RunConfig) -> tuple[QMatrix, BildEstimate]:
    A = load_matrix(cfg.input)
    est = upper_hull(A, theta_steps=cfg.theta_steps, samples=cfg.samples,
                     seed=cfg.seed, budget=cfg.budget)
    return A, est


def _bild_summary(est: BildEstimate) -> dict:
    return {"m": est.m, "M": est.M, "pi_m": est.pi_m, "pi_M": est.pi_M, "y_M": est.y_M,
            "vertices": len(est.hull), "samples": est.sample_count, "seed": est.seed}


def sample_histogram(A: QMatrix, samples: int, seed: int, resolution: float = 1e-3) -> np.ndarray:
    """Rows ``(x, y, count)`` of sampled bild points binned to ``resolution``."""
    X = sample_sphere(A.n, samples, seed)
    pts = bild_points(A, X)
    cells = np.round(pts / resolution).astype(np.int64)
    uniq, counts = np.unique(cells, axis=0, return_counts=True)
    return np.column_stack([uniq * resolution, counts])


def cmd_bild(cfg: RunConfig) -> int:
    A, est = _estimate(cfg)
    if cfg.samples_csv is not None:
        hist = sample_histogram(A, cfg.samples, cfg.seed)
        cfg.samples_csv.write_text(_csv(hist, ("x", "y", "count")), encoding="utf-8")
    if cfg.format == "csv":
        _emit(_csv(est.hull), cfg)
    elif cfg.format == "svg":
        _emit(_svg([
            ("bild", est.hull, 'fill="#9ecae1" stroke="#3182bd"'),
            ("lower_bild", est.lower_polygon(), 'fill="#fdd0a2" stroke="#e6550d"'),
        ]), cfg)
    else:
        _emit(_json({**_bild_summary(est), "hull": est.hull.tolist()}), cfg)
    return 0


def center_report(est: BildEstimate, tol: float):
    tp = None
    if not est.is_degenerate(tol) and est.M - est.m > 0:
        tp = geo.left_derivatives(geo.boundary_functions(est, tol))
    cr = geo.center_upper(est, tp, tol)
    rep = {
        "kind": cr.kind, "m": est.m, "M": est.M, "pi_m": est.pi_m, "pi_M": est.pi_M,
        "a": None if tp is None else tp.a, "b": None if tp is None else tp.b,
        "apex": None if cr.apex is None else list(cr.apex),
        "convex": geo.is_convex(est, tol),
        "upper_region": cr.upper_region.tolist(),
        "polygon": geo.center_full(cr).tolist(),
    }
    return rep, cr, tp


def _line_segment(line: geo.Line, y0: float, y1: float):
    return ((float(line(y0)), y0), (float(line(y1)), y1))


def cmd_center(cfg: RunConfig) -> int:
    _, est = _estimate(cfg)
    rep, cr, tp = center_report(est, cfg.tol)
    full = geo.center_full(cr)
    if cfg.format == "csv":
        _emit(_csv(full), cfg)
    elif cfg.format == "svg":
        lines = []
        if tp is not None:
            ylo, yhi = est.y_m, est.y_M
            lines = [("l", _line_segment(tp.l, ylo, yhi), 'stroke="#31a354"'),
                     ("L", _line_segment(tp.L, ylo, yhi), 'stroke="#756bb1"')]
        _emit(_svg([
            ("bild", est.hull, 'fill="#9ecae1" stroke="#3182bd"'),
            ("lower_bild", est.lower_polygon(), 'fill="#fdd0a2" stroke="#e6550d"'),
            ("center", full, 'fill="#fc9272" fill-opacity="0.7" stroke="#de2d26"'),
        ], lines), cfg)
    else:
        _emit(_json(rep), cfg)
    return 0


def cmd_convexity(cfg: RunConfig) -> int:
    _, est = _estimate(cfg)
    _emit(_json({"convex": geo.is_convex(est, cfg.tol), "m": est.m, "M": est.M,
                 "pi_m": est.pi_m, "pi_M": est.pi_M, "tol": cfg.tol}), cfg)
    return 0


def cmd_realpoint(cfg: RunConfig) -> int:
    A = load_matrix(cfg.input)
    try:
        rp = real_point(A)
    except EmptyRealPart as exc:
        raise InputError(str(exc)) from exc
    _emit(_json({"x": rp.x.tolist(), "r": rp.value,
                 "beta": rp.beta, "imag_residual": rp.imag_residual}), cfg)
    return 0


def conic_string(coef) -> str:
    names = ("x²", "xy", "y²", "x", "y", "")
    parts = []
    for c, name in zip(coef, names):
        c = float(c)
        if abs(c) < 1e-12:
            continue
        c = round(c, 10) + 0.0
        mag = abs(c)
        body = f"{mag:.10g}" if (name == "" or mag != 1.0) else ""
        sign = "−" if c < 0 else "+"
        parts.append((sign, body + name))
    if not parts:
        return "0=0"
    first_sign, first = parts[0]
    text = ("−" if first_sign == "−" else "") + first
    text += "".join(s + t for s, t in parts[1:])
    return text + "=0"


def oracle_report(alpha: float, k1: float, k2: float) -> dict:
    model = st_ellipse(alpha, k1, k2)
    cr = st_center(model)
    center, axes, _ = model.reduced_form()
    return {
        "alpha": alpha, "k1": k1, "k2": k2,
        "conic": conic_string(model.coefficients),
        "coefficients": dict(zip("ABCDEF", model.coefficients)),
        "m": model.m, "M": model.M, "y_m": model.y_m, "a": model.a, "b": model.b,
        "apex": list(cr.apex), "kite": geo.center_full(cr).tolist(),
        "ellipse_center": center.tolist(), "semi_axes": axes.tolist(),
    }


def cmd_oracle(cfg: RunConfig) -> int:
    if None in (cfg.alpha, cfg.k1, cfg.k2):
        raise InputError("oracle needs --alpha, --k1 and --k2")
    try:
        rep = oracle_report(cfg.alpha, cfg.k1, cfg.k2)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(_json(rep), cfg)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    A, est = _estimate(cfg)
    _, cr, _ = center_report(est, cfg.tol)
    eps = 2 * cfg.tol
    reports = [
        check_star_shaped(A, est, cr, cfg.trials, cfg.seed, eps=eps),
        check_star_shaped(A, est, cr, cfg.trials, cfg.seed, eps=eps, reals_only=True),
        check_convexity_equivalence(A, est, min(cfg.trials, 1000), cfg.seed, eps=eps),
    ]
    _emit(_json([r.to_dict() for r in reports]), cfg)
    return 0 if all(r.passed for r in reports) else 1


HANDLERS = {"bild": cmd_bild, "center": cmd_center, "convexity": cmd_convexity,
            "realpoint": cmd_realpoint, "oracle": cmd_oracle, "verify": cmd_verify}


def run(cfg: RunConfig) -> int:
    return HANDLERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrange",
                                     description="Numerical range of quaternionic matrices.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    common.add_argument("--theta-steps", type=int, default=DEFAULT_THETA_STEPS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--out", type=Path)

    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "bild": "convex hull of the upper bild",
        "center": "star-center of the bild with tangent lines",
        "convexity": "convexity verdict from the real-projection extremes",
        "realpoint": "a unit vector with real x* A x",
        "verify": "randomized property checks",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("input", type=Path, help="matrix JSON file")
        if name == "bild":
            p.add_argument("--samples-csv", type=Path,
                           help="also write binned samples as x,y,count")
        if name == "verify":
            p.add_argument("--trials", type=int, default=10_000)
    p = sub.add_parser("oracle", parents=[common], help="closed form for the 2x2 ellipse family")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k1", type=float, required=True)
    p.add_argument("--k2", type=float, required=True)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command, input=getattr(ns, "input", None), samples=ns.samples,
        theta_steps=ns.theta_steps, seed=ns.seed, budget=ns.budget, tol=ns.tol,
        format=ns.format, out=ns.out, alpha=getattr(ns, "alpha", None),
        k1=getattr(ns, "k1", None), k2=getattr(ns, "k2", None),
        trials=getattr(ns, "trials", 10_000), samples_csv=getattr(ns, "samples_csv", None),
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if cfg.format != "json" and cfg.command not in ("bild", "center"):
            raise InputError(f"{cfg.command} only writes json")
        return run(cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
