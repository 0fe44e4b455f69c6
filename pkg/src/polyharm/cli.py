"""Command-line front end.

Subcommands: interp (fit and evaluate an interpolant), verify (Monte Carlo
nonsingularity experiment), counterexample (unit-sphere singular
configuration), scale-check (re-solve across scale parameters) and field
(bordered-determinant field on a planar lattice).

Exit codes: 0 success, 1 usage or I/O error, 2 mathematically meaningful
failure (numerically singular system, rank-deficient polynomial block,
violated asserted bound, or singular verdicts in an asserted verify run).

Every command prints a JSON document to stdout embedding the fully resolved
configuration, so each artifact is self-describing and reruns from the echo
reproduce the output byte for byte.  The RBF_SEED environment variable
supplies the seed when --seed is absent (falling back to 0).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from xml.sax.saxutils import escape

import numpy as np

from ._linalg import SingularSystemError, diagnostics
from .domains import (
    Ball,
    Box,
    ConstructionError,
    SamplingError,
    PointSet,
    TruncatedGaussian,
    Uniform,
    make_rng,
    mix_seed,
    read_points_csv,
    sample,
    sphere_counterexample,
    unit_box,
    write_points_csv,
)
from .interpolation import (
    AugmentationRankError,
    assemble,
    evaluate,
    scale_invariance_check,
    solve_augmented,
    solve_unaugmented,
)
from .kernels import RadialPower, ThinPlateSpline, kernel_spec, parse_kernel
from .unisolvence import BorderedSystem, monte_carlo

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; code 2 is reserved for mathematical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("RBF_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"RBF_SEED must be an integer, got {env!r}") from None
    return 0


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ValueError(f"bad {what} {text!r}: expected comma-separated numbers") from None


def _parse_domain(text: str | None, dim: int | None):
    if text is None:
        if dim is None:
            raise ValueError("either --domain or --dim is required")
        return unit_box(dim)
    cleaned = text.strip().lower()
    head, _, body = cleaned.partition(":")
    values = _parse_floats(body, "domain description")
    if head == "box":
        if len(values) < 2 or len(values) % 2 != 0:
            raise ValueError(f"bad box {text!r}: expected box:lo1,..,lod,hi1,..,hid")
        d = len(values) // 2
        domain = Box(lower=tuple(values[:d]), upper=tuple(values[d:]))
    elif head == "ball":
        if len(values) < 2:
            raise ValueError(f"bad ball {text!r}: expected ball:c1,..,cd,radius")
        domain = Ball(center=tuple(values[:-1]), radius=values[-1])
    else:
        raise ValueError(f"unknown domain {text!r}: expected box:... or ball:...")
    if dim is not None and domain.dimension != dim:
        raise ValueError(f"domain dimension {domain.dimension} does not match --dim {dim}")
    return domain


def _parse_density(text: str | None, dim: int):
    if text is None or text.strip().lower() == "uniform":
        return Uniform()
    cleaned = text.strip().lower()
    if cleaned.startswith("gauss:"):
        body = cleaned[len("gauss:"):]
        left, sep, right = body.partition("sd=")
        if not sep or not left.startswith("mu="):
            raise ValueError(f"bad density {text!r}: expected gauss:mu=...,sd=...")
        mean = _parse_floats(left[len("mu="):].rstrip(","), "gaussian mean")
        sd = _parse_floats(right, "gaussian sd")
        if len(mean) == 1 and dim > 1:
            mean = mean * dim
        if len(sd) == 1 and dim > 1:
            sd = sd * dim
        if len(mean) != dim or len(sd) != dim:
            raise ValueError(f"density dimension does not match the run dimension {dim}")
        return TruncatedGaussian(mean=tuple(mean), sd=tuple(sd))
    raise ValueError(f"unknown density {text!r}: expected 'uniform' or 'gauss:mu=...,sd=...'")


def _domain_spec(domain) -> str:
    if isinstance(domain, Box):
        return "box:" + ",".join(repr(v) for v in domain.lower + domain.upper)
    return "ball:" + ",".join(repr(v) for v in domain.center + (domain.radius,))


def _density_spec(density) -> str:
    if isinstance(density, Uniform):
        return "uniform"
    return ("gauss:mu=" + ",".join(repr(v) for v in density.mean)
            + ",sd=" + ",".join(repr(v) for v in density.sd))


def _augment_degree(text: str | None, kernel):
    if text is None:
        return None
    cleaned = text.strip().lower()
    head, _, rest = cleaned.partition(":")
    if head != "poly":
        raise ValueError(f"bad augmentation {text!r}: expected poly or poly:<degree>")
    if not rest:
        return kernel.info().cpd_order - 1
    try:
        return int(rest)
    except ValueError:
        raise ValueError(f"bad augmentation degree in {text!r}") from None


def _is_exploratory(kernel, dimension: int) -> bool:
    if dimension == 1:
        return True
    return (isinstance(kernel, RadialPower)
            and kernel.info().is_odd_integer_rp
            and kernel.nu >= 5)


# ---------------------------------------------------------------------------
# interp

def cmd_interp(args) -> int:
    kernel = parse_kernel(args.kernel)
    points, values = read_points_csv(args.points)
    if values is None:
        raise ValueError(f"{args.points}: interp requires a value column")
    degree = _augment_degree(args.augment, kernel)
    config = {
        "command": "interp",
        "kernel": kernel_spec(kernel),
        "epsilon": float(args.eps),
        "points": str(args.points),
        "augment": None if degree is None else f"poly:{degree}",
        "tau": float(args.tau),
        "out": args.out,
        "eval": args.eval,
        "pred": args.pred,
    }
    try:
        if degree is None:
            model = solve_unaugmented(points, values, kernel, args.eps, args.tau)
        else:
            model = solve_augmented(points, values, kernel, args.eps, degree, args.tau)
    except SingularSystemError as exc:
        message = str(exc)
        entries = assemble(points, kernel, args.eps).entries
        dead = [int(i) for i in np.flatnonzero(~np.any(entries != 0.0, axis=1))]
        if dead:
            message += f"; the matrix has exactly zero row(s) at node index {dead}"
        print(f"error: {message}", file=sys.stderr)
        return 2

    doc = {"command": "interp", "config": config,
           "diagnostics": model.diagnostics.to_dict()}
    model_doc = dict(model.to_dict())
    model_doc["config"] = config
    if args.out:
        with open(args.out, "w") as handle:
            json.dump(model_doc, handle, indent=2)
            handle.write("\n")
        doc["model"] = str(args.out)
    else:
        doc["model"] = model_doc

    if args.eval:
        grid_points, _ = read_points_csv(args.eval)
        predictions = evaluate(model, grid_points.points)
        if args.pred:
            write_points_csv(args.pred, grid_points.points, predictions)
            doc["predictions"] = str(args.pred)
        else:
            doc["predictions"] = [float(v) for v in predictions]
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    kernel = parse_kernel(args.kernel)
    domain = _parse_domain(args.domain, args.dim)
    density = _parse_density(args.density, domain.dimension)
    n_list = [int(v) for v in _parse_floats(args.n, "size list")]
    seed = _resolve_seed(args.seed)
    report = monte_carlo(kernel, domain, density, n_list, args.trials, seed,
                         tau=args.tau, eps=args.eps, threads=args.threads)
    exploratory = _is_exploratory(kernel, domain.dimension)
    banner = None
    if exploratory:
        banner = ("EXPLORATORY: no nonsingularity assertion for this configuration "
                  "(univariate nodes or odd integer exponent >= 5); results are "
                  "report-only.")
        print(banner)

    config = dict(report.config)
    config["domain_spec"] = _domain_spec(domain)
    config["density_spec"] = _density_spec(density)
    doc = {
        "command": "verify",
        "exploratory": exploratory,
        "config": config,
        "aggregates": [a.to_dict() for a in report.aggregates],
        "records": [r.to_dict() for r in report.records],
        "total_failures": report.total_failures,
        "outputs": {"report": args.out, "csv": args.csv},
    }
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(report.to_json() + "\n")
    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            handle.write(report.records_csv())
    _emit(doc)
    if exploratory:
        return 0
    return 0 if report.total_failures == 0 else 2


# ---------------------------------------------------------------------------
# counterexample

def cmd_counterexample(args) -> int:
    if args.kernel is not None:
        kernel = parse_kernel(args.kernel)
    else:
        kernel = ThinPlateSpline(k=args.k)
    center = None
    if args.center is not None:
        center = _parse_floats(args.center, "center")
        if len(center) != args.dim:
            raise ValueError(f"center has {len(center)} coordinates, expected {args.dim}")
    points = sphere_counterexample(args.dim, args.n, center)
    diag = diagnostics(assemble(points, kernel, args.eps).entries, args.tau)
    config = {
        "command": "counterexample",
        "kernel": kernel_spec(kernel),
        "epsilon": float(args.eps),
        "dimension": int(args.dim),
        "n": int(args.n),
        "center": [float(v) for v in (center if center is not None else [0.0] * args.dim)],
        "tau": float(args.tau),
    }
    doc = {
        "command": "counterexample",
        "config": config,
        "points": [[float(v) for v in row] for row in points.points],
        "diagnostics": diag.to_dict(),
    }
    if isinstance(kernel, ThinPlateSpline):
        exact = diag.det_sign == 0 and diag.sigma_min == 0.0
        doc["exact_singular"] = exact
        doc["note"] = ("unit distances zero out the center row of the thin-plate "
                       "matrix, so the matrix is exactly singular")
        _emit(doc)
        return 0 if exact else 2
    doc["exact_singular"] = False
    doc["note"] = ("non-thin-plate kernel on the same configuration; reported for "
                   "comparison, no singularity expected")
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------
# scale-check

def cmd_scale_check(args) -> int:
    kernel = parse_kernel(args.kernel)
    eps_list = _parse_floats(args.eps, "scale list")
    if len(eps_list) < 2:
        raise ValueError("scale-check needs at least two scales in --eps")
    degree = _augment_degree(args.augment, kernel)
    seed = _resolve_seed(args.seed)
    if args.points:
        points, values = read_points_csv(args.points)
        if values is None:
            raise ValueError(f"{args.points}: scale-check requires a value column")
        source = {"points": str(args.points)}
    else:
        if args.n is None or args.dim is None:
            raise ValueError("scale-check needs --points or both --dim and --n")
        domain = _parse_domain(args.domain, args.dim)
        points = sample(domain, Uniform(), args.n, mix_seed(seed, 0))
        values = make_rng(mix_seed(seed, 1)).standard_normal(points.n)
        source = {
            "dim": int(args.dim),
            "n": int(args.n),
            "seed": int(seed),
            "domain_spec": _domain_spec(domain),
        }
    report = scale_invariance_check(points, values, kernel, eps_list,
                                    degree=degree, tau=args.tau)
    config = {
        "command": "scale-check",
        "kernel": kernel_spec(kernel),
        "eps_list": [float(v) for v in eps_list],
        "augment": None if degree is None else f"poly:{degree}",
        "tau": float(args.tau),
        "source": source,
    }
    doc = {"command": "scale-check", "config": config, "report": report.to_dict()}
    _emit(doc)
    if report.passed is False:
        return 2
    return 0


# ---------------------------------------------------------------------------
# field

_SVG_PALETTE = ("#08306b", "#2171b5", "#6baed6", "#c6dbef", "#f7f7f7",
                "#fcbba1", "#fb6a4a", "#cb181d", "#67000d")
_SVG_ZERO = "#111111"


def _field_svg(xs: np.ndarray, ys: np.ndarray, values: np.ndarray, desc: str) -> str:
    size, margin = 640, 20
    plot = size - 2 * margin
    x0, x1 = float(xs[0]), float(xs[-1])
    y0, y1 = float(ys[0]), float(ys[-1])
    vmax = float(np.abs(values).max())
    floor = vmax * 1e-9 if vmax > 0.0 else 1.0

    def px(x):
        return margin + (x - x0) / (x1 - x0) * plot

    def py(y):
        return margin + (y1 - y) / (y1 - y0) * plot

    def color(cell):
        low, high = float(cell.min()), float(cell.max())
        if low < 0.0 < high or low == 0.0 or high == 0.0:
            return _SVG_ZERO
        if vmax == 0.0:
            return _SVG_PALETTE[4]
        mean = float(cell.mean())
        t = math.copysign(math.log1p(abs(mean) / floor) / math.log1p(vmax / floor), mean)
        band = min(8, max(0, int((t + 1.0) / 2.0 * 9.0)))
        return _SVG_PALETTE[band]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}">',
        f"<desc>{escape(desc)}</desc>",
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cell = values[i : i + 2, j : j + 2]
            cx, cy = px(xs[i]), py(ys[j + 1])
            w, h = px(xs[i + 1]) - cx, py(ys[j]) - cy
            parts.append(
                f'<rect x="{cx:.2f}" y="{cy:.2f}" width="{w:.2f}" height="{h:.2f}" '
                f'fill="{color(cell)}"/>'
            )
    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{plot}" height="{plot}" '
        'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_field(args) -> int:
    kernel = parse_kernel(args.kernel)
    seed = _resolve_seed(args.seed)
    if args.points:
        points, _ = read_points_csv(args.points)
        source = {"points": str(args.points)}
    else:
        if args.n is None:
            raise ValueError("field needs --points or --n")
        dim = args.dim if args.dim is not None else 2
        domain = _parse_domain(args.domain, dim)
        points = sample(domain, Uniform(), args.n, seed)
        source = {"dim": dim, "n": int(args.n), "seed": int(seed),
                  "domain_spec": _domain_spec(domain)}
    if points.dimension != 2:
        raise ValueError("field rendering requires planar (d = 2) points")

    if args.grid:
        grid = _parse_floats(args.grid, "grid description")
        if len(grid) != 6:
            raise ValueError("bad --grid: expected x0,x1,y0,y1,nx,ny")
        gx0, gx1, gy0, gy1 = grid[:4]
        nx, ny = int(grid[4]), int(grid[5])
    else:
        lo = points.points.min(axis=0)
        hi = points.points.max(axis=0)
        pad = np.maximum(0.25 * (hi - lo), 1.25)
        gx0, gx1 = float(lo[0] - pad[0]), float(hi[0] + pad[0])
        gy0, gy1 = float(lo[1] - pad[1]), float(hi[1] + pad[1])
        nx = ny = 64
    if not (gx0 < gx1 and gy0 < gy1 and nx >= 2 and ny >= 2):
        raise ValueError("bad --grid: needs x0 < x1, y0 < y1 and nx, ny >= 2")

    system = BorderedSystem(assemble(points, kernel, args.eps), args.tau)
    xs = np.linspace(gx0, gx1, nx)
    ys = np.linspace(gy0, gy1, ny)
    field = system.grid(xs, ys)

    config = {
        "command": "field",
        "kernel": kernel_spec(kernel),
        "epsilon": float(args.eps),
        "tau": float(args.tau),
        "source": source,
        "grid": [gx0, gx1, gy0, gy1, nx, ny],
        "out": str(args.out),
        "svg": args.svg,
    }
    with open(args.out, "w", newline="") as handle:
        handle.write("x,y,value\n")
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                handle.write(f"{float(x)!r},{float(y)!r},{float(field[i, j])!r}\n")
    if args.svg:
        svg = _field_svg(xs, ys, field, json.dumps(config))
        with open(args.svg, "w") as handle:
            handle.write(svg)
    doc = {
        "command": "field",
        "config": config,
        "summary": {
            "n_nodes": points.n,
            "min_value": float(field.min()),
            "max_value": float(field.max()),
            "base_diagnostics": system.base_diagnostics.to_dict(),
        },
        "outputs": {"csv": str(args.out), "svg": args.svg},
    }
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> _Parser:
    parser = _Parser(prog="polyharm",
                     description="Polyharmonic interpolation and nonsingularity experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("interp", help="fit an interpolant from a points CSV")
    p.add_argument("--kernel", required=True, help="tps:k=<int> or rp:nu=<float>")
    p.add_argument("--points", required=True, help="CSV with header x1,..,xd,value")
    p.add_argument("--eps", type=float, default=1.0, help="scale parameter (default 1)")
    p.add_argument("--augment", default=None, help="poly or poly:<degree>")
    p.add_argument("--tau", type=float, default=1e-12)
    p.add_argument("--out", default=None, help="write the model JSON here")
    p.add_argument("--eval", default=None, help="CSV of query points to evaluate")
    p.add_argument("--pred", default=None, help="write predictions CSV here")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("verify", help="Monte Carlo nonsingularity experiment")
    p.add_argument("--kernel", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--domain", default=None, help="box:lo..,hi.. or ball:c..,r")
    p.add_argument("--density", default=None, help="uniform or gauss:mu=..,sd=..")
    p.add_argument("--n", required=True, help="comma-separated sizes, e.g. 5,20,50")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tau", type=float, default=1e-12)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--csv", default=None, help="write per-trial records CSV here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", help="unit-sphere singular configuration")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1, help="thin-plate spline order")
    p.add_argument("--kernel", default=None, help="override kernel, e.g. rp:nu=1")
    p.add_argument("--center", default=None, help="comma-separated center coordinates")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1e-12)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("scale-check", help="re-solve across scale parameters")
    p.add_argument("--kernel", required=True)
    p.add_argument("--eps", required=True, help="comma-separated scales, e.g. 0.25,1,4")
    p.add_argument("--points", default=None, help="CSV with value column")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--domain", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--augment", default=None, help="poly or poly:<degree>")
    p.add_argument("--tau", type=float, default=1e-12)
    p.set_defaults(func=cmd_scale_check)

    p = sub.add_parser("field", help="bordered-determinant field on a planar lattice")
    p.add_argument("--kernel", required=True)
    p.add_argument("--points", default=None, help="CSV of nodes (values ignored)")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--domain", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1e-12)
    p.add_argument("--grid", default=None, help="x0,x1,y0,y1,nx,ny")
    p.add_argument("--out", required=True, help="write the field CSV here")
    p.add_argument("--svg", default=None, help="write a contour-band SVG here")
    p.set_defaults(func=cmd_field)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SingularSystemError, AugmentationRankError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, SamplingError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
