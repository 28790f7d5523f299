"""Command-line interface: one subcommand per distribution operation.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical failure.
A quantile search that does not converge still exits 0 and reports its flag.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys
from typing import Optional, Sequence

import numpy as np

from . import densities, grids, qmc, quantiles, sampling
from .core import BisectionConfig, NumericalError, QmcConfig, ValidationError, validate_spec

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3
INTEGRATORS = ("pmvnormal",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_vector(text, flag: str, missing: Optional[float] = None) -> list:
    """Parse ``"1,2,.,inf"`` into floats.

    ``.`` stands for ``missing`` (``-inf`` for lower limits, ``inf`` for
    upper limits) and is rejected where no infinity is meaningful.
    """
    if isinstance(text, (list, tuple)):
        tokens = [str(t) for t in text]
    else:
        tokens = [t for t in re.split(r"[,\s]+", str(text).strip()) if t]
    if not tokens:
        raise UsageError(f"--{flag}: empty vector")
    out = []
    for tok in tokens:
        if tok == ".":
            if missing is None:
                raise UsageError(f"--{flag}: '.' is not allowed here")
            out.append(missing)
            continue
        try:
            val = float(tok)
        except ValueError:
            raise UsageError(f"--{flag}: cannot parse {tok!r} as a number") from None
        if math.isnan(val):
            raise UsageError(f"--{flag}: NaN is not allowed")
        if math.isinf(val) and missing is None:
            raise UsageError(f"--{flag}: infinite values are not allowed here")
        out.append(val)
    return out


def parse_matrix(text: str, flag: str = "sigma") -> list:
    """Parse a row-major matrix with ``;`` between rows, e.g. ``"1,0.5;0.5,1"``."""
    rows = [r for r in str(text).split(";") if r.strip()]
    if not rows:
        raise UsageError(f"--{flag}: empty matrix")
    mat = [parse_vector(r, flag) for r in rows]
    if len({len(r) for r in mat}) != 1:
        raise UsageError(f"--{flag}: rows have different lengths")
    return mat


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.integer):
        return int(value)
    return value


# --------------------------------------------------------------------------
# argument groups

def _add_common(p, *, stochastic=True):
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--seed", type=int, default=0)
    if stochastic:
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)


def _add_location(p, t_family):
    # both spellings are accepted for every family
    p.add_argument("--mean", "--delta", dest="mean", required=True)
    p.add_argument("--sigma", required=True)
    if t_family:
        p.add_argument("--df", type=float, default=1.0)


def _add_truncation(p):
    p.add_argument("--lower-truncation", required=True)
    p.add_argument("--upper-truncation", required=True)


def _add_limits(p):
    p.add_argument("--lower", required=True)
    p.add_argument("--upper", required=True)


def _add_qmc(p, alpha=True):
    p.add_argument("--shifts", type=int, default=12)
    p.add_argument("--samples", type=int, default=1000)
    if alpha:
        p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--integrator", choices=INTEGRATORS, default="pmvnormal")


def _add_bisection(p):
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--tail", choices=("lower", "upper", "both"), default="lower")
    p.add_argument("--itermax", type=int, default=1_000_000)
    p.add_argument("--tolerance", type=float, default=1e-6)


def _add_random(p):
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--method", choices=("cholesky", "eigen", "svd"), default="cholesky")


COMMANDS = {
    # name: (kind, t_family, truncated)
    "mvnormalden": ("density", False, False),
    "pmvnormal": ("probability", False, False),
    "invmvnormal": ("quantile", False, False),
    "rmvnormal": ("random", False, False),
    "mvtden": ("density", True, False),
    "mvt": ("probability", True, False),
    "invmvt": ("quantile", True, False),
    "rmvt": ("random", True, False),
    "tmvnormalden": ("density", False, True),
    "tmvnormal": ("probability", False, True),
    "invtmvnormal": ("quantile", False, True),
    "rtmvnormal": ("random", False, True),
    "tmvtden": ("density", True, True),
    "tmvt": ("probability", True, True),
    "invtmvt": ("quantile", True, True),
    "rtmvt": ("random", True, True),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (kind, t_family, truncated) in COMMANDS.items():
        p = sub.add_parser(name)
        _add_location(p, t_family)
        if truncated:
            _add_truncation(p)
        if kind == "density":
            p.add_argument("--x", required=True)
            p.add_argument("--log-density", action="store_true")
            if truncated:
                _add_qmc(p)
        elif kind == "probability":
            _add_limits(p)
            _add_qmc(p)
        elif kind == "quantile":
            _add_bisection(p)
            _add_qmc(p)
        else:
            _add_random(p)
        _add_common(p, stochastic=kind != "random")

    g = sub.add_parser("density-grid", help="density values on a 2-d grid for contour plots")
    g.add_argument("--family", choices=grids.FAMILIES + ("all",), default="all")
    g.add_argument("--mean", "--delta", dest="mean", default="0,0")
    g.add_argument("--sigma", default="1,0.5;0.5,1")
    g.add_argument("--df", type=float, default=1.0)
    g.add_argument("--lower-truncation", default="-1.5,-1.5")
    g.add_argument("--upper-truncation", default="1.5,1.5")
    g.add_argument("--grid-min", type=float, default=-3.0)
    g.add_argument("--grid-max", type=float, default=3.0)
    g.add_argument("--step", type=float, default=0.1)
    _add_qmc(g)
    _add_common(g)

    c = sub.add_parser("truncation-curve",
                       help="truncated orthant probability as the lower truncation point t moves")
    c.add_argument("--mean", "--delta", dest="mean", default="0,0,0")
    c.add_argument("--sigma", default="1,0.5,0.5;0.5,1,0.5;0.5,0.5,1")
    c.add_argument("--lower", default=None)
    c.add_argument("--upper", default=None)
    c.add_argument("--t-min", type=float, default=-8.0)
    c.add_argument("--t-max", type=float, default=2.0)
    c.add_argument("--t-step", type=float, default=0.1)
    _add_qmc(c)
    _add_common(c)
    return parser


# --------------------------------------------------------------------------
# dispatch

def _parsed_inputs(args, kind, t_family, truncated):
    inputs = {"mean": parse_vector(args.mean, "mean"), "sigma": parse_matrix(args.sigma)}
    if t_family:
        inputs["df"] = args.df
    if truncated:
        inputs["lower_truncation"] = parse_vector(args.lower_truncation, "lower-truncation",
                                                  -math.inf)
        inputs["upper_truncation"] = parse_vector(args.upper_truncation, "upper-truncation",
                                                  math.inf)
    if kind == "density":
        inputs["x"] = parse_vector(args.x, "x")
        inputs["log_density"] = args.log_density
    if kind == "probability":
        inputs["lower"] = parse_vector(args.lower, "lower", -math.inf)
        inputs["upper"] = parse_vector(args.upper, "upper", math.inf)
    if kind == "quantile":
        inputs.update(p=args.p, tail=args.tail, itermax=args.itermax, tolerance=args.tolerance)
    if kind == "random":
        inputs.update(n=args.n, method=args.method)
    if hasattr(args, "shifts"):
        inputs.update(shifts=args.shifts, samples=args.samples, integrator=args.integrator)
        if hasattr(args, "alpha"):
            inputs["alpha"] = args.alpha
    inputs["seed"] = args.seed
    return inputs


def _qmc_config(inputs) -> QmcConfig:
    return QmcConfig(inputs.get("shifts", 12), inputs.get("samples", 1000),
                     inputs.get("alpha", 3.0))


def _run_distribution(args, kind, t_family, truncated):
    inp = _parsed_inputs(args, kind, t_family, truncated)
    mean, sigma, seed = inp["mean"], inp["sigma"], inp["seed"]
    nu = inp.get("df")
    lt, ut = inp.get("lower_truncation"), inp.get("upper_truncation")
    workers = max(getattr(args, "threads", 1), 1)
    diagnostics = {}
    error = None

    if kind == "density":
        x, log_scale = inp["x"], inp["log_density"]
        if truncated:
            cfg = _qmc_config(inp)
            spec = validate_spec(mean, sigma, nu if t_family else None, lt, ut)
            norm = qmc.normalizing_constant(spec, cfg, seed)
            diagnostics["normalizing_constant"] = norm.value
            diagnostics["normalizing_constant_error"] = norm.error
            if t_family:
                result = densities.tmvt_density(x, mean, sigma, nu, lt, ut, log_scale, cfg, seed)
            else:
                result = densities.tmvn_density(x, mean, sigma, lt, ut, log_scale, cfg, seed)
        elif t_family:
            result = densities.mvt_density(x, mean, sigma, nu, log_scale)
        else:
            result = densities.mvn_density(x, mean, sigma, log_scale)

    elif kind == "probability":
        cfg = _qmc_config(inp)
        a, b = inp["lower"], inp["upper"]
        if truncated and t_family:
            est = qmc.tmvt_probability(a, b, mean, sigma, nu, lt, ut, cfg, seed, workers=workers)
        elif truncated:
            est = qmc.tmvn_probability(a, b, mean, sigma, lt, ut, cfg, seed, workers=workers)
        elif t_family:
            est = qmc.mvt_probability(a, b, mean, sigma, nu, cfg, seed, workers=workers)
        else:
            est = qmc.mvn_probability(a, b, mean, sigma, cfg, seed, workers=workers)
        result, error = est.value, est.error

    elif kind == "quantile":
        cfg = _qmc_config(inp)
        bis = BisectionConfig(inp["itermax"], inp["tolerance"], inp["tail"])
        p = inp["p"]
        if truncated and t_family:
            res = quantiles.tmvt_quantile(p, mean, sigma, nu, lt, ut, bis, cfg, seed,
                                          workers=workers)
        elif truncated:
            res = quantiles.tmvn_quantile(p, mean, sigma, lt, ut, bis, cfg, seed,
                                          workers=workers)
        elif t_family:
            res = quantiles.mvt_quantile(p, mean, sigma, nu, bis, cfg, seed, workers=workers)
        else:
            res = quantiles.mvn_quantile(p, mean, sigma, bis, cfg, seed, workers=workers)
        result, error = res.quantile, res.error
        diagnostics.update(flag=res.flag, fquantile=res.fquantile, iterations=res.iterations)

    else:
        n, method = inp["n"], inp["method"]
        if truncated and t_family:
            draws = sampling.sample_tmvt(n, mean, sigma, nu, lt, ut, method, seed)
        elif truncated:
            draws = sampling.sample_tmvn(n, mean, sigma, lt, ut, method, seed)
        elif t_family:
            draws = sampling.sample_mvt(n, mean, sigma, nu, method, seed)
        else:
            draws = sampling.sample_mvn(n, mean, sigma, method, seed)
        result = draws.draws.tolist()
    return inp, result, error, diagnostics


def _run_density_grid(args):
    inp = {
        "family": args.family, "mean": parse_vector(args.mean, "mean"),
        "sigma": parse_matrix(args.sigma), "df": args.df,
        "lower_truncation": parse_vector(args.lower_truncation, "lower-truncation", -math.inf),
        "upper_truncation": parse_vector(args.upper_truncation, "upper-truncation", math.inf),
        "grid_min": args.grid_min, "grid_max": args.grid_max, "step": args.step,
        "shifts": args.shifts, "samples": args.samples, "alpha": args.alpha,
        "integrator": args.integrator, "seed": args.seed,
    }
    families = grids.FAMILIES if args.family == "all" else (args.family,)
    rows = []
    for fam in families:
        tab = grids.density_grid(fam, inp["mean"], inp["sigma"], inp["df"],
                                 inp["lower_truncation"], inp["upper_truncation"],
                                 args.grid_min, args.grid_max, args.step,
                                 _qmc_config(inp), args.seed)
        rows.extend({"family": fam, "x1": r[0], "x2": r[1], "density": r[2]} for r in tab)
    return inp, rows, None, {"rows": len(rows)}


def _run_truncation_curve(args):
    mean = parse_vector(args.mean, "mean")
    k = len(mean)
    inp = {
        "mean": mean, "sigma": parse_matrix(args.sigma),
        "lower": parse_vector(args.lower, "lower", -math.inf) if args.lower else [0.0] * k,
        "upper": parse_vector(args.upper, "upper", math.inf) if args.upper else [math.inf] * k,
        "t_min": args.t_min, "t_max": args.t_max, "t_step": args.t_step,
        "shifts": args.shifts, "samples": args.samples, "alpha": args.alpha,
        "integrator": args.integrator, "seed": args.seed,
    }
    t_values = grids.axis(args.t_min, args.t_max, args.t_step)
    tab = grids.truncation_curve(mean, inp["sigma"], t_values, inp["lower"], inp["upper"],
                                 _qmc_config(inp), args.seed, workers=max(args.threads, 1))
    rows = [{"t": r[0], "probability": r[1], "error": r[2]} for r in tab]
    return inp, rows, None, {"rows": len(rows)}


# --------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return f"{v:.7g}"
    return str(v)


def _render_text(command, result, error, diagnostics) -> str:
    out = io.StringIO()
    if isinstance(result, list) and result and isinstance(result[0], dict):
        keys = list(result[0])
        out.write("  ".join(f"{k:>14}" for k in keys) + "\n")
        for row in result:
            out.write("  ".join(f"{_fmt(row[k]):>14}" for k in keys) + "\n")
        return out.getvalue()
    if isinstance(result, list):
        for row in result:
            out.write("  ".join(f"{_fmt(v):>14}" for v in row) + "\n")
        return out.getvalue()
    label = {"density": "density", "probability": "probability",
             "quantile": "quantile"}[COMMANDS[command][0]]
    items = [(label, result)]
    if error is not None:
        items.append(("error", error))
    items.extend(diagnostics.items())
    width = max(len(k) for k, _ in items)
    for k, v in items:
        out.write(f"{k:<{width}} = {_fmt(v)}\n")
    return out.getvalue()


def _render_csv(command, result, error, diagnostics) -> str:
    if isinstance(result, list) and result and isinstance(result[0], dict):
        keys = list(result[0])
        rows = [[row[k] for k in keys] for row in result]
    elif isinstance(result, list):
        keys = [f"x{i + 1}" for i in range(len(result[0]))]
        rows = result
    else:
        kind = COMMANDS[command][0]
        keys, vals = [kind], [result]
        if error is not None:
            keys.append("error")
            vals.append(error)
        keys.extend(diagnostics)
        vals.extend(diagnostics.values())
        rows = [vals]

    def cell(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    lines = [",".join(keys)] + [",".join(cell(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _render_json(command, inputs, result, error, diagnostics) -> str:
    doc = {"command": command, "inputs": inputs, "result": result,
           "error_estimate": error, "diagnostics": diagnostics}
    return json.dumps(_jsonable(doc)) + "\n"


_NEGATIVE_VALUE = re.compile(r"^-(\d|\.|inf)", re.IGNORECASE)


def _attach_negative_values(argv: Sequence[str]) -> list:
    """Rewrite ``--flag -1,2`` as ``--flag=-1,2`` so argparse does not read an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        command = args.command
        if command == "density-grid":
            inputs, result, error, diag = _run_density_grid(args)
        elif command == "truncation-curve":
            inputs, result, error, diag = _run_truncation_curve(args)
        else:
            inputs, result, error, diag = _run_distribution(args, *COMMANDS[command])
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except ValidationError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL

    if args.format == "json":
        text = _render_json(command, inputs, result, error, diag)
    elif args.format == "csv":
        text = _render_csv(command, result, error, diag)
    else:
        text = _render_text(command, result, error, diag)
    stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
