"""Command-line front end.

Every subcommand resolves its parameters (config file first, then flags),
validates them, runs, and writes deterministic outputs: CSV with 17
significant digits and JSON with sorted keys. Each JSON embeds the resolved
config and the hypothesis validation report. The summary is also written as
``run.json`` in ``--out``; timestamps go only to ``run.log`` there.

Exit codes: 0 success, 1 solver non-convergence (diagnostics still written),
2 invalid parameters or usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bvp, local, monotone, subsuper
from .dispersion import c_star, dispersion, speed_threshold
from .errors import (ConstructionError, ContinuationError, DivergentTransformError, ParameterError,
                     PreconditionError, ResolutionError, SqueezeError, ThresholdError)
from .kernels import FAMILIES, KernelSpec
from .model import ModelParams, equilibria, validate

INVALID = (ParameterError, ResolutionError, ThresholdError, PreconditionError, DivergentTransformError)
FAILED = (ContinuationError, SqueezeError, ConstructionError)
NO_GUARANTEE = "outside the proven parameter range; results carry no theoretical guarantee"
# keys that locate files rather than define the computation
_PATH_KEYS = {"config", "out", "func", "command"}

log = logging.getLogger("nonlocal_fronts")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# serialisation


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return "%.17g" % float(v)


def csv_text(header: list[str], columns) -> str:
    rows = [",".join(header)]
    for row in zip(*columns):
        rows.append(",".join(fmt(v) for v in row))
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def parse_ladder(text: str) -> list[float]:
    """``start:stop:step`` (inclusive, step may be negative) or a comma list."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"ladder {text!r} is not start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step == 0 or (stop - start) * step < 0:
            out = [] if start != stop else [start]
        else:
            m = int(math.floor((stop - start) / step + 1e-9))
            out = [round(start + k * step, 12) for k in range(m + 1)]
    else:
        out = [float(p) for p in text.split(",") if p.strip()]
    if not out:
        raise ParameterError(f"ladder {text!r} is empty")
    return out


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment; keys as the long flags."""
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path!r}: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{num}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = val
    return values


def _common(p):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--out", default=None, help="output directory (files are written only when given)")


def _model_args(p, d0=False, sigma=True):
    p.add_argument("--d", type=float, required=True)
    if d0:
        p.add_argument("--d0", type=float, default=None)
    if sigma:
        p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--allow-outside", action="store_true",
                   help="accept 2/9 <= d < 1/4 (no theoretical guarantee)")


def _kernel_args(p):
    p.add_argument("--kernel", choices=FAMILIES, default="tophat")
    p.add_argument("--kernel-file", default=None, help="two-column CSV for the tabulated kernel")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nonlocal-fronts", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("equilibria", help="equilibria 0 < a < A")
    _common(p)
    _model_args(p, sigma=False)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("dispersion", help="negative roots of the characteristic functions")
    _common(p)
    _model_args(p)
    _kernel_args(p)
    p.add_argument("--c", type=float, required=True)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("c-star", help="speed threshold c_star(sigma)")
    _common(p)
    _model_args(p)
    _kernel_args(p)
    p.add_argument("--sigma-ladder", default=None, help="start:stop:step or comma list")
    p.set_defaults(func=cmd_c_star)

    p = sub.add_parser("subsuper", help="dump and certify the sub/super-solution pair")
    _common(p)
    _model_args(p)
    _kernel_args(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--larger-mu-root", action="store_true")
    p.set_defaults(func=cmd_subsuper)

    p = sub.add_parser("solve-monotone", help="monotone a -> A front by monotone iteration")
    _common(p)
    _model_args(p)
    _kernel_args(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--xmin", type=float, default=-60.0)
    p.add_argument("--xmax", type=float, default=60.0)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--larger-mu-root", action="store_true")
    p.add_argument("--tol-class", type=float, default=1e-4)
    p.set_defaults(func=cmd_solve_monotone)

    for name, func in (("solve-bvp", cmd_solve_bvp), ("sweep-sigma", cmd_sweep_sigma)):
        p = sub.add_parser(name, help="semi-wavefront by cutoff continuation" if name == "solve-bvp"
                           else "semi-wavefront speed over a sigma ladder")
        _common(p)
        _model_args(p, d0=True, sigma=name == "solve-bvp")
        _kernel_args(p)
        p.add_argument("--h", type=float, default=None, help="default min(0.01, sigma/4)")
        p.add_argument("--eps-ladder", default=None, help="comma list or start:stop:step")
        p.add_argument("--L-ladder", dest="L_ladder", default=None, help="comma list or start:stop:step")
        p.add_argument("--tol-class", type=float, default=1e-4)
        if name == "solve-bvp":
            p.add_argument("--L", type=float, default=40.0)
            p.add_argument("--eps", type=float, default=1e-3)
            p.add_argument("--tau-target", type=float, default=1.0)
            p.add_argument("--newton-tol", type=float, default=bvp.NEWTON_TOL)
        else:
            p.add_argument("--sigma-ladder", required=True)
            p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=func)

    p = sub.add_parser("local-oracle", help="exact local front speeds")
    _common(p)
    _model_args(p, d0=True, sigma=False)
    p.set_defaults(func=cmd_local_oracle)

    p = sub.add_parser("verify", help="re-run a stored run and re-check its bound report")
    _common(p)
    p.add_argument("--in", dest="inp", required=True, help="JSON summary written by a previous run")
    p.add_argument("--strict", action="store_true", help="also fail when a reproduced check fails")
    p.set_defaults(func=cmd_verify)
    return parser


def _config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    choices = parser._subparsers._group_actions[0].choices
    path = _config_path(argv)
    command = next((tok for tok in argv if tok in choices), None)
    if path and command:
        values = read_config(path)
        sub = choices[command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known - {"config", "out"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        for a in sub._actions:
            if a.dest in values:
                a.required = False
                if isinstance(a, argparse._StoreTrueAction):
                    values[a.dest] = values[a.dest].lower() in ("1", "true", "yes", "on")
        values.pop("config", None)
        values.pop("out", None)
        sub.set_defaults(**values)
    return parser.parse_args(argv)


def resolved_config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _PATH_KEYS}


# ---------------------------------------------------------------------------
# parameter resolution


def _positive(**kw):
    for name, v in kw.items():
        if v is not None and not (math.isfinite(v) and v > 0):
            raise ParameterError(f"--{name.replace('_', '-')} must be positive, got {v}")


def _model(args, sigma_required=True, d0_required=False) -> ModelParams:
    sigma = getattr(args, "sigma", None)
    if sigma_required and sigma is None:
        raise ParameterError("--sigma is required")
    d0 = getattr(args, "d0", None)
    if d0_required and d0 is None:
        raise ParameterError("--d0 is required")
    return ModelParams(args.d, 0.0 if sigma is None else sigma, d0, args.allow_outside)


def _kernel(args) -> KernelSpec:
    if args.kernel == "tabulated":
        if not args.kernel_file:
            raise ParameterError("--kernel tabulated needs --kernel-file")
        return KernelSpec.from_csv(args.kernel_file)
    return getattr(KernelSpec, args.kernel)()


def _envelope(args, model: ModelParams | None, mode: str, body: dict) -> dict:
    out = dict(body)
    out["command"] = args.command
    out["config"] = resolved_config(args)
    if model is not None:
        out["validation"] = validate(model, mode).as_dict()
        out["theoretical_guarantee"] = model.guaranteed
        if not model.guaranteed:
            out["warning"] = NO_GUARANTEE
    return out


def _schedule(args) -> bvp.Schedule:
    eps = tuple(parse_ladder(args.eps_ladder)) if args.eps_ladder else bvp.Schedule().eps
    Ls = tuple(parse_ladder(args.L_ladder)) if args.L_ladder else bvp.Schedule().L
    return bvp.Schedule(eps, Ls)


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, JSON body, {file name: text})


def cmd_equilibria(args):
    eq = equilibria(args.d)
    # the equilibria exist up to d = 1/4; the report flags d outside the proven range
    model = ModelParams(args.d, 1.0, None, allow_outside=True)
    body = {"a": eq.a, "A": eq.A, "zero": eq.zero, "outside_theorem_range": eq.outside_theorem_range}
    return 0, _envelope(args, model, "a_to_A", body), {}


def cmd_dispersion(args):
    model = _model(args)
    _positive(sigma=args.sigma)
    kernel = _kernel(args)
    res = dispersion(args.c, args.sigma, model, kernel)
    body = res.as_dict()
    body.update(both_exist=res.both_exist, speed_threshold=speed_threshold(model))
    return 0, _envelope(args, model, "a_to_A", body), {}


def _c_star_row(sigma, model, kernel):
    cs = c_star(sigma, model, kernel)
    if math.isfinite(cs):
        res = dispersion(max(cs, 0.0), sigma, model, kernel)
        if not res.both_exist:
            res = dispersion(cs * (1 + 1e-9) + 1e-12, sigma, model, kernel)
        return [sigma, cs, res.lambda1, res.lambda2, res.eps1, res.eps2]
    return [sigma, cs, math.nan, math.nan, math.nan, math.nan]


def cmd_c_star(args):
    if args.sigma_ladder:
        sigmas = parse_ladder(args.sigma_ladder)
    elif args.sigma is not None:
        sigmas = [args.sigma]
    else:
        raise ParameterError("give --sigma or --sigma-ladder")
    _positive(**{f"sigma": min(sigmas)})
    model = ModelParams(args.d, sigmas[0], None, args.allow_outside)
    kernel = _kernel(args)
    rows = [_c_star_row(s, model.with_sigma(s), kernel) for s in sigmas]
    cols = list(zip(*rows))
    header = ["sigma", "c_star", "lambda1", "lambda2", "eps1", "eps2"]
    cs = [r[1] for r in rows]
    inversions = [float(cs[i] - cs[i + 1]) for i in range(len(cs) - 1)
                  if sigmas[i + 1] > sigmas[i] and cs[i + 1] < cs[i] - 1e-8]
    body = {"rows": [dict(zip(header, r)) for r in rows], "nondecreasing": not inversions,
            "speed_threshold": speed_threshold(model)}
    return 0, _envelope(args, model, "a_to_A", body), {"c_star.csv": csv_text(header, cols)}


def cmd_subsuper(args):
    model = _model(args)
    _positive(sigma=args.sigma, h=args.h)
    kernel = _kernel(args)
    cert = subsuper.certify(args.c, args.sigma, model, kernel, h=args.h, larger_mu_root=args.larger_mu_root)
    ps = subsuper.sample_sub(cert.sub, *cert.grid)
    pS = subsuper.sample_super(cert.sup, *cert.grid)
    rs = subsuper.residual_L(ps, args.c, args.sigma, model, kernel).values
    rS = subsuper.residual_L(pS, args.c, args.sigma, model, kernel).values
    files = {"subsuper.csv": csv_text(["xi", "sub", "super", "sub_residual", "super_residual"],
                                      [ps.x, ps.values, pS.values, rs, rS])}
    return (0 if cert.passed else 1), _envelope(args, model, "a_to_A", cert.as_dict()), files


def _profile_csv(sol: monotone.FrontSolution, residual) -> str:
    return csv_text(["xi", "omega", "residual"], [sol.profile.x, sol.profile.values, residual])


def cmd_solve_monotone(args):
    model = _model(args)
    _positive(sigma=args.sigma, h=args.h, tol=args.tol, max_iter=args.max_iter, tol_class=args.tol_class)
    if not args.xmin < 0 < args.xmax:
        raise ParameterError("need xmin < 0 < xmax")
    kernel = _kernel(args)
    cfg = monotone.MonotoneConfig(xmin=args.xmin, xmax=args.xmax, h=args.h, tol=args.tol,
                                  max_iter=args.max_iter, b=args.b, larger_mu_root=args.larger_mu_root,
                                  tol_class=args.tol_class)
    try:
        sol = monotone.solve_monotone(args.c, args.sigma, model, kernel, cfg)
    except SqueezeError as exc:
        return 1, _envelope(args, model, "a_to_A", {"converged": False, "error": str(exc)}), {}
    res = np.array(subsuper.residual_L(sol.profile, args.c, args.sigma, model, kernel).values)
    res[0] = res[-1] = 0.0
    body = sol.summary()
    body["profile_csv"] = "profile.csv"
    return (0 if sol.converged else 1), _envelope(args, model, "a_to_A", body), {"profile.csv": _profile_csv(sol, res)}


def _bvp_residual(profile, c, problem):
    R, _ = bvp.assemble_system(profile.values, c, problem)
    return R


def solve_bvp_run(args, model, kernel):
    """Single cutoff solve at (L, eps), or the full ladder when one is given."""
    h = args.h if args.h is not None else bvp.default_h(args.sigma)
    if args.eps_ladder or args.L_ladder:
        sol = bvp.extract_semiwavefront(model, kernel, args.sigma, _schedule(args), h, args.tol_class)
        last = sol.info["ladder"][-1]
        problem = bvp.BvpProblem(last["L"], h, model, kernel, args.sigma, bvp.CutoffSpec(last["eps"], model.A))
        body = sol.summary()
        return sol.converged, body, sol.profile, sol.c, problem
    problem = bvp.BvpProblem(args.L, h, model, kernel, args.sigma, bvp.CutoffSpec(args.eps, model.A),
                             newton_tol=args.newton_tol)
    s = bvp.homotopy_solve(problem, tau_target=args.tau_target)
    left, right = monotone.classify_limits(s.profile, model, args.tol_class)
    body = {"c": s.c, "tau": s.tau, "newton_residual": s.newton_residual, "residual_sup": s.newton_residual,
            "left_limit": left, "right_limit": right, "bounds_pass": s.bounds_pass,
            "bound_report": [ch.as_dict() for ch in s.bound_report],
            "ladder": [{"eps": args.eps, "L": args.L, "c": s.c, "newton_residual": s.newton_residual,
                        "bounds_pass": s.bounds_pass}],
            "tau_trace": [list(t) for t in s.trace], "h": h,
            "speed_bounds": list(bvp.speed_bounds(model, kernel, args.sigma)[:2]),
            "grid": {"x0": s.profile.x0, "h": s.profile.h, "n": s.profile.n}}
    return True, body, s.profile, s.c, problem.with_(tau=s.tau)


def cmd_solve_bvp(args):
    model = _model(args, d0_required=True)
    _positive(sigma=args.sigma, h=args.h, L=args.L, eps=args.eps, newton_tol=args.newton_tol,
              tol_class=args.tol_class)
    if not 0.0 < args.tau_target <= 1.0:
        raise ParameterError("--tau-target must lie in (0, 1]")
    kernel = _kernel(args)
    rep = validate(model, "zero_to_A")
    if not rep.passed and not (model.allow_outside and rep.violated == "0<=d<2/9"):
        raise ParameterError(f"semi-wavefront hypotheses violated: {rep.violated}")
    try:
        ok, body, prof, c, problem = solve_bvp_run(args, model, kernel)
    except ContinuationError as exc:
        diag = {"converged": False, "error": str(exc), "last_tau": exc.last_tau, **exc.info}
        return 1, _envelope(args, model, "zero_to_A", diag), {}
    res = _bvp_residual(prof, c, problem)
    body["profile_csv"] = "profile.csv"
    files = {"profile.csv": csv_text(["xi", "omega", "residual"], [prof.x, prof.values, res])}
    return (0 if ok else 1), _envelope(args, model, "zero_to_A", body), files


def _sweep_cell(payload):
    """One sigma of a sweep; never raises (errors are recorded in the cell)."""
    d, d0, allow, kernel_args, sigma, schedule, h, tol_class = payload
    try:
        kernel = KernelSpec.from_csv(kernel_args[1]) if kernel_args[0] == "tabulated" \
            else getattr(KernelSpec, kernel_args[0])()
        model = ModelParams(d, sigma, d0, allow)
        sol = bvp.extract_semiwavefront(model, kernel, sigma, schedule, h, tol_class)
        return {"sigma": sigma, "status": "ok" if sol.converged else "not_stabilized", **sol.summary()}
    except Exception as exc:  # recorded, the sweep goes on
        return {"sigma": sigma, "status": "failed", "error": f"{type(exc).__name__}: {exc}"}


def worker_count(args) -> int:
    env = os.environ.get("WAVEFRONT_WORKERS")
    n = args.workers
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ParameterError(f"WAVEFRONT_WORKERS={env!r} is not an integer") from exc
    if n < 1:
        raise ParameterError("worker count must be at least 1")
    return n


def cmd_sweep_sigma(args):
    sigmas = parse_ladder(args.sigma_ladder)
    _positive(sigma=min(sigmas), h=args.h, tol_class=args.tol_class)
    model = _model(argparse.Namespace(**{**vars(args), "sigma": sigmas[0]}), d0_required=True)
    rep = validate(model, "zero_to_A")
    if not rep.passed and not (model.allow_outside and rep.violated == "0<=d<2/9"):
        raise ParameterError(f"semi-wavefront hypotheses violated: {rep.violated}")
    _kernel(args)
    schedule = _schedule(args)
    payloads = [(args.d, args.d0, args.allow_outside, (args.kernel, args.kernel_file), s, schedule,
                 args.h if args.h is not None else bvp.default_h(s), args.tol_class) for s in sigmas]
    n = worker_count(args)
    if n == 1:
        cells = [_sweep_cell(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            cells = list(pool.map(_sweep_cell, payloads))
    files = {}
    cols = [[], [], [], [], []]
    for s, cell in zip(sigmas, cells):
        files[f"cell_sigma_{s!r}.json"] = dumps(_envelope(args, model.with_sigma(s), "zero_to_A", cell))
        ok = cell["status"] != "failed"
        for col, v in zip(cols, (s, cell.get("c", math.nan) if ok else math.nan,
                                 cell.get("right_limit", "failed") if ok else "failed",
                                 cell.get("residual_sup", math.nan) if ok else math.nan,
                                 bool(cell.get("bounds_pass", False)))):
            col.append(v)
    files["sweep.csv"] = csv_text(["sigma", "c_star_semi", "right_limit_class", "residual", "bounds_pass"], cols)
    # measured threshold: the largest ladder sigma below which every cell reached A
    below = sorted(sigmas)
    sigma_meas = None
    for s in below:
        cell = cells[sigmas.index(s)]
        if cell.get("right_limit") != "A":
            break
        sigma_meas = s
    body = {"cells": [{"sigma": c["sigma"], "status": c["status"], "c": c.get("c"),
                       "right_limit": c.get("right_limit"), "bounds_pass": c.get("bounds_pass")}
                      for c in cells],
            "sigma_all_A_up_to": sigma_meas, "workers": n}
    failed = any(c["status"] != "ok" for c in cells)
    return (1 if failed else 0), _envelope(args, model, "zero_to_A", body), files


def cmd_local_oracle(args):
    model = ModelParams(args.d, 0.0, args.d0, args.allow_outside)
    if not 0.0 < args.d:
        raise ParameterError("the local 0 -> A front needs d > 0")
    f0 = local.exact_front_0A(model)
    fa = local.exact_front_aA(model)
    body = {"d": args.d, "a": model.a, "A": model.A, "c_0A_exact": f0.c, "c_aA_exact": fa.c}
    return 0, _envelope(args, None, "a_to_A", body), {}


_REPLAYABLE = {"solve-monotone", "solve-bvp", "subsuper", "dispersion", "c-star", "equilibria", "local-oracle"}


def _compare_reports(old: list, new: list) -> list[dict]:
    new_by = {c["name"]: c for c in new}
    rows = []
    for c in old:
        n = new_by.get(c["name"])
        same = n is not None and n["passed"] == c["passed"] and _close(c.get("value"), n.get("value"))
        rows.append({"name": c["name"], "stored_passed": c["passed"],
                     "passed": None if n is None else n["passed"],
                     "stored_value": c.get("value"), "value": None if n is None else n.get("value"),
                     "reproduced": bool(same)})
    return rows


def _close(a, b, rel=1e-9, abs_=1e-13):
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    return abs(a - b) <= abs_ + rel * max(abs(a), abs(b))


def cmd_verify(args):
    path = Path(args.inp)
    try:
        stored = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise ParameterError(f"cannot read run {path}: {exc}") from exc
    cmd = stored.get("command")
    if cmd not in _REPLAYABLE or "config" not in stored:
        raise ParameterError(f"{path} is not a replayable run summary")
    cfg = dict(stored["config"])
    replay = argparse.Namespace(command=cmd, **cfg)
    func = build_parser()._subparsers._group_actions[0].choices[cmd].get_default("func")
    code, body, files = func(replay)
    fresh = json.loads(dumps(body))
    old_report = stored.get("bound_report", [])
    new_report = fresh.get("bound_report", [])
    rows = _compare_reports(old_report, new_report)
    profile_same = None
    if stored.get("profile_csv"):
        old_csv = path.parent / stored["profile_csv"]
        if old_csv.exists():
            profile_same = old_csv.read_text() == files.get(stored["profile_csv"])
    reproduced = all(r["reproduced"] for r in rows) and profile_same is not False
    if not old_report:
        reproduced = reproduced and json.loads(dumps(stored)) == fresh
    all_pass = all(r["passed"] for r in rows) if rows else bool(fresh.get("passed", True))
    body = {"input": str(path), "replayed_command": cmd, "items": rows, "profile_identical": profile_same,
            "reproduced": reproduced, "all_pass": all_pass}
    ok = reproduced and (all_pass or not args.strict)
    out = {"command": "verify", "config": resolved_config(args), **body}
    return (0 if ok else 1), out, {}


# ---------------------------------------------------------------------------
# entry point


def _prepare_out(out: str | None) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=path):
            pass
    except OSError as exc:
        raise ParameterError(f"output directory {out!r} is not writable: {exc}") from exc
    return path


def _write(path: Path, name: str, text: str):
    (path / name).write_text(text)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"nonlocal-fronts: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        out = _prepare_out(args.out)
    except ParameterError as exc:
        print(f"nonlocal-fronts: error: {exc}", file=sys.stderr)
        return 2
    handler = None
    if out is not None:
        handler = logging.FileHandler(out / "run.log", mode="a")
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
        log.addHandler(handler)
        log.setLevel(logging.INFO)
    try:
        log.info("start %s", " ".join(argv))
        try:
            code, body, files = args.func(args)
        except INVALID as exc:
            print(f"nonlocal-fronts: error: {exc}", file=sys.stderr)
            log.info("invalid parameters: %s", exc)
            return 2
        except FAILED as exc:
            code, body, files = 1, {"command": args.command, "config": resolved_config(args),
                                    "converged": False, "error": str(exc)}, {}
        text = dumps(body)
        if out is not None:
            for name, content in sorted(files.items()):
                _write(out, name, content)
            _write(out, "run.json", text)
        sys.stdout.write(text)
        log.info("done %s exit %d", args.command, code)
        return code
    finally:
        if handler is not None:
            log.removeHandler(handler)
            handler.close()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
