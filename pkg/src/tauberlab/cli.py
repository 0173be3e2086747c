"""Batch command-line front end.

Every command reads an optional scenario JSON file, lets flags override its
keys, and writes one canonical JSON report (sorted keys, no timestamps) to
stdout or ``--out``. Exit codes: 0 pass, 1 verification failure or library
error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .bounds import (
    TubeGrid,
    sample_sup_diff,
    verify_bound_3_1_i,
    verify_bound_3_1_ii,
    verify_bound_strong,
    verify_family,
    verify_lemma_3_4,
    verify_sup_diff,
    violator,
)
from .cones import DEFAULT_SEED, Cone, verify_dot_estimate
from .errors import InvariantViolation, TauberLabError, UsageError
from .gelfand import CatalogElement, build_mollifier
from .laplace import LaplaceFunction, inverse_laplace
from .report import _jsonable, dumps
from .tauberian import tauberian_pipeline
from .ultrapoly import build_cone_poly, build_tilde, gevrey2_closed_form, verify_sandwich
from .weights import RSequence, WeightSequence, associated, check_conditions, verify_condition_bounds

SCHEMA = "tauberlab-report/1"
SEED_ENV = "TAUBERLAB_SEED"

COMMANDS = {
    "weights": ("analyze",),
    "cone": ("info",),
    "laplace": ("eval", "invert"),
    "verify": ("bound31i", "bound31ii", "strong", "lemma34", "lemma53"),
    "tauber": ("run",),
    "ultrapoly": ("build", "check"),
}


# scenario handling ---------------------------------------------------------------


def load_scenario(path: str) -> tuple[dict, str]:
    """Parse a scenario file; returns (data, sha256 of the raw bytes)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path}: not UTF-8 (byte {exc.start})") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}:1:1: scenario must be a JSON object")
    return data, hashlib.sha256(raw).hexdigest()


def _flag_json(name: str, text: str):
    """Flag values may be JSON; bare words stay strings."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        if text[:1] in "[{":
            raise UsageError(f"--{name}: malformed JSON value {text!r}") from None
        return text


def resolve_seed(flag, scenario: dict) -> int:
    """--seed beats TAUBERLAB_SEED, which beats the scenario's seed."""
    for source, value in (("--seed", flag), (SEED_ENV, os.environ.get(SEED_ENV)), ("scenario seed", scenario.get("seed"))):
        if value is None or value == "":
            continue
        try:
            return int(value)
        except (TypeError, ValueError):
            raise UsageError(f"{source} must be an integer, got {value!r}") from None
    return DEFAULT_SEED


def _complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise UsageError(f"cannot parse complex number {v!r}") from None
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise UsageError(f"cannot parse complex number {v!r}")


def parse_points(values, dim: int) -> np.ndarray:
    """z values as numbers, "a+bj" strings or [re, im] pairs; n-vectors for n > 1."""
    if not isinstance(values, list) or not values:
        raise UsageError("z must be a nonempty list")
    if dim == 1:
        return np.array([_complex(v) for v in values], dtype=complex)[:, None]
    out = []
    for v in values:
        if not isinstance(v, list) or len(v) != dim:
            raise UsageError(f"each z needs {dim} components, got {v!r}")
        out.append([_complex(c) for c in v])
    return np.array(out, dtype=complex)


def _family(spec):
    """R as one sequence (number or dict) or a list; absent means l = 1 and
    "beurling-grid" the default Beurling family."""
    if spec is None:
        return [RSequence.beurling(1.0)]
    if spec == "beurling-grid":
        return None
    return [RSequence.from_spec(r) for r in (spec if isinstance(spec, list) else [spec])]


def _function(spec, cone: Cone | None):
    if spec == "violator":
        return violator(cone)
    if spec is None:
        raise UsageError('missing "f" (catalog name, catalog JSON, or "violator")')
    return LaplaceFunction.of(spec)


def _mapper(jobs: int):
    if jobs <= 1:
        return map, None
    pool = ThreadPoolExecutor(max_workers=jobs)
    return pool.map, pool


@contextmanager
def _pool(jobs: int):
    mapper, pool = _mapper(jobs)
    try:
        yield mapper
    finally:
        if pool is not None:
            pool.shutdown()


def _grid(spec, cone: Cone) -> TubeGrid | None:
    if spec is None:
        return None
    known = {"x_min", "x_max", "x_per_decade", "sigma_min", "sigma_max", "sigma_per_decade", "x_dirs", "y_dirs"}
    extra = set(spec) - known
    if extra:
        raise UsageError(f"unknown grid keys: {sorted(extra)}")
    kw = {k: (tuple(map(tuple, v)) if k.endswith("_dirs") else v) for k, v in spec.items()}
    return TubeGrid(cone, **kw)


# commands ---------------------------------------------------------------------------
#
# each returns (passed, result dict); ``s`` is the merged scenario


def cmd_weights_analyze(s, ctx):
    W = WeightSequence.from_spec(s.get("M", "gevrey:2"))
    R = RSequence.from_spec(s["R"]) if "R" in s else None
    cond = check_conditions(W.scaled(R) if R is not None else W)
    t = np.asarray(s.get("t", np.logspace(-2, 6, 9).tolist()), dtype=float)
    result = {"conditions": cond.to_dict(), "associated": {"t": t, "M": associated(W if R is None else W.scaled(R), t)}}
    passed = True
    try:
        rep = verify_condition_bounds(W, R, conditions=cond)
        result["inequalities"] = rep.to_dict(include_residuals=False)
        passed = rep.passed
    except TauberLabError as exc:
        result["inequalities"] = {"skipped": f"{type(exc).__name__}: {exc}"}
    return passed, result


def cmd_cone_info(s, ctx):
    cone = Cone.from_spec(s.get("cone", "orthant:1"))
    info = {"cone": cone.to_dict(), "solid": cone.is_solid}
    info["interior_witness"] = cone.interior_witness() if cone.is_solid else None
    info["dual"] = cone.conjugate().to_dict()
    info["dual_witness"] = cone.dual_witness()
    info["facet_normals"] = None if cone.kind == "lorentz" else cone.facet_normals
    rep = verify_dot_estimate(cone, int(s.get("samples", 10_000)), ctx["seed"])
    info["dot_estimate"] = rep.to_dict(include_residuals=False)
    return rep.passed, info


def cmd_laplace_eval(s, ctx):
    f = CatalogElement.from_dict(s.get("f", "heaviside"))
    F = LaplaceFunction.of(f, s.get("path", "closed"))
    if "z" in s:
        z = parse_points(s["z"], f.dim)
    else:
        xs = np.linspace(-5, 5, 20)
        ys = np.logspace(-1, 1, 20)
        w = f.cone.conjugate().interior_witness()
        w = w / np.linalg.norm(w)
        z = (xs[None, :, None] * np.eye(f.dim)[0] + 1j * ys[:, None, None] * w).reshape(-1, f.dim)
    values = np.asarray(F(z), dtype=complex).reshape(-1)
    ctx["rows"] = (["z", "value"], [[json.dumps(_jsonable(zi.tolist())), repr(complex(v))] for zi, v in zip(z, values)])
    return True, {"f": f.to_dict(), "path": F.path, "z": z.tolist(), "values": values.tolist()}


def cmd_laplace_invert(s, ctx):
    f = CatalogElement.from_dict(s.get("f", "gamma3"))
    y = np.atleast_1d(np.asarray(s.get("y", [1.0] * f.dim), dtype=float))
    lo, hi, count = s.get("xi", [-1.0, 10.0, 111])
    xi = np.linspace(float(lo), float(hi), int(count))
    res = inverse_laplace(LaplaceFunction.of(f), y, xi)
    result = {"f": f.to_dict(), "inverse": res.to_dict()}
    passed = True
    if f.densities_only and f.dim == 1:
        exact = f.density(xi[:, None])
        err = float(np.max(np.abs(res.values - exact)))
        tol = float(s.get("tol", 1e-6))
        result["sup_error"] = err
        result["tol"] = tol
        passed = err < tol
    ctx["rows"] = (["xi", "re", "im"], [[repr(float(x)), repr(float(v.real)), repr(float(v.imag))] for x, v in zip(xi, res.values)])
    return passed, result


def _bound_common(s):
    cone = Cone.from_spec(s["cone"]) if "cone" in s else None
    F = _function(s.get("f"), cone)
    return F, s.get("M", "gevrey:2"), s.get("N", "gevrey:2"), _family(s.get("R"))


def cmd_verify_bound31i(s, ctx):
    F, M, N, fam = _bound_common(s)
    eps = float(s.get("eps", 0.5))
    with _pool(ctx["jobs"]) as mapper:
        rep = verify_family(verify_bound_3_1_i, F, M, N, fam, mapper=mapper, eps=eps, z_grid=_grid(s.get("grid"), F.cone))
    ctx["report"] = rep
    return rep.passed, rep.to_dict(include_residuals=False)


def cmd_verify_strong(s, ctx):
    F, M, N, fam = _bound_common(s)
    with _pool(ctx["jobs"]) as mapper:
        rep = verify_family(verify_bound_strong, F, M, N, fam, mapper=mapper, z_grid=_grid(s.get("grid"), F.cone))
    ctx["report"] = rep
    return rep.passed, rep.to_dict(include_residuals=False)


def cmd_verify_bound31ii(s, ctx):
    F, M, N, fam = _bound_common(s)
    omega = s.get("omega", F.cone.dual_witness().tolist())
    kw = {"omega": omega, "sigma0": float(s.get("sigma0", 1.0))}
    if "x_grid" in s:
        kw["x_grid"] = np.asarray(s["x_grid"], dtype=float).reshape(-1, F.dim)
    if "sigma_grid" in s:
        kw["sigma_grid"] = s["sigma_grid"]
    with _pool(ctx["jobs"]) as mapper:
        rep = verify_family(verify_bound_3_1_ii, F, M, N, fam, mapper=mapper, **kw)
    ctx["report"] = rep
    return rep.passed, rep.to_dict(include_residuals=False)


def cmd_verify_lemma34(s, ctx):
    cone = Cone.from_spec(s.get("cone", "orthant:1"))
    eta = build_mollifier(cone, float(s.get("eps", 0.5)))
    if "z" in s:
        z = parse_points(s["z"], cone.dim)
    elif cone.dim == 1:
        z = np.array([[complex(x, y)] for x in (0.0, 3.0) for y in (0.5, 2.0)])
    else:
        raise UsageError('"z" is required for cones of dimension > 1')
    rep = verify_lemma_3_4(
        eta,
        s.get("M", "gevrey:2"),
        s.get("N", "gevrey:2"),
        RSequence.from_spec(s.get("a", 1.0)),
        RSequence.from_spec(s.get("b", 1.0)),
        z,
        int(s.get("alpha_max", 3)),
        int(s.get("beta_max", 3)),
        _family(s.get("R")),
    )
    ctx["report"] = rep
    return rep.passed, rep.to_dict(include_residuals=False)


def cmd_verify_lemma53(s, ctx):
    cone = Cone.from_spec(s.get("cone", "orthant:1"))
    N = s.get("N", "gevrey:2")
    R = RSequence.from_spec(s.get("R", 1.0))
    sampled = sample_sup_diff(N, R, cone, int(s.get("samples", 10_000)), ctx["seed"])
    y = s.get("y", cone.dual_witness().tolist())
    result = {"sampled": sampled}
    try:
        rep = verify_sup_diff(N, R, cone, y, seed=ctx["seed"])
        result["grid"] = rep.to_dict(include_residuals=False)
        grid_ok = rep.passed
    except InvariantViolation as exc:
        result["grid"] = {"passed": False, "error": str(exc), "witness": exc.witness}
        grid_ok = False
    return sampled["violations"] == 0 and grid_ok, result


def cmd_tauber_run(s, ctx):
    for key in ("f", "rho"):
        if key not in s:
            raise UsageError(f'tauber scenario needs "{key}"')
    cfg = {k: v for k, v in s.items() if k not in ("f", "rho")}
    verdict = tauberian_pipeline(s["f"], s["rho"], cfg)
    return verdict.passed, verdict.to_dict()


def _ultra_inputs(s):
    W = WeightSequence.from_spec(s.get("M", "gevrey:2"))
    R = RSequence.from_spec(s.get("R", 1.0))
    return W, R


def cmd_ultrapoly_build(s, ctx):
    W, R = _ultra_inputs(s)
    if "cone" in s:
        P = build_cone_poly(W, R, Cone.from_spec(s["cone"]), float(s.get("z_radius", 2.5e3)), s.get("lambda"))
    else:
        P = build_tilde(W, R, float(s.get("radius", 1e3)))
    return True, {"ultrapolynomial": P.to_dict()}


def cmd_ultrapoly_check(s, ctx):
    W, R = _ultra_inputs(s)
    cone = Cone.from_spec(s.get("cone", "orthant:1"))
    P = build_cone_poly(W, R, cone, float(s.get("z_radius", 2.5e3)), s.get("lambda"))
    result = {"ultrapolynomial": P.to_dict()}
    passed = True
    if W.to_dict().get("kind") == "gevrey" and W.to_dict().get("s") == 2.0 and R.is_beurling:
        rng = np.random.default_rng(ctx["seed"])
        r = float(s.get("disc", 1e3))
        k = int(s.get("disc_samples", 2000))
        w = np.sqrt(rng.uniform(0, 1, k)) * r * np.exp(2j * np.pi * rng.uniform(size=k))
        ref = gevrey2_closed_form(w, R.ell)
        scale = gevrey2_closed_form(np.abs(w), R.ell).real
        err = float(np.max(np.abs(P.tilde(w) - ref) / scale)) if r <= P.tilde.radius else math.inf
        result["closed_form"] = {"disc": r, "samples": k, "max_error_rel_circle": err}
        passed = err < 1e-10
    try:
        rep = verify_sandwich(P, W, R)
        result["sandwich"] = rep.to_dict(include_residuals=False)
        ctx["report"] = rep
        passed = passed and rep.passed
    except InvariantViolation as exc:
        result["sandwich"] = {"passed": False, "error": str(exc), "witness": exc.witness}
        passed = False
    return passed, result


HANDLERS = {
    ("weights", "analyze"): cmd_weights_analyze,
    ("cone", "info"): cmd_cone_info,
    ("laplace", "eval"): cmd_laplace_eval,
    ("laplace", "invert"): cmd_laplace_invert,
    ("verify", "bound31i"): cmd_verify_bound31i,
    ("verify", "bound31ii"): cmd_verify_bound31ii,
    ("verify", "strong"): cmd_verify_strong,
    ("verify", "lemma34"): cmd_verify_lemma34,
    ("verify", "lemma53"): cmd_verify_lemma53,
    ("tauber", "run"): cmd_tauber_run,
    ("ultrapoly", "build"): cmd_ultrapoly_build,
    ("ultrapoly", "check"): cmd_ultrapoly_check,
}


# execution --------------------------------------------------------------------------


def _canonical_hash(obj) -> str:
    return hashlib.sha256(json.dumps(_jsonable(obj), sort_keys=True).encode()).hexdigest()


def execute(command: tuple, scenario: dict, digest: str | None, seed_flag=None, jobs: int = 1) -> tuple[int, dict, dict]:
    """Run one command; returns (exit code, report, side data for CSV)."""
    seed = resolve_seed(seed_flag, scenario)
    inputs = {k: v for k, v in scenario.items() if k not in ("seed", "command")}
    ctx = {"seed": seed, "jobs": jobs}
    report = {
        "schema": SCHEMA,
        "tool": {"name": "tauberlab", "version": __version__},
        "command": " ".join(command),
        "scenario_sha256": digest or _canonical_hash(inputs),
        "seed": seed,
        "inputs": inputs,
    }
    try:
        passed, result = HANDLERS[command](inputs, ctx)
    except UsageError:
        raise
    except TauberLabError as exc:
        report["passed"] = False
        report["error"] = {"type": type(exc).__name__, "message": str(exc), "witness": getattr(exc, "witness", None)}
        return 1, report, ctx
    report["passed"] = bool(passed)
    report["result"] = result
    return (0 if passed else 1), report, ctx


def run_report(paths, seed_flag, jobs):
    """Batch mode: each scenario names its command in a "command" key."""
    if not paths:
        raise UsageError("report needs at least one scenario file")
    loaded = []
    for p in paths:
        data, digest = load_scenario(p)
        cmd = tuple(str(data.get("command", "")).split())
        if cmd not in HANDLERS:
            raise UsageError(f'{p}: "command" must be one of {sorted(" ".join(c) for c in HANDLERS)}')
        loaded.append((p, cmd, data, digest))
    # scenarios run one after another so nested pools see the same job count
    entries = [execute(cmd, data, digest, seed_flag, jobs) for _, cmd, data, digest in loaded]
    runs = [{"scenario": os.path.basename(p), **rep} for (p, *_), (_, rep, _) in zip(loaded, entries)]
    passed = all(code == 0 for code, _, _ in entries)
    combined = {
        "schema": SCHEMA,
        "tool": {"name": "tauberlab", "version": __version__},
        "command": "report",
        "scenario_sha256": _canonical_hash([rep["scenario_sha256"] for _, rep, _ in entries]),
        "passed": passed,
        "runs": runs,
    }
    return (0 if passed else 1), combined, {}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", help=f"RNG seed (overrides {SEED_ENV} and the scenario)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads; results do not depend on it")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="also write per-point data as CSV")
    common.add_argument("--f", dest="f", help="catalog element name or JSON, or 'violator'")
    common.add_argument("--M", dest="M", help="weight sequence, e.g. gevrey:2 or JSON")
    common.add_argument("--N", dest="N", help="weight sequence for the decay side")
    common.add_argument("--R", dest="R", help="ℓ (number), RSequence JSON, or a JSON list of them")
    common.add_argument("--cone", help="orthant:n, lorentz:n, or cone JSON")
    common.add_argument("--eps", type=float)
    common.add_argument("--omega", help="JSON vector in the open dual cone")
    common.add_argument("--sigma0", type=float)
    common.add_argument("--rho", help="regularly varying ρ: number (index), lambda^a, or JSON")
    common.add_argument("--radius", type=float, help="disc radius for a one-variable ultrapolynomial")
    common.add_argument("--samples", type=int)
    common.add_argument("--set", action="append", default=[], metavar="KEY=JSON", help="override any scenario key")

    p = argparse.ArgumentParser(prog="tauberlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"tauberlab {__version__}")
    groups = p.add_subparsers(dest="group", required=True)
    for group, actions in COMMANDS.items():
        g = groups.add_parser(group)
        acts = g.add_subparsers(dest="action", required=True)
        for a in actions:
            sp = acts.add_parser(a, parents=[common])
            sp.add_argument("scenario", nargs="?", help="scenario JSON file")
    rp = groups.add_parser("report", parents=[common])
    rp.add_argument("scenarios", nargs="*", help="scenario files, each with a \"command\" key")
    return p


FLAG_KEYS = ("f", "M", "N", "R", "cone", "eps", "omega", "sigma0", "rho", "radius", "samples")


def _merge_flags(args, scenario: dict) -> dict:
    merged = dict(scenario)
    for key in FLAG_KEYS:
        value = getattr(args, key)
        if value is None:
            continue
        merged[key] = _flag_json(key, value) if isinstance(value, str) else value
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--set expects KEY=JSON, got {item!r}")
        merged[key] = _flag_json(key, value)
    return merged


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_csv(ctx: dict, path: str):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if "rows" in ctx:
            header, rows = ctx["rows"]
            w.writerow(header)
            w.writerows(rows)
        elif "report" in ctx:
            fh.write(ctx["report"].to_csv())
        else:
            w.writerow(["note"])
            w.writerow(["this command has no per-point data"])


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if args.group == "report":
            code, report, ctx = run_report(args.scenarios, args.seed, args.jobs)
        else:
            scenario, digest = load_scenario(args.scenario) if args.scenario else ({}, None)
            command = (args.group, args.action)
            if "command" in scenario and tuple(str(scenario["command"]).split()) != command:
                raise UsageError(f'scenario is for "{scenario["command"]}", not "{" ".join(command)}"')
            merged = _merge_flags(args, scenario)
            if merged != scenario:
                digest = None
            code, report, ctx = execute(command, merged, digest, args.seed, args.jobs)
    except UsageError as exc:
        sys.stderr.write(f"tauberlab: error: {exc}\n")
        return 2
    _write(dumps(report) + "\n", args.out)
    if args.csv:
        _write_csv(ctx, args.csv)
    if code == 1 and "error" in report:
        sys.stderr.write(f"tauberlab: {report['error']['type']}: {report['error']['message']}\n")
    return code


def main() -> None:
    sys.exit(run())
