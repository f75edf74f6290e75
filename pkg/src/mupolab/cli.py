"""Command line entry point: mupos, classify, predict, simulate, phase, verify.

Every command writes its main artifact to --out (stdout when omitted) and,
when --out is a file, a ``<out>.manifest.json`` next to it holding the
resolved configuration, the code version and a summary of the result.
Module errors exit with status 2 and a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigError, MupolabError

CSV_COLUMNS = {
    "predict": ["t", "Pe_exponential", "Pe_powerlaw", "Pe_total"],
    "simulate": ["t_lo", "t_hi", "survivors", "fraction", "stderr"],
    "phase": ["phi", "sin_theta"],
}


def code_version() -> str:
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:
        return "0+unknown"


def _fmt(x, digits):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{digits}g}"


def _jsonable(o, digits=None):
    if isinstance(o, dict):
        return {str(k): _jsonable(v, digits) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v, digits) for v in o]
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        f = float(o)
        if not math.isfinite(f):
            return str(f)
        return float(f"{f:.{digits}g}") if digits else f
    if isinstance(o, (Fraction,)):
        return str(o)
    if hasattr(o, "to_json"):
        return _jsonable(o.to_json(), digits)
    if isinstance(o, (str, int, bool)) or o is None:
        return o
    return str(o)


def write_csv(path, columns, rows, digits=12):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v, digits) for v in r])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_csv(path, kind: str) -> dict:
    """Parse and validate an artifact CSV; returns column -> float array."""
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_COLUMNS[kind]:
        raise ConfigError(f"{path}: header {rows[0] if rows else None} != {CSV_COLUMNS[kind]}")
    body = rows[1:]
    if any(len(r) != len(rows[0]) for r in body):
        raise ConfigError(f"{path}: ragged rows")
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(rows[0]))
    return {c: data[:, i] for i, c in enumerate(rows[0])}


def write_json(path, obj, digits=None):
    text = json.dumps(_jsonable(obj, digits), indent=2, sort_keys=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_manifest(path) -> dict:
    m = json.loads(Path(path).read_text())
    for k in ("command", "version", "config", "artifacts", "result"):
        if k not in m:
            raise ConfigError(f"{path}: manifest missing {k!r}")
    return m


def _manifest(args, config, result, artifacts, t0):
    if args.out is None:
        return
    m = {"command": args.command, "argv": sys.argv[1:], "version": code_version(),
         "python": platform.python_version(), "numpy": np.__version__, "config": config,
         "artifacts": artifacts, "threads": _threads(), "wall_seconds": time.time() - t0, "result": result}
    write_json(str(args.out) + ".manifest.json", m)


def _threads():
    from .montecarlo import set_threads
    return set_threads()


# ---------------------------------------------------------------------------
# argument helpers

def _exact_or_float(text):
    from .contfrac import parse_number
    try:
        return parse_number(text)
    except ValueError:
        return float(text)


def _rho_args(args):
    if (args.rho is None) == (args.theta_star is None):
        raise ConfigError("give exactly one of --rho or --theta-star")
    if args.theta_star is not None:
        return None, _exact_or_float(args.theta_star)
    return float(args.rho), None


def _spec(args):
    from .config import load_spec, spec_to_flat
    if args.config is None:
        raise ConfigError(f"{args.command} needs --config")
    spec, flat = load_spec(args.config)
    for key, attr in (("seed", "seed"), ("particles", "particles"), ("t_max", "t_max"), ("bins", "bins"),
                      ("theta_star", "theta_star"), ("s_max", "s_max")):
        if key in flat and getattr(args, attr, None) is None:
            setattr(args, attr, flat[key])
    return spec, {**flat, **spec_to_flat(spec)}


# ---------------------------------------------------------------------------
# commands

def cmd_mupos(args):
    from .mupo import enumerate_mupos, enumerate_mupos_generalized
    rho, ts = _rho_args(args)
    if args.s_max is None:
        raise ConfigError("mupos needs --s-max")
    alpha = Fraction(args.alpha) if args.alpha else Fraction(1, 2)
    if alpha == Fraction(1, 2):
        res = [m.to_json() for m in enumerate_mupos(rho, int(args.s_max), theta_star=ts)]
    else:
        res = [{"p": p, "q": q, "border": b}
               for p, q, b in enumerate_mupos_generalized(rho, alpha, int(args.s_max), theta_star=ts,
                                                          with_flags=True)]
    write_json(args.out, res, args.precision)
    return {"count": len(res)}, {"rho": rho, "theta_star": ts, "alpha": alpha, "s_max": args.s_max}


def cmd_classify(args):
    from .mupo import classify
    if args.theta_star is None:
        raise ConfigError("classify needs an exact --theta-star (p/q or a quadratic surd)")
    ts = _exact_or_float(args.theta_star)
    if isinstance(ts, float):
        raise ConfigError("classify needs an exact --theta-star; floats cannot be certified")
    alpha = Fraction(args.alpha) if args.alpha else Fraction(1, 2)
    res = classify(ts / alpha, alpha, Q=args.q_cut)
    write_json(args.out, res.to_json(), args.precision)
    return {"kind": res.kind}, {"theta_star": ts, "alpha": alpha, "Q": args.q_cut}


def _prediction(spec, args):
    from .hat import hat_prediction, hat_mupo_set, hat_C, SurvivalPrediction
    ts = _exact_or_float(str(args.theta_star)) if args.theta_star is not None else None
    s_max = int(args.s_max) if args.s_max is not None else None
    hp = hat_prediction(spec, theta_star=ts, s_max=s_max)
    if spec.stem.kind == "rectangular" and spec.hole is not None:
        from .stem import stem_prediction
        sp = stem_prediction(spec, t=args.t_max or 1e4)
        extra = dict(sp.extra)
        extra.update({"hat_C": hp.C, "stem_C": sp.C, "s_max": hp.extra["s_max"],
                      "tail_bound": hp.extra["tail_bound"]})
        return SurvivalPrediction(hp.A, hp.B, hp.gamma_bar, hp.C + sp.C, "Combined", sp.ordering, sp.zeta,
                                  hp.mupos, extra)
    return hp


def cmd_predict(args):
    spec, cfg = _spec(args)
    pred = _prediction(spec, args)
    t_min = args.t_min or 1.0
    t_max = args.t_max or 1e5
    ts = np.geomspace(t_min, t_max, args.points)
    ex = np.exp(-pred.gamma_bar * ts)
    pw = pred.C / ts
    write_csv(args.out, CSV_COLUMNS["predict"], zip(ts, ex, pw, ex + pw), args.precision or 12)
    header = pred.to_json()
    if args.out is not None:
        write_json(str(args.out) + ".json", header, args.precision)
    else:
        sys.stderr.write(json.dumps(_jsonable(header)) + "\n")
    return header, cfg


def cmd_simulate(args):
    from .montecarlo import survival_curve
    spec, cfg = _spec(args)
    n = int(args.particles or 10 ** 6)
    t_max = float(args.t_max or 1e4)
    bins = int(args.bins or 200)
    seed = int(args.seed or 0)
    c = survival_curve(spec, n, t_max, bins=bins, seed=seed, keep_times=False)
    write_csv(args.out, CSV_COLUMNS["simulate"], zip(c.t_lo, c.t_hi, c.survivors, c.fraction, c.stderr),
              args.precision or 12)
    cfg.update({"particles": n, "t_max": t_max, "bins": bins, "seed": seed})
    return {"n_valid": c.n_valid, "corners": c.n_corner, "failed": c.n_failed, "censored": c.n_censored,
            "collisions": c.collisions, "spec_hash": c.spec_hash}, cfg


def cmd_phase(args):
    from .montecarlo import survivor_phase_map
    if args.rho is None:
        raise ConfigError("phase needs --rho")
    pm = survivor_phase_map(float(args.rho), int(args.N), int(args.samples), seed=int(args.seed or 0))
    write_csv(args.out, CSV_COLUMNS["phase"], zip(pm.phi, pm.sin_theta), args.precision or 12)
    return {"survivors": int(pm.phi.size)}, {"rho": args.rho, "N": args.N, "samples": args.samples,
                                             "seed": args.seed or 0}


def cmd_verify(args):
    from .verify import run_checks
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_checks(only, echo=sys.stderr)
    rep = [r.to_json() for r in results]
    write_json(args.out, rep, args.precision)
    return {"passed": sum(r.passed for r in results), "total": len(results)}, {"only": only}


COMMANDS = {"mupos": cmd_mupos, "classify": cmd_classify, "predict": cmd_predict, "simulate": cmd_simulate,
            "phase": cmd_phase, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML/JSON geometry config")
    common.add_argument("--rho", type=float)
    common.add_argument("--theta-star", dest="theta_star", help="exact arccos(rho)/pi, e.g. 871/2500")
    common.add_argument("--alpha", default=None, help="hat angular fraction (default 1/2)")
    common.add_argument("--s-max", dest="s_max", type=int)
    common.add_argument("--particles", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--bins", type=int)
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--precision", type=int, default=None, help="significant digits in outputs")

    p = argparse.ArgumentParser(prog="mupolab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("mupos", parents=[common], help="enumerate MUPOs up to --s-max")
    c = sub.add_parser("classify", parents=[common], help="MUPO-free / finitely / infinitely sticky")
    c.add_argument("--Q", dest="q_cut", type=int, default=None, help="certification cutoff")
    pr = sub.add_parser("predict", parents=[common], help="closed-form survival curve")
    pr.add_argument("--t-min", dest="t_min", type=float)
    pr.add_argument("--points", type=int, default=200)
    sub.add_parser("simulate", parents=[common], help="Monte Carlo survival curve")
    ph = sub.add_parser("phase", parents=[common], help="circle-with-slit survivor points")
    ph.add_argument("--N", type=int, default=200)
    ph.add_argument("--samples", type=int, default=10 ** 6)
    v = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    v.add_argument("--only", help="comma separated check numbers")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.time()
    try:
        from .montecarlo import set_threads
        set_threads()
        result, cfg = COMMANDS[args.command](args)
        arts = [] if args.out is None else [str(args.out)]
        if args.command == "predict" and args.out is not None:
            arts.append(str(args.out) + ".json")
        _manifest(args, cfg, result, arts, t0)
    except MupolabError as e:
        sys.stderr.write(json.dumps(e.to_dict()) + "\n")
        return 2
    except (ValueError, TypeError, OSError) as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
