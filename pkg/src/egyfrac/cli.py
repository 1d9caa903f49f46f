"""Command-line front end.

Every subcommand emits a single JSON record on stdout: the result payload
plus run metadata (command, parameters, started/finished timestamps,
version). Rationals are rendered as "p/q" strings and potentially huge
counts as decimal strings, so records survive JSON round trips losslessly.
--format csv is available for the tabular payloads (entropy profiles,
coverage histograms). A relative --out path is resolved against
EGYFRAC_OUT_DIR when that variable is set.

Exit codes: 0 success, 1 domain or numeric error, 2 usage error, 3 budget
exceeded (payload flagged "truncated").
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .absorption import construct_representation, trace_to_dict, verify_representation
from .counting import MODE_AT_MOST, MODE_EXACT, CountQuery, count_brute, count_mitm
from .entropy import continuous_lambda, cx_constant, discrete_profile, _lambda_integral
from .exactmath import powersmooth_count, smooth_density_linear
from .modelsim import estimate_prob_at_most, model_moments
from .modular import make_instance, residue_coverage

_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?")

__all__ = ["main", "run", "parse_rational", "validate_record"]


def parse_rational(text: str) -> Fraction:
    """Parse "p" or "p/q" with a nonzero denominator."""
    s = text.strip()
    if not _RATIONAL_RE.fullmatch(s):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r} (expected p or p/q)")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise argparse.ArgumentTypeError(f"zero denominator in {text!r}")


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egyfrac",
        description="count, bound, simulate and construct unit-fraction representations",
    )
    parser.add_argument("--version", action="version", version=f"egyfrac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=str, default=None, help="write the JSON record here")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument(
            "--budget",
            type=float,
            default=None,
            help="wall-clock seconds; multi-part work stops early and is flagged truncated",
        )

    p = sub.add_parser("count", help="exact subset count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=parse_rational, required=True)
    p.add_argument("--mode", choices=(MODE_EXACT, MODE_AT_MOST), default=MODE_EXACT)
    p.add_argument("--method", choices=("auto", "brute", "mitm"), default="auto")
    common(p)

    p = sub.add_parser("entropy", help="discrete max-entropy profile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=parse_rational, required=True)
    common(p)

    p = sub.add_parser("lambda", help="continuous profile constant")
    p.add_argument("--x", type=parse_rational, required=True)
    common(p)

    p = sub.add_parser("cx", help="continuous exponent constant c_x")
    p.add_argument("--x", type=parse_rational, required=True)
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo tail probability of the model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=parse_rational, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("modcover", help="residue coverage by inverse subset sums")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--lo", type=int, required=True, help="interval start for I")
    p.add_argument("--hi", type=int, required=True, help="interval end for I (inclusive)")
    p.add_argument("--smax", type=int, default=12)
    common(p)

    p = sub.add_parser("construct", help="build explicit representations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=parse_rational, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="consecutive seeds to run")
    p.add_argument("--trace", type=str, default=None, help="write trace JSON here")
    common(p)

    p = sub.add_parser("sieve", help="powersmooth counting")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    common(p)

    p = sub.add_parser("verify", help="check a claimed representation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=parse_rational, required=True)
    p.add_argument("--set", type=str, required=True, help="comma-separated elements")
    common(p)

    return parser


def _cmd_count(args) -> dict:
    query = CountQuery(n=args.n, x=args.x, mode=args.mode)
    method = args.method
    if method == "auto":
        method = "brute" if args.n <= 20 else "mitm"
    result = count_brute(query) if method == "brute" else count_mitm(query)
    return {
        "n": args.n,
        "x": _frac_str(args.x),
        "mode": args.mode,
        "method": result.method,
        "count": str(result.count),
        "elapsed": result.elapsed,
    }


def _cmd_entropy(args) -> dict:
    prof = discrete_profile(args.n, float(args.x))
    mean = float((prof.p / (1 + np.arange(args.n))).sum())
    return {
        "n": args.n,
        "x": _frac_str(args.x),
        "c": prof.c,
        "H": prof.H,
        "saturated": prof.c == 0.0,
        "residual": abs(mean - float(args.x)),
        "_csv": [("m", "p")] + [(m, float(prof.p[m - 1])) for m in range(1, args.n + 1)],
    }


def _cmd_lambda(args) -> dict:
    lam = continuous_lambda(float(args.x))
    return {
        "x": _frac_str(args.x),
        "lambda": lam,
        "residual": abs(_lambda_integral(lam) - float(args.x)),
    }


def _cmd_cx(args) -> dict:
    consts = cx_constant(float(args.x))
    return {"x": _frac_str(args.x), "lambda": consts.lam, "c_x": consts.c_x}


def _cmd_simulate(args, deadline: float | None) -> dict:
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    prof = discrete_profile(args.n, float(args.x))
    moments = model_moments(prof)
    batch = 1024
    done = 0
    hits = 0.0
    fallbacks = 0
    truncated = False
    while done < args.trials:
        if deadline is not None and time.monotonic() > deadline:
            truncated = True
            break
        step = min(batch, args.trials - done)
        part = estimate_prob_at_most(prof, args.x, step, args.seed, trial_offset=done)
        hits += part.estimate * step
        fallbacks += part.exact_fallbacks
        done += step
    if done == 0:
        raise ValueError("budget too small to run any trials")
    phat = hits / done
    stderr = (phat * (1 - phat) / done) ** 0.5
    out = {
        "n": args.n,
        "x": _frac_str(args.x),
        "trials": done,
        "seed": args.seed,
        "mean": moments.mean,
        "variance": moments.variance,
        "estimate": phat,
        "stderr": stderr,
        "exact_fallbacks": fallbacks,
    }
    if truncated:
        out["truncated"] = True
    return out


def _cmd_modcover(args) -> dict:
    if args.hi < args.lo:
        raise ValueError(f"need lo <= hi, got [{args.lo}, {args.hi}]")
    instance = make_instance(args.q, range(args.lo, args.hi + 1), args.smax)
    cover = residue_coverage(instance)
    histogram: dict[int, int] = {}
    unreachable = 0
    for size in cover:
        if size is None:
            unreachable += 1
        else:
            histogram[size] = histogram.get(size, 0) + 1
    reach_sizes = [s for s in cover if s is not None]
    return {
        "q": args.q,
        "lo": args.lo,
        "hi": args.hi,
        "s_max": args.smax,
        "element_count": len(instance.elements),
        "reachable": len(reach_sizes),
        "unreachable": unreachable,
        "max_min_size": max(reach_sizes) if reach_sizes else None,
        "histogram": {str(k): v for k, v in sorted(histogram.items())},
        "_csv": [("size", "residues")] + sorted(histogram.items()),
    }


def _cmd_construct(args, deadline: float | None) -> dict:
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    traces = []
    truncated = False
    for i in range(args.count):
        if deadline is not None and time.monotonic() > deadline:
            truncated = True
            break
        trace = construct_representation(
            args.n, args.x, seed=args.seed + i, deadline=deadline
        )
        traces.append(trace)
    dicts = [trace_to_dict(t) for t in traces]
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump(dicts[0] if len(dicts) == 1 else dicts, fh, indent=2, sort_keys=True)
            fh.write("\n")
    out = {
        "n": args.n,
        "x": _frac_str(args.x),
        "seed": args.seed,
        "requested": args.count,
        "completed": len(traces),
        "succeeded": sum(1 for t in traces if t.success),
        "distinct": len({t.elements for t in traces if t.success}),
        "traces": dicts,
    }
    if truncated or any(t.reason and t.reason.startswith("budget") for t in traces):
        out["truncated"] = True
    return out


def _cmd_sieve(args) -> dict:
    count = powersmooth_count(args.n, args.t)
    u = math.log(args.t) / math.log(args.n) if args.n > 1 else None
    linear = None
    if u is not None and 0.5 < u <= 1.0:
        linear = smooth_density_linear(u)
    return {
        "n": args.n,
        "t": args.t,
        "count": str(count),
        "fraction": count / args.n,
        "u": u,
        "linear_density": linear,
    }


def _cmd_verify(args) -> dict:
    try:
        elements = [int(tok) for tok in args.set.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"--set must be comma-separated integers, got {args.set!r}")
    ok = verify_representation(elements, args.n, args.x)
    return {
        "n": args.n,
        "x": _frac_str(args.x),
        "elements": sorted(elements),
        "verified": bool(ok),
    }


_REQUIRED_KEYS = {
    "count": ("n", "x", "mode", "method", "count", "elapsed"),
    "entropy": ("n", "x", "c", "H", "saturated", "residual"),
    "lambda": ("x", "lambda", "residual"),
    "cx": ("x", "lambda", "c_x"),
    "simulate": ("n", "x", "trials", "seed", "mean", "variance", "estimate", "stderr"),
    "modcover": ("q", "lo", "hi", "s_max", "reachable", "unreachable", "histogram"),
    "construct": ("n", "x", "seed", "requested", "succeeded", "traces"),
    "sieve": ("n", "t", "count", "fraction"),
    "verify": ("n", "x", "elements", "verified"),
}


def validate_record(record: dict) -> None:
    """Raise ValueError unless the record carries its command's required keys."""
    for key in ("command", "parameters", "version", "started", "finished"):
        if key not in record:
            raise ValueError(f"record is missing {key!r}")
    command = record["command"]
    if command not in _REQUIRED_KEYS:
        raise ValueError(f"unknown command {command!r}")
    for key in _REQUIRED_KEYS[command]:
        if key not in record:
            raise ValueError(f"{command} record is missing {key!r}")


def _emit(record: dict, args, csv_rows) -> None:
    if getattr(args, "format", "json") == "csv":
        if csv_rows is None:
            raise ValueError(f"--format csv is not available for {record['command']}")
        lines = ["%s" % ",".join(str(v) for v in row) for row in csv_rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        path = args.out
        base = os.environ.get("EGYFRAC_OUT_DIR")
        if base and not os.path.isabs(path):
            path = os.path.join(base, path)
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    started = datetime.now(timezone.utc).isoformat()
    deadline = time.monotonic() + args.budget if args.budget is not None else None
    handlers = {
        "count": lambda: _cmd_count(args),
        "entropy": lambda: _cmd_entropy(args),
        "lambda": lambda: _cmd_lambda(args),
        "cx": lambda: _cmd_cx(args),
        "simulate": lambda: _cmd_simulate(args, deadline),
        "modcover": lambda: _cmd_modcover(args),
        "construct": lambda: _cmd_construct(args, deadline),
        "sieve": lambda: _cmd_sieve(args),
        "verify": lambda: _cmd_verify(args),
    }
    try:
        payload = handlers[args.command]()
    except (ValueError, ZeroDivisionError, OverflowError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1

    csv_rows = payload.pop("_csv", None)
    parameters = {
        k: (str(v) if isinstance(v, Fraction) else v)
        for k, v in vars(args).items()
        if k not in ("command", "out", "format", "budget") and v is not None
    }
    record = {
        "command": args.command,
        "parameters": parameters,
        "version": __version__,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        **payload,
    }
    try:
        _emit(record, args, csv_rows)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 3 if payload.get("truncated") else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
