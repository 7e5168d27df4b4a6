"""Command-line interface.

Every command writes one artifact (JSON object or CSV table) preceded by
metadata (tool version, echoed configuration, seed), so re-running with the
echoed configuration reproduces the output byte for byte.  Exit status: 0 on
success, 1 on invalid input, 2 when an internal contract is violated.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .cyclic_group import GroupSpec, is_prime
from .errors import ContractViolation, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_CONTRACT = 0, 1, 2
NOT_ECHOED = {"out", "threads", "echo_config", "handler"}


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}" if flag else message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(None, message)


def _number(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    if "/" in token:
        return Fraction(token)
    return float(token)


def _split(tokens) -> list[str]:
    return [t for tok in tokens for t in tok.split(",") if t]


def _fmt_prob(x: float) -> str:
    return format(x, ".17g")


def _exact(fr) -> str | None:
    return None if fr is None else f"{fr.numerator}/{fr.denominator}"


def _json_safe(x):
    if isinstance(x, Fraction):
        return _exact(x)
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


# ---------------------------------------------------------------------------
# validation


def _group(args) -> GroupSpec:
    if not is_prime(args.p):
        raise UsageError("--p", f"{args.p} is not prime")
    try:
        values = [_number(t) for t in _split(args.values)]
    except ValueError as exc:
        raise UsageError("--values", str(exc))
    if len(values) != args.p:
        raise UsageError("--values", f"need exactly {args.p} values, got {len(values)}")
    if len(set(values)) != len(values):
        raise UsageError("--values", "values must be distinct")
    return GroupSpec(args.p, tuple(values))


def _mean_zero_group(args) -> GroupSpec:
    from .walks import check_mean_zero

    group = _group(args)
    try:
        check_mean_zero(group)
    except (ValidationError, ValueError) as exc:
        raise UsageError("--values", str(exc))
    return group


def _positive(flag, value, minimum=1):
    if value is None:
        raise UsageError(flag, "is required")
    if value < minimum:
        raise UsageError(flag, f"must be >= {minimum}")
    return value


def _simple_group_only(args):
    group = _group(args)
    if group.p != 2 or tuple(group.values) != (1, -1):
        raise UsageError("--values", "this command needs --p 2 --values 1,-1")


# ---------------------------------------------------------------------------
# commands; each returns (json_result, csv_header, csv_rows)


def cmd_nu(args):
    from .nu_array import build_nu_recurrence

    if not is_prime(args.p):
        raise UsageError("--p", f"{args.p} is not prime")
    _positive("--kmax", args.kmax, 0)
    _positive("--nmax", args.nmax, 1)
    table = build_nu_recurrence(args.p, args.kmax, args.nmax)
    rows = table.rows()
    if args.long:
        header = ["K", "n", "residue"]
        csv_rows = [[K, n + 1, r] for K, row in enumerate(rows) for n, r in enumerate(row)]
    else:
        header = ["K/n"] + list(range(1, args.nmax + 1))
        csv_rows = [[K] + row for K, row in enumerate(rows)]
    return {"p": args.p, "k_max": args.kmax, "n_max": args.nmax, "rows": rows}, header, csv_rows


def cmd_omega(args):
    from .nu_array import omega

    if not is_prime(args.p):
        raise UsageError("--p", f"{args.p} is not prime")
    _positive("--kmax", args.kmax, 0)
    values = [omega(K, args.p).omega for K in range(args.kmax + 1)]
    shown = ["inf" if math.isinf(w) else int(w) for w in values]
    return ({"p": args.p, "omega": shown}, ["K", "omega"], [[K, w] for K, w in enumerate(shown)])


def _pmf_output(pmf, names):
    rows = [list(r[:-1]) + [_fmt_prob(r[-1])] for r in pmf.rows()]
    cells = [{"point": [_json_safe(c) for c in r[:-2]], "count": r[-2], "probability": _fmt_prob(r[-1])}
             for r in pmf.rows()]
    result = {"n": pmf.n, "p": pmf.p, "K_max": pmf.k_max, "denominator": str(pmf.denominator),
              "cells": cells}
    return result, names + ["count", "probability"], [[_json_safe(x) for x in r] for r in rows]


def _coord_names(dims):
    return ["k", "l", "m"][:dims] if dims <= 3 else [f"y{K}" for K in range(dims)]


def cmd_pmf2d(args):
    from .exact_dist import joint_pmf_2d_formula

    _simple_group_only(args)
    _positive("--n", args.n)
    return _pmf_output(joint_pmf_2d_formula(args.n), ["k", "l"])


def cmd_oracle(args):
    from .exact_dist import enumerate_oracle

    group = _group(args)
    _positive("--n", args.n)
    _positive("--kmax", args.kmax, 0)
    pmf = enumerate_oracle(group, args.kmax, args.n, budget=args.budget, threads=args.threads)
    return _pmf_output(pmf, _coord_names(pmf.dims))


def cmd_returns(args):
    from .exact_dist import return_prob_2d, return_prob_3d

    _simple_group_only(args)
    _positive("--steps", args.steps, 2)
    if args.steps % 2:
        raise UsageError("--steps", "must be even")
    rp = (return_prob_2d if args.dims == 2 else return_prob_3d)(args.steps)
    prob = _exact(rp.exact)
    result = {"dims": args.dims, "steps": args.steps, "probability": prob,
              "log_probability": _json_safe(rp.log)}
    row = [args.steps, prob if prob is not None else "", _fmt_prob(rp.log)]
    return result, ["steps", "probability", "log_probability"], [row]


def cmd_bins(args):
    from .exact_dist import count_via_bins

    _simple_group_only(args)
    n = _positive("--n", args.n, 0)
    if (args.k is None) != (args.l is None):
        raise UsageError("--k" if args.k is None else "--l", "give both --k and --l, or neither")
    if args.k is not None:
        c = count_via_bins(n, args.k, args.l)
        return ({"n": n, "k": args.k, "l": args.l, "count": c}, ["k", "l", "count", "probability"],
                [[args.k, args.l, c, _fmt_prob(c / 2**n)]])
    rows = []
    for k in range(-n, n + 1):
        for l in range(-n, n + 1):
            c = count_via_bins(n, k, l)
            if c:
                rows.append([k, l, c, _fmt_prob(c / 2**n)])
    cells = [{"point": r[:2], "count": r[2], "probability": r[3]} for r in rows]
    return {"n": n, "denominator": str(2**n), "cells": cells}, ["k", "l", "count", "probability"], rows


def cmd_simulate(args):
    from .walks import simulate_path

    group = _mean_zero_group(args)
    _positive("--n", args.n)
    _positive("--kmax", args.kmax, 0)
    w = simulate_path(group, args.kmax, args.n, args.seed)
    paths = [[_json_safe(float(v)) for v in row] for row in w.paths]
    header = ["m"] + [f"Y{K}" for K in range(args.kmax + 1)]
    rows = [[m] + [repr(float(w.paths[K, m])) for K in range(args.kmax + 1)] for m in range(args.n + 1)]
    return {"xi": w.xi.tolist(), "paths": paths}, header, rows


def cmd_cov(args):
    from .walks import covariance_check

    group = _mean_zero_group(args)
    n = _positive("--n", args.n)
    if args.m is None:
        args.m = n
    m = _positive("--m", args.m)
    if m > n:
        raise UsageError("--m", "must be <= --n")
    _positive("--replicas", args.replicas, 2)
    rep = covariance_check(group, args.kmax, m, n, args.replicas, args.seed, exact=args.exact,
                           threads=args.threads)
    entries = [{"K": e.K, "J": e.J, "estimate": _json_safe(e.estimate), "theory": _json_safe(e.theory),
                "stderr": e.stderr, "z": _json_safe(e.z)} for e in rep.entries]
    header = ["statistic", "value", "tolerance", "pass"]
    tol = 0.0 if args.exact else 4.0
    rows = []
    for e in rep.entries:
        ok = e.estimate == e.theory if args.exact else abs(e.z) <= tol
        rows.append([f"E[Y{e.K}(m)Y{e.J}(n)]", _json_safe(e.estimate) if args.exact else repr(e.estimate),
                     f"theory={_json_safe(e.theory)};z_tol={tol:g}", ok])
    return {"m": m, "n": n, "replicas": args.replicas, "exact": args.exact, "passed": rep.passed(),
            "entries": entries}, header, rows


def cmd_fclt(args):
    from .walks import fclt_diagnostics

    group = _mean_zero_group(args)
    _positive("--n", args.n)
    _positive("--replicas", args.replicas, 2)
    if args.samples:
        with open(args.samples, "w", newline="") as fh:
            stats = fclt_diagnostics(group, args.kmax, args.n, args.replicas, args.seed, args.threads, fh)
    else:
        stats = fclt_diagnostics(group, args.kmax, args.n, args.replicas, args.seed, args.threads)
    summary = stats.summary()
    result = {
        "n": args.n, "replicas": args.replicas, "sigma2": stats.sigma2, "passed": stats.passed(),
        "cross_moments": stats.cross_moments.tolist(),
        "terminal_correlations": stats.terminal_correlations.tolist(),
        "summary": [{"statistic": s, "value": v, "tolerance": t, "pass": ok} for s, v, t, ok in summary],
    }
    rows = [[s, repr(v), repr(t), ok] for s, v, t, ok in summary]
    return result, ["statistic", "value", "tolerance", "pass"], rows


def cmd_visits(args):
    from .walks import return_statistics

    _simple_group_only(args)
    _positive("--steps", args.steps)
    _positive("--replicas", args.replicas, 2)
    rep = return_statistics(args.dims, args.steps, args.replicas, args.seed, args.threads)
    rows = [[h, repr(m), repr(s), repr(e)] for h, m, s, e in
            zip(rep.horizons, rep.mean_visits, rep.stderr, rep.expected)]
    result = {"dims": args.dims, "steps": args.steps, "replicas": args.replicas,
              "horizons": rep.horizons, "mean_visits": rep.mean_visits, "stderr": rep.stderr,
              "expected": rep.expected}
    return result, ["horizon", "mean_visits", "stderr", "expected"], rows


def cmd_solve(args):
    from .bootstrap import seq, solve_boundary

    group = _group(args)
    K = _positive("--k", args.k)
    try:
        prefix = [int(t) for t in _split(args.prefix)]
        targets = [int(t) for t in _split(args.targets)]
    except ValueError:
        raise UsageError("--prefix/--targets", "element indices must be integers")
    for flag, items in (("--prefix", prefix), ("--targets", targets), ("--last", [args.last])):
        if any(not 0 <= i < args.p for i in items):
            raise UsageError(flag, f"element indices must lie in [0, {args.p})")
    if len(targets) != K:
        raise UsageError("--targets", f"need exactly {K} targets")
    block = solve_boundary(seq(group, prefix), args.last, targets, K, group)
    n = len(prefix) + 1
    rows = [[n + i, x] for i, x in enumerate(block)]
    return {"n": n, "K": K, "block": list(block)}, ["position", "index"], rows


def cmd_decay(args):
    from .exact_dist import decay_exponent_2d, decay_exponent_3d

    _simple_group_only(args)
    lo = _positive("--nmin", args.nmin, 2 if args.dims == 3 else 1)
    hi = _positive("--nmax", args.nmax, lo + 1)
    slope = (decay_exponent_3d if args.dims == 3 else decay_exponent_2d)(lo, hi)
    return ({"dims": args.dims, "n_min": lo, "n_max": hi, "slope": slope},
            ["dims", "n_min", "n_max", "slope"], [[args.dims, lo, hi, repr(slope)]])


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .ensemble import default_threads

    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="group order, a prime (default 2)")
    common.add_argument("--values", nargs="+", default=["1", "-1"],
                        help="labels of elements 0..p-1, space or comma separated; element 0 is "
                             "the unit (default: 1 -1)")
    common.add_argument("--seed", type=int, default=0, help="64-bit master seed (default 0)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default="-", help="output path (default: standard output)")
    common.add_argument("--threads", type=int, default=default_threads(),
                        help="worker cap; results do not depend on it (default $BOOTWALK_THREADS or 1)")
    common.add_argument("--echo-config", action="store_true",
                        help="print the resolved configuration and exit")

    parser = _Parser(prog="bootwalk", description="Bootstrap random walks: exact laws and simulation.")
    parser.add_argument("--version", action="version", version=f"bootwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, handler, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(handler=handler)
        return sp

    sp = add("nu", cmd_nu, "window of the exponent array nu(K, n) mod p")
    sp.add_argument("--kmax", type=int, default=8)
    sp.add_argument("--nmax", type=int, default=8)
    sp.add_argument("--long", action="store_true", help="CSV rows K,n,residue instead of a grid")

    sp = add("omega", cmd_omega, "decorrelation index omega_K for K = 0..kmax")
    sp.add_argument("--kmax", type=int, default=8)

    sp = add("pmf2d", cmd_pmf2d, "closed-form law of (X_n, Y_n)")
    sp.add_argument("--n", type=int)

    sp = add("returns", cmd_returns, "exact probability of being at the origin after --steps")
    sp.add_argument("--dims", type=int, choices=[2, 3], default=2)
    sp.add_argument("--steps", type=int)

    sp = add("oracle", cmd_oracle, "law of (Y_0,n .. Y_K,n) by full enumeration")
    sp.add_argument("--n", type=int)
    sp.add_argument("--kmax", type=int, default=1)
    sp.add_argument("--budget", type=int, default=1 << 24)

    sp = add("bins", cmd_bins, "counts of (X_n, Y_n) from the bins construction")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--l", type=int)

    sp = add("simulate", cmd_simulate, "one seeded walk path")
    sp.add_argument("--n", type=int)
    sp.add_argument("--kmax", type=int, default=1)

    sp = add("cov", cmd_cov, "cross moments E[Y_K,m Y_J,n] against theory")
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--kmax", type=int, default=1)
    sp.add_argument("--replicas", type=int, default=10_000)
    sp.add_argument("--exact", action="store_true", help="enumerate instead of sampling")

    sp = add("fclt", cmd_fclt, "moment diagnostics of the normalised walk")
    sp.add_argument("--n", type=int)
    sp.add_argument("--kmax", type=int, default=1)
    sp.add_argument("--replicas", type=int, default=10_000)
    sp.add_argument("--samples", help="also write terminal samples to this CSV path")

    sp = add("visits", cmd_visits, "Monte Carlo origin visits of the 2- or 3-level walk")
    sp.add_argument("--dims", type=int, choices=[2, 3], default=2)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--replicas", type=int, default=1000)

    sp = add("solve", cmd_solve, "recover a hidden block from boundary values")
    sp.add_argument("--k", type=int)
    sp.add_argument("--prefix", nargs="*", default=[])
    sp.add_argument("--last", type=int, default=0)
    sp.add_argument("--targets", nargs="*", default=[])

    sp = add("decay", cmd_decay, "log-log slope of the return probabilities")
    sp.add_argument("--dims", type=int, choices=[2, 3], default=3)
    sp.add_argument("--nmin", type=int, default=100)
    sp.add_argument("--nmax", type=int, default=1000)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in NOT_ECHOED}
    cfg["values"] = _split(cfg["values"])
    for key in ("prefix", "targets"):
        if key in cfg:
            cfg[key] = _split(cfg[key])
    return cfg


def render(args, result, header, rows) -> str:
    cfg = _config(args)
    if args.format == "json":
        doc = {"meta": {"tool": "bootwalk", "version": __version__, "command": args.command,
                        "config": cfg, "seed": args.seed},
               "result": result}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool=bootwalk version={__version__} command={args.command} seed={args.seed}\n")
    buf.write("# config=" + json.dumps(cfg, sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not 0 <= args.seed < 1 << 64:
            raise UsageError("--seed", "must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise UsageError("--threads", "must be >= 1")
        if args.echo_config:
            stdout.write(json.dumps({"command": args.command, **_config(args)}, sort_keys=True) + "\n")
            return EXIT_OK
        text = render(args, *args.handler(args))
    except ContractViolation as exc:
        stderr.write(f"bootwalk: contract violation: {exc}\n")
        return EXIT_CONTRACT
    except UsageError as exc:
        stderr.write(f"bootwalk: error: {exc}\n")
        return EXIT_INVALID
    except (ValidationError, ValueError) as exc:
        stderr.write(f"bootwalk: error: {exc}\n")
        return EXIT_INVALID
    if args.out == "-":
        stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))
