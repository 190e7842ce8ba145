"""Command line entry point: sample / stat / rate / tail / diagnose / verify.

Permutations travel as JSON lines of 1-based one-line words.  Exit codes:
0 success, 1 a verification check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence, TextIO

from conjperm import montecarlo, oracle, rates
from conjperm.perm import Permutation
from conjperm.samplers import make_rng, parse_law
from conjperm.statistics import StatisticId, evaluate


def _emit(obj, out: TextIO) -> None:
    out.write(json.dumps(obj) + "\n")


def _json_value(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, float) and math.isinf(v):
        return rates.to_json_value(v)
    return v


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


# --- subcommands -------------------------------------------------------------


def cmd_sample(args, out: TextIO) -> int:
    law = parse_law(args.law)
    rng = make_rng(args.seed, args.stream)
    for _ in range(args.count):
        _emit(list(law.sample(args.n, rng)), out)
    return 0


def cmd_stat(args, out: TextIO) -> int:
    stat = StatisticId.parse(args.stat)
    fh = open(args.input) if args.input != "-" else sys.stdin
    try:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            perm = Permutation(json.loads(line))
            _emit(_json_value(evaluate(stat, perm)), out)
    finally:
        if fh is not sys.stdin:
            fh.close()
    return 0


def cmd_rate(args, out: TextIO) -> int:
    if args.fn == "bennett":
        if args.v is None or args.t is None:
            raise ValueError("bennett needs --v and --t")
        value = rates.bennett_log_bound(args.v, args.t)
        _emit({"x": args.t, "value": value, "speed": None, "scale": None, "v": args.v, "t": args.t}, out)
        return 0
    if args.x is None:
        raise ValueError(f"{args.fn} needs --x")
    _emit(rates.rate_point(args.fn, args.x, nu=args.nu).to_dict(), out)
    return 0


TAIL_DEFAULTS = {
    "law": "uniform",
    "stat": "lis",
    "n": "100",
    "samples": "10000",
    "x": "2.0",
    "alpha": "0.5",
    "beta": "0.5",
    "form": "scaled",
    "direction": ">=",
    "seed": "0",
    "rate_fn": "",
    "csv": "",
}


def cmd_tail(args, out: TextIO) -> int:
    settings = dict(TAIL_DEFAULTS)
    if args.config:
        cfg = read_config(args.config)
        unknown = set(cfg) - set(TAIL_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update(cfg)
    for key in TAIL_DEFAULTS:
        given = getattr(args, key)
        if given is not None:
            settings[key] = given
    threshold = montecarlo.Threshold(float(settings["x"]), float(settings["alpha"]), settings["form"])
    cfg = montecarlo.ExperimentConfig(
        law=settings["law"],
        statistic=settings["stat"],
        n_grid=tuple(_int_list(str(settings["n"]))),
        samples=int(settings["samples"]),
        threshold=threshold,
        beta=float(settings["beta"]),
        seed=int(settings["seed"]),
        direction=settings["direction"],
    )
    if settings["rate_fn"]:
        curve = montecarlo.rate_curve(cfg, settings["rate_fn"], threads=args.threads)
        estimates = curve.estimates
    else:
        estimates = montecarlo.estimate_tail(cfg, threads=args.threads)
    if args.format == "csv":
        montecarlo.write_csv(estimates, out)
    else:
        for est in estimates:
            _emit(est.to_dict(), out)
    if settings["csv"]:
        montecarlo.write_csv(estimates, settings["csv"])
    return 0


def cmd_diagnose(args, out: TextIO) -> int:
    sizes = _int_list(args.n)
    if args.rows:
        for n in sizes:
            est = montecarlo.joint_rows_tail(args.law, _float_list(args.rows), n, args.samples, args.seed, args.threads)
            _emit(est.to_dict(), out)
        return 0
    diag = montecarlo.ci_diagnostic(
        args.law, args.alpha, args.beta, args.epsilon, sizes, args.samples, args.seed, args.threads
    )
    _emit(diag.to_dict(), out)
    return 0


def cmd_verify(args, out: TextIO) -> int:
    names = list(oracle.SUITES) if args.check == "all" else [args.check]
    ok = True
    for name in names:
        if name not in oracle.SUITES:
            raise ValueError(f"unknown check {name!r}; choose from {sorted(oracle.SUITES)} or all")
        for rep in oracle.SUITES[name](args.n_max):
            ok &= rep.passed
            _emit(rep.to_dict(), out)
        if name in oracle.EXPECTED_FAILURES:
            for rep in oracle.EXPECTED_FAILURES[name](args.n_max):
                ok &= not rep.passed
                _emit({**rep.to_dict(), "expected": "fail"}, out)
    return 0 if ok else 1


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conjperm", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw permutations from a law")
    s.add_argument("--law", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stream", type=int, default=0)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("stat", help="evaluate a statistic on JSON-lines permutations")
    s.add_argument("--stat", required=True)
    s.add_argument("--input", default="-")
    s.set_defaults(func=cmd_stat)

    s = sub.add_parser("rate", help="evaluate a rate function")
    s.add_argument("--fn", required=True, choices=["lis-half", "lis-one", "moderate", "euler", "bennett"])
    s.add_argument("--x", type=float)
    s.add_argument("--v", type=float)
    s.add_argument("--t", type=float)
    s.add_argument("--nu", type=float, default=1 / 3)
    s.set_defaults(func=cmd_rate)

    s = sub.add_parser("tail", help="Monte Carlo tail probabilities")
    s.add_argument("--config")
    s.add_argument("--law")
    s.add_argument("--stat")
    s.add_argument("--n", help="sizes, comma or space separated")
    s.add_argument("--samples")
    s.add_argument("--x")
    s.add_argument("--alpha")
    s.add_argument("--beta")
    s.add_argument("--form", choices=["scaled", "moderate"])
    s.add_argument("--direction", choices=[">=", "<=", "ge", "le"])
    s.add_argument("--seed")
    s.add_argument("--rate-fn", dest="rate_fn", choices=["lis-half", "lis-one", "moderate", "euler"])
    s.add_argument("--csv", help="also write the summary table to this path")
    s.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    s.set_defaults(func=cmd_tail)

    s = sub.add_parser("diagnose", help="cycle-count diagnostic or joint RSK rows event")
    s.add_argument("--law", required=True)
    s.add_argument("--n", required=True, help="sizes, comma or space separated")
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("--epsilon", type=float, default=1.0)
    s.add_argument("--rows", help="decreasing row levels x_1,...,x_d in (0,2)")
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("verify", help="run exact oracle checks")
    s.add_argument("--check", default="all")
    s.add_argument("--n-max", dest="n_max", type=int, default=6)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"conjperm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
