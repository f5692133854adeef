"""Command-line interface: ``imab {list-setups,run,bounds,coverage}``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .bounds import lai_robbins_constant, regret_bound
from .dist import Pmf
from .harness import (
    PRESETS,
    ExperimentConfig,
    _to_csv,
    _to_json,
    coverage_diagnostic,
    fmt,
    run_experiment,
    write_outputs,
)
from .setups import SETUP_IDS, builtin_setup

NATS_PER_BIT = math.log(2.0)


def _split(values, cast):
    out = []
    for v in values or []:
        out.extend(cast(x) for x in str(v).split(",") if x.strip())
    return out


def _float_or_int(s: str):
    x = float(s)
    return int(x) if x.is_integer() else x


def _emit(header, rows, fmt_name, stream=None):
    stream = stream or sys.stdout
    stream.write(_to_json(header, rows) if fmt_name == "json" else _to_csv(header, rows))


# -- list-setups ---------------------------------------------------------

def cmd_list_setups(args) -> int:
    unit = "bits" if args.bits else "nats"
    header = ("setup_id", "arm", "alphabet_size", "support_size", "probs",
              f"entropy_{unit}", "zeta", "kappa_values", "policies")
    rows = []
    for sid in SETUP_IDS:
        setup = builtin_setup(sid, args.seed)
        for i, arm in enumerate(setup.arms):
            h = arm.entropy_nats / NATS_PER_BIT if args.bits else arm.entropy_nats
            if arm.alphabet_size <= 6:
                probs = " ".join("%g" % p for p in arm.pmf.probs)
            else:
                probs = f"spiked last={arm.pmf.probs[-1]:g}"
            rows.append((str(sid), str(i), fmt(arm.alphabet_size), fmt(arm.support_size),
                         probs, "%.4f" % h, fmt(arm.zeta),
                         " ".join(str(k) for k in setup.kappa_values),
                         " ".join(setup.policies)))
    if args.format == "json":
        records = [dict(zip(header, r)) for r in rows]
        sys.stdout.write(json.dumps(records, indent=1) + "\n")
    else:
        _emit(header, rows, "csv")
    return 0


# -- run -----------------------------------------------------------------

def build_config(args) -> ExperimentConfig:
    """Defaults, then the JSON config file, then the preset, then explicit flags."""
    data = {}
    if args.config:
        with open(args.config) as fh:
            data.update(json.load(fh))
    if args.preset:
        data.update(PRESETS[args.preset])
    flags = {
        "setup_id": args.setup,
        "horizon": args.horizon,
        "replications": args.reps,
        "alpha": args.alpha,
        "master_seed": args.seed,
        "checkpoint_growth": args.growth,
        "output_path": args.out,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    if args.policy:
        data["policies"] = _split(args.policy, str.strip)
    if args.kappa:
        data["kappa_values"] = _split(args.kappa, lambda s: int(float(s)))
    if args.arm:
        data["arms"] = [_split([a], float) for a in args.arm]
    if args.clamp:
        data["clamp_to_max_entropy"] = True
    if "horizon" in data:
        data["horizon"] = int(float(data["horizon"]))
    return ExperimentConfig.from_dict(data)


def cmd_run(args) -> int:
    config = build_config(args)
    out = config.output_path
    config.output_path = None
    result = run_experiment(config, workers=args.workers)
    if out:
        for path in write_outputs(result, out, args.format):
            print(path, file=sys.stderr)
    elif args.format == "json":
        sys.stdout.write(result.aggregate_json())
    else:
        sys.stdout.write(result.aggregate_csv())
    return 0


# -- bounds --------------------------------------------------------------

def cmd_bounds(args) -> int:
    setup = builtin_setup(args.setup, args.seed)
    kappas = _split(args.kappa, lambda s: int(float(s))) or list(setup.kappa_values)
    ts = _split(args.t, _float_or_int) or [1000, 10000, 100000]
    binary = all(a.alphabet_size == 2 for a in setup.arms)
    rows = []
    for kappa in kappas:
        theorems = ["thm1", "thm5", "thm6"]
        if binary:
            theorems[1:1] = ["thm2"]
            qs = [min(a.pmf.probs[1], a.pmf.probs[0]) for a in setup.arms]
            if len(setup.arms) == 2 and all(0.4 <= q <= 0.5 for q in qs):
                theorems.append("thm4")
        for name in theorems:
            for t in ts:
                value = regret_bound(name, setup.arms, args.alpha, t, args.beta,
                                     kappa=kappa, se_denominator=args.se_denominator)
                rows.append((str(setup.setup_id), name, fmt(kappa), fmt(t), fmt(value)))
    if binary:
        c = lai_robbins_constant(setup.arms)
        for t in ts:
            rows.append((str(setup.setup_id), "lai_robbins", "", fmt(t), fmt(c * math.log(t))))
        rows.append((str(setup.setup_id), "lai_robbins_constant", "", "", fmt(c)))
    header = ("setup_id", "quantity", "kappa", "t", "value")
    if args.format == "json":
        sys.stdout.write(json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n")
    else:
        _emit(header, rows, "csv")
    return 0


# -- coverage ------------------------------------------------------------

def cmd_coverage(args) -> int:
    if args.probs:
        pmf = Pmf(_split([args.probs], float))
    else:
        setup = builtin_setup(args.setup, args.seed)
        if not 0 <= args.arm < len(setup.arms):
            raise ValueError(f"setup {args.setup} has arms 0..{len(setup.arms) - 1}")
        pmf = setup.arms[args.arm].pmf
    n = args.n
    if n is None:
        raise ValueError("--n is required")
    res = coverage_diagnostic(args.kind, pmf, n, args.delta, args.trials, seed=args.seed,
                              alphabet_size=args.alphabet_size, kappa=args.kappa,
                              require_regime=args.regime)
    header = ("kind", "n", "delta", "trials", "violations", "fraction",
              "ci_low", "ci_high", "in_regime")
    row = (res.kind, fmt(res.n), fmt(res.delta), fmt(res.trials), fmt(res.violations),
           fmt(res.fraction), fmt(res.ci_low), fmt(res.ci_high), str(res.in_regime).lower())
    if args.format == "json":
        rec = dict(zip(header, row))
        sys.stdout.write(json.dumps(rec, indent=1) + "\n")
    else:
        _emit(header, [row], "csv")
    return 0


# -- parser --------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imab", description="Entropy-reward multi-armed bandits: experiments and bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-setups", help="print the built-in setups")
    p.add_argument("--bits", action="store_true", help="report entropies in bits")
    p.add_argument("--seed", type=int, default=0, help="master seed for setup 7")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_list_setups)

    p = sub.add_parser("run", help="run a Monte Carlo experiment")
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--setup", help="1..7 or 'custom'")
    p.add_argument("--policy", action="append", help="bias, tv or se (repeatable, comma lists ok)")
    p.add_argument("--kappa", action="append", help="told alphabet size (repeatable)")
    p.add_argument("--arm", action="append", help="custom arm probabilities, comma separated")
    p.add_argument("--horizon", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--growth", type=float, help="checkpoint growth factor")
    p.add_argument("--clamp", action="store_true", help="clamp indices at log(kappa)")
    p.add_argument("--out", help="output directory for raw.csv and aggregate.csv")
    p.add_argument("--workers", "--threads", dest="workers", type=int, default=1,
                   help="parallel worker processes")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bounds", help="theorem regret bounds for a setup")
    p.add_argument("--setup", type=int, default=1)
    p.add_argument("--kappa", action="append")
    p.add_argument("--t", action="append", help="rounds (repeatable, comma lists ok)")
    p.add_argument("--alpha", type=float, default=2.1)
    p.add_argument("--beta", type=float, help="fixed beta; default minimizes over a grid")
    p.add_argument("--se-denominator", choices=("min", "max"), default="min")
    p.add_argument("--seed", type=int, default=0, help="master seed for setup 7")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("coverage", help="Monte Carlo coverage of a confidence rule")
    p.add_argument("--kind", choices=("bias", "ber", "ber_half", "tv", "se"), required=True)
    p.add_argument("--setup", type=int, default=1)
    p.add_argument("--arm", type=int, default=0)
    p.add_argument("--probs", help="explicit pmf, comma separated")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--alphabet-size", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--regime", action="store_true", help="reject n outside the proven regime")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_coverage)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"imab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
