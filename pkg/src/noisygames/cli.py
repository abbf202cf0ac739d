"""Command-line front end.

Exit codes: 0 success (for ``solve``: the initial location is winning),
1 losing verdict or failed verification, 2 unsupported objective/mode
combination, 64 malformed input file, 65 semantic validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import DomainError, Objective, PrefixG
from .gamefiles import (
    FileFormatError,
    frac_str,
    read_game,
    read_pomdp,
    read_strategy1,
    read_strategy2,
    write_game,
    write_pog,
    write_region,
)
from .lemmas import LEMMA_KINDS, check_lemma
from .measure import cone_prob
from .reduce_forward import reduce_game, validate_game
from .reduce_pomdp import reduce_pomdp
from .report import build_report_doc, write_report_dir
from .simulate import monte_carlo_cone, random_instance, sample_play
from .solvers import Unsupported, solve_uncertainty_game

__all__ = ["main"]

_EPILOG = (
    "Environment: UG_MAX_ENUM caps every exhaustive enumeration "
    "(strategy search, lemma checks); default 1000000."
)


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="noisygames",
        description="Games against a noisy sensor: reductions, exact measures, solvers.",
        epilog=_EPILOG,
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "reduce-forward",
        help="turn a noisy-sensor game into a partial-observation product game",
        epilog=_EPILOG,
    )
    p.add_argument("--in", dest="infile", required=True, metavar="GAME.json")
    p.add_argument("--mode", choices=("standard", "all-powerful"), default="standard")
    p.add_argument("--out", required=True, metavar="POG.json")

    p = sub.add_parser(
        "reduce-pomdp",
        help="embed a POMDP as a noisy-sensor game with a silent adversary",
        epilog=_EPILOG,
    )
    p.add_argument("--in", dest="infile", required=True, metavar="POMDP.json")
    p.add_argument("--out", required=True, metavar="GAME.json")

    p = sub.add_parser(
        "measure",
        help="exact cone probability of a play prefix under two strategies",
        epilog=_EPILOG,
    )
    p.add_argument("--in", dest="infile", required=True, metavar="GAME.json")
    p.add_argument("--a", dest="alpha", required=True, metavar="ALPHA.json")
    p.add_argument("--b", dest="beta", required=True, metavar="BETA.json")
    p.add_argument(
        "--prefix", required=True, help="space-separated interleaved loc in out loc ..."
    )

    p = sub.add_parser(
        "solve",
        help="decide sure, almost-sure or positive winning for the initial location",
        epilog=_EPILOG,
    )
    p.add_argument("--in", dest="infile", required=True, metavar="GAME.json")
    p.add_argument("--objective", choices=Objective.KINDS)
    p.add_argument("--target", help="comma-separated locations (non-parity objectives)")
    p.add_argument("--priorities", help="comma-separated loc=N pairs (parity)")
    p.add_argument("--mode", choices=("sure", "almost", "positive"), default="sure")
    p.add_argument("--player2", choices=("standard", "all-powerful"), default="all-powerful")
    p.add_argument("--witness", metavar="OUT.json", help="write the region and witness here")

    p = sub.add_parser(
        "verify",
        help="run the exact correspondence checks on seeded random instances",
        epilog=_EPILOG,
    )
    p.add_argument("--lemma", default="all", help="all or one of: " + ", ".join(LEMMA_KINDS))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--depth", type=int, default=2, help="round depth per check (max 3)")
    p.add_argument(
        "--report-dir",
        help="also write report.json, CSV, charts and instance files here",
    )

    p = sub.add_parser(
        "sample",
        help="draw seeded plays, or estimate one cone by Monte Carlo",
        epilog=_EPILOG,
    )
    p.add_argument("--in", dest="infile", required=True, metavar="GAME.json")
    p.add_argument("--a", dest="alpha", required=True, metavar="ALPHA.json")
    p.add_argument("--b", dest="beta", required=True, metavar="BETA.json")
    p.add_argument("--depth", type=int, required=True, help="rounds per play")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--prefix", help="estimate this cone instead of printing traces")
    return top


def _load_game(path: str):
    g, objective = read_game(path)
    report = validate_game(g)
    if not report.ok:
        raise _Invalid(str(report))
    return g, objective


class _Invalid(Exception):
    pass


def _cmd_reduce_forward(args) -> int:
    g, objective = _load_game(args.infile)
    red = reduce_game(g, objective, args.mode)
    states = {}
    for (l1, l2), name in red.pair_name.items():
        states[name] = {"true": l1, "observed": l2}
    for (l1, l2, si), name in red.trip_name.items():
        states[name] = {"true": l1, "observed": l2, "input": si}
    provenance = {"mode": args.mode, "states": states}
    write_pog(args.out, red.pog, red.objective_h, provenance)
    print(f"wrote {args.out}: {len(red.pog.states)} states")
    return 0


def _cmd_reduce_pomdp(args) -> int:
    m, objective = read_pomdp(args.infile)
    red = reduce_pomdp(m, objective)
    write_game(args.out, red.game, red.objective)
    print(f"wrote {args.out}: {len(red.game.locations)} locations")
    return 0


def _cmd_measure(args) -> int:
    g, _ = _load_game(args.infile)
    alpha = read_strategy1(args.alpha)
    beta = read_strategy2(args.beta)
    rho = PrefixG.parse(args.prefix.split())
    value = cone_prob(g, alpha, beta, rho)
    print(frac_str(value))
    print(f"{float(value):.12g}")
    return 0


def _objective_from_args(args, from_file: Objective | None) -> Objective:
    if args.objective is None:
        if from_file is None:
            raise _Invalid("no objective: give --objective or put one in the game file")
        return from_file
    if args.objective == "parity":
        if not args.priorities:
            raise _Invalid("parity needs --priorities loc=N,loc=N,...")
        table = {}
        for chunk in args.priorities.split(","):
            name, _, num = chunk.partition("=")
            if not num.lstrip("-").isdigit():
                raise _Invalid(f"bad priority entry {chunk!r}")
            table[name.strip()] = int(num)
        return Objective.parity(table)
    if not args.target:
        raise _Invalid(f"{args.objective} needs --target loc,loc,...")
    return Objective(args.objective, frozenset(t.strip() for t in args.target.split(",")))


def _cmd_solve(args) -> int:
    g, from_file = _load_game(args.infile)
    objective = _objective_from_args(args, from_file)
    result = solve_uncertainty_game(g, objective, mode=args.mode, player2=args.player2)
    if isinstance(result, Unsupported):
        print(result.message)
        return 2
    verdict = "winning" if result.initial_winning else "not winning"
    print(f"{args.mode} {objective.kind}: initial location {verdict}")
    if result.detail:
        print(result.detail)
    if args.witness:
        write_region(args.witness, result)
        print(f"wrote {args.witness}")
    return 0 if result.initial_winning else 1


def _cmd_verify(args) -> int:
    if args.lemma == "all":
        kinds = LEMMA_KINDS
    elif args.lemma in LEMMA_KINDS:
        kinds = (args.lemma,)
    else:
        raise _Invalid(f"unknown check {args.lemma!r}; all or one of: " + ", ".join(LEMMA_KINDS))
    if args.instances < 1:
        raise _Invalid("need at least one instance")
    results = []
    for k in range(args.instances):
        inst = random_instance(args.seed + k)
        reports = [check_lemma(kind, inst, depth=args.depth) for kind in kinds]
        results.append((inst, reports))
    doc = build_report_doc(args.seed, args.depth, results)

    all_ok = True
    for kind in kinds:
        tally = doc["summary"]["by_kind"][kind]
        ok = tally["failed"] == 0
        all_ok = all_ok and ok
        line = (
            f"{kind}: {'ok' if ok else 'FAIL'} "
            f"({tally['verified']}/{args.instances} instances, {tally['pairs']} pairs)"
        )
        print(line, file=sys.stderr)
        if not ok:
            first = next(
                check
                for inst in doc["instances"]
                for check in inst["checks"]
                if check["kind"] == kind and not check["verified"]
            )
            ce = first["counterexample"]
            print(
                f"  first counterexample at [{' | '.join(ce['at'])}] "
                f"lhs={ce['lhs']} rhs={ce['rhs']}",
                file=sys.stderr,
            )
    if args.report_dir:
        write_report_dir(args.report_dir, doc, results)
        print(f"report written to {args.report_dir}", file=sys.stderr)
    json.dump(doc, sys.stdout, indent=2)
    print()
    return 0 if all_ok else 1


def _cmd_sample(args) -> int:
    g, _ = _load_game(args.infile)
    alpha = read_strategy1(args.alpha)
    beta = read_strategy2(args.beta)
    if args.prefix is not None:
        rho = PrefixG.parse(args.prefix.split())
        est = monte_carlo_cone(g, alpha, beta, rho, args.samples or 100000, args.seed)
        json.dump(
            {
                "prefix": args.prefix.split(),
                "mean": est.mean,
                "stderr": est.stderr,
                "hits": est.hits,
                "samples": est.samples,
            },
            sys.stdout,
        )
        print()
        return 0
    for k in range(args.samples or 1):
        trace = sample_play(g, alpha, beta, args.depth, args.seed + k)
        json.dump(
            {
                "seed": trace.seed,
                "true": list(trace.true.interleaved()),
                "observed": list(trace.observed.interleaved()),
                "actions": [list(pair) for pair in trace.actions],
            },
            sys.stdout,
        )
        print()
    return 0


_COMMANDS = {
    "reduce-forward": _cmd_reduce_forward,
    "reduce-pomdp": _cmd_reduce_pomdp,
    "measure": _cmd_measure,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "sample": _cmd_sample,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FileFormatError as e:
        print(f"file error: {e}", file=sys.stderr)
        return 64
    except _Invalid as e:
        print(f"error: {e}", file=sys.stderr)
        return 65
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 65


if __name__ == "__main__":
    sys.exit(main(argv=sys.argv[1:]))
