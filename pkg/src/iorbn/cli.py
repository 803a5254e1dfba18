"""Command-line front end.

Subcommands: translate, reach, crp, simulate, validate. Exit codes are a
total function of the logical answer: 0 YES/pass, 1 NO, 2 UNKNOWN (bounds
exhausted), 64 usage or parse error, 70 node budget exceeded.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional

from .errors import (
    BudgetExceededError,
    CertificateError,
    EmptyRangeError,
    InconsistentCubeError,
    InvalidSpecError,
    ParseError,
    UnknownStateError,
)
from .explicit import DEFAULT_NODE_BUDGET, Verdict, reach_bounded
from .model import IONet, Trace, check_states_known, step_successors
from .symbolic import QueryKind, UnboundedInitialCube, crp_bounded, crp_geq1_decide, io_crp_decide
from .textio import format_trace, parse_config, parse_net, parse_query, serialize_net
from .translate import io_to_rbn

EXIT_YES = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_BUDGET = 70

_VERDICT_EXIT = {Verdict.YES: EXIT_YES, Verdict.NO: EXIT_NO, Verdict.UNKNOWN: EXIT_UNKNOWN}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="iorbn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translate", help="translate an observation net to a broadcast network")
    p.add_argument("--in", dest="infile", required=True, help="input ionet file")
    p.add_argument("--out", dest="outfile", help="output rbn file (stdout if omitted)")

    p = sub.add_parser("reach", help="bounded cube-to-cube reachability")
    p.add_argument("--net", required=True)
    p.add_argument("--query", required=True, help="query file")
    p.add_argument("--pop", required=True, help="population range A..B")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)

    p = sub.add_parser("crp", help="decide a cardinality reachability query")
    p.add_argument("--net", required=True)
    p.add_argument("--query", required=True, help="query file")
    p.add_argument("--mode", choices=["saturate", "explicit"], help="decision procedure")
    p.add_argument("--pop", help="population range A..B for explicit mode")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)

    p = sub.add_parser("simulate", help="print a random run")
    p.add_argument("--net", required=True)
    p.add_argument("--config", required=True, help="initial configuration, e.g. '{a:1, b:2}'")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate", help="run the randomized differential suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    return parser


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc


def _parse_pop(text: str) -> range:
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise _UsageError(f"bad population range {text!r}, expected A..B") from None
    if lo < 0:
        raise _UsageError("populations must be nonnegative")
    return range(lo, hi + 1)


def _print_decision(decision) -> int:
    print(decision.verdict.value)
    if decision.trace is not None:
        sys.stdout.write(format_trace(decision.trace))
    return _VERDICT_EXIT[decision.verdict]


def _cmd_translate(args) -> int:
    net = parse_net(_read(args.infile))
    if not isinstance(net, IONet):
        raise _UsageError("translate expects an ionet file")
    rbn, cert = io_to_rbn(net)
    lines = ["# translation certificate: ionet -> rbn"]
    lines.append("# state-map " + " ".join(f"{a}->{b}" for a, b in cert.state_map))
    lines.append(f"# padding {cert.padding}")
    text = "\n".join(lines) + "\n" + serialize_net(rbn)
    if args.outfile:
        with open(args.outfile, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_YES


def _cmd_reach(args) -> int:
    net = parse_net(_read(args.net))
    query = parse_query(_read(args.query))
    decision = reach_bounded(
        net,
        query.initial_cube(),
        query.target_as_cube(),
        _parse_pop(args.pop),
        budget=args.budget,
    )
    return _print_decision(decision)


def _cmd_crp(args) -> int:
    net = parse_net(_read(args.net))
    query = parse_query(_read(args.query))
    if query.crp is None:
        raise _UsageError("crp expects cardinality atoms (#q>=1, #q=0) in the target")
    if query.init_support is None:
        raise _UsageError("crp expects an unbounded initial support (init: q1 q2 ...)")
    init = UnboundedInitialCube(query.init_support)
    mode = args.mode or ("saturate" if query.crp.kind is QueryKind.GEQ1 else "explicit")
    pops = _parse_pop(args.pop) if args.pop else None
    if mode == "saturate":
        if query.crp.kind is not QueryKind.GEQ1:
            raise _UsageError("saturate mode cannot handle '=0' atoms; use --mode explicit")
        if isinstance(net, IONet):
            decision = io_crp_decide(net, init, query.crp, budget=args.budget)
        else:
            decision = crp_geq1_decide(net, init, query.crp)
    else:
        decision = crp_bounded(net, init, query.crp, pops, budget=args.budget)
    return _print_decision(decision)


def _cmd_simulate(args) -> int:
    net = parse_net(_read(args.net))
    config = parse_config(args.config)
    check_states_known(net, config.support())
    rng = random.Random(args.seed)
    steps = []
    cur = config
    for _ in range(max(args.steps, 0)):
        options = step_successors(net, cur)
        if not options:
            break
        step, cur = options[rng.randrange(len(options))]
        steps.append((step, cur))
    sys.stdout.write(format_trace(Trace(config, tuple(steps))))
    return EXIT_YES


def _cmd_validate(args) -> int:
    from .harness import run_validation

    summary = run_validation(args.seed, args.iters, budget=args.budget)
    for check in summary.checks:
        print(check.line())
        for rendered in check.counterexamples:
            sys.stdout.write(rendered)
    print(summary.json_line())
    return EXIT_YES if summary.failures == 0 else EXIT_NO


_COMMANDS = {
    "translate": _cmd_translate,
    "reach": _cmd_reach,
    "crp": _cmd_crp,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnknownStateError, InconsistentCubeError, EmptyRangeError, CertificateError,
            InvalidSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
