"""Command-line front end: ``wordmachines <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .builtins import BUILTIN_NAMES, load_machine
from .codes import REFERENCE_CODES
from .engine import NoRuleApplies, ReverseUnsupported, reverse_run, run
from .machine import MachineError, validate_machine
from .ranking import CounterOverflow, CounterUnderflow, counter_new, rank_t1, unrank_t1
from .verify import BUILTIN_EXPECTATIONS, Expectations, check_machine, coverage_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _sizes(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad size range {text!r}")
    return range(lo, hi + 1)


def _write(line: str) -> None:
    sys.stdout.write(line + "\n")


def cmd_run(args: argparse.Namespace) -> int:
    spec = load_machine(args.machine)
    verbose = None
    if args.verbose:
        def verbose(config, step):
            print(f"{step}\t{config.render()}", file=sys.stderr)

    def emit(word: str, step: int) -> None:
        _write(word)
        sys.stdout.flush()  # stream each word as soon as it exists

    try:
        if args.reverse:
            forward = run(spec, args.word_size, args.max_steps, collect=False)
            if not forward.halted:
                print("forward run did not halt; nothing to reverse from", file=sys.stderr)
                return EXIT_BUDGET
            report = reverse_run(spec, forward.final, args.max_steps, collect=False,
                                 on_output=emit, on_step=verbose)
        else:
            report = run(spec, args.word_size, args.max_steps, collect=False,
                         on_output=emit, on_step=verbose)
    except NoRuleApplies as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if report.budget_exhausted:
        print(f"budget of {report.steps} steps exhausted", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    names = list(BUILTIN_NAMES) if args.machine == "ALL" else [args.machine]
    lines = []
    for name in names:
        spec = load_machine(name if args.machine != "ALL" else f"builtin:{name}")
        base = BUILTIN_EXPECTATIONS.get(spec.label, Expectations())
        expect = Expectations(
            order=args.expect or base.order,
            hamming=args.hamming if args.hamming is not None else base.hamming,
            skew=args.skew if args.skew is not None else base.skew,
            delay_bound=args.delay_bound if args.delay_bound is not None else base.delay_bound,
            change_window=base.change_window if args.hamming is None else None,
        )
        lines.extend(check_machine(spec, args.sizes, expect))
    if args.report == "tsv":
        for line in lines:
            _write(line.tsv())
    else:
        width = max(len(line.subject) for line in lines)
        for line in lines:
            size = "*" if line.length is None else str(line.length)
            mark = "ok  " if line.passed else "FAIL"
            _write(f"{mark} {line.subject:<{width}} {size:>3} {line.property:<20} {line.value}")
        failed = sum(not line.passed for line in lines)
        _write(f"{len(lines) - failed}/{len(lines)} checks passed")
    return EXIT_OK if all(line.passed for line in lines) else EXIT_FAIL


def cmd_code(args: argparse.Namespace) -> int:
    for word in REFERENCE_CODES[args.code](args.word_size):
        _write(word)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    try:
        _write(str(rank_t1(args.word)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_unrank(args: argparse.Namespace) -> int:
    try:
        _write(unrank_t1(args.n, args.word_size))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_lint(args: argparse.Namespace) -> int:
    spec = load_machine(args.machine)
    findings = validate_machine(spec)
    for f in findings:
        _write(f"{f.category}: {f.message}")
    if not findings:
        _write(f"{spec.label}: no findings ({len(spec.rules)} rules, reversible)")
    return EXIT_OK if not findings else EXIT_FAIL


def cmd_coverage(args: argparse.Namespace) -> int:
    spec = load_machine(args.machine)
    rep = coverage_report(spec, args.word_size, args.max_steps)
    _write(f"{rep.subject} length={rep.length} steps={rep.steps} halted={rep.halted}")
    _write(f"visited={rep.visited_count} distinct={rep.distinct_visited} missing={rep.missing_count}")
    _write(f"note: {rep.note}")
    return EXIT_OK


def cmd_counter(args: argparse.Namespace) -> int:
    unknown = [op for op in args.ops if op not in ("+", "-", "inc", "dec")]
    if unknown:
        raise UsageError(f"unknown counter operation {unknown[0]!r}; use inc or dec")
    counter = counter_new(args.machine.removeprefix("builtin:"), args.word_size)
    _write(counter.value)
    for op in args.ops:
        try:
            value = counter.increment() if op in ("+", "inc") else counter.decrement()
        except (CounterOverflow, CounterUnderflow) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        _write(value)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordmachines",
        description="Run and verify constant-delay machines that enumerate binary words.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="print the words a machine produces")
    p.add_argument("machine", help="table file or builtin:NAME")
    p.add_argument("--word-size", type=int, default=6)
    p.add_argument("--max-steps", type=int, default=None, help="default 64 * 2^word-size")
    p.add_argument("--reverse", action="store_true",
                   help="run the inverted rules from the halting configuration")
    p.add_argument("--verbose", action="store_true", help="trace configurations on stderr")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="verify enumeration properties")
    p.add_argument("machine", help="table file, builtin:NAME, or ALL")
    p.add_argument("--sizes", type=_sizes, default=range(3, 15), help="A..B (default 3..14)")
    p.add_argument("--expect", choices=("hamiltonian", "prefix"))
    p.add_argument("--delay-bound", type=int)
    p.add_argument("--hamming", type=int)
    p.add_argument("--skew", type=int)
    p.add_argument("--report", choices=("table", "tsv"), default="table")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("code", help="print a reference code")
    p.add_argument("code", choices=sorted(REFERENCE_CODES))
    p.add_argument("--word-size", type=int, default=6)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("rank", help="position of a word in the Hamming-1 tape order")
    p.add_argument("order", choices=("t1",))
    p.add_argument("word")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("unrank", help="word at a position of the Hamming-1 tape order")
    p.add_argument("order", choices=("t1",))
    p.add_argument("n", type=int)
    p.add_argument("word_size", type=int)
    p.set_defaults(func=cmd_unrank)

    p = sub.add_parser("lint", help="report shadowed rules, unreachable states, non-injectivity")
    p.add_argument("machine")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("coverage", help="words a queue or stack machine never holds")
    p.add_argument("machine")
    p.add_argument("--word-size", type=int, default=5)
    p.add_argument("--max-steps", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("counter", help="drive a machine-backed counter")
    p.add_argument("machine", help="builtin:T0, builtin:T1 or builtin:T2")
    p.add_argument("--word-size", type=int, default=6)
    p.add_argument("ops", nargs="*", help="sequence of inc/dec (or + and -)")
    p.set_defaults(func=cmd_counter)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (MachineError, ReverseUnsupported, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
