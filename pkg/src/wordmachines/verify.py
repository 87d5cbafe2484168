"""Property checks for machine runs and codes, each against a brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .engine import RunReport, _forward_executor, default_budget, initial_config, run
from .machine import Kind, MachineError, MachineSpec

MAX_TRACKED_LENGTH = 30


@dataclass
class VerificationReport:
    subject: str
    length: int
    property: str
    passed: bool
    output_count: int = 0
    duplicate_count: int = 0
    missing_count: int = 0
    max_delay: int = 0
    max_hamming: int = 0
    max_skew: Optional[int] = None
    first_counterexample: Optional[tuple[int, str, str]] = None  # (index, previous, word)
    halted: bool = False
    budget_exhausted: bool = False
    kept_running: Optional[bool] = None
    steps: int = 0


class _Tracker:
    """Streams outputs into a presence bitmap."""

    def __init__(self, length: int, limit: Optional[int] = None):
        if length > MAX_TRACKED_LENGTH:
            raise ValueError(f"word-set tracking is limited to length {MAX_TRACKED_LENGTH}")
        self.seen = bytearray(2 ** length)
        self.limit = limit
        self.count = 0
        self.duplicates = 0
        self.distinct = 0
        self.max_hamming = 0
        self.prev: Optional[str] = None
        self.prev_value = 0
        self.counterexample: Optional[tuple[int, str, str]] = None

    def __call__(self, word: str, step: int) -> None:
        value = int(word, 2)
        if self.prev is not None:
            self.max_hamming = max(self.max_hamming, (value ^ self.prev_value).bit_count())
        if self.limit is None or self.count < self.limit:
            if self.seen[value]:
                self.duplicates += 1
                if self.counterexample is None:
                    self.counterexample = (self.count, self.prev or "", word)
            else:
                self.seen[value] = 1
                self.distinct += 1
        self.count += 1
        self.prev, self.prev_value = word, value


def _check_length(spec: MachineSpec, length: int) -> None:
    if length > MAX_TRACKED_LENGTH:
        raise ValueError(f"length {length} exceeds the tracking cap of {MAX_TRACKED_LENGTH}")
    initial_config(spec, length)


def check_hamiltonian(spec: MachineSpec, length: int,
                      budget: Optional[int] = None) -> VerificationReport:
    """Pass iff the run halts having produced every word of the length exactly once."""
    _check_length(spec, length)
    track = _Tracker(length)
    report = run(spec, length, budget, collect=False, on_output=track)
    total = 2 ** length
    missing = total - track.distinct
    passed = (report.halted and track.count == total and track.duplicates == 0 and missing == 0)
    return VerificationReport(
        subject=spec.label, length=length, property="hamiltonian", passed=passed,
        output_count=track.count, duplicate_count=track.duplicates, missing_count=missing,
        max_delay=report.max_delay, max_hamming=track.max_hamming,
        first_counterexample=track.counterexample, halted=report.halted,
        budget_exhausted=report.budget_exhausted, steps=report.steps)


def check_prefix_hamiltonian(spec: MachineSpec, length: int,
                             budget: Optional[int] = None) -> VerificationReport:
    """Pass iff the first 2^ℓ outputs are pairwise distinct (hence cover every word)."""
    _check_length(spec, length)
    total = 2 ** length
    track = _Tracker(length, limit=total)
    report = run(spec, length, budget, collect=False, on_output=track, max_outputs=total)
    missing = total - track.distinct
    passed = track.count == total and track.duplicates == 0 and missing == 0
    kept_running = not report.halted and report.final.state != spec.halting
    return VerificationReport(
        subject=spec.label, length=length, property="prefix-hamiltonian", passed=passed,
        output_count=track.count, duplicate_count=track.duplicates, missing_count=missing,
        max_delay=report.max_delay, max_hamming=track.max_hamming,
        first_counterexample=track.counterexample, halted=report.halted,
        budget_exhausted=report.budget_exhausted, kept_running=kept_running,
        steps=report.steps)


@dataclass(frozen=True)
class DelayProfile:
    max_delay: int
    histogram: dict[int, int]


def delay_profile(report: RunReport) -> DelayProfile:
    """Largest gap, in rule applications, before, between and (if halted) after outputs."""
    return DelayProfile(report.max_delay, dict(report.delay_histogram))


def _uniform(code: Sequence[str]) -> int:
    if not code:
        raise ValueError("empty code")
    width = len(code[0])
    if any(len(w) != width for w in code):
        raise ValueError("code words differ in length")
    return width


def _changed(v: str, u: str) -> list[int]:
    return [i + 1 for i, (a, b) in enumerate(zip(v, u)) if a != b]


def hamming_profile(code: Sequence[str]) -> int:
    """Largest Hamming distance between consecutive words."""
    _uniform(code)
    return max((len(_changed(v, u)) for v, u in zip(code, code[1:])), default=0)


class SkewUndefined(ValueError):
    pass


def skew_profile(code: Sequence[str]) -> int:
    """Largest distance between the positions flipped by consecutive steps."""
    _uniform(code)
    flips = []
    for i, (v, u) in enumerate(zip(code, code[1:]), start=1):
        changed = _changed(v, u)
        if len(changed) != 1:
            raise SkewUndefined(f"skew undefined: step {i} ({v} -> {u}) changes {len(changed)} bits")
        flips.append(changed[0])
    return max((abs(b - a) for a, b in zip(flips, flips[1:])), default=0)


def change_window_profile(code: Sequence[str]) -> int:
    """Widest span of positions touched by one step (0 when nothing changes)."""
    _uniform(code)
    widest = 0
    for v, u in zip(code, code[1:]):
        changed = _changed(v, u)
        if changed:
            widest = max(widest, changed[-1] - changed[0] + 1)
    return widest


PUSHPOP_ORIENTATIONS = ("pop-left/push-right", "pop-right/push-left",
                        "overwrite-left", "overwrite-right")


def _pushpop_orientation(v: str, u: str) -> Optional[str]:
    if u[:-1] == v[1:]:
        return "pop-left/push-right"
    if u[1:] == v[:-1]:
        return "pop-right/push-left"
    if u[1:] == v[1:]:
        return "overwrite-left"
    if u[:-1] == v[:-1]:
        return "overwrite-right"
    return None


@dataclass
class PushPopReport:
    passed: bool
    orientations: list[str] = field(default_factory=list)
    first_violation: Optional[tuple[int, str, str]] = None


def pushpop_profile(code: Sequence[str]) -> PushPopReport:
    """Check that every step pops one endpoint bit and pushes one at either end."""
    _uniform(code)
    seen = []
    for i, (v, u) in enumerate(zip(code, code[1:]), start=1):
        orientation = _pushpop_orientation(v, u)
        if orientation is None:
            return PushPopReport(False, seen, (i, v, u))
        seen.append(orientation)
    return PushPopReport(True, seen)


@dataclass(frozen=True)
class Comparison:
    equal: bool
    first_divergence: Optional[int] = None

    def __bool__(self) -> bool:
        return self.equal


def compare_codes(a: Sequence[str], b: Sequence[str]) -> Comparison:
    """Exact sequence equality, or the first index where the codes differ."""
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return Comparison(False, i)
    if len(a) != len(b):
        return Comparison(False, min(len(a), len(b)))
    return Comparison(True)


@dataclass
class CoverageReport:
    subject: str
    length: int
    visited_count: int
    distinct_visited: int
    missing_count: int
    steps: int
    halted: bool
    note: str = "illustration only, not a proof"


def coverage_report(spec: MachineSpec, length: int,
                    budget: Optional[int] = None) -> CoverageReport:
    """Count which words of the given length a queue or stack machine ever holds.

    Stack machines change their word length; only visits at exactly ``length`` count.
    """
    if spec.kind not in (Kind.QUEUE, Kind.STACK):
        raise MachineError("coverage reports apply to queue and stack machines")
    budget = default_budget(length) if budget is None else budget
    start = initial_config(spec, length)
    ex = _forward_executor(spec)
    ex.load(start)
    seen = bytearray(2 ** length)
    state, steps, visits, halted = start.state, 0, 0, False

    def current() -> Optional[int]:
        word = ex.stack if spec.kind is Kind.STACK else ex.dq
        if len(word) != length:
            return None
        return int(bytes(word), 2) if length else 0

    while True:
        value = current()
        if value is not None:
            visits += 1
            seen[value] = 1
        if state == spec.halting:
            halted = True
            break
        if steps >= budget:
            break
        fired = ex.fire(state)
        if fired is None:
            break
        state = fired[1]
        steps += 1
    distinct = sum(seen)
    return CoverageReport(spec.label, length, visits, distinct, 2 ** length - distinct,
                          steps, halted)


# ---------------------------------------------------------------------------
# suite driver used by the command line


@dataclass(frozen=True)
class CheckLine:
    subject: str
    length: Optional[int]
    property: str
    value: str
    passed: bool

    def tsv(self) -> str:
        length = "-" if self.length is None else str(self.length)
        return "\t".join((self.subject, length, self.property, self.value,
                          "pass" if self.passed else "fail"))


@dataclass(frozen=True)
class Expectations:
    """What ``check`` verifies for one machine."""

    order: str = "hamiltonian"  # or "prefix"
    hamming: Optional[int] = None
    skew: Optional[int] = None
    delay_bound: Optional[int] = None
    change_window: Optional[int] = None


BUILTIN_EXPECTATIONS = {
    "T0": Expectations(hamming=3, change_window=3),
    "T1": Expectations(hamming=1, skew=3),
    "T2": Expectations(hamming=1),
    "D0": Expectations(order="prefix"),
    "D1": Expectations(),
    "D2": Expectations(),
}


def check_machine(spec: MachineSpec, lengths: Iterable[int],
                  expect: Expectations) -> list[CheckLine]:
    lines: list[CheckLine] = []
    delays: dict[int, int] = {}
    name = spec.label
    for length in lengths:
        if expect.order == "prefix":
            rep = check_prefix_hamiltonian(spec, length)
        else:
            rep = check_hamiltonian(spec, length)
        detail = f"outputs={rep.output_count} dup={rep.duplicate_count} missing={rep.missing_count}"
        if rep.first_counterexample:
            detail += " first={}:{}->{}".format(*rep.first_counterexample)
        lines.append(CheckLine(name, length, rep.property, detail, rep.passed))
        delays[length] = rep.max_delay
        if expect.delay_bound is not None:
            lines.append(CheckLine(name, length, "max-delay", str(rep.max_delay),
                                   rep.max_delay <= expect.delay_bound))
        needs_code = expect.skew is not None or expect.change_window is not None
        if expect.hamming is not None:
            lines.append(CheckLine(name, length, "max-hamming", str(rep.max_hamming),
                                   rep.max_hamming <= expect.hamming))
        if needs_code:
            words = run(spec, length, max_outputs=2 ** length).outputs
            if expect.skew is not None:
                try:
                    skew = skew_profile(words)
                    lines.append(CheckLine(name, length, "max-skew", str(skew), skew <= expect.skew))
                except SkewUndefined as exc:
                    lines.append(CheckLine(name, length, "max-skew", str(exc), False))
            if expect.change_window is not None:
                width = change_window_profile(words)
                lines.append(CheckLine(name, length, "change-window", str(width),
                                       width <= expect.change_window))
    if len(delays) > 1:
        # a delay that depends on the length would grow at the largest size
        largest = max(delays)
        earlier = max(v for k, v in delays.items() if k != largest)
        lines.append(CheckLine(name, None, "delay-nongrowing",
                               ",".join(f"{k}:{v}" for k, v in delays.items()),
                               delays[largest] <= earlier))
    return lines
