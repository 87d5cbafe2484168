"""Step and run semantics for all four machine kinds, forward and reversed."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .machine import (DequeRule, Kind, MachineError, MachineSpec, NotInvertible, QueueRule,
                      Rule, StackRule, TapeRule, injectivity_findings, invert_rule)

ZERO, ONE = 48, 49  # ord("0"), ord("1")
LMARK, RMARK = ord(">"), ord("<")


@dataclass(frozen=True)
class Config:
    state: str
    word: str
    head: Optional[int] = None  # tape only: 0 is the left marker, len(word)+1 the right one

    def render(self) -> str:
        if self.head is None:
            return f"{self.state} {self.word or '@'}"
        tape = ">" + self.word + "<"
        h = self.head
        return f"{self.state} {tape[:h]}[{tape[h]}]{tape[h + 1:]}"


class NoRuleApplies(RuntimeError):
    """No rule matches a non-halting configuration: the table is incomplete."""

    def __init__(self, config: Config, steps: int = 0):
        self.config = config
        self.steps = steps
        super().__init__(f"no rule applies to {config.render()} after {steps} steps")


class ReverseUnsupported(MachineError):
    pass


@dataclass(frozen=True)
class Next:
    config: Config
    rule_index: int


@dataclass(frozen=True)
class Halted:
    config: Config


@dataclass(frozen=True)
class Stuck:
    config: Config


StepResult = Next | Halted | Stuck  # type: ignore[operator]


@dataclass
class RunReport:
    length: int
    outputs: list[str]
    output_count: int
    steps: int
    max_delay: int
    halted: bool
    budget_exhausted: bool
    final: Config
    delay_histogram: dict[int, int] = field(default_factory=dict)
    first_output_step: Optional[int] = None
    last_output_step: Optional[int] = None

    @property
    def idle_configurations(self) -> int:
        """Visited configurations that produced nothing; plus output_count this is steps + 1."""
        return self.steps + 1 - self.output_count


def default_budget(length: int) -> int:
    return 64 * 2 ** length


# ---------------------------------------------------------------------------
# compiled executors; each owns one mutable word


class _Executor:
    def __init__(self, rules: Sequence[Rule], indices: Sequence[int]):
        table: dict[str, list] = {}
        for idx, rule in zip(indices, rules):
            table.setdefault(rule.source, []).append(self.compile(rule, idx))
        self.table = table

    def compile(self, rule, idx):  # pragma: no cover - abstract
        raise NotImplementedError


class _TapeExecutor(_Executor):
    def compile(self, rule: TapeRule, idx: int):
        checks, anys, writes = [], [], []
        for i, tok in enumerate(rule.pattern):
            off = i - rule.head
            if tok == ".":
                anys.append(off)
            else:
                checks.append((off, ord(tok)))
            rep = rule.replacement[i]
            if rep == "~":
                writes.append((off, None))
            elif rep in "01":
                writes.append((off, ord(rep)))
        lo, hi = -rule.head, len(rule.pattern) - 1 - rule.head
        return (lo, hi, tuple(checks), tuple(anys), tuple(writes), rule.move, rule.target, idx)

    def load(self, config: Config) -> None:
        self.tape = bytearray(b">" + config.word.encode() + b"<")
        self.head = config.head
        self.end = len(self.tape) - 1

    def fire(self, state: str):
        tape, head = self.tape, self.head
        for lo, hi, checks, anys, writes, move, target, idx in self.table.get(state, ()):
            if head + lo < 0 or head + hi > self.end:
                continue
            if any(tape[head + off] != sym for off, sym in checks):
                continue
            if any(tape[head + off] > ONE for off in anys):
                continue
            for off, sym in writes:
                if sym is None:
                    tape[head + off] ^= 1
                else:
                    tape[head + off] = sym
            head += move
            if not 0 <= head <= self.end:
                raise MachineError(f"rule {idx} moved the head off the tape")
            self.head = head
            return idx, target
        return None

    def word(self) -> str:
        return self.tape[1:-1].decode()

    def config(self, state: str) -> Config:
        return Config(state, self.word(), self.head)


def _compile_repl(tokens: Sequence[str]):
    out = []
    for tok in tokens:
        if tok in ("0", "1"):
            out.append((0, "L", ord(tok)))
        else:
            out.append((1 if tok[0] == "$" else 2, tok[1], int(tok[2:]) - 1))
    return tuple(out)


def _materialise(repl, lv, rv):
    vals = []
    for op, side, k in repl:
        if op == 0:
            vals.append(k)
        else:
            v = (lv if side == "L" else rv)[k]
            vals.append(v if op == 1 else v ^ 1)
    return vals


class _DequeExecutor(_Executor):
    def compile(self, rule: DequeRule, idx: int):
        # cells to test as (deque index, symbol); the right window uses negative indices
        checks = [(i, ord(t)) for i, t in enumerate(rule.left) if t != "."]
        checks += [(-1 - i, ord(t)) for i, t in enumerate(reversed(rule.right)) if t != "."]
        plain = all(t in ("0", "1") for t in rule.left_repl + rule.right_repl)
        lrep, rrep = _compile_repl(rule.left_repl), _compile_repl(rule.right_repl)
        if plain:  # literal replacements need no matched values
            lrep = tuple(reversed([k for _, _, k in lrep]))
            rrep = tuple(k for _, _, k in rrep)
        return (tuple(checks), len(rule.left), len(rule.right), plain, lrep, rrep,
                rule.target, idx)

    def load(self, config: Config) -> None:
        self.dq = deque(config.word.encode())

    def fire(self, state: str):
        dq = self.dq
        for checks, nl, nr, plain, lrep, rrep, target, idx in self.table.get(state, ()):
            for pos, sym in checks:
                if dq[pos] != sym:
                    break
            else:
                if plain:
                    for _ in range(nl):
                        dq.popleft()
                    for _ in range(nr):
                        dq.pop()
                    dq.extendleft(lrep)
                    dq.extend(rrep)
                else:
                    lv = [dq.popleft() for _ in range(nl)]
                    rv = [dq.pop() for _ in range(nr)]
                    dq.extendleft(reversed(_materialise(lrep, lv, rv)))
                    dq.extend(_materialise(rrep, lv, rv))
                return idx, target
        return None

    def word(self) -> str:
        return bytes(self.dq).decode()

    def config(self, state: str) -> Config:
        return Config(state, self.word())


class _QueueExecutor(_DequeExecutor):
    def compile(self, rule: QueueRule, idx: int):
        right = tuple(None if t == "." else ord(t) for t in reversed(rule.right))
        return (right, rule.push.encode(), rule.target, idx)

    def fire(self, state: str):
        dq = self.dq
        for right, push, target, idx in self.table.get(state, ()):
            if len(dq) < len(right):
                continue
            if any(sym is not None and dq[-1 - i] != sym for i, sym in enumerate(right)):
                continue
            for _ in push:
                dq.pop()
            dq.extendleft(reversed(push))
            return idx, target
        return None


class _StackExecutor(_Executor):
    def compile(self, rule: StackRule, idx: int):
        return (ord(rule.top), rule.action, rule.target, idx)

    def load(self, config: Config) -> None:
        self.stack = bytearray(config.word.encode())

    def fire(self, state: str):
        stack = self.stack
        top = stack[-1] if stack else ord("@")
        for sym, action, target, idx in self.table.get(state, ()):
            if sym != top:
                continue
            if action == "pop":
                if stack:
                    stack.pop()
            else:
                stack.append(ONE if action == "push1" else ZERO)
            return idx, target
        return None

    def word(self) -> str:
        return self.stack.decode()

    def config(self, state: str) -> Config:
        return Config(state, self.word())


_EXECUTORS = {Kind.TAPE: _TapeExecutor, Kind.DEQUE: _DequeExecutor,
              Kind.QUEUE: _QueueExecutor, Kind.STACK: _StackExecutor}


def _forward_executor(spec: MachineSpec) -> _Executor:
    return _EXECUTORS[spec.kind](spec.rules, range(len(spec.rules)))


@lru_cache(maxsize=64)
def inverse_rules(spec: MachineSpec) -> tuple[Rule, ...]:
    """Inverted rule list; raises ReverseUnsupported unless the table is injective."""
    findings = injectivity_findings(spec)
    if findings:
        raise ReverseUnsupported(f"reverse unsupported for {spec.label}: {findings[0].message}")
    try:
        return tuple(invert_rule(r) for r in spec.rules)
    except NotInvertible as exc:  # pragma: no cover - excluded by the findings above
        raise ReverseUnsupported(f"reverse unsupported: {exc}") from None


def _reverse_executor(spec: MachineSpec) -> _Executor:
    return _EXECUTORS[spec.kind](inverse_rules(spec), range(len(spec.rules)))


# ---------------------------------------------------------------------------
# public API


def initial_config(spec: MachineSpec, length: int) -> Config:
    if length < spec.min_length:
        raise MachineError(
            f"length {length} unsupported for {spec.label} (minimum {spec.min_length}); "
            "short lengths could be hardcoded but this library rejects them")
    head = None
    if spec.kind is Kind.TAPE:
        head = 1 if spec.head_start == "left" else length
    return Config(spec.initial, "0" * length, head)


def _check_config(spec: MachineSpec, config: Config) -> None:
    if len(config.word) < spec.min_length and spec.kind is not Kind.STACK:
        raise MachineError(f"word length {len(config.word)} is below min-length {spec.min_length}")
    if spec.kind is Kind.TAPE and (config.head is None or not 0 <= config.head <= len(config.word) + 1):
        raise MachineError("tape configuration needs a head position within the tape")


def step(spec: MachineSpec, config: Config) -> StepResult:
    """Apply the first matching rule once."""
    _check_config(spec, config)
    if config.state == spec.halting:
        return Halted(config)
    ex = _forward_executor(spec)
    ex.load(config)
    fired = ex.fire(config.state)
    if fired is None:
        return Stuck(config)
    idx, target = fired
    return Next(ex.config(target), idx)


def reverse_step(spec: MachineSpec, config: Config) -> StepResult:
    """Undo one step; ``reverse_step(spec, step(spec, c).config)`` gives back ``c``."""
    _check_config(spec, config)
    ex = _reverse_executor(spec)
    ex.load(config)
    fired = ex.fire(config.state)
    if fired is None:
        return Stuck(config)
    idx, target = fired
    return Next(ex.config(target), idx)


OutputCallback = Callable[[str, int], None]
StepCallback = Callable[[Config, int], None]


def _drive(spec: MachineSpec, ex: _Executor, start: Config, budget: int, *,
           stop_at: Optional[Config], collect: bool, on_output: Optional[OutputCallback],
           on_step: Optional[StepCallback], max_outputs: Optional[int]) -> RunReport:
    if budget < 1:
        raise ValueError("budget must be at least 1")
    ex.load(start)
    state = start.state
    halting = spec.halting if stop_at is None else None
    all_out = spec.all_outputs
    out_states = spec.outputs
    outputs: list[str] = []
    hist: Counter[int] = Counter()
    count = 0
    steps = 0
    last = -1  # step index of the previous output; the first segment starts at 0
    first = None
    halted = exhausted = False

    if on_step is not None:
        on_step(ex.config(state), 0)
    while True:
        if all_out or state in out_states:
            word = ex.word()
            if collect:
                outputs.append(word)
            if on_output is not None:
                on_output(word, steps)
            hist[steps - last - 1 if first is None else steps - last] += 1
            if first is None:
                first = steps
            last = steps
            count += 1
            if max_outputs is not None and count >= max_outputs:
                break
        if state == halting:
            halted = True
            break
        if stop_at is not None and state == stop_at.state and ex.config(state) == stop_at:
            halted = True
            break
        if steps >= budget:
            exhausted = True
            break
        fired = ex.fire(state)
        if fired is None:
            raise NoRuleApplies(ex.config(state), steps)
        state = fired[1]
        steps += 1
        if on_step is not None:
            on_step(ex.config(state), steps)

    if first is None:
        hist[steps] += 1  # nothing produced: the whole run is one segment
    elif halted and steps > last:
        hist[steps - last] += 1
    return RunReport(length=len(start.word), outputs=outputs, output_count=count, steps=steps,
                     max_delay=max(hist) if hist else 0, halted=halted,
                     budget_exhausted=exhausted, final=ex.config(state),
                     delay_histogram=dict(sorted(hist.items())),
                     first_output_step=first, last_output_step=last if first is not None else None)


def run(spec: MachineSpec, length: int, budget: Optional[int] = None, *,
        collect: bool = True, on_output: Optional[OutputCallback] = None,
        on_step: Optional[StepCallback] = None,
        max_outputs: Optional[int] = None) -> RunReport:
    """Run from the initial configuration until halting or ``budget`` rule applications.

    ``on_output(word, step)`` is called as each word is produced, so callers can
    stream. Raises NoRuleApplies if the table has no rule for a reached configuration.
    """
    start = initial_config(spec, length)
    budget = default_budget(length) if budget is None else budget
    return _drive(spec, _forward_executor(spec), start, budget, stop_at=None, collect=collect,
                  on_output=on_output, on_step=on_step, max_outputs=max_outputs)


def reverse_run(spec: MachineSpec, start: Config, budget: Optional[int] = None, *,
                collect: bool = True, on_output: Optional[OutputCallback] = None,
                on_step: Optional[StepCallback] = None) -> RunReport:
    """Run the inverted rules from ``start`` until the initial configuration comes back.

    From the halting configuration of a forward run this produces the forward
    outputs in reverse order. ``halted`` in the report means the initial
    configuration was reached.
    """
    ex = _reverse_executor(spec)
    _check_config(spec, start)
    length = len(start.word)
    target = initial_config(spec, length)
    budget = default_budget(length) if budget is None else budget
    return _drive(spec, ex, start, budget, stop_at=target, collect=collect,
                  on_output=on_output, on_step=on_step, max_outputs=None)


def trace_visits(spec: MachineSpec, length: int, predicate: Callable[[str, str], bool],
                 budget: Optional[int] = None) -> list[tuple[int, Config]]:
    """Every configuration of the run, in order, whose (state, word) satisfies ``predicate``."""
    hits: list[tuple[int, Config]] = []

    def visit(config: Config, idx: int) -> None:
        if predicate(config.state, config.word):
            hits.append((idx, config))

    run(spec, length, budget, collect=False, on_step=visit)
    return hits
