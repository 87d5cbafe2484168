"""Machine tables: rule types, the text format, and static lint checks.

Four machine kinds share one line-oriented table format::

    kind: tape
    radius: 2
    min-length: 3
    initial: qi
    halting: qf
    outputs: ALL
    rule qi | >[0]0 -> down | ==1 | R

Rules are tried in file order and the first one that matches fires.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union


class Kind(str, Enum):
    TAPE = "tape"
    DEQUE = "deque"
    QUEUE = "queue"
    STACK = "stack"


class MachineError(ValueError):
    """A table that cannot be parsed or violates a rule-shape invariant."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.reason = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


_STATE_RE = re.compile(r"[^\s|#]+")
_MOVES = {"L": -1, "S": 0, "R": 1}
_MOVE_NAMES = {v: k for k, v in _MOVES.items()}


@dataclass(frozen=True)
class TapeRule:
    source: str
    pattern: tuple[str, ...]  # tokens from 0 1 . > <
    head: int  # index of the head cell inside ``pattern``
    target: str
    replacement: tuple[str, ...]  # tokens from 0 1 = ~
    move: int  # -1, 0 or +1

    def cells(self) -> dict[int, str]:
        return {i - self.head: tok for i, tok in enumerate(self.pattern)}


@dataclass(frozen=True)
class DequeRule:
    """Rewrite a window at each end of the word.

    Windows are written in reading order. Replacement tokens ``$Lk``/``$Rk``
    copy and ``~Lk``/``~Rk`` flip the k-th matched cell of a window, counting
    from the outer end (``L1`` is the leftmost bit, ``R1`` the rightmost).
    """

    source: str
    left: tuple[str, ...]
    right: tuple[str, ...]
    target: str
    left_repl: tuple[str, ...]
    right_repl: tuple[str, ...]


@dataclass(frozen=True)
class QueueRule:
    source: str
    right: tuple[str, ...]
    target: str
    push: str  # pushed on the left; the same number of bits is popped on the right


@dataclass(frozen=True)
class StackRule:
    source: str
    top: str  # "0", "1" or "@" (empty stack)
    target: str
    action: str  # "pop", "push0" or "push1"


Rule = Union[TapeRule, DequeRule, QueueRule, StackRule]
_RULE_TYPES = {Kind.TAPE: TapeRule, Kind.DEQUE: DequeRule, Kind.QUEUE: QueueRule, Kind.STACK: StackRule}


@dataclass(frozen=True)
class MachineSpec:
    kind: Kind
    initial: str
    halting: str | None
    outputs: frozenset[str]
    rules: tuple[Rule, ...]
    min_length: int
    radius: int
    all_outputs: bool = False
    declared_states: frozenset[str] = frozenset()
    head_start: str = "left"  # tape only: "left" puts the head on cell 1, "right" on cell ℓ
    name: str | None = field(default=None, compare=False)

    @property
    def states(self) -> frozenset[str]:
        found = set(self.declared_states)
        found.add(self.initial)
        if self.halting is not None:
            found.add(self.halting)
        for r in self.rules:
            found.add(r.source)
            found.add(r.target)
        return frozenset(found)

    def is_output(self, state: str) -> bool:
        return self.all_outputs or state in self.outputs

    @property
    def output_states(self) -> frozenset[str]:
        return self.states if self.all_outputs else self.outputs

    @property
    def label(self) -> str:
        return self.name or f"<{self.kind.value} machine>"


# ---------------------------------------------------------------------------
# parsing

_HEADER_KEYS = ("name", "kind", "radius", "min-length", "head-start", "states",
                "initial", "halting", "outputs")
_REQUIRED = ("kind", "radius", "min-length", "initial", "outputs")
_REPL_TOKEN = re.compile(r"\$[LR]\d+|~[LR]\d+|[01]")


def _state(tok: str, lineno: int) -> str:
    if not _STATE_RE.fullmatch(tok):
        raise MachineError(f"invalid state name {tok!r}", lineno)
    return tok


def _split_tokens(text: str, alphabet: str, lineno: int, what: str) -> tuple[str, ...]:
    text = "".join(text.split())
    if text == "-":
        return ()
    for ch in text:
        if ch not in alphabet:
            raise MachineError(f"invalid symbol {ch!r} in {what}", lineno)
    return tuple(text)


def _parse_tape_pattern(text: str, lineno: int) -> tuple[tuple[str, ...], int]:
    text = "".join(text.split())
    if text.count("[") != 1 or text.count("]") != 1:
        raise MachineError("tape pattern needs exactly one [head] cell", lineno)
    m = re.fullmatch(r"([01.<>]*)\[([01.<>])\]([01.<>]*)", text)
    if not m:
        raise MachineError(f"malformed tape pattern {text!r}", lineno)
    cells = tuple(m.group(1) + m.group(2) + m.group(3))
    return cells, len(m.group(1))


def _parse_repl(text: str, lineno: int) -> tuple[str, ...]:
    text = "".join(text.split())
    if text == "-":
        return ()
    tokens = _REPL_TOKEN.findall(text)
    if "".join(tokens) != text:
        raise MachineError(f"malformed replacement {text!r}", lineno)
    return tuple(tokens)


def _parse_rule(kind: Kind, body: str, lineno: int) -> Rule:
    m = re.fullmatch(r"\s*(\S+)\s*\|(.*?)->\s*(\S+)\s*(?:\|(.*))?", body)
    if not m:
        raise MachineError("expected 'rule <state> | <pattern> -> <state> | <effect>'", lineno)
    source, pattern, target, effect = m.group(1), m.group(2).strip(), m.group(3), m.group(4)
    source, target = _state(source, lineno), _state(target, lineno)
    if effect is None:
        raise MachineError("missing effect after target state", lineno)
    effect = effect.strip()

    if kind is Kind.TAPE:
        parts = [p.strip() for p in effect.split("|")]
        if len(parts) != 2:
            raise MachineError("tape rule needs '<replacement> | <L|S|R>'", lineno)
        cells, head = _parse_tape_pattern(pattern, lineno)
        repl = _split_tokens(parts[0], "01=~", lineno, "replacement")
        if parts[1] not in _MOVES:
            raise MachineError(f"move must be L, S or R, not {parts[1]!r}", lineno)
        return TapeRule(source, cells, head, target, repl, _MOVES[parts[1]])

    if kind is Kind.DEQUE:
        if ".." not in pattern or ".." not in effect:
            raise MachineError("deque rule sides are separated by '..'", lineno)
        lp, rp = pattern.split("..", 1)
        lr, rr = effect.split("..", 1)
        return DequeRule(source, _split_tokens(lp, "01.", lineno, "left window"),
                         _split_tokens(rp, "01.", lineno, "right window"), target,
                         _parse_repl(lr, lineno), _parse_repl(rr, lineno))

    if kind is Kind.QUEUE:
        right = _split_tokens(pattern, "01.", lineno, "right window")
        push = "".join(_split_tokens(effect, "01", lineno, "pushed word"))
        return QueueRule(source, right, target, push)

    top = pattern.strip()
    if top not in ("0", "1", "@"):
        raise MachineError(f"stack rule reads 0, 1 or @, not {top!r}", lineno)
    if effect not in ("pop", "push0", "push1"):
        raise MachineError(f"stack action must be pop, push0 or push1, not {effect!r}", lineno)
    return StackRule(source, top, target, effect)


def parse_machine_table(text: str, name: str | None = None) -> MachineSpec:
    """Parse and validate a machine table."""
    header: dict[str, tuple[str, int]] = {}
    rule_lines: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("rule ") or line == "rule":
            rule_lines.append((line[4:], lineno))
            continue
        m = re.fullmatch(r"([a-z][a-z-]*)\s*:\s*(.*)", line)
        if not m:
            raise MachineError(f"unrecognised line {line!r}", lineno)
        key, value = m.group(1), m.group(2).strip()
        if key not in _HEADER_KEYS:
            raise MachineError(f"unknown header key {key!r}", lineno)
        if key in header:
            raise MachineError(f"duplicate header key {key!r}", lineno)
        header[key] = (value, lineno)

    for key in _REQUIRED:
        if key not in header:
            raise MachineError(f"missing header key {key!r}")
    kind_text, kline = header["kind"]
    try:
        kind = Kind(kind_text)
    except ValueError:
        raise MachineError(f"unknown machine kind {kind_text!r}", kline) from None

    def integer(key: str) -> int:
        value, ln = header[key]
        if not re.fullmatch(r"\d+", value) or int(value) < 1:
            raise MachineError(f"{key} must be a positive integer", ln)
        return int(value)

    radius = integer("radius")
    min_length = integer("min-length")
    initial = _state(*header["initial"])
    halting = _state(*header["halting"]) if "halting" in header else None
    out_text, out_line = header["outputs"]
    all_outputs = out_text == "ALL"
    outputs = frozenset() if all_outputs else frozenset(_state(t, out_line) for t in out_text.split())
    declared = frozenset(_state(t, header["states"][1]) for t in header["states"][0].split()) \
        if "states" in header else frozenset()
    head_start = header["head-start"][0] if "head-start" in header else "left"
    if head_start not in ("left", "right"):
        raise MachineError("head-start must be 'left' or 'right'", header["head-start"][1])
    if head_start != "left" and kind is not Kind.TAPE:
        raise MachineError("head-start only applies to tape machines", header["head-start"][1])

    rules = []
    for body, lineno in rule_lines:
        rule = _parse_rule(kind, body, lineno)
        _check_rule(kind, rule, radius, min_length, halting, lineno)
        rules.append(rule)
    if not rules:
        raise MachineError("no rules")

    spec = MachineSpec(kind=kind, initial=initial, halting=halting, outputs=outputs,
                       rules=tuple(rules), min_length=min_length, radius=radius,
                       all_outputs=all_outputs, declared_states=declared,
                       head_start=head_start,
                       name=name or (header["name"][0] if "name" in header else None))
    known = spec.states
    mentioned = [(initial, "initial")] + ([(halting, "halting")] if halting else []) \
        + [(s, "outputs") for s in sorted(outputs)]
    rule_states = {r.source for r in rules} | {r.target for r in rules} | declared
    for st, key in mentioned:
        if st not in rule_states:
            raise MachineError(f"{key} state {st!r} appears in no rule and is not declared",
                               header[key][1])
    assert known  # states is never empty once rules exist
    return spec


def _check_repl_index(tok: str, left: int, right: int, lineno: int) -> None:
    if tok in ("0", "1"):
        return
    side, k = tok[1], int(tok[2:])
    width = left if side == "L" else right
    if not 1 <= k <= width:
        raise MachineError(f"{tok} refers outside the matched {side} window", lineno)


def _check_rule(kind: Kind, rule: Rule, radius: int, min_length: int,
                halting: str | None, lineno: int) -> None:
    if halting is not None and rule.source == halting:
        raise MachineError("no rule may leave the halting state", lineno)
    if isinstance(rule, TapeRule):
        cells, n = rule.pattern, len(rule.pattern)
        if len(rule.replacement) != n:
            raise MachineError("replacement length differs from pattern length", lineno)
        for i, tok in enumerate(cells):
            if tok == ">" and i != 0:
                raise MachineError("left marker may only be the leftmost cell", lineno)
            if tok == "<" and i != n - 1:
                raise MachineError("right marker may only be the rightmost cell", lineno)
            if tok in "<>" and rule.replacement[i] != "=":
                raise MachineError("marker cells must be kept with '='", lineno)
        if max(rule.head, n - 1 - rule.head) > radius:
            raise MachineError("pattern extends beyond the declared radius", lineno)
    elif isinstance(rule, DequeRule):
        nl, nr = len(rule.left), len(rule.right)
        if len(rule.left_repl) + len(rule.right_repl) != nl + nr:
            raise MachineError("length not preserved", lineno)
        for tok in rule.left_repl + rule.right_repl:
            _check_repl_index(tok, nl, nr, lineno)
        if max(nl, nr) > radius:
            raise MachineError("window wider than the declared radius", lineno)
        if nl + nr > min_length:
            raise MachineError("windows overlap below min-length", lineno)
    elif isinstance(rule, QueueRule):
        if len(rule.right) != radius:
            raise MachineError("queue rules read exactly radius bits", lineno)
        if len(rule.push) > radius:
            raise MachineError("cannot push more bits than are read", lineno)
        if radius > min_length:
            raise MachineError("radius exceeds min-length", lineno)


# ---------------------------------------------------------------------------
# serialisation


def _format_rule(rule: Rule) -> str:
    if isinstance(rule, TapeRule):
        pat = "".join(f"[{t}]" if i == rule.head else t for i, t in enumerate(rule.pattern))
        return (f"rule {rule.source} | {pat} -> {rule.target} | "
                f"{''.join(rule.replacement)} | {_MOVE_NAMES[rule.move]}")
    if isinstance(rule, DequeRule):
        def side(tokens: tuple[str, ...], sep: str) -> str:
            return sep.join(tokens) if tokens else "-"
        return (f"rule {rule.source} | {side(rule.left, '')} .. {side(rule.right, '')} -> "
                f"{rule.target} | {side(rule.left_repl, ' ')} .. {side(rule.right_repl, ' ')}")
    if isinstance(rule, QueueRule):
        return f"rule {rule.source} | {''.join(rule.right)} -> {rule.target} | {rule.push or '-'}"
    return f"rule {rule.source} | {rule.top} -> {rule.target} | {rule.action}"


def format_machine_table(spec: MachineSpec, comments: Iterable[str] = ()) -> str:
    """Serialise ``spec`` in canonical form; ``parse_machine_table`` inverts it."""
    lines = [f"# {c}" if c else "#" for c in comments]
    if spec.name:
        lines.append(f"name: {spec.name}")
    lines.append(f"kind: {spec.kind.value}")
    lines.append(f"radius: {spec.radius}")
    lines.append(f"min-length: {spec.min_length}")
    if spec.head_start != "left":
        lines.append(f"head-start: {spec.head_start}")
    if spec.declared_states:
        lines.append(f"states: {' '.join(sorted(spec.declared_states))}")
    lines.append(f"initial: {spec.initial}")
    if spec.halting is not None:
        lines.append(f"halting: {spec.halting}")
    lines.append("outputs: ALL" if spec.all_outputs else f"outputs: {' '.join(sorted(spec.outputs))}")
    lines.extend(_format_rule(r) for r in spec.rules)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pattern algebra shared by lint and reversal

def _token_compatible(a: str, b: str) -> bool:
    if a == b:
        return True
    return (a == "." and b in "01") or (b == "." and a in "01")


def _token_covers(general: str, specific: str) -> bool:
    return general == specific or (general == "." and specific in "01.")


def _tape_compatible(a: dict[int, str], b: dict[int, str], min_length: int) -> bool:
    for off in a.keys() & b.keys():
        if not _token_compatible(a[off], b[off]):
            return False
    lefts = {off for cells in (a, b) for off, t in cells.items() if t == ">"}
    rights = {off for cells in (a, b) for off, t in cells.items() if t == "<"}
    if len(lefts) > 1 or len(rights) > 1:
        return False
    offsets = a.keys() | b.keys()
    if lefts and min(offsets) < min(lefts):
        return False
    if rights and max(offsets) > max(rights):
        return False
    if lefts and rights and max(rights) - min(lefts) - 1 < min_length:
        return False
    return True


def _side_compatible(a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    return all(_token_compatible(x, y) for x, y in zip(a, b))


def _side_covers(general: tuple[str, ...], specific: tuple[str, ...]) -> bool:
    return len(general) <= len(specific) and all(
        _token_covers(g, s) for g, s in zip(general, specific))


def _rev(t: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(reversed(t))


def _window(rule: Rule):
    """Matching window in a kind-specific comparable form."""
    if isinstance(rule, TapeRule):
        return rule.cells()
    if isinstance(rule, DequeRule):
        return (rule.left, _rev(rule.right))  # both read from the outer end inward
    if isinstance(rule, QueueRule):
        return ((), _rev(rule.right))
    return rule.top


def windows_compatible(spec: MachineSpec, a: Rule, b: Rule) -> bool:
    """True if some configuration is matched by both rule windows."""
    wa, wb = _window(a), _window(b)
    if spec.kind is Kind.TAPE:
        if not (_tape_compatible(wa, {}, spec.min_length) and _tape_compatible(wb, {}, spec.min_length)):
            return False
        return _tape_compatible(wa, wb, spec.min_length)
    if spec.kind is Kind.STACK:
        return wa == wb
    return _side_compatible(wa[0], wb[0]) and _side_compatible(wa[1], wb[1])


def window_covers(spec: MachineSpec, general: Rule, specific: Rule) -> bool:
    """True if every configuration matched by ``specific`` is matched by ``general``."""
    wg, ws = _window(general), _window(specific)
    if spec.kind is Kind.TAPE:
        return all(off in ws and _token_covers(t, ws[off]) for off, t in wg.items())
    if spec.kind is Kind.STACK:
        return wg == ws
    return _side_covers(wg[0], ws[0]) and _side_covers(wg[1], ws[1])


def _effect(rule: Rule):
    if isinstance(rule, TapeRule):
        return (rule.target, rule.replacement, rule.move)
    if isinstance(rule, DequeRule):
        return (rule.target, rule.left_repl, rule.right_repl)
    if isinstance(rule, QueueRule):
        return (rule.target, rule.push)
    return (rule.target, rule.action)


# ---------------------------------------------------------------------------
# inversion

class NotInvertible(Exception):
    pass


def _flip(tok: str) -> str:
    return {"0": "1", "1": "0"}.get(tok, tok)


def invert_rule(rule: Rule) -> Rule:
    """Return the rule that undoes ``rule``, or raise NotInvertible if it loses information."""
    if isinstance(rule, TapeRule):
        image, back = [], []
        for tok, rep in zip(rule.pattern, rule.replacement):
            if rep == "=":
                image.append(tok)
                back.append("=")
            elif rep == "~":
                image.append(_flip(tok))
                back.append("~")
            else:
                if tok == ".":
                    raise NotInvertible("overwrites a wildcard cell")
                image.append(rep)
                back.append(tok)
        new_head = rule.head + rule.move
        if not 0 <= new_head < len(rule.pattern):
            raise NotInvertible("head leaves the matched window")
        return TapeRule(rule.target, tuple(image), new_head, rule.source, tuple(back), -rule.move)

    if isinstance(rule, DequeRule):
        src = {"L": rule.left, "R": _rev(rule.right)}  # outer-end indexing

        def image_token(tok: str) -> str:
            if tok in ("0", "1"):
                return tok
            cell = src[tok[1]][int(tok[2:]) - 1]
            return _flip(cell) if tok[0] == "~" else cell

        img_left = tuple(image_token(t) for t in rule.left_repl)
        img_right = tuple(image_token(t) for t in rule.right_repl)
        # where each source cell can be recovered from in the image
        recover: dict[tuple[str, int], str] = {}
        for side, repl in (("L", rule.left_repl), ("R", _rev(rule.right_repl))):
            for k, tok in enumerate(repl, start=1):
                if tok not in ("0", "1"):
                    op = "$" if tok[0] == "$" else "~"
                    recover.setdefault((tok[1], int(tok[2:])), f"{op}{side}{k}")

        def back(side: str, cells: tuple[str, ...]) -> list[str]:
            out = []
            for k, tok in enumerate(cells, start=1):
                if tok in ("0", "1"):
                    out.append(tok)
                elif (side, k) in recover:
                    out.append(recover[(side, k)])
                else:
                    raise NotInvertible("discards a wildcard cell")
            return out

        left_back = tuple(back("L", rule.left))
        right_back = tuple(reversed(back("R", _rev(rule.right))))
        return DequeRule(rule.target, img_left, img_right, rule.source, left_back, right_back)

    raise NotInvertible(f"{type(rule).__name__} cannot be reversed")


# ---------------------------------------------------------------------------
# lint

@dataclass(frozen=True)
class Finding:
    category: str  # shadowed | conflicting | duplicate | unreachable | non-injective
    message: str
    rules: tuple[int, ...] = ()

    @property
    def is_shadowing(self) -> bool:
        """A later rule can never fire because an earlier one always matches first."""
        return self.category in ("shadowed", "conflicting", "duplicate")


def injectivity_findings(spec: MachineSpec) -> list[Finding]:
    """Pairs of rules that can lead to the same configuration (empty iff reversible)."""
    if spec.kind in (Kind.QUEUE, Kind.STACK):
        return [Finding("non-injective", f"{spec.kind.value} machines are not reversible")]
    findings = []
    inverses: list[Rule | None] = []
    for i, rule in enumerate(spec.rules):
        try:
            inverses.append(invert_rule(rule))
        except NotInvertible as exc:
            inverses.append(None)
            findings.append(Finding("non-injective", f"rule {i} {exc}", (i,)))
    for i, a in enumerate(inverses):
        if a is None:
            continue
        for j in range(i + 1, len(inverses)):
            b = inverses[j]
            if b is not None and a.source == b.source and windows_compatible(spec, a, b):
                findings.append(Finding(
                    "non-injective",
                    f"rules {i} and {j} both lead to state {a.source!r} with overlapping windows",
                    (i, j)))
    return findings


def is_injective(spec: MachineSpec) -> bool:
    return not injectivity_findings(spec)


def validate_machine(spec: MachineSpec) -> list[Finding]:
    """Static findings: shadowed or conflicting rules, unreachable states, non-injectivity."""
    findings: list[Finding] = []
    rules = spec.rules
    for j, later in enumerate(rules):
        for i in range(j):
            earlier = rules[i]
            if earlier.source != later.source or not window_covers(spec, earlier, later):
                continue
            if window_covers(spec, later, earlier):
                if _effect(earlier) == _effect(later):
                    findings.append(Finding("duplicate", f"rule {j} repeats rule {i}", (i, j)))
                else:
                    findings.append(Finding(
                        "conflicting", f"conflicting rules {i} and {j}: same state and pattern, "
                        f"different effect (rule {i} wins)", (i, j)))
            else:
                findings.append(Finding("shadowed", f"rule {j} is shadowed by earlier rule {i}", (i, j)))
            break

    edges: dict[str, set[str]] = {}
    for r in rules:
        edges.setdefault(r.source, set()).add(r.target)
    seen, todo = {spec.initial}, [spec.initial]
    while todo:
        for nxt in edges.get(todo.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    for st in sorted(spec.states - seen):
        findings.append(Finding("unreachable", f"state {st!r} is unreachable from {spec.initial!r}"))

    findings.extend(injectivity_findings(spec))
    return findings
