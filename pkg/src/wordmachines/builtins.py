"""The six bundled enumeration machines.

Each machine is described by a small template over its state parameters
(parity, half-traversal, height modulo 4) and pattern variables. Expanding a
template yields canonical table text; the same text ships as ``tables/NAME.mt``
and ``builtin(NAME)`` parses the bundled file.

Regenerate the bundled files with ``python -m wordmachines.builtins``.
"""

from __future__ import annotations

import sys
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator

from .machine import MachineError, MachineSpec, format_machine_table, parse_machine_table

BUILTIN_NAMES = ("T0", "T1", "T2", "D0", "D1", "D2")
FIXTURE_NAMES = ("toy_stack", "toy_queue")
URI_PREFIX = "builtin:"

PARITIES = ("E", "O")
_FLIP_PARITY = {"E": "O", "O": "E"}
_PARITY_BIT = {"E": "0", "O": "1"}


def _header(**fields: str) -> list[str]:
    return [f"{key.replace('_', '-')}: {value}" for key, value in fields.items()]


# ---------------------------------------------------------------------------
# tape machines


def _t0_lines() -> Iterator[str]:
    yield from _header(name="T0", kind="tape", radius="1", min_length="2",
                       states=" ".join(f"{d}.{p}" for d in ("down", "up") for p in PARITIES),
                       initial="qi", halting="qf", outputs="qi down.E up.O")
    # x ranges over {0,1,>} and y over {0,<}
    xs, ys = (".", ">"), ("0", "<")
    yield "rule qi | >[0]0 -> down.E | =1= | S"
    for p in PARITIES:
        q = _FLIP_PARITY[p]
        for x in xs:
            yield f"rule down.{p} | {x}[1]0 -> down.{q} | =01 | R"
        for x in xs:
            yield f"rule down.{p} | {x}[1]< -> up.{p} | === | S"
        for y in ys:
            yield f"rule up.{p} | 0[1]{y} -> down.{p} | 1== | S"
        for y in ys:
            yield f"rule up.{p} | 1[1]{y} -> up.{q} | =0= | L"
    yield "rule up.E | >[1]0 -> qf | === | S"


def _t1_lines() -> Iterator[str]:
    yield from _header(name="T1", kind="tape", radius="2", min_length="3",
                       initial="qi", halting="qf", outputs="ALL")
    # x in {0,1}, y in {0,<}, z in {0,1,>}
    yield "rule qi | >[0]0 -> down | ==1 | R"
    for z in (".", ">"):
        yield f"rule down | {z}.[1]0 -> down | ===1 | R"
    for z in (".", ">"):
        yield f"rule down | {z}.[1]< -> up | =~== | S"
    for y in ("0", "<"):
        yield f"rule up | .0[1]{y} -> down | ~=== | S"
    yield "rule up | >1[1]0 -> qf | ==0= | L"
    for y in ("0", "<"):
        yield f"rule up | .1[1]{y} -> up | ==0= | L"


def _t2_lines() -> Iterator[str]:
    yield from _header(name="T2", kind="tape", radius="2", min_length="3", head_start="right",
                       initial="qi", halting="qf", outputs="qi down up")
    # x in {0,1}, y in {0,>}, z in {0,1,<}
    yield "rule qi | 0[0]< -> down | =1= | S"
    yield "rule down | 0[1]< -> down | 1== | L"
    for z in (".", "<"):
        yield f"rule down | 0[1].{z} -> down | 1=== | L"
    for z in (".", "<"):
        yield f"rule down | >[1].{z} -> up | ==~= | S"
    yield "rule up | 0[1]0< -> qf | =0== | R"
    for y in ("0", ">"):
        yield f"rule up | {y}[1]0. -> down | ===~ | S"
    for y in ("0", ">"):
        yield f"rule up | {y}[1]1. -> up | =0== | R"


# ---------------------------------------------------------------------------
# deque machines


def _d0_lines() -> Iterator[str]:
    yield from _header(name="D0", kind="deque", radius="1", min_length="3",
                       initial="qi", outputs="qi down.E up.O")
    yield "rule qi | - .. 0 -> down.E | - .. 1"
    for p in PARITIES:
        q = _FLIP_PARITY[p]
        yield f"rule down.{p} | 0 .. - -> down.{q} | - .. 0"
        yield f"rule down.{p} | 1 .. - -> up.{p} | 1 .. -"
        yield f"rule up.{p} | - .. 0 -> down.{p} | - .. 1"
        yield f"rule up.{p} | - .. 1 -> up.{q} | 0 .. -"


_D1_HALVES = ("1st", "2nd", "3rd", "4th")
# (half-traversal, leftmost two bits) -> next state at the bottom of a descent
_D1_TURNS = {
    ("1st", "10"): "up.{p}.1st", ("1st", "11"): "up.{p}.2nd",
    ("2nd", "10"): "up.{p}.3rd", ("2nd", "11"): "up.{p}.2nd",
    ("3rd", "10"): "up.{p}.3rd", ("3rd", "11"): "up.{p}.4th",
    ("4th", "10"): "qf", ("4th", "11"): "up.{p}.4th",
}


def _d1_lines() -> Iterator[str]:
    outputs = ["qi"] + [f"{d}.{p}.{s}" for s in _D1_HALVES for d, p in (("down", "E"), ("up", "O"))]
    yield from _header(name="D1", kind="deque", radius="2", min_length="3",
                       initial="qi", halting="qf", outputs=" ".join(outputs))
    # the parity in the state is mirrored by the rightmost bit: E is 0, O is 1
    yield "rule qi | 0 .. 0 -> up.E.1st | 1 .. 0"
    for s in _D1_HALVES:
        for p in PARITIES:
            q, b, c = _FLIP_PARITY[p], _PARITY_BIT[p], _PARITY_BIT[_FLIP_PARITY[p]]
            yield f"rule down.{p}.{s} | 0 .. {b} -> down.{q}.{s} | - .. 0 {c}"
            for pair in ("10", "11"):
                target = _D1_TURNS[(s, pair)].format(p=p)
                yield f"rule down.{p}.{s} | {pair} .. {b} -> {target} | {pair[0]} {pair[1]} .. {b}"
            yield f"rule up.{p}.{s} | - .. 1{b} -> up.{q}.{s} | 0 .. {c}"
            yield f"rule up.{p}.{s} | - .. 0{b} -> down.{p}.{s} | - .. 1 {b}"


_D2_HALVES = ("1st", "2nd", "last")


def _d2(phase: str, h: int, s: str) -> str:
    return f"{phase}.h{h % 4}.{s}"


def _d2_lines() -> Iterator[str]:
    outputs = [_d2(phase, h, s) for s in _D2_HALVES
               for phase, h in (("down0", 0), ("up1", 1), ("down2", 2), ("up3", 3))]
    outputs += [f"special.h{h}" for h in range(4)]
    # special.h3 is an output state with no rule into it
    yield from _header(name="D2", kind="deque", radius="2", min_length="3",
                       states="special.h3", initial="qi", halting="qf", outputs=" ".join(outputs))
    yield f"rule qi | 0 .. - -> {_d2('up3', 0, '1st')} | 1 .. -"
    for s in _D2_HALVES:
        for h in range(4):
            # lookahead at the bottom of the leftmost branches; listed before the
            # generic descent rules so they take priority
            if s == "1st":
                yield f"rule {_d2('down0', h, s)} | 11 .. - -> {_d2('up1', h, '2nd')} | 1 1 .. -"
            if s == "2nd":
                yield f"rule {_d2('down0', h, s)} | 10 .. - -> {_d2('up1', h, 'last')} | 1 0 .. -"
            for i in (0, 2):
                down, up = f"down{i}", f"up{i + 1}"
                yield f"rule {_d2(down, h, s)} | 0 .. - -> {_d2(down, h + 1, s)} | - .. 0"
                if i == 2 and s == "last":
                    yield f"rule {_d2(down, h, s)} | 1 .. - -> qf | 0 .. -"
                else:
                    yield f"rule {_d2(down, h, s)} | 1 .. - -> {_d2(up, h, s)} | 1 .. -"
            yield f"rule {_d2('up1', h, s)} | - .. 0 -> {_d2('up1', h - 1, s)} | 0 .. -"
            if s != "last":
                yield f"rule {_d2('up1', h, s)} | - .. 1 -> {_d2('down2', h, s)} | - .. 1"
            elif h != 3:
                yield f"rule {_d2('up1', h, s)} | - .. 1 -> special.h{h} | - .. 0"
            else:
                yield f"rule {_d2('up1', h, s)} | - .. 1 -> {_d2('down2', h - 1, s)} | - .. 1"
            yield f"rule {_d2('up3', h, s)} | - .. 1 -> {_d2('up3', h - 1, s)} | 0 .. -"
            yield f"rule {_d2('up3', h, s)} | - .. 0 -> {_d2('down0', h, s)} | - .. 1"
    for h in range(3):
        yield f"rule special.h{h} | - .. 0 -> {_d2('down2', h - 1, 'last')} | - .. 1"


# ---------------------------------------------------------------------------
# fixtures for the queue and stack coverage illustrations


def _toy_stack_lines() -> Iterator[str]:
    yield "# Illustration only: a 3-state stack machine used by coverage reports."
    yield "# It cannot visit every word of length 5; no stack machine with k states"
    yield "# visits every word of length k + 2."
    yield from _header(name="toy_stack", kind="stack", radius="1", min_length="1",
                       initial="a", outputs="ALL")
    yield "rule a | 0 -> b | pop"
    yield "rule a | 1 -> a | push0"
    yield "rule a | @ -> b | push1"
    yield "rule b | 0 -> c | push1"
    yield "rule b | 1 -> a | push1"
    yield "rule b | @ -> c | push0"
    yield "rule c | 0 -> a | pop"
    yield "rule c | 1 -> b | pop"
    yield "rule c | @ -> a | push1"


def _toy_queue_lines() -> Iterator[str]:
    yield "# Illustration only: a small queue machine used by coverage reports."
    yield "# It misses words; no queue machine visits every word and halts."
    yield from _header(name="toy_queue", kind="queue", radius="2", min_length="2",
                       initial="a", halting="h", outputs="ALL")
    yield "rule a | 00 -> b | 1"
    yield "rule a | 01 -> a | 10"
    yield "rule a | 10 -> b | 0"
    yield "rule a | 11 -> h | -"
    yield "rule b | 00 -> a | 01"
    yield "rule b | 01 -> b | 1"
    yield "rule b | 10 -> a | 11"
    yield "rule b | 11 -> a | 0"


_GENERATORS: dict[str, Callable[[], Iterator[str]]] = {
    "T0": _t0_lines, "T1": _t1_lines, "T2": _t2_lines,
    "D0": _d0_lines, "D1": _d1_lines, "D2": _d2_lines,
    "toy_stack": _toy_stack_lines, "toy_queue": _toy_queue_lines,
}


def expand_template(name: str) -> MachineSpec:
    """Expand the named template into a spec without touching the bundled files."""
    if name not in _GENERATORS:
        raise MachineError(f"unknown builtin machine {name!r}; choose from {', '.join(_GENERATORS)}")
    return parse_machine_table("\n".join(_GENERATORS[name]()), name=name)


def render_table(name: str) -> str:
    """Canonical bundled-file text for a builtin."""
    spec = expand_template(name)
    comments = [line[2:] for line in _GENERATORS[name]() if line.startswith("# ")]
    return format_machine_table(spec, comments or [f"{name}: generated by wordmachines.builtins"])


def _bundled_text(name: str) -> str:
    return resources.files(__package__).joinpath("tables", f"{name}.mt").read_text(encoding="utf-8")


def builtin(name: str) -> MachineSpec:
    """Parse the bundled table for ``name`` (T0, T1, T2, D0, D1, D2 or a fixture)."""
    return _parse_bundled(name.removeprefix(URI_PREFIX))


@lru_cache(maxsize=None)
def _parse_bundled(name: str) -> MachineSpec:
    if name not in _GENERATORS:
        raise MachineError(f"unknown builtin machine {name!r}; choose from {', '.join(_GENERATORS)}")
    return parse_machine_table(_bundled_text(name), name=name)


def load_machine(source: str) -> MachineSpec:
    """Load ``builtin:NAME`` or a table file path."""
    if source.startswith(URI_PREFIX):
        return builtin(source)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MachineError(f"cannot read {source}: {exc.strerror}") from None
    return parse_machine_table(text, name=path.stem)


def write_tables(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in _GENERATORS:
        path = directory / f"{name}.mt"
        path.write_text(render_table(name), encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("tables")
    for p in write_tables(target):
        print(p)
