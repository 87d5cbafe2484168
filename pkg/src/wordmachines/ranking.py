"""Rank and unrank for the Hamming-1 tape machine's order, and a machine-backed counter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .builtins import builtin
from .engine import (Config, ReverseUnsupported, initial_config, inverse_rules,
                     _forward_executor, _reverse_executor)
from .machine import Kind, MachineError, MachineSpec


def _check_word(word: str) -> None:
    if len(word) < 2 or set(word) - {"0", "1"}:
        raise ValueError(f"expected a binary word of length at least 2, got {word!r}")


def correct(u: str) -> str:
    """Complement each bit that follows an odd number of zeros."""
    out, zeros = [], 0
    for a in u:
        out.append(a if zeros % 2 == 0 else "10"[int(a)])
        zeros += a == "0"
    return "".join(out)


def uncorrect(v: str) -> str:
    """Inverse of :func:`correct`."""
    out, zeros = [], 0
    for b in v:
        a = b if zeros % 2 == 0 else "10"[int(b)]
        out.append(a)
        zeros += a == "0"
    return "".join(out)


def rank_t1(word: str) -> int:
    """0-based position of ``word`` in the Hamming-1 tape machine's order."""
    _check_word(word)
    n = len(word)
    if "1" not in word:
        return 0
    if word == "1" + "0" * (n - 1):
        return 2 ** n - 1
    u = word[:word.rindex("1")]
    v = correct(u)
    m = len(u)
    total = m + sum((2 ** (n - i) - 2) for i in range(1, m) if v[i - 1] == "1")
    if v[m - 1] == "1":
        total += 2 ** (n + 1 - m) - 3
    return total


def _corrected_word(n: int, length: int) -> str:
    bits = []
    while True:
        half = 2 ** (length - 1)
        if n == 1:
            bits.append("0")
            return "".join(bits)
        if n == 2 ** length - 2:
            bits.append("1")
            return "".join(bits)
        if n < half:
            bits.append("0")
            n -= 1
        else:
            bits.append("1")
            n -= half - 1
        length -= 1


def unrank_t1(n: int, length: int) -> str:
    """Word at 0-based position ``n`` of the Hamming-1 tape machine's order."""
    if length < 2:
        raise ValueError("length must be at least 2")
    if not 0 <= n < 2 ** length:
        raise ValueError(f"rank {n} out of range for length {length}")
    if n == 0:
        return "0" * length
    if n == 2 ** length - 1:
        return "1" + "0" * (length - 1)
    u = uncorrect(_corrected_word(n, length))
    return u + "1" + "0" * (length - len(u) - 1)


class CounterOverflow(ArithmeticError):
    pass


class CounterUnderflow(ArithmeticError):
    pass


@dataclass
class Counter:
    """A binary counter whose value is the machine's current output word.

    Increment runs the machine to its next output configuration; decrement
    runs the inverted rules back to the previous one. The state between calls
    is a single configuration.
    """

    spec: MachineSpec
    config: Config
    index: int = 0
    last_cost: Optional[int] = None  # rule applications used by the latest operation

    @classmethod
    def new(cls, machine: str | MachineSpec, length: int) -> "Counter":
        spec = builtin(machine) if isinstance(machine, str) else machine
        if spec.kind is not Kind.TAPE and spec.kind is not Kind.DEQUE:
            raise MachineError(f"{spec.kind.value} machines cannot back a counter")
        counter = cls(spec, initial_config(spec, length))
        if not spec.is_output(spec.initial):
            counter._advance(forward=True)
            counter.index = 0
        return counter

    @property
    def value(self) -> str:
        return self.config.word

    @property
    def length(self) -> int:
        return len(self.config.word)

    def _advance(self, forward: bool) -> int:
        spec = self.spec
        ex = _forward_executor(spec) if forward else _reverse_executor(spec)
        ex.load(self.config)
        state = self.config.state
        start = initial_config(spec, self.length)
        steps = 0
        while True:
            if forward and state == spec.halting:
                raise CounterOverflow(f"counter overflow at {self.value}")
            if not forward and state == start.state and ex.config(state) == start:
                raise CounterUnderflow(f"counter underflow at {self.value}")
            fired = ex.fire(state)
            if fired is None:
                raise MachineError(f"no rule applies to {ex.config(state).render()}")
            state = fired[1]
            steps += 1
            if spec.is_output(state):
                self.config = ex.config(state)
                self.index += 1 if forward else -1
                return steps

    def increment(self) -> str:
        """Advance to the next word; the counter is unchanged if it overflows."""
        saved = (self.config, self.index)
        try:
            self.last_cost = self._advance(forward=True)
        except CounterOverflow:
            self.config, self.index = saved
            raise
        return self.value

    def decrement(self) -> str:
        """Step back to the previous word; the counter is unchanged if it underflows."""
        if self.spec.kind is Kind.DEQUE:
            raise ReverseUnsupported(
                "deque counters only increment: a reversible deque counter is only known "
                "while the value stays positive")
        inverse_rules(self.spec)  # raises for non-injective tables
        saved = (self.config, self.index)
        try:
            self.last_cost = self._advance(forward=False)
        except CounterUnderflow:
            self.config, self.index = saved
            raise
        return self.value


def counter_new(name: str, length: int) -> Counter:
    """Counter backed by a reversible tape machine (T0, T1 or T2)."""
    spec = builtin(name)
    if spec.kind is Kind.TAPE:
        inverse_rules(spec)
    return Counter.new(spec, length)


def counter_increment(handle: Counter) -> str:
    return handle.increment()


def counter_decrement(handle: Counter) -> str:
    return handle.decrement()
