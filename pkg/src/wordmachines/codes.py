"""Machine-free reference codes used as oracles.

A code is a list of equal-length bit strings, written leftmost bit first.
"""

from __future__ import annotations

from typing import Iterator, Sequence

Code = list[str]


def _check_width(length: int) -> None:
    if length < 1:
        raise ValueError(f"word length must be at least 1, got {length}")


def rbgc(length: int) -> Code:
    """Reflected binary Gray code built by its flip rule.

    Odd steps flip the rightmost bit; even steps flip the bit just left of
    the rightmost 1.
    """
    _check_width(length)
    bits = [0] * length
    words = ["0" * length]
    for step in range(1, 2 ** length):
        if step % 2:
            pos = length - 1
        else:
            pos = max(i for i, b in enumerate(bits) if b) - 1
        bits[pos] ^= 1
        words.append("".join(map(str, bits)))
    return words


def mirror(word: str) -> str:
    return word[::-1]


def code_A(length: int) -> Code:
    """The 3-skew-tolerant code: prepend 0^ℓ, then A·1, then reversed tail of A·0."""
    _check_width(length)
    code = ["0", "1"]
    for _ in range(length - 1):
        code = (["0" * (len(code[0]) + 1)]
                + [w + "1" for w in code]
                + [w + "0" for w in reversed(code[1:])])
    return code


def code_B(length: int) -> Code:
    """The order in which the Hamming-1 tape machine visits words."""
    _check_width(length)
    code = ["0", "1"]
    for _ in range(length - 1):
        tail = code[1:]
        width = len(code[0])
        code = (["0" * (width + 1)]
                + ["0" + w for w in reversed(tail)]
                + ["1" + w for w in tail]
                + ["1" + "0" * width])
    return code


def b_from_a(a: Sequence[str]) -> Code:
    """Map code A to code B: keep 0^ℓ first, then the mirrored words of A's tail in reverse."""
    if not a:
        raise ValueError("empty code")
    width = len(a[0])
    if any(len(w) != width for w in a):
        raise ValueError("width mismatch: all words must have the same length")
    return ["0" * width] + [mirror(w) for w in reversed(a[1:])]


def lyndon_words(length: int) -> Iterator[str]:
    """Binary Lyndon words of length at most ``length`` in lexicographic order (Duval)."""
    w = [-1]
    while w:
        w[-1] += 1
        yield "".join(map(str, w))
        m = len(w)
        while len(w) < length:
            w.append(w[len(w) - m])
        while w and w[-1] == 1:
            w.pop()


def de_bruijn(length: int) -> str:
    """Lexicographically least binary de Bruijn sequence of order ``length``."""
    _check_width(length)
    return "".join(w for w in lyndon_words(length) if length % len(w) == 0)


def universal_word(length: int) -> str:
    """A word of 2^ℓ + ℓ - 1 bits containing every ℓ-bit word exactly once as a factor."""
    cyc = de_bruijn(length)
    return cyc + cyc[:length - 1]


def sliding_code(word: str, length: int) -> Code:
    """All length-ℓ windows of ``word``, left to right."""
    _check_width(length)
    if len(word) < length:
        raise ValueError(f"word of {len(word)} bits has no window of length {length}")
    return [word[i:i + length] for i in range(len(word) - length + 1)]


REFERENCE_CODES = {
    "rbgc": rbgc,
    "A": code_A,
    "B": code_B,
    "universal": lambda length: sliding_code(universal_word(length), length),
}
