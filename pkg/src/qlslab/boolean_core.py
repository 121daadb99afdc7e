"""Boolean problems PARITY, partial OR and PARITY-OR, and their query oracles.

Inputs are ``n`` blocks of ``m`` bits with at most one set bit per block.
Block and bit indices are 1-based throughout, matching the ``[1, n]``
convention used for the clock register elsewhere in the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

DEFAULT_ENUMERATION_CAP = 100_000


class PromiseViolation(ValueError):
    """A block carries more than one set bit."""


class EnumerationCapExceeded(ValueError):
    pass


def _check_bits(bits: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0 or 1, got {tuple(bits)}")
    return out


@dataclass(frozen=True)
class PromiseInput:
    """Bit string ``X = (X_1, ..., X_n)`` of ``n`` blocks with ``m`` bits each."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.blocks) == 0:
            raise ValueError("need at least one block")
        blocks = tuple(_check_bits(b) for b in self.blocks)
        widths = {len(b) for b in blocks}
        if len(widths) != 1 or 0 in widths:
            raise ValueError("all blocks must share the same positive width")
        for t, block in enumerate(blocks, start=1):
            if sum(block) > 1:
                raise PromiseViolation(f"block {t} has {sum(block)} set bits: {block}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks[0])

    def block(self, t: int) -> tuple[int, ...]:
        if not 1 <= t <= self.n:
            raise IndexError(f"block index {t} outside [1, {self.n}]")
        return self.blocks[t - 1]

    def bit(self, t: int, i: int) -> int:
        """``x_{t,i}``, with ``x_{0,i} = 0`` for the padding block."""
        if not 1 <= i <= self.m:
            raise IndexError(f"bit index {i} outside [1, {self.m}]")
        if t == 0:
            return 0
        return self.block(t)[i - 1]

    def flat(self) -> tuple[int, ...]:
        return tuple(b for block in self.blocks for b in block)

    def label(self) -> str:
        """Compact text form, blocks separated by commas (``"010,000"``)."""
        return ",".join("".join(str(b) for b in block) for block in self.blocks)

    @classmethod
    def parse(cls, text: str, m: Optional[int] = None) -> "PromiseInput":
        """Parse ``"01,10"`` or, when ``m`` is given, a flat string ``"0110"``."""
        text = text.strip()
        if "," in text or "/" in text:
            parts = text.replace("/", ",").split(",")
        else:
            if m is None:
                m = 1
            if len(text) % m:
                raise ValueError(f"bit string of length {len(text)} is not a multiple of m={m}")
            parts = [text[k:k + m] for k in range(0, len(text), m)]
        if any(set(p) - {"0", "1"} for p in parts):
            raise ValueError(f"not a bit string: {text!r}")
        inp = cls(tuple(tuple(int(c) for c in p) for p in parts))
        if m is not None and inp.m != m:
            raise ValueError(f"block width {inp.m} does not match m={m}")
        return inp


def make_promise_input(n: int, m: int, choices: Sequence[Optional[int]]) -> PromiseInput:
    """Block ``t`` gets a single 1 at ``choices[t]`` (1-based), or stays zero for ``None``."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if len(choices) != n:
        raise ValueError(f"expected {n} choices, got {len(choices)}")
    blocks = []
    for c in choices:
        block = [0] * m
        if c is not None:
            if not 1 <= c <= m:
                raise ValueError(f"choice {c} outside [1, {m}]")
            block[c - 1] = 1
        blocks.append(tuple(block))
    return PromiseInput(tuple(blocks))


def f_parity(bits: Sequence[int]) -> int:
    bits = _check_bits(bits)
    if not bits:
        raise ValueError("parity of an empty sequence is undefined")
    out = 0
    for b in bits:
        out ^= b
    return out


def f_or(block: Sequence[int]) -> int:
    """Partial OR; under the promise this equals the arithmetic sum of the block."""
    block = _check_bits(block)
    s = sum(block)
    if s > 1:
        raise PromiseViolation(f"partial OR undefined on {block}")
    return s


def f_parity_or(X: PromiseInput) -> int:
    return f_parity([f_or(b) for b in X.blocks])


def enumerate_promise_inputs(n: int, m: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[PromiseInput]:
    """All ``(m + 1)**n`` promise inputs, in lexicographic order of the choices.

    Each block ranges over ``none, 1, ..., m``; the all-zero input comes first.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    total = (m + 1) ** n
    if total > cap:
        raise EnumerationCapExceeded(f"(m+1)^n = {total} exceeds cap {cap}")
    options = [None] + list(range(1, m + 1))
    for choices in itertools.product(options, repeat=n):
        yield make_promise_input(n, m, choices)


def enumerate_bitstrings(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple[int, ...]]:
    if 2 ** n > cap:
        raise EnumerationCapExceeded(f"2^n = {2 ** n} exceeds cap {cap}")
    yield from itertools.product((0, 1), repeat=n)


class CountingOracle:
    """Basis-state oracle access to a promise input with per-model call counters.

    Not safe for concurrent use; give each worker its own instance.
    """

    def __init__(self, X: PromiseInput):
        self.input = X
        self.o1_calls = 0
        self.o2_calls = 0

    def query_o1(self, k: int, t: int) -> int:
        """``|k, t> -> |k xor x_t, t>``; only defined for single-bit blocks."""
        if self.input.m != 1:
            raise ValueError("O1 access needs m = 1")
        if k not in (0, 1):
            raise ValueError(f"k must be 0 or 1, got {k}")
        if not 1 <= t <= self.input.n:
            raise IndexError(f"t={t} outside [1, {self.input.n}]")
        self.o1_calls += 1
        return k ^ self.input.bit(t, 1)

    def query_o2(self, k: int, i: int, t: int) -> int:
        """``|k, i, t> -> |k xor x_{t,i}, i, t>`` with ``t = 0`` reading a zero block."""
        if k not in (0, 1):
            raise ValueError(f"k must be 0 or 1, got {k}")
        if not 0 <= t <= self.input.n:
            raise IndexError(f"t={t} outside [0, {self.input.n}]")
        if not 1 <= i <= self.input.m:
            raise IndexError(f"i={i} outside [1, {self.input.m}]")
        self.o2_calls += 1
        return k ^ self.input.bit(t, i)

    @property
    def total_calls(self) -> int:
        return self.o1_calls + self.o2_calls
