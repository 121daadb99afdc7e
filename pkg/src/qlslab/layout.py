"""Composite basis ``|k>|i>|t>_c`` shared by both reductions.

The parity bit ``k`` is the most significant register and the clock the
least significant, so a state reshapes to ``(2, inner, 3n)``. Indices are
1-based for ``i`` and ``t`` at every interface and 0-based only inside
``basis_index``.
"""
from __future__ import annotations

import numpy as np


def wrap_clock(t: int, n: int) -> int:
    """Map any integer clock value into ``[1, 3n]`` (``3n + 1 == 1``)."""
    return (t - 1) % (3 * n) + 1


def dimension(n: int, inner: int = 1) -> int:
    return 2 * inner * 3 * n


def basis_index(k: int, i: int, t: int, n: int, inner: int = 1) -> int:
    if k not in (0, 1):
        raise ValueError(f"k must be 0 or 1, got {k}")
    if not 1 <= i <= inner:
        raise IndexError(f"i={i} outside [1, {inner}]")
    if not 1 <= t <= 3 * n:
        raise IndexError(f"t={t} outside [1, {3 * n}]")
    return (k * inner + (i - 1)) * 3 * n + (t - 1)


def basis_label(index: int, n: int, inner: int = 1) -> tuple[int, int, int]:
    T = 3 * n
    if not 0 <= index < 2 * inner * T:
        raise IndexError(index)
    t = index % T + 1
    rest = index // T
    return rest // inner, rest % inner + 1, t


def as_registers(state: np.ndarray, n: int) -> np.ndarray:
    """View a state as an array indexed ``[k, i - 1, t - 1]``."""
    state = np.asarray(state)
    T = 3 * n
    if state.ndim != 1 or state.size % (2 * T):
        raise ValueError(f"state of size {state.size} does not fit clock period {T}")
    return state.reshape(2, state.size // (2 * T), T)


def segment(t: int, n: int) -> int:
    """Clock segment 1, 2 or 3 that ``t`` belongs to."""
    if not 1 <= t <= 3 * n:
        raise IndexError(f"t={t} outside [1, {3 * n}]")
    return (t - 1) // n + 1


def clock_shift(n: int, t: int) -> np.ndarray:
    """``|t+1><t|_c`` on the ``3n`` clock values, wrapping ``3n -> 1``."""
    T = 3 * n
    S = np.zeros((T, T))
    S[wrap_clock(t + 1, n) - 1, t - 1] = 1.0
    return S
