"""PARITY reduction: ``A = I - delta^(1/n) B`` with a clocked bit-flip walk ``B``.

Starting from ``|0>|1>_c`` the walk XORs ``x_1 .. x_n`` into the parity bit
on the first clock segment, idles on the second and undoes the XORs in
reverse order on the third, so the middle segment always carries the full
parity of ``X``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boolean_core import CountingOracle, PromiseInput, f_parity
from .layout import basis_index, clock_shift, dimension
from .qls_solver import basis_state, condition_number, solve_direct


@dataclass(frozen=True)
class ParityInstance:
    n: int
    delta: float
    X: PromiseInput

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.X.m != 1:
            raise ValueError("the PARITY reduction needs single-bit blocks (m = 1)")
        if self.X.n != self.n:
            raise ValueError(f"input has {self.X.n} blocks, expected n={self.n}")

    @classmethod
    def from_bits(cls, bits, delta: float) -> "ParityInstance":
        X = PromiseInput(tuple((int(b),) for b in bits))
        return cls(X.n, delta, X)

    @property
    def bits(self) -> tuple[int, ...]:
        return self.X.flat()

    @property
    def clock_period(self) -> int:
        return 3 * self.n

    @property
    def dimension(self) -> int:
        return dimension(self.n)

    @property
    def rate(self) -> float:
        """``delta^(1/n)``, evaluated as ``exp(ln(delta) / n)``."""
        return math.exp(math.log(self.delta) / self.n)

    def initial_state(self) -> np.ndarray:
        return basis_state(self.dimension, basis_index(0, 1, 1, self.n))


def build_U(X: PromiseInput, t: int, oracle: Optional[CountingOracle] = None) -> np.ndarray:
    """``U_t = sum_k |k xor x_t><k|``, read off column by column with one O1 query each."""
    oracle = oracle if oracle is not None else CountingOracle(X)
    if not 1 <= t <= X.n:
        raise IndexError(f"t={t} outside [1, {X.n}]")
    U = np.zeros((2, 2))
    for k in (0, 1):
        U[oracle.query_o1(k, t), k] = 1.0
    return U


def segment_operator_index(t: int, n: int) -> Optional[int]:
    """Which ``U`` (or ``H``) acts on the step leaving clock ``t``; ``None`` for identity."""
    if 1 <= t <= n:
        return t
    if n < t <= 2 * n:
        return None
    if 2 * n < t <= 3 * n:
        return 3 * n - t + 1
    raise IndexError(f"t={t} outside [1, {3 * n}]")


def build_B_parity(inst: ParityInstance) -> np.ndarray:
    n = inst.n
    us = [build_U(inst.X, t) for t in range(1, n + 1)]
    B = np.zeros((inst.dimension, inst.dimension))
    for t in range(1, 3 * n + 1):
        idx = segment_operator_index(t, n)
        op = np.eye(2) if idx is None else us[idx - 1]
        B += np.kron(op, clock_shift(n, t))
    return B


def build_A_parity(inst: ParityInstance) -> np.ndarray:
    return np.eye(inst.dimension) - inst.rate * build_B_parity(inst)


def segment_parities(bits) -> list[tuple[int, int]]:
    """(clock, parity label) pairs for every clock value of the exact solution."""
    n = len(bits)
    full = f_parity(bits)
    out = []
    for t in range(n):
        out.append((t + 1, f_parity(bits[:t]) if t else 0))
    for t in range(n):
        out.append((t + n + 1, full))
    for t in range(n):
        prefix = bits[:n - t]
        out.append((t + 2 * n + 1, f_parity(prefix) if prefix else 0))
    return out


def normalization_constant_parity(inst: ParityInstance) -> float:
    """``c`` from the geometric sums: ``c^-2 = (1 + d^2 + d^4) * sum_{t<n} d^(2t/n)``."""
    d = inst.delta
    r2 = inst.rate ** 2
    inner = sum(r2 ** t for t in range(inst.n))
    return 1.0 / math.sqrt(inner * (1.0 + d ** 2 + d ** 4))


def closed_form_parity(inst: ParityInstance) -> np.ndarray:
    n, d, r = inst.n, inst.delta, inst.rate
    c = normalization_constant_parity(inst)
    psi = np.zeros(inst.dimension, dtype=complex)
    seg_factor = (1.0, d, d ** 2)
    for clock, label in segment_parities(inst.bits):
        s, t = divmod(clock - 1, n)
        psi[basis_index(label, 1, clock, n)] = c * r ** t * seg_factor[s]
    return psi


def accept_probability_parity(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    d2 = delta ** 2
    return d2 / (1.0 + d2 + d2 ** 2)


def kappa_bound_parity(n: int, delta: float) -> float:
    return 2.0 / (1.0 - math.exp(math.log(delta) / n))


def kappa_parity(inst: ParityInstance) -> tuple[float, float]:
    """(claimed bound ``2 / (1 - delta^(1/n))``, measured ``sigma_max / sigma_min``)."""
    return kappa_bound_parity(inst.n, inst.delta), condition_number(build_A_parity(inst))


def direct_state_parity(inst: ParityInstance) -> np.ndarray:
    """Normalized ``A^{-1}|0>|1>_c`` by dense solve; the ground truth for the closed form."""
    return solve_direct(build_A_parity(inst), inst.initial_state()).state

