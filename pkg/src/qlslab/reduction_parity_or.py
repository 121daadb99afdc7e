"""PARITY-OR reduction: ``A = I - e^(-1/n)/3 * B`` built from circulant blocks.

Each block ``X_t`` becomes a circulant ``C_t`` whose uniform eigenvector has
eigenvalue ``f_OR(X_t)``, and ``H_t = [[I - C_t, C_t], [C_t, I - C_t]]`` acts
as a controlled bit flip on ``|k>|u_m>``. ``B`` walks the clock exactly like
the PARITY construction with ``H_t`` in place of ``U_t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boolean_core import PromiseInput, f_or, f_parity_or
from .layout import basis_index, clock_shift, dimension, wrap_clock
from .qls_solver import condition_number, solve_direct, spectral_norm
from .reduction_parity import segment_operator_index, segment_parities

VARIANTS = ("as-printed", "cycle-consistent")


@dataclass(frozen=True)
class ParityOrInstance:
    n: int
    m: int
    X: PromiseInput

    def __post_init__(self):
        if self.X.n != self.n or self.X.m != self.m:
            raise ValueError(f"input is {self.X.n}x{self.X.m}, expected {self.n}x{self.m}")

    @property
    def coefficient(self) -> float:
        return math.exp(-1.0 / self.n) / 3.0

    @property
    def clock_period(self) -> int:
        return 3 * self.n

    @property
    def dimension(self) -> int:
        return dimension(self.n, self.m)

    @property
    def or_bits(self) -> tuple[int, ...]:
        return tuple(f_or(b) for b in self.X.blocks)

    def subspace_state(self, k: int, t: int) -> np.ndarray:
        """``|k>|u_m>|t>_c``."""
        psi = np.zeros(self.dimension, dtype=complex)
        for i in range(1, self.m + 1):
            psi[basis_index(k, i, t, self.n, self.m)] = 1.0 / math.sqrt(self.m)
        return psi

    def initial_state(self) -> np.ndarray:
        return self.subspace_state(0, 1)


def build_C(block: Sequence[int]) -> np.ndarray:
    """Circulant with ``C[i, j] = x_{((j - i) mod m) + 1}`` (1-based ``i, j``)."""
    f_or(block)
    m = len(block)
    C = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            C[i, j] = block[(j - i) % m]
    return C


def build_H(block: Sequence[int]) -> np.ndarray:
    C = build_C(block)
    I = np.eye(len(block))
    return np.block([[I - C, C], [C, I - C]])


def uniform_state(m: int) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be positive")
    return np.full(m, 1.0 / math.sqrt(m))


def build_B_or(inst: ParityOrInstance) -> np.ndarray:
    n, m = inst.n, inst.m
    hs = [build_H(inst.X.block(t)) for t in range(1, n + 1)]
    B = np.zeros((inst.dimension, inst.dimension))
    for t in range(1, 3 * n + 1):
        idx = segment_operator_index(t, n)
        op = np.eye(2 * m) if idx is None else hs[idx - 1]
        B += np.kron(op, clock_shift(n, t))
    return B


def build_A_or(inst: ParityOrInstance) -> np.ndarray:
    return np.eye(inst.dimension) - inst.coefficient * build_B_or(inst)


def structural_pattern(n: int, m: int) -> np.ndarray:
    """Declared nonzero pattern of ``A``, independent of ``X``.

    Row ``(k, i, t)`` holds the diagonal plus every ``(k', j, t - 1)``: all
    ``m`` circulant offsets count as structural because the bits are unknown
    when the pattern is queried.
    """
    dim = dimension(n, m)
    P = np.eye(dim, dtype=bool)
    for k in (0, 1):
        for i in range(1, m + 1):
            for t in range(1, 3 * n + 1):
                row = basis_index(k, i, t, n, m)
                src = wrap_clock(t - 1, n)
                for kk in (0, 1):
                    for j in range(1, m + 1):
                        P[row, basis_index(kk, j, src, n, m)] = True
    return P


def sparsity(pattern: np.ndarray) -> tuple[int, int]:
    """(max nonzeros per row, max nonzeros per column)."""
    return int(pattern.sum(axis=1).max()), int(pattern.sum(axis=0).max())


def subspace_step(inst: ParityOrInstance, k: int, t: int) -> tuple[int, int]:
    """Label dynamics of ``B`` on ``|k>|u_m>|t>``: returns ``(k', t + 1)``."""
    if k not in (0, 1):
        raise ValueError(f"k must be 0 or 1, got {k}")
    idx = segment_operator_index(t, inst.n)
    flip = 0 if idx is None else f_or(inst.X.block(idx))
    return k ^ flip, wrap_clock(t + 1, inst.n)


def segment_factors(n: int, variant: str) -> tuple[float, float, float]:
    if variant == "as-printed":
        return 1.0, math.exp(-1.0), math.exp(-2.0)
    if variant == "cycle-consistent":
        q = 3.0 ** (-n) * math.exp(-1.0)
        return 1.0, q, q * q
    raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")


def closed_form_or(inst: ParityOrInstance, variant: str = "cycle-consistent",
                   normalized: bool = True) -> np.ndarray:
    """Closed-form solution state for the chosen segment factors.

    ``as-printed`` uses factors ``(1, e^-1, e^-2)``; ``cycle-consistent`` uses
    ``(1, 3^-n e^-1, 3^-2n e^-2)``, which is what ``sum_t (coefficient B)^t``
    produces after one and two full segments.
    """
    n, m = inst.n, inst.m
    factors = segment_factors(n, variant)
    r = inst.coefficient
    psi = np.zeros(inst.dimension, dtype=complex)
    for clock, label in segment_parities(inst.or_bits):
        s, t = divmod(clock - 1, n)
        amp = factors[s] * r ** t / math.sqrt(m)
        for i in range(1, m + 1):
            psi[basis_index(label, i, clock, n, m)] = amp
    if normalized:
        psi /= np.linalg.norm(psi)
    return psi


def accept_probability_or(n: int, variant: str = "as-printed") -> float:
    """Clock-window weight ``q^2 / (1 + q^2 + q^4)`` for the variant's middle factor ``q``."""
    if n < 1:
        raise ValueError("n must be positive")
    q2 = segment_factors(n, variant)[1] ** 2
    return q2 / (1.0 + q2 + q2 * q2)


def opnorm_checks(inst: ParityOrInstance) -> tuple[float, float]:
    """(``max_t |H_t|``, ``|B|``) in spectral norm."""
    max_h = max(spectral_norm(build_H(b)) for b in inst.X.blocks)
    return max_h, spectral_norm(build_B_or(inst))


def kappa_bound_or(n: int) -> float:
    return 2.0 / (1.0 - math.exp(-1.0 / n))


def kappa_or(inst: ParityOrInstance) -> tuple[float, float]:
    return kappa_bound_or(inst.n), condition_number(build_A_or(inst))


def direct_state_or(inst: ParityOrInstance) -> np.ndarray:
    return solve_direct(build_A_or(inst), inst.initial_state()).state


def parity_label(inst: ParityOrInstance) -> int:
    return f_parity_or(inst.X)
