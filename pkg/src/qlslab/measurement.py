"""Clock-window measurement, parity decoding and the error-robustness margins.

The protocol measures the clock; on ``t in [n+1, 2n]`` it keeps the parity
bit, otherwise it outputs a fair coin. All probabilities below are computed
exactly from amplitudes. Sampling exists only in ``decode(shots=...)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

import numpy as np

from .layout import as_registers
from .reduction_parity import accept_probability_parity

PROJECTOR_ONE = np.array([[0.0, 0.0], [0.0, 1.0]])


def window_mask(n: int, inner: int = 1) -> np.ndarray:
    """Boolean mask over the composite basis selecting clock values ``n+1 .. 2n``."""
    clock = np.zeros(3 * n, dtype=bool)
    clock[n:2 * n] = True
    return np.broadcast_to(clock, (2, inner, 3 * n)).reshape(-1).copy()


def clock_projector(n: int, inner_dim: int = 1) -> np.ndarray:
    if n < 1 or inner_dim < 1:
        raise ValueError("n and inner_dim must be positive")
    return np.diag(window_mask(n, inner_dim).astype(float))


def accept_probability(state: np.ndarray, n: int) -> float:
    """``|(I x Pi_c) psi|^2``."""
    amps = as_registers(state, n)
    return float(np.sum(np.abs(amps[:, :, n:2 * n]) ** 2))


def window_parity_weights(state: np.ndarray, n: int) -> tuple[float, float]:
    """Window weight carried by parity 0 and parity 1."""
    amps = as_registers(state, n)
    w = np.sum(np.abs(amps[:, :, n:2 * n]) ** 2, axis=(1, 2))
    return float(w[0]), float(w[1])


def trace_rho_pi(state: np.ndarray, n: int) -> float:
    """``|(Pi x Pi_c) psi|^2 + (1 - |(I x Pi_c) psi|^2) / 2`` with ``Pi = |1><1|``."""
    _, w1 = window_parity_weights(state, n)
    return w1 + (1.0 - accept_probability(state, n)) / 2.0


def reduced_density_matrix(state: np.ndarray, n: int) -> np.ndarray:
    """Single-qubit ``rho``: window part traced over clock and inner registers plus ``I/2`` for the rest."""
    amps = as_registers(state, n)
    win = amps[:, :, n:2 * n].reshape(2, -1)
    rho = win @ win.conj().T
    return rho + (1.0 - accept_probability(state, n)) * np.eye(2) / 2.0


def window_direction(state: np.ndarray, n: int, parity: int = 1) -> np.ndarray:
    """``(Pi x Pi_c) psi`` for ``Pi = |parity><parity|``, or a unit vector in that range when it vanishes."""
    amps = as_registers(np.asarray(state, dtype=complex), n)
    d = np.zeros_like(amps)
    d[parity, :, n:2 * n] = amps[parity, :, n:2 * n]
    if np.linalg.norm(d) < 1e-14:
        d[parity, :, n:2 * n] = 1.0
    return d.reshape(-1)


@dataclass
class DecodeReport:
    accept_prob: float
    conditional_parity: tuple[float, float]
    trace_value: float
    shots: Optional[int] = None
    sampled_accept_freq: Optional[float] = None
    sampled_one_freq: Optional[float] = None

    @property
    def decoded(self) -> Optional[int]:
        if self.accept_prob == 0.0:
            return None
        return int(self.conditional_parity[1] > self.conditional_parity[0])

    def conditional_error(self, parity: int) -> float:
        return self.conditional_parity[1 - parity]


def decode(state: np.ndarray, n: int, shots: Optional[int] = None, seed: int = 0) -> DecodeReport:
    state = np.asarray(state)
    p = accept_probability(state, n)
    w0, w1 = window_parity_weights(state, n)
    cond = (w0 / p, w1 / p) if p > 0 else (0.5, 0.5)
    report = DecodeReport(p, cond, trace_rho_pi(state, n))
    if shots:
        rng = np.random.default_rng(seed)
        probs = np.abs(state) ** 2
        counts = rng.multinomial(shots, probs / probs.sum())
        mask = window_mask(n, state.size // (6 * n))
        accepted = int(counts[mask].sum())
        ones_in_window = int(as_registers(counts, n)[1, :, n:2 * n].sum())
        coin_ones = int(rng.binomial(shots - accepted, 0.5))
        report.shots = shots
        report.sampled_accept_freq = accepted / shots
        report.sampled_one_freq = (ones_in_window + coin_ones) / shots
    return report


@dataclass(frozen=True)
class RobustnessBounds:
    lower1: float
    upper0_claimed: float
    upper0: float


def robustness_bounds(p: float, eps: float) -> RobustnessBounds:
    """Bounds on ``Tr[rho' Pi]`` for a state within ``eps`` of the exact solution.

    ``upper0_claimed`` carries ``- sqrt(p) eps``; the triangle
    inequalities only give ``+ sqrt(p) eps``, which is ``upper0``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    s = math.sqrt(p)
    half = 0.5 + p / 2.0
    return RobustnessBounds(
        lower1=half - 3.0 * s * eps + eps ** 2 / 2.0,
        upper0_claimed=0.5 - p / 2.0 - s * eps + eps ** 2 / 2.0,
        upper0=0.5 - p / 2.0 + s * eps + eps ** 2 / 2.0,
    )


@dataclass(frozen=True)
class MarginRow:
    eps: float
    delta: float
    p: float
    m1: float
    m0: float

    @property
    def m1_positive(self) -> bool:
        return self.m1 > 0

    @property
    def m0_positive(self) -> bool:
        return self.m0 > 0

    @property
    def both_positive(self) -> bool:
        return self.m1_positive and self.m0_positive


def margins(p: float, eps: float) -> tuple[float, float]:
    s = math.sqrt(p)
    return p / 2 - 3 * s * eps + eps ** 2 / 2, p / 2 + s * eps - eps ** 2 / 2


def margin_scan(eps_grid: Iterable[float],
                delta_rule: Union[float, Callable[[float], float]] = lambda e: 6.0 * e) -> list[MarginRow]:
    """Evaluate both margins for every ``eps`` with ``delta = delta_rule(eps)`` (or a fixed delta)."""
    rows = []
    for eps in eps_grid:
        if not 0.0 < eps < 1.0 / 6.0:
            raise ValueError(f"eps must lie in (0, 1/6), got {eps}")
        delta = delta_rule(eps) if callable(delta_rule) else float(delta_rule)
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta = {delta} for eps = {eps} is outside (0, 1)")
        p = accept_probability_parity(delta)
        m1, m0 = margins(p, eps)
        rows.append(MarginRow(eps, delta, p, m1, m0))
    return rows


@dataclass
class RobustnessTally:
    trials: int = 0
    violations_lower1: int = 0
    violations_upper0: int = 0
    violations_upper0_claimed: int = 0
    worst_slack: float = field(default=math.inf)


def check_perturbation(trace_value: float, parity: int, bounds: RobustnessBounds,
                       tally: RobustnessTally, slack: float = 1e-12) -> None:
    """Record one perturbed trace value against the bounds for its parity."""
    tally.trials += 1
    if parity == 1:
        gap = trace_value - bounds.lower1
        if gap < -slack:
            tally.violations_lower1 += 1
    else:
        gap = bounds.upper0 - trace_value
        if gap < -slack:
            tally.violations_upper0 += 1
        if trace_value > bounds.upper0_claimed + slack:
            tally.violations_upper0_claimed += 1
    tally.worst_slack = min(tally.worst_slack, gap)
