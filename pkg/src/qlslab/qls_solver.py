"""Exact reference solvers for ``A x = b`` and state utilities.

Solutions are returned as normalized state vectors (plain complex numpy
arrays); the global phase is whatever the solve produces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

PIVOT_THRESHOLD = 1e-13
RESIDUAL_TOL = 1e-10


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class NonContractiveError(ValueError):
    pass


class SpectralConvergenceError(RuntimeError):
    """LAPACK failed to converge on a singular-value or eigenvalue problem."""


@dataclass
class SolveResult:
    state: np.ndarray
    raw_norm: float
    method: str
    truncation_order: Optional[int]
    residual: float
    solution: np.ndarray


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / norm


def basis_state(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


def solve_direct(A: np.ndarray, b: np.ndarray, pivot_threshold: float = PIVOT_THRESHOLD) -> SolveResult:
    """LU with partial pivoting, then normalize ``A^{-1} b``."""
    A = np.asarray(A)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if A.shape[0] != b.shape[0]:
        raise ValueError("dimension mismatch between A and b")
    lu, piv = scipy.linalg.lu_factor(A.astype(complex), check_finite=True)
    min_pivot = np.min(np.abs(np.diag(lu)))
    if min_pivot < pivot_threshold:
        raise SingularMatrixError(f"pivot {min_pivot:.3e} below threshold {pivot_threshold:.0e}")
    y = scipy.linalg.lu_solve((lu, piv), b)
    residual = float(np.linalg.norm(A @ y - b))
    raw = float(np.linalg.norm(y))
    return SolveResult(y / raw, raw, "direct", None, residual, y)


def neumann_order(contraction: float, b_norm: float, tol: float) -> int:
    """Smallest ``T`` with ``q^(T+1) / (1 - q) * |b| <= tol``."""
    if contraction == 0.0:
        return 0
    T = 0
    tail = contraction * b_norm / (1.0 - contraction)
    while tail > tol:
        T += 1
        tail *= contraction
    return T


def solve_neumann(coefficient: float, B: np.ndarray, b: np.ndarray, tol: float,
                  norm_bound: float) -> SolveResult:
    """Truncated geometric series for ``(I - coefficient * B)^{-1} b``.

    ``norm_bound`` is a caller-certified upper bound on the spectral norm of
    ``B``; the truncation order is chosen from it, not from a computed norm.
    """
    q = abs(coefficient) * norm_bound
    if q >= 1.0:
        raise NonContractiveError(f"coefficient * |B| = {q:.6g} is not below 1")
    b = np.asarray(b, dtype=complex)
    T = neumann_order(q, float(np.linalg.norm(b)), tol)
    term = b.copy()
    y = b.copy()
    for _ in range(T):
        term = coefficient * (B @ term)
        y = y + term
    A = np.eye(len(b)) - coefficient * B
    residual = float(np.linalg.norm(A @ y - b))
    raw = float(np.linalg.norm(y))
    return SolveResult(y / raw, raw, "neumann", T, residual, y)


def state_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Plain l2 distance; sensitive to global phase."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def perturb(state: np.ndarray, eps: float, mode: str = "random", seed: int = 0,
            direction: Optional[np.ndarray] = None) -> np.ndarray:
    """Rotate ``state`` by exactly ``eps`` in l2 distance, staying normalized.

    ``random`` picks a seeded Gaussian direction orthogonal to the state.
    ``aligned`` and ``antialigned`` rotate toward, respectively away from,
    ``direction`` (its component orthogonal to the state); when that
    component vanishes they fall back to the random direction.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if mode not in ("random", "aligned", "antialigned"):
        raise ValueError(f"unknown perturbation mode {mode!r}")
    psi = np.asarray(state, dtype=complex)
    if eps == 0.0:
        return psi.copy()

    def orthogonal_unit(v):
        u = v - np.vdot(psi, v) * psi
        nu = np.linalg.norm(u)
        return None if nu < 1e-14 else u / nu

    u = None
    sign = 1.0
    if mode != "random":
        if direction is None:
            raise ValueError(f"mode {mode!r} needs a direction vector")
        u = orthogonal_unit(np.asarray(direction, dtype=complex))
        sign = 1.0 if mode == "aligned" else -1.0
    if u is None:
        rng = np.random.default_rng(seed)
        while u is None:
            v = rng.standard_normal(psi.shape) + 1j * rng.standard_normal(psi.shape)
            u = orthogonal_unit(v)
    # |psi - (cos th psi + sin th u)| = 2 sin(th / 2)
    theta = 2.0 * np.arcsin(eps / 2.0)
    return np.cos(theta) * psi + sign * np.sin(theta) * u


def singular_values(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SpectralConvergenceError(str(exc)) from exc


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value from the eigenvalues of ``M^H M``."""
    M = np.asarray(M)
    try:
        evals = np.linalg.eigvalsh(M.conj().T @ M)
    except np.linalg.LinAlgError as exc:
        raise SpectralConvergenceError(str(exc)) from exc
    return float(np.sqrt(max(evals[-1], 0.0)))


def condition_number(M: np.ndarray) -> float:
    s = singular_values(M)
    return float(s[0] / s[-1])
