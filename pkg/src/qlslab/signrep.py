"""Sign representations of PARITY-OR under the promise.

``g_t = sum_i x_{t,i} - 1/2`` sign-represents the partial OR of one block
and ``h = (-1)^(n+1) prod_t g_t`` sign-represents the composition. Both are
handled in exact rational arithmetic. ``min_sign_degree`` searches for the
smallest degree admitting any sign representation by linear programming,
then re-checks the floating-point witness exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .boolean_core import (DEFAULT_ENUMERATION_CAP, EnumerationCapExceeded, PromiseInput,
                           enumerate_bitstrings, enumerate_promise_inputs, f_or, f_parity,
                           f_parity_or)
from .report import PAPER, VerificationReport

Var = tuple[int, int]  # (block t, bit i), both 1-based
Monomial = frozenset

MARGIN_THRESHOLD = 1e-9


@dataclass
class SignPolynomial:
    """Multilinear polynomial over the ``x_{t,i}`` with rational coefficients."""

    coeffs: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        nonzero = [len(mono) for mono, c in self.coeffs.items() if c != 0]
        return max(nonzero) if nonzero else 0

    def evaluate(self, X: PromiseInput) -> Fraction:
        total = Fraction(0)
        for mono, c in self.coeffs.items():
            if all(X.bit(t, i) for t, i in mono):
                total += c
        return total

    def __mul__(self, other: "SignPolynomial") -> "SignPolynomial":
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                mono = m1 | m2
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return SignPolynomial({k: v for k, v in out.items() if v != 0})

    def scale(self, factor) -> "SignPolynomial":
        return SignPolynomial({k: v * factor for k, v in self.coeffs.items()})


def g_polynomial(t: int, m: int) -> SignPolynomial:
    coeffs = {frozenset(): Fraction(-1, 2)}
    for i in range(1, m + 1):
        coeffs[frozenset({(t, i)})] = Fraction(1)
    return SignPolynomial(coeffs)


def h_polynomial(n: int, m: int) -> SignPolynomial:
    poly = SignPolynomial({frozenset(): Fraction(1)})
    for t in range(1, n + 1):
        poly = poly * g_polynomial(t, m)
    return poly.scale((-1) ** (n + 1))


def pad_parity_input(bits: Sequence[int], m: int) -> PromiseInput:
    """Block ``t`` is ``(x_t, 0, ..., 0)``."""
    if m < 1:
        raise ValueError("m must be positive")
    return PromiseInput(tuple((int(b),) + (0,) * (m - 1) for b in bits))


def eval_g(block: Sequence[int]) -> Fraction:
    return Fraction(f_or(block)) - Fraction(1, 2)


def eval_h(X: PromiseInput) -> Fraction:
    out = Fraction((-1) ** (X.n + 1))
    for block in X.blocks:
        out *= eval_g(block)
    return out


def verify_sign_representation(n: int, m: int, cap: int = DEFAULT_ENUMERATION_CAP) -> VerificationReport:
    rep = VerificationReport("signrep", {"n": n, "m": m})
    poly = h_polynomial(n, m)
    sign_ok = magnitude_ok = expansion_ok = True
    count = 0
    for X in enumerate_promise_inputs(n, m, cap):
        count += 1
        h = eval_h(X)
        sign_ok &= (h > 0) == (f_parity_or(X) == 1) and h != 0
        magnitude_ok &= abs(h) == Fraction(1, 2 ** n)
        expansion_ok &= poly.evaluate(X) == h
    rep.add("h.sign", "h(X)>0 when f_PAR-OR=1", "sign(h) = f_PAR-OR on all inputs",
            f"{count} inputs checked", None, ok=sign_ok, provenance=PAPER)
    rep.add("h.magnitude", "h(X) := (-1)^{n+1} Π g_t", f"2^-{n}", "exact" if magnitude_ok else "mismatch",
            None, ok=magnitude_ok)
    rep.add("h.expansion", "h(X) := (-1)^{n+1} Π g_t", "product form", "monomial expansion agrees",
            None, ok=expansion_ok)
    rep.add("h.degree", "≤ ⌈n/2⌉ queries", n, poly.degree, None, ok=poly.degree == n, provenance=PAPER)
    return rep


def _live_monomials(n: int, m: int, d: int) -> list[frozenset]:
    """Monomials of degree <= d that do not vanish on every promise input.

    Two variables from the same block are never both 1, so such products are
    identically zero on the domain and are left out of the search.
    """
    out = []
    for size in range(d + 1):
        for blocks in itertools.combinations(range(1, n + 1), size):
            for bits in itertools.product(range(1, m + 1), repeat=size):
                out.append(frozenset(zip(blocks, bits)))
    return out


@dataclass
class DegreeAttempt:
    degree: int
    margin: float
    certified: bool


@dataclass
class SignDegreeResult:
    degree: Optional[int]
    attempts: list[DegreeAttempt]
    witness: Optional[SignPolynomial] = None

    def describe(self, d_max: int) -> str:
        if self.degree is None:
            return f"no feasible degree <= {d_max}"
        return str(self.degree)


def _max_margin(inputs: list[PromiseInput], signs: np.ndarray, monos: list[frozenset]):
    """Maximize the smallest signed value over coefficient vectors in ``[-1, 1]``."""
    chi = np.array([[float(all(X.bit(t, i) for t, i in mono)) for mono in monos] for X in inputs])
    k = len(monos)
    # variables: coefficients, then the margin
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-signs[:, None] * chi, np.ones((len(inputs), 1))])
    b_ub = np.zeros(len(inputs))
    bounds = [(-1.0, 1.0)] * k + [(0.0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return float(res.x[-1]) + 0.0, res.x[:-1]


def min_sign_degree(n: int, m: int, d_max: int, cap: int = 10_000) -> SignDegreeResult:
    """Smallest ``d <= d_max`` such that some degree-``d`` polynomial sign-represents PARITY-OR."""
    if n * m > 9:
        raise EnumerationCapExceeded(f"n*m = {n * m} is above the desk-scale limit of 9")
    if d_max < 0:
        raise ValueError("d_max must be non-negative")
    inputs = list(enumerate_promise_inputs(n, m, cap))
    signs = np.array([1.0 if f_parity_or(X) else -1.0 for X in inputs])
    attempts = []
    for d in range(min(d_max, n * m) + 1):
        monos = _live_monomials(n, m, d)
        margin, coeffs = _max_margin(inputs, signs, monos)
        certified = False
        witness = None
        if margin >= MARGIN_THRESHOLD:
            witness = SignPolynomial({mono: Fraction(float(c)) for mono, c in zip(monos, coeffs) if c != 0})
            certified = all((witness.evaluate(X) > 0) == (s > 0) and witness.evaluate(X) != 0
                            for X, s in zip(inputs, signs))
        attempts.append(DegreeAttempt(d, margin, certified))
        if certified:
            return SignDegreeResult(d, attempts, witness)
    return SignDegreeResult(None, attempts)


def verify_padding(n: int, m: int) -> bool:
    """PARITY-OR of the padded input equals PARITY of the bits, for every bit string."""
    return all(f_parity_or(pad_parity_input(bits, m)) == f_parity(bits) for bits in enumerate_bitstrings(n))
