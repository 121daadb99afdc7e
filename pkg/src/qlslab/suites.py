"""Verification suites and parameter sweeps behind the command line."""
from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence

import numpy as np

from . import measurement as ms
from .boolean_core import PromiseInput, enumerate_bitstrings, enumerate_promise_inputs, f_or, f_parity
from .oracle_sim import verify_oracle_against_matrix
from .qls_solver import perturb, solve_direct, solve_neumann, state_distance
from .reduction_parity import (ParityInstance, accept_probability_parity, build_A_parity,
                               closed_form_parity, kappa_parity, normalization_constant_parity)
from .reduction_parity_or import (VARIANTS, ParityOrInstance, accept_probability_or, build_A_or,
                                  build_B_or, build_C, build_H, closed_form_or, kappa_or,
                                  opnorm_checks, sparsity, structural_pattern, subspace_step,
                                  uniform_state)
from .report import DERIVED, PAPER, VerificationReport
from .signrep import min_sign_degree, verify_padding, verify_sign_representation

DEFAULT_EPS = (0.01, 0.05, 0.1)
DEFAULT_SEEDS = tuple(range(1, 101))
EXACT_TOL = 1e-12
NORM_TOL = 1e-8


def select_inputs(n: int, m: int, selector: str = "all") -> list[PromiseInput]:
    """``all`` promise inputs, ``padded`` PARITY inputs, or one explicit bit string."""
    if selector == "all":
        return list(enumerate_promise_inputs(n, m))
    if selector == "padded":
        return [PromiseInput(tuple((b,) + (0,) * (m - 1) for b in bits)) for bits in enumerate_bitstrings(n)]
    X = PromiseInput.parse(selector, m)
    if X.n != n:
        raise ValueError(f"explicit input has {X.n} blocks, expected n={n}")
    return [X]


def _parity_checks(rep: VerificationReport, inst: ParityInstance, eps_list: Sequence[float],
                   seeds: Sequence[int], tol: float, shots: Optional[int], seed: int) -> None:
    n, delta = inst.n, inst.delta
    tag = "".join(map(str, inst.bits))
    parity = f_parity(inst.bits)
    A = build_A_parity(inst)
    solved = solve_direct(A, inst.initial_state())
    psi = solved.state

    dist = state_distance(closed_form_parity(inst), psi)
    c = normalization_constant_parity(inst)
    c_resid = abs(c * (1 - delta ** 3) * solved.raw_norm - 1.0)
    rep.add(f"parity.closed_form[{tag}]", "c Σ_{t=0}^{n−1} δ^{t/n}", 0.0, dist, max(dist, c_resid),
            ok=dist <= tol and c_resid <= tol and solved.residual <= 1e-10, provenance=PAPER)

    p = accept_probability_parity(delta)
    p_meas = ms.accept_probability(psi, n)
    rep.add(f"parity.accept_prob[{tag}]", "p = δ²/(1+δ²+δ⁴)", p, p_meas, abs(p - p_meas),
            ok=abs(p - p_meas) <= tol, provenance=PAPER)

    bound, kappa = kappa_parity(inst)
    rep.add(f"parity.kappa[{tag}]", "κ ≤ 2/(1−δ^{1/n})", bound, kappa, bound - kappa,
            ok=kappa <= bound, provenance=PAPER)

    dec = ms.decode(psi, n, shots=shots, seed=seed)
    expected_trace = 0.5 + p / 2 if parity else 0.5 - p / 2
    off = dec.conditional_error(parity)
    rho_trace = float(np.real(np.trace(ms.reduced_density_matrix(psi, n) @ ms.PROJECTOR_ONE)))
    trace_resid = max(abs(dec.trace_value - expected_trace), abs(rho_trace - expected_trace))
    rep.add(f"parity.decode[{tag}]", "= 1/2 + p/2", expected_trace, dec.trace_value,
            max(off, trace_resid), ok=off <= EXACT_TOL and trace_resid <= EXACT_TOL, provenance=PAPER)
    if shots:
        sigma = math.sqrt(p * (1 - p) / shots)
        rep.add(f"parity.decode_sampled[{tag}]", "the probability of obtaining this outcome", p,
                dec.sampled_accept_freq, abs(dec.sampled_accept_freq - p),
                ok=None if abs(dec.sampled_accept_freq - p) <= 5 * sigma else False)

    tally = ms.RobustnessTally()
    direction = ms.window_direction(psi, n, parity=1)
    for eps in eps_list:
        bounds = ms.robustness_bounds(p, eps)
        trials = [perturb(psi, eps, "random", s) for s in seeds]
        trials += [perturb(psi, eps, mode, 0, direction) for mode in ("aligned", "antialigned")]
        for phi in trials:
            ms.check_perturbation(ms.trace_rho_pi(phi, n), parity, bounds, tally)
    violations = tally.violations_lower1 + tally.violations_upper0
    anchor = "−3√p ε + ε²/2" if parity else "1/2 − p/2 + √p ε + ε²/2 (derived)"
    rep.add(f"parity.robustness[{tag}]", anchor, 0, violations, tally.worst_slack,
            ok=violations == 0, provenance=PAPER if parity else DERIVED)
    if not parity:
        rep.add(f"parity.claimed_upper0[{tag}]", "≤ 1/2 − p/2 − √p ε + ε²/2", 0,
                tally.violations_upper0_claimed, None, ok=None, provenance=PAPER)


def verify_parity_suite(n: int, delta: float, inputs: Optional[Iterable[PromiseInput]] = None,
                        eps_list: Sequence[float] = DEFAULT_EPS, seeds: Sequence[int] = DEFAULT_SEEDS,
                        tol: float = 1e-10, shots: Optional[int] = None, seed: int = 0) -> VerificationReport:
    inputs = list(inputs) if inputs is not None else select_inputs(n, 1, "all")
    rep = VerificationReport("verify-parity", {
        "n": n, "delta": delta, "inputs": [X.label().replace(",", "") for X in inputs],
        "eps": list(eps_list), "seeds": [min(seeds), max(seeds)] if seeds else [], "perturbations": len(seeds) + 2,
        "tol": tol, "shots": shots, "seed": seed,
    })
    for X in inputs:
        _parity_checks(rep, ParityInstance(n, delta, X), eps_list, seeds, tol, shots, seed)
    return rep


def _parity_or_checks(rep: VerificationReport, inst: ParityOrInstance, variants: Sequence[str],
                      tol: float) -> Optional[tuple[str, ...]]:
    n, m = inst.n, inst.m
    tag = inst.X.label()
    parity = f_parity(inst.or_bits)
    u = uniform_state(m)

    circ = 0.0
    for block in inst.X.blocks:
        C = build_C(block)
        f = f_or(block)
        circ = max(circ, np.abs(C.sum(axis=0) - f).max(), np.abs(C.sum(axis=1) - f).max(),
                   np.abs(C @ u - f * u).max())
    rep.add(f"or.circulant[{tag}]", "C_t|u_m⟩ = f_OR(X_t)|u_m⟩", 0.0, circ, circ, ok=circ <= EXACT_TOL,
            provenance=PAPER)

    B = build_B_or(inst)
    sub = 0.0
    for block in inst.X.blocks:
        H = build_H(block)
        for k in (0, 1):
            v = np.kron(np.eye(2)[k], u)
            sub = max(sub, np.abs(H @ (H @ v) - v).max())
            sub = max(sub, np.abs(H @ v - np.kron(np.eye(2)[k ^ f_or(block)], u)).max())
    for k in (0, 1):
        for t in range(1, 3 * n + 1):
            kk, tt = subspace_step(inst, k, t)
            sub = max(sub, np.abs(B @ inst.subspace_state(k, t) - inst.subspace_state(kk, tt)).max())
    rep.add(f"or.subspace[{tag}]", "H_t|k⟩|u_m⟩ = |k⊕f_OR(X_t)⟩|u_m⟩", 0.0, sub, sub, ok=sub <= EXACT_TOL,
            provenance=PAPER)

    max_h, norm_b = opnorm_checks(inst)
    resid = abs(norm_b - max(max_h, 1.0))
    rep.add(f"or.spectral[{tag}]", "can be bounded by a constant; max{max_t ‖H_t‖,1}", 3.0,
            [max_h, norm_b], resid, ok=max_h <= 3 + NORM_TOL and resid <= NORM_TOL, provenance=PAPER)

    A = build_A_or(inst)
    pattern = structural_pattern(n, m)
    rows, cols = sparsity(pattern)
    covered = bool(np.all(pattern | (A == 0)))
    rep.add(f"or.sparsity[{tag}]", "matrix A has sparsity 2m+1", 2 * m + 1, [rows, cols], None,
            ok=rows == cols == 2 * m + 1 and covered, provenance=PAPER)

    bound, kappa = kappa_or(inst)
    rep.add(f"or.kappa[{tag}]", "κ ≤ 2/(1−e^{−1/n})", bound, kappa, bound - kappa, ok=kappa <= bound,
            provenance=PAPER)

    solved = solve_direct(A, inst.initial_state())
    psi = solved.state
    neu = solve_neumann(inst.coefficient, B, inst.initial_state(), tol=1e-12, norm_bound=3.0)
    neu_gap = float(np.linalg.norm(neu.solution - solved.solution))
    rep.add(f"or.neumann[{tag}]", "Σ (1/3^t) e^{−t/n} B^t", 0.0, neu_gap, neu_gap,
            ok=neu_gap <= max(2e-12, 1e-10))

    # adjudication always weighs both closed forms; ``variants`` picks which ones are reported
    distances = {v: state_distance(closed_form_or(inst, v), psi) for v in VARIANTS}
    matching = tuple(v for v in VARIANTS if distances[v] <= tol)
    shown = {v: distances[v] for v in variants}
    rep.add(f"or.variant[{tag}]", "c Σ (1/3^t) e^{−t/n}", "one variant matches the direct solve",
            {"matching": list(matching), "distances": shown}, min(distances.values()),
            ok=None if matching else False, provenance=PAPER)

    window_err = 0.0
    for state in [psi] + [closed_form_or(inst, v) for v in variants]:
        w = ms.window_parity_weights(state, n)
        window_err = max(window_err, w[1 - parity] / (w[0] + w[1]))
    rep.add(f"or.window_parity[{tag}]", "the first register is in the state with the correct parity", 0.0,
            window_err, window_err, ok=window_err <= EXACT_TOL, provenance=PAPER)

    p_meas = ms.accept_probability(psi, n)
    if matching:
        p_claim = accept_probability_or(n, matching[0])
        rep.add(f"or.accept_prob[{tag}]", f"p for the {matching[0]} closed form", p_claim, p_meas,
                abs(p_claim - p_meas), ok=abs(p_claim - p_meas) <= tol)
    else:
        rep.add(f"or.accept_prob[{tag}]", "p for the matching closed form", None, p_meas, None, ok=False)
    printed = accept_probability_or(n, "as-printed")
    rep.add(f"or.accept_prob_printed[{tag}]", "≈ 0.117", printed, p_meas, abs(printed - p_meas),
            ok=None, provenance=PAPER)
    return matching


def verify_parity_or_suite(n: int, m: int, inputs: Optional[Iterable[PromiseInput]] = None,
                           variants: Sequence[str] = VARIANTS, tol: float = 1e-10) -> VerificationReport:
    inputs = list(inputs) if inputs is not None else select_inputs(n, m, "all")
    rep = VerificationReport("verify-parity-or", {
        "n": n, "m": m, "inputs": [X.label() for X in inputs], "variants": list(variants), "tol": tol,
    })
    verdicts = {_parity_or_checks(rep, ParityOrInstance(n, m, X), variants, tol) for X in inputs}
    single = len(verdicts) == 1 and len(next(iter(verdicts))) == 1
    rep.add("or.variant_verdict", "exactly one closed form matches, identically across inputs",
            "one variant, same for all inputs", sorted(list(v) for v in verdicts), None, ok=single)
    return rep


def oracle_check_suite(n: int, m: int, inputs: Optional[Iterable[PromiseInput]] = None,
                       width: int = 64) -> VerificationReport:
    inputs = list(inputs) if inputs is not None else select_inputs(n, m, "all")
    rep = VerificationReport("oracle-check", {"n": n, "m": m, "inputs": [X.label() for X in inputs],
                                              "bitWidth": width})
    max_calls = 0
    for X in inputs:
        sub = verify_oracle_against_matrix(ParityOrInstance(n, m, X), width)
        rep.extend(sub, prefix=f"[{X.label()}]")
        max_calls = max(max_calls, sub.query_counts["maxPerCall"])
    rep.query_counts["maxPerCallOverall"] = max_calls
    return rep


def signrep_suite(n: int, m: int, d_max: Optional[int] = None) -> VerificationReport:
    rep = verify_sign_representation(n, m)
    rep.config["dMax"] = d_max
    rep.add("padding.parity", "pad each bit x_t with m−1 zeros", "f_PAR-OR(pad(x)) = f_PAR(x)",
            "all bit strings", None, ok=verify_padding(n, m), provenance=PAPER)
    if d_max is not None:
        result = min_sign_degree(n, m, d_max)
        expected = n if n <= d_max else None
        rep.add("min_sign_degree", "minimum degree of polynomials that sign-represent",
                "none" if expected is None else expected, result.describe(d_max), None,
                ok=result.degree == expected)
        rep.config["lpMargins"] = [[a.degree, a.margin, a.certified] for a in result.attempts]
    return rep


def parse_grid(text: str) -> list[float]:
    """``"0.01:0.15:0.01"`` (inclusive) or ``"1,2,3"``."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(max(count, 0))]
    return [float(x) for x in text.split(",") if x.strip()]


def margin_sweep(eps_grid: Sequence[float], delta: Optional[float] = None) -> list[dict]:
    rule = delta if delta is not None else (lambda e: 6.0 * e)
    return [{"eps": r.eps, "delta": r.delta, "p": r.p, "m1": r.m1, "m0": r.m0,
             "m1_positive": r.m1_positive, "m0_positive": r.m0_positive,
             "both_positive": r.both_positive} for r in ms.margin_scan(eps_grid, rule)]


def _sample_inputs(n: int, m: int, samples: int, rng: np.random.Generator) -> list[PromiseInput]:
    total = (m + 1) ** n
    if total <= samples:
        return list(enumerate_promise_inputs(n, m, cap=total))
    out = []
    for _ in range(samples):
        choices = rng.integers(0, m + 1, size=n)
        out.append(PromiseInput(tuple(tuple(int(c == i) for i in range(1, m + 1)) for c in choices)))
    return out


def kappa_sweep(n_grid: Sequence[int], m: Optional[int] = None, delta: float = 0.5,
                samples: int = 64, seed: int = 0) -> list[dict]:
    """Worst measured condition number against the claimed bound, per ``n``."""
    rng = np.random.default_rng(seed)
    rows = []
    for n in n_grid:
        n = int(n)
        if m is None:
            inputs = _sample_inputs(n, 1, samples, rng)
            results = [kappa_parity(ParityInstance(n, delta, X)) for X in inputs]
            construction, mm = "parity", 1
        else:
            inputs = _sample_inputs(n, m, samples, rng)
            results = [kappa_or(ParityOrInstance(n, m, X)) for X in inputs]
            construction, mm = "parity-or", m
        bound = results[0][0]
        worst = max(r[1] for r in results)
        rows.append({"construction": construction, "n": n, "m": mm,
                     "delta": delta if m is None else None, "inputs": len(inputs),
                     "bound": bound, "max_measured": worst, "within_bound": worst <= bound})
    return rows


def variant_sweep(n_grid: Sequence[int], m: int = 1) -> list[dict]:
    """Window weight of the direct solve next to both closed-form predictions."""
    rows = []
    for n in n_grid:
        n = int(n)
        inst = ParityOrInstance(n, m, PromiseInput(((0,) * m,) * n))
        psi = solve_direct(build_A_or(inst), inst.initial_state()).state
        gaps = {v: state_distance(closed_form_or(inst, v), psi) for v in VARIANTS}
        rows.append({"n": n, "m": m,
                     "p_as_printed": accept_probability_or(n, "as-printed"),
                     "p_cycle_consistent": accept_probability_or(n, "cycle-consistent"),
                     "p_measured": ms.accept_probability(psi, n),
                     "gap_as_printed": gaps["as-printed"],
                     "gap_cycle_consistent": gaps["cycle-consistent"],
                     "matching": min(gaps, key=gaps.get) if min(gaps.values()) <= 1e-10 else "none"})
    return rows
