import itertools
import math

import numpy as np
import pytest

from qlslab.boolean_core import f_parity
from qlslab.layout import basis_index
from qlslab.measurement import (
    RobustnessTally, accept_probability, check_perturbation, clock_projector, decode, margin_scan,
    margins, reduced_density_matrix, robustness_bounds, trace_rho_pi, window_direction,
    window_parity_weights,
)
from qlslab.qls_solver import perturb
from qlslab.reduction_parity import ParityInstance, accept_probability_parity, direct_state_parity
from qlslab.reduction_parity_or import ParityOrInstance, accept_probability_or, direct_state_or
from qlslab.boolean_core import make_promise_input

P_HALF = accept_probability_parity(0.5)


def test_clock_projector():
    P = clock_projector(2)
    assert np.array_equal(P @ P, P)
    assert np.trace(P) == 4  # two parity values times clocks 3 and 4
    assert P[basis_index(0, 1, 3, 2), basis_index(0, 1, 3, 2)] == 1
    assert P[basis_index(1, 1, 5, 2), basis_index(1, 1, 5, 2)] == 0
    with pytest.raises(ValueError):
        clock_projector(0)


def test_accept_probability():
    psi = direct_state_parity(ParityInstance.from_bits([0], 0.5))
    assert accept_probability(psi, 1) == pytest.approx(0.190476, abs=1e-6)
    e = np.zeros(6)
    e[basis_index(0, 1, 1, 1)] = 1
    assert accept_probability(e, 1) == 0.0


def test_accept_probability_or_direct_solve():
    psi = direct_state_or(ParityOrInstance(1, 1, make_promise_input(1, 1, [None])))
    p = accept_probability(psi, 1)
    assert p == pytest.approx(accept_probability_or(1, "cycle-consistent"), abs=1e-12)
    assert abs(p - accept_probability_or(1, "as-printed")) > 0.1


@pytest.mark.parametrize("bits", [(0,), (1,), (1, 1), (1, 0, 1), (0, 1, 1, 1)])
def test_trace_rho_pi_exact(bits):
    psi = direct_state_parity(ParityInstance.from_bits(bits, 0.5))
    expected = 0.5 + P_HALF / 2 if f_parity(bits) else 0.5 - P_HALF / 2
    assert trace_rho_pi(psi, len(bits)) == pytest.approx(expected, abs=1e-12)
    rho = reduced_density_matrix(psi, len(bits))
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert rho[1, 1].real == pytest.approx(expected, abs=1e-12)


def test_trace_rho_pi_zero_window_weight():
    e = np.zeros(6)
    e[basis_index(1, 1, 1, 1)] = 1
    assert trace_rho_pi(e, 1) == 0.5


def test_decode():
    rep = decode(direct_state_parity(ParityInstance.from_bits([1, 1], 0.5)), 2)
    assert rep.decoded == 0
    assert rep.conditional_parity[0] == pytest.approx(1.0, abs=1e-12)
    rep = decode(direct_state_parity(ParityInstance.from_bits([1, 0, 1, 1], 0.3)), 4)
    assert rep.decoded == 1
    assert rep.conditional_error(1) <= 1e-12
    assert rep.accept_prob == pytest.approx(accept_probability_parity(0.3), abs=1e-12)


def test_decode_unchanged_by_zero_perturbation():
    psi = direct_state_parity(ParityInstance.from_bits([1, 0], 0.5))
    assert decode(perturb(psi, 0.0), 2) == decode(psi, 2)


def test_decode_sampling():
    psi = direct_state_parity(ParityInstance.from_bits([1, 0], 0.5))
    a = decode(psi, 2, shots=20000, seed=3)
    b = decode(psi, 2, shots=20000, seed=3)
    assert a == b
    assert a.sampled_accept_freq == pytest.approx(P_HALF, abs=0.02)
    assert a.sampled_one_freq == pytest.approx(0.5 + P_HALF / 2, abs=0.02)


def test_decode_exact_state_has_no_error():
    for n in range(1, 5):
        for bits in itertools.product((0, 1), repeat=n):
            rep = decode(direct_state_parity(ParityInstance.from_bits(bits, 0.5)), n)
            assert rep.conditional_error(f_parity(bits)) <= 1e-12


def test_robustness_bounds_values():
    b = robustness_bounds(P_HALF, 0.05)
    assert b.lower1 == pytest.approx(0.531023, abs=1e-6)
    zero = robustness_bounds(P_HALF, 0.0)
    assert zero.lower1 == pytest.approx(0.5 + P_HALF / 2)
    assert zero.upper0 == zero.upper0_claimed == pytest.approx(0.5 - P_HALF / 2)
    for eps in (0.01, 0.1, 0.5):
        b = robustness_bounds(P_HALF, eps)
        assert b.upper0 >= b.upper0_claimed
    with pytest.raises(ValueError):
        robustness_bounds(0.0, 0.1)
    with pytest.raises(ValueError):
        robustness_bounds(0.5, 1.0)


def test_margins():
    m1, m0 = margins(accept_probability_parity(0.06), 0.01)
    assert m1 == pytest.approx(4.6e-5, abs=1e-6) and m1 > 0
    assert m0 > 0
    rows = margin_scan([0.01, 0.15])
    assert rows[0].m1_positive and rows[0].both_positive
    assert rows[1].delta == pytest.approx(0.9)
    assert rows[1].m1 == pytest.approx(-0.082, abs=5e-4)
    assert not rows[1].m1_positive and not rows[1].both_positive
    tiny = margin_scan([1e-9], 0.5)[0]
    assert tiny.m1 == pytest.approx(tiny.p / 2, rel=1e-7)
    assert tiny.m0 == pytest.approx(tiny.p / 2, rel=1e-7)
    fixed = margin_scan([0.01], 0.5)[0]
    assert fixed.delta == 0.5
    with pytest.raises(ValueError):
        margin_scan([0.2])
    with pytest.raises(ValueError):
        margin_scan([0.1], 1.5)


def test_margin_sign_region():
    grid = [k / 100 for k in range(1, 16)]
    positive = [r.eps for r in margin_scan(grid) if r.both_positive]
    assert positive == grid[:len(positive)]
    assert 0 < len(positive) < len(grid)


def test_window_direction():
    psi = direct_state_parity(ParityInstance.from_bits([1], 0.5))
    d = window_direction(psi, 1, parity=1)
    assert np.linalg.norm(d) ** 2 == pytest.approx(window_parity_weights(psi, 1)[1])
    e = np.zeros(6)
    e[0] = 1
    assert np.linalg.norm(window_direction(e, 1)) > 0


@pytest.mark.parametrize("delta", [0.1, 0.3, 0.5])
def test_robustness_invariant(delta):
    p = accept_probability_parity(delta)
    for n in range(1, 4):
        for bits in itertools.product((0, 1), repeat=n):
            psi = direct_state_parity(ParityInstance.from_bits(bits, delta))
            parity = f_parity(bits)
            tally = RobustnessTally()
            for eps in (0.01, 0.05, 0.1):
                bounds = robustness_bounds(p, eps)
                d = window_direction(psi, n)
                trials = [perturb(psi, eps, "random", s) for s in range(1, 21)]
                trials += [perturb(psi, eps, mode, 0, d) for mode in ("aligned", "antialigned")]
                for phi in trials:
                    check_perturbation(trace_rho_pi(phi, n), parity, bounds, tally)
            assert tally.violations_lower1 == 0
            assert tally.violations_upper0 == 0


def test_check_perturbation_counts_claimed_bound_separately():
    b = robustness_bounds(P_HALF, 0.1)
    tally = RobustnessTally()
    mid = (b.upper0 + b.upper0_claimed) / 2
    check_perturbation(mid, 0, b, tally)
    assert tally.violations_upper0_claimed == 1 and tally.violations_upper0 == 0
    check_perturbation(b.lower1 - 1e-6, 1, b, tally)
    assert tally.violations_lower1 == 1 and tally.trials == 2
    assert tally.worst_slack == pytest.approx(-1e-6)


def test_claimed_even_bound_fails_on_exact_state():
    # at eps > 0 the exact even-parity state already sits above 1/2 - p/2 - sqrt(p) eps + eps^2/2
    psi = direct_state_parity(ParityInstance.from_bits([1, 1], 0.5))
    b = robustness_bounds(P_HALF, 0.05)
    assert trace_rho_pi(psi, 2) > b.upper0_claimed
    assert math.isclose(trace_rho_pi(psi, 2), 0.5 - P_HALF / 2, abs_tol=1e-12)


def test_decode_sampling_converges_at_one_million_shots():
    psi = direct_state_parity(ParityInstance.from_bits([1, 0, 1], 0.5))
    rep = decode(psi, 3, shots=10 ** 6, seed=11)
    sigma = math.sqrt(P_HALF * (1 - P_HALF) / 10 ** 6)
    assert abs(rep.sampled_accept_freq - P_HALF) <= 5 * sigma
