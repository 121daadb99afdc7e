import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qlslab.measurement import trace_rho_pi, window_direction
from qlslab.reduction_parity import ParityInstance, build_A_parity, build_B_parity, closed_form_parity
from qlslab.qls_solver import (
    NonContractiveError, SingularMatrixError, condition_number, neumann_order, normalize, perturb,
    singular_values, solve_direct, solve_neumann, spectral_norm, state_distance,
)


def test_solve_direct_identity():
    b = normalize(np.array([1.0, 2.0, 2.0]))
    res = solve_direct(np.eye(3), b)
    np.testing.assert_allclose(res.state, b)
    assert res.method == "direct" and res.truncation_order is None
    assert res.raw_norm == pytest.approx(1.0)


def test_solve_direct_scaling():
    res = solve_direct(np.diag([2.0, 1.0]), np.array([1.0, 0.0]))
    np.testing.assert_allclose(res.state, [1.0, 0.0])
    assert res.raw_norm == pytest.approx(0.5)


def test_solve_direct_matches_closed_form():
    inst = ParityInstance.from_bits([0], 0.5)
    res = solve_direct(build_A_parity(inst), inst.initial_state())
    assert state_distance(res.state, closed_form_parity(inst)) <= 1e-12
    assert res.residual <= 1e-10
    assert np.linalg.norm(res.state) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_solve_direct_errors():
    with pytest.raises(SingularMatrixError):
        solve_direct(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 0.0]))
    with pytest.raises(SingularMatrixError):
        solve_direct(np.diag([1.0, 1e-14]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        solve_direct(np.eye(3), np.ones(2))
    with pytest.raises(ValueError):
        solve_direct(np.ones((2, 3)), np.ones(2))


def test_solve_neumann_zero_operator():
    b = np.array([0.6, 0.8])
    res = solve_neumann(0.5, np.zeros((2, 2)), b, 1e-12, norm_bound=0.0)
    assert res.truncation_order == 0
    np.testing.assert_allclose(res.solution, b)


def test_solve_neumann_matches_direct():
    inst = ParityInstance.from_bits([1, 0], 0.5)
    B = build_B_parity(inst)
    b = inst.initial_state()
    res = solve_neumann(inst.rate, B, b, 1e-12, norm_bound=1.0)
    direct = solve_direct(build_A_parity(inst), b)
    assert np.linalg.norm(res.solution - direct.solution) <= 1e-10
    assert state_distance(res.state, direct.state) <= 1e-10


def test_solve_neumann_order_bound():
    q = math.sqrt(0.5)
    T = neumann_order(q, 1.0, 1e-12)
    assert q ** (T + 1) / (1 - q) <= 1e-12 < q ** T / (1 - q)


def test_solve_neumann_non_contractive():
    with pytest.raises(NonContractiveError):
        solve_neumann(1.1, np.eye(2), np.array([1.0, 0.0]), 1e-10, norm_bound=1.0)


def test_state_distance():
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0])
    assert state_distance(a, a) == 0.0
    assert state_distance(a, b) == pytest.approx(math.sqrt(2))
    assert state_distance(a, -a) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        state_distance(a, np.ones(3))


def test_perturb_contract():
    psi = closed_form_parity(ParityInstance.from_bits([1, 0, 1], 0.5))
    assert np.array_equal(perturb(psi, 0.0), psi)
    phi = perturb(psi, 0.1, "random", 7)
    assert state_distance(phi, psi) <= 0.1 + 1e-15
    assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_array_equal(phi, perturb(psi, 0.1, "random", 7))
    anti = perturb(psi, 0.1, "antialigned", direction=window_direction(psi, 3))
    assert state_distance(anti, psi) >= 0.099
    with pytest.raises(ValueError):
        perturb(psi, 1.0)
    with pytest.raises(ValueError):
        perturb(psi, -0.1)
    with pytest.raises(ValueError):
        perturb(psi, 0.1, "aligned")
    with pytest.raises(ValueError):
        perturb(psi, 0.1, "sideways")


def test_perturb_direction_moves_window_weight():
    psi = closed_form_parity(ParityInstance.from_bits([1], 0.5))
    d = window_direction(psi, 1)
    base = trace_rho_pi(psi, 1)
    assert trace_rho_pi(perturb(psi, 0.1, "antialigned", direction=d), 1) < base
    assert trace_rho_pi(perturb(psi, 0.1, "aligned", direction=d), 1) > base


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.floats(0.0, 0.99), st.integers(0, 2 ** 31 - 1))
def test_perturb_saturates_budget(dim, eps, seed):
    rng = np.random.default_rng(seed)
    psi = normalize(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    phi = perturb(psi, eps, "random", seed)
    assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-12)
    assert state_distance(phi, psi) == pytest.approx(eps, abs=1e-12)


def test_spectral_helpers():
    M = np.diag([3.0, 1.0, 0.5])
    np.testing.assert_allclose(singular_values(M), [3.0, 1.0, 0.5])
    assert spectral_norm(M) == pytest.approx(3.0)
    assert condition_number(M) == pytest.approx(6.0)
    rng = np.random.default_rng(0)
    R = rng.standard_normal((6, 6))
    assert spectral_norm(R) == pytest.approx(np.linalg.norm(R, 2), rel=1e-10)
