import math

import pytest
from hypothesis import given, settings, strategies as st

from qlslab.boolean_core import CountingOracle, enumerate_promise_inputs, make_promise_input
from qlslab.layout import basis_index
from qlslab.oracle_sim import (
    FixedPointCode, QueryLedger, arith_ij, pa_pos, pa_val, pb_val, tau_of, verify_oracle_against_matrix,
)
from qlslab.reduction_parity_or import ParityOrInstance, build_A_or, build_B_or


def inst_of(n, m, choices):
    return ParityOrInstance(n, m, make_promise_input(n, m, choices))


def test_fixed_point_encode_decode():
    assert FixedPointCode.encode(1.0).decode() == 1.0
    assert FixedPointCode.encode(-0.5).decode() == -0.5
    assert FixedPointCode.encode(0.0) == FixedPointCode.zero()
    assert FixedPointCode.encode(-0.0) == FixedPointCode.zero()
    code = FixedPointCode.encode(-0.25, 8)
    assert code.bits() == "10000100"
    assert FixedPointCode.zero(32).resolution == 2.0 ** -16
    with pytest.raises(OverflowError):
        FixedPointCode.encode(8.0, 8)
    with pytest.raises(ValueError):
        FixedPointCode(0, 7)
    with pytest.raises(ValueError):
        FixedPointCode.encode(1.0, 8) ^ FixedPointCode.encode(1.0, 16)


@settings(max_examples=200)
@given(st.floats(-127.0, 127.0, allow_nan=False), st.sampled_from([16, 32, 64]))
def test_fixed_point_round_trip(value, width):
    code = FixedPointCode.encode(value, width)
    assert abs(code.decode() - value) <= code.resolution / 2 + 1e-12 * abs(value)
    assert (code ^ code) == FixedPointCode.zero(width)


def test_tau_of():
    assert tau_of(1, 2) == 1
    assert tau_of(3, 2) == 0
    assert tau_of(5, 2) == 2
    assert [tau_of(t, 2) for t in range(1, 7)] == [1, 2, 0, 0, 2, 1]
    with pytest.raises(IndexError):
        tau_of(7, 2)


def test_arith_ij():
    assert arith_ij(1, 1, 3) == 1
    assert arith_ij(2, 1, 3) == 3
    assert arith_ij(1, 3, 3) == 3
    with pytest.raises(IndexError):
        arith_ij(0, 1, 3)


def test_pa_pos_examples():
    inst = inst_of(1, 2, [2])
    oracle = CountingOracle(inst.X)
    assert pa_pos(inst, (0, 1, 2), 1, oracle) == (0, 1, 2)
    assert pa_pos(inst, (0, 1, 2), 2, oracle) == (0, 1, 1)
    assert pa_pos(inst, (0, 1, 2), 4, oracle) == (1, 1, 1)
    assert pa_pos(inst, (0, 1, 1), 5, oracle) == (1, 2, 3)  # clock wraps
    assert oracle.o2_calls == 0
    with pytest.raises(IndexError):
        pa_pos(inst, (0, 1, 2), 6)
    with pytest.raises(IndexError):
        pa_pos(inst, (0, 1, 2), 0)


def test_pb_val_examples():
    inst = inst_of(1, 2, [2])
    ledger = QueryLedger()
    assert pb_val(inst, (0, 1, 2), (1, 2, 1), ledger=ledger).decode() == 1.0
    assert ledger.o2_calls == 2 and ledger.scratch_clean
    assert build_B_or(inst)[basis_index(0, 1, 2, 1, 2), basis_index(1, 2, 1, 1, 2)] == 1.0
    # no clock step: z passes through and the oracle is not touched
    z = FixedPointCode.encode(0.75)
    ledger = QueryLedger()
    assert pb_val(inst, (0, 1, 2), (0, 1, 2), z, ledger=ledger) == z
    assert ledger.o2_calls == 0


def test_pb_val_middle_segment_is_identity():
    inst = inst_of(2, 3, [1, 3])
    for i in (1, 2, 3):
        for t in (3, 4):
            assert pb_val(inst, (0, i, t + 1), (0, i, t)).decode() == 1.0
            assert pb_val(inst, (1, i, t + 1), (0, i, t)).decode() == 0.0


def test_pa_val_examples():
    inst = inst_of(1, 1, [None])
    assert pa_val(inst, (0, 1, 1), (0, 1, 1)).decode() == 1.0
    q = math.exp(-1) / 3
    assert pa_val(inst, (0, 1, 3), (0, 1, 2)).decode() == pytest.approx(-q, abs=2.0 ** -32)
    assert pa_val(inst, (0, 1, 3), (0, 1, 2)).decode() == pytest.approx(build_A_or(inst)[2, 1], abs=2.0 ** -32)
    inst = inst_of(1, 2, [None])
    assert pa_val(inst, (0, 1, 2), (0, 2, 1)) == FixedPointCode.zero()


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_pb_val_self_inverse(data):
    n = data.draw(st.integers(1, 2))
    m = data.draw(st.integers(1, 3))
    choices = data.draw(st.lists(st.one_of(st.none(), st.integers(1, m)), min_size=n, max_size=n))
    inst = inst_of(n, m, choices)
    idx = st.tuples(st.integers(0, 1), st.integers(1, m), st.integers(1, 3 * n))
    row, col = data.draw(idx), data.draw(idx)
    z = FixedPointCode(data.draw(st.integers(0, 2 ** 64 - 1)))
    once = pb_val(inst, row, col, z)
    assert pb_val(inst, row, col, once) == z


@pytest.mark.parametrize("n, m", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)])
def test_verify_oracle_against_matrix(n, m):
    for X in enumerate_promise_inputs(n, m):
        rep = verify_oracle_against_matrix(ParityOrInstance(n, m, X))
        assert rep.passed, [c.id for c in rep.failures]
        assert rep.query_counts["maxPerCall"] == 2
        assert rep.query_counts["paPos"] == 0


def test_verify_oracle_n1_m1_counts():
    for X in enumerate_promise_inputs(1, 1):
        rep = verify_oracle_against_matrix(ParityOrInstance(1, 1, X))
        assert rep.passed
        assert rep.query_counts["maxPerCall"] == 2
        assert rep.query_counts["perCallValues"] == [0, 2]


def test_verify_oracle_coverage_and_width():
    rep = verify_oracle_against_matrix(inst_of(1, 2, [2]))
    coverage = next(c for c in rep.checks if c.id == "pa_pos.coverage")
    assert coverage.computed == [5] and coverage.status == "pass"
    coarse = verify_oracle_against_matrix(inst_of(1, 2, [2]), width=32)
    fine = verify_oracle_against_matrix(inst_of(1, 2, [2]), width=64)
    err = {r.config["bitWidth"]: next(c.computed for c in r.checks if c.id == "pa_val.entries")
           for r in (coarse, fine)}
    assert err[32] > err[64]
    assert err[32] <= 2.0 ** -17
    assert coarse.passed


def test_all_zero_flip_entries_vanish():
    inst = inst_of(2, 2, [None, None])
    for k in (0, 1):
        for i in (1, 2):
            for j in (1, 2):
                for t in range(1, 7):
                    row = (k ^ 1, i, t % 6 + 1)
                    assert pb_val(inst, row, (k, j, t)).decode() == 0.0
