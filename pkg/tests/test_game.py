import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from oracles import TSIRELSON, qubit_values, random_qubit_strategies

from chshstar import gates
from chshstar.game import (
    ChshStrategy,
    InvalidBoxError,
    NoSignalingBox,
    StrategyStar,
    box_win_probability,
    chsh_win_probability,
    classical_chsh_value,
    conditional_success,
    deterministic_box,
    keyed_stream,
    outcome_table,
    play_round,
    pr_box,
    win_probability,
)
from chshstar.quantum import (
    BinaryMeasurement,
    DimensionError,
    UnitaryGate,
    basis_state,
    random_pure_state,
    random_unitary,
    state_from_vector,
)
from chshstar.strategies import chsh_optimal_strategy, irreversible_strategy, unitary_theta_strategy

seeds = st.integers(0, 2**32 - 1)


def from_oracle(psi, g, m):
    meas = BinaryMeasurement.from_effect1(np.outer(m, m.conj()))
    return StrategyStar(state_from_vector(psi), (g[0], g[1]), (g[2], g[3]), meas)


def test_conditional_success_examples():
    s = unitary_theta_strategy(np.pi / 4)
    assert conditional_success(s, 0, 0) == pytest.approx(TSIRELSON, abs=1e-12)
    assert conditional_success(irreversible_strategy(), 1, 0) == 1.0


def test_conditional_success_rejects_non_bits():
    with pytest.raises(ValueError):
        conditional_success(irreversible_strategy(), 2, 0)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_equal_gates_make_inputs_indistinguishable(seed):
    rng = np.random.default_rng(seed)
    a, b = random_unitary(2, rng), random_unitary(2, rng)
    s = StrategyStar(random_pure_state(2, rng), (a, a), (b, b), gates.pauli_measurement("Y"))
    assert 1 - conditional_success(s, 0, 0) == pytest.approx(1 - conditional_success(s, 1, 0), abs=1e-14)


def test_win_probability_examples():
    assert win_probability(unitary_theta_strategy(np.pi / 4)).w == pytest.approx(0.8535534, abs=1e-7)
    assert win_probability(unitary_theta_strategy(0)).w == pytest.approx(0.75, abs=1e-12)
    table = win_probability(irreversible_strategy())
    assert table.w == 1.0
    assert np.array_equal(table.success, np.ones((2, 2)))


def test_strategy_dimension_checks():
    with pytest.raises(DimensionError):
        StrategyStar(basis_state(3, 0), (gates.identity(2),) * 2, (gates.identity(2),) * 2, gates.pauli_measurement("Z"))
    with pytest.raises(ValueError):
        StrategyStar(basis_state(2, 0), (gates.identity(2),), (gates.identity(2),) * 2, gates.pauli_measurement("Z"))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_w_is_mean_of_table(seed):
    psi, g, m = random_qubit_strategies(1, np.random.default_rng(seed))
    table = win_probability(from_oracle(psi[0], g[:, 0], m[0]))
    assert 0 <= table.w <= 1
    assert table.w == pytest.approx(table.success.mean(), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_relabeling_b_permutes_table(seed):
    psi, g, m = random_qubit_strategies(1, np.random.default_rng(seed))
    s = from_oracle(psi[0], g[:, 0], m[0])
    p1, q1 = outcome_table(s), outcome_table(s.swap_b())
    assert np.array_equal(q1, p1[:, ::-1])
    # win predicate a*(1-b) on the swapped strategy gives back the original table
    swapped = np.array([[q1[a, b] if a * (1 - b) else 1 - q1[a, b] for b in (0, 1)] for a in (0, 1)])
    assert np.allclose(swapped[:, ::-1], win_probability(s).success, atol=1e-14, rtol=0)


def test_engine_matches_vector_oracle():
    psi, g, m = random_qubit_strategies(300, np.random.default_rng(7))
    expected = qubit_values(psi, g, m)
    got = [win_probability(from_oracle(psi[n], g[:, n], m[n])).w for n in range(300)]
    assert np.max(np.abs(np.array(got) - expected)) <= 1e-12
    assert max(got) <= TSIRELSON + 1e-9


def test_tsirelson_ceiling_10k_random_strategies():
    psi, g, m = random_qubit_strategies(10_000, np.random.default_rng(2024))
    assert np.max(qubit_values(psi, g, m)) <= TSIRELSON + 1e-9


def test_rz_sign_convention_does_not_change_values():
    # the opposite convention diag(e^{i t/2}, e^{-i t/2}) is the complex conjugate
    # of ours; with a real input and real measurement the statistics are unchanged
    for theta in np.linspace(-np.pi, np.pi, 13):
        flipped = [UnitaryGate(gates.rz(t).u.conj()) for t in (0, np.pi / 2, -theta, theta)]
        s = StrategyStar(state_from_vector([1, 1]), flipped[:2], flipped[2:], gates.pauli_measurement("X"))
        assert win_probability(s).w == pytest.approx(win_probability(unitary_theta_strategy(theta)).w, abs=1e-14)


# two-player CHSH and boxes

def test_chsh_examples():
    opt = chsh_optimal_strategy()
    assert chsh_win_probability(opt) == pytest.approx(TSIRELSON, abs=1e-12)
    zz = ChshStrategy(opt.shared_state, opt.alice_meas, (gates.pauli_measurement("Z"),) * 2)
    assert chsh_win_probability(zz) == pytest.approx(0.75, abs=1e-12)
    product = ChshStrategy(basis_state(4, 0), opt.alice_meas, opt.bob_meas)
    assert chsh_win_probability(product) == pytest.approx(0.5 + np.sqrt(2) / 8, abs=1e-12)
    zero = BinaryMeasurement(np.eye(2), np.zeros((2, 2)))
    assert chsh_win_probability(ChshStrategy(opt.shared_state, (zero, zero), (zero, zero))) == pytest.approx(0.75)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_product_states_respect_classical_bound(seed):
    rng = np.random.default_rng(seed)

    def meas():
        u = random_unitary(2, rng).u
        return BinaryMeasurement.from_effect1(u @ np.diag([0, 1]) @ u.conj().T)

    c = ChshStrategy(basis_state(4, 0), (meas(), meas()), (meas(), meas()))
    assert chsh_win_probability(c) <= 0.75 + 1e-9


def test_box_examples():
    assert box_win_probability(pr_box()) == 1.0
    assert box_win_probability(NoSignalingBox(np.full((2, 2, 2, 2), 0.25))) == 0.5
    assert box_win_probability(deterministic_box((0, 0), (0, 0))) == 0.75


def test_deterministic_boxes_never_beat_three_quarters():
    funcs = list(itertools.product((0, 1), repeat=2))
    values = [box_win_probability(deterministic_box(f, g)) for f in funcs for g in funcs]
    assert len(values) == 16 and max(values) == 0.75
    assert classical_chsh_value() == 0.75


def test_signaling_box_rejected():
    p = np.zeros((2, 2, 2, 2))
    for a, b in itertools.product((0, 1), (0, 1)):
        p[b, 0, a, b] = 1  # Alice outputs Bob's input
    with pytest.raises(InvalidBoxError):
        NoSignalingBox(p)
    with pytest.raises(InvalidBoxError):
        NoSignalingBox(np.full((2, 2, 2, 2), 0.3))


# sampling

def test_play_round_deterministic_cases():
    s = irreversible_strategy()
    for seed in range(20):
        assert play_round(s, 1, 1, keyed_stream(seed, 0)) == 1
        assert play_round(s, 0, 1, keyed_stream(seed, 0)) == 0


def test_play_round_reproducible():
    s = unitary_theta_strategy(np.pi / 4)
    bits = [play_round(s, 0, 0, keyed_stream(42, 3, 1)) for _ in range(5)]
    assert len(set(bits)) == 1


def test_keyed_streams_are_order_independent():
    first = keyed_stream(1, 2, 3).random(4)
    keyed_stream(1, 0).random(10)
    assert np.array_equal(keyed_stream(1, 2, 3).random(4), first)
    assert not np.array_equal(keyed_stream(1, 2, 4).random(4), first)


@pytest.mark.parametrize("a,b", [(0, 1), (1, 1)])
def test_play_round_converges(a, b):
    s = unitary_theta_strategy(0.3)
    n = 100_000
    rng = keyed_stream(5, a, b)
    wins = sum(play_round(s, a, b, rng) == a * b for _ in range(n))
    p = conditional_success(s, a, b)
    assert abs(wins / n - p) <= 5 * np.sqrt(p * (1 - p) / n)
