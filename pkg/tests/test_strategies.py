import numpy as np
import pytest
from hypothesis import given, strategies as st
from oracles import TSIRELSON, brute_force_permutation_game, closed_form

from chshstar import gates
from chshstar.game import ChshStrategy, chsh_win_probability, conditional_success, win_probability
from chshstar.quantum import basis_state
from chshstar.strategies import (
    chsh_optimal_strategy,
    classical_search_d2,
    clifford_search_d2,
    closed_form_w,
    irreversible_strategy,
    qudit_permutation_search,
    reevaluate,
    strategy_from_descriptor,
    subset_label,
    unitary_theta_strategy,
)


def test_theta_strategy_examples():
    assert win_probability(unitary_theta_strategy(np.pi / 4)).w == pytest.approx(TSIRELSON, abs=1e-12)
    s0 = unitary_theta_strategy(0)
    assert all(np.allclose(ch.kraus[0], np.eye(2)) for ch in s0.b_gates)
    assert win_probability(s0).w == pytest.approx(0.75, abs=1e-12)
    assert win_probability(unitary_theta_strategy(np.pi / 2)).w == pytest.approx(0.75, abs=1e-12)


def test_closed_form_examples():
    assert closed_form_w(np.pi / 4) == pytest.approx(0.5 + np.sqrt(2) / 4, abs=1e-15)
    assert closed_form_w(0) == 0.75
    # direct evaluation gives 0.8150184 (not 0.8150170)
    assert closed_form_w(np.pi / 10) == pytest.approx(0.8150184, abs=1e-7)
    assert win_probability(unitary_theta_strategy(np.pi / 10)).w == pytest.approx(closed_form_w(np.pi / 10), abs=1e-12)


def test_engine_equals_closed_form_on_full_circle():
    thetas = np.linspace(0, 2 * np.pi, 1001)
    engine = np.array([win_probability(unitary_theta_strategy(t)).w for t in thetas])
    assert np.max(np.abs(engine - closed_form(thetas))) <= 1e-12


def test_closed_form_peak_on_quarter_turn():
    grid = np.linspace(0, np.pi / 2, 10001)
    assert grid[np.argmax(closed_form_w(grid))] == pytest.approx(np.pi / 4, abs=1e-4)
    slope = (np.cos(grid) - np.sin(grid)) / 4
    assert np.all(slope[grid < np.pi / 4 - 1e-9] > 0) and np.all(slope[grid > np.pi / 4 + 1e-9] < 0)
    assert closed_form_w(grid).max() <= TSIRELSON + 1e-15


@given(st.floats(-20, 20))
def test_closed_form_symmetry(theta):
    assert closed_form_w(np.pi / 2 - theta) == pytest.approx(closed_form_w(theta), abs=1e-12)


def test_irreversible_strategy():
    s = irreversible_strategy()
    assert win_probability(s).w == 1.0
    assert conditional_success(s, 1, 1) == 1.0
    assert conditional_success(s, 1, 0) == 1.0


def test_classical_search():
    rep = classical_search_d2()
    assert rep.best_w == 0.75 and rep.search_space_size == 32
    assert rep.n_optima == len(rep.optima) == 16
    trivial = {"init": "|0>", "A0": "I", "A1": "I", "B0": "I", "B1": "I", "meas": "Z"}
    assert trivial in rep.optima
    for o in rep.optima:
        table = win_probability(strategy_from_descriptor(o)).success
        assert np.sum(np.isclose(table, 1)) == 3 and np.sum(np.isclose(table, 0)) == 1


def test_clifford_search_default():
    rep = clifford_search_d2()
    assert rep.best_w == 0.75
    assert rep.search_space_size == 24**4 == 331776
    assert len(rep.optima) == 100 and rep.n_optima >= 100
    assert all(abs(v - 0.75) <= 1e-12 for v in reevaluate(rep))
    keys = [tuple(o[k] for k in ("init", "A0", "A1", "B0", "B1", "meas")) for o in rep.optima]
    assert keys == sorted(keys)


def test_clifford_search_extended():
    rep = clifford_search_d2(extended=True, max_optima=50)
    assert rep.best_w == 0.75
    assert rep.search_space_size == 6 * 24**4 * 6
    assert all(abs(v - 0.75) <= 1e-12 for v in reevaluate(rep))


def test_search_report_dict():
    d = classical_search_d2(max_optima=2).to_dict()
    assert set(d) == {"setting", "best_w", "optima", "search_space_size", "elapsed", "n_optima", "d"}
    assert len(d["optima"]) == 2


def _oracle_descriptors(optima, d):
    return {
        (f"|{i}>", gates.perm_label(a0), gates.perm_label(a1), gates.perm_label(b0), gates.perm_label(b1), subset_label(s))
        for i, a0, a1, b0, b1, s in optima
    }


@pytest.mark.parametrize("d", [2, 3])
def test_permutation_search_matches_brute_force(d):
    best, count, size, optima = brute_force_permutation_game(d)
    rep = qudit_permutation_search(d, max_optima=None)
    assert rep.best_w == best
    assert rep.n_optima == count == len(rep.optima)
    assert rep.search_space_size == size
    listed = {tuple(o[k] for k in ("init", "A0", "A1", "B0", "B1", "meas")) for o in rep.optima}
    assert listed == _oracle_descriptors(optima, d)


def test_permutation_witness():
    rep = qudit_permutation_search(3)
    assert rep.best_w == 1.0 and rep.search_space_size == 23328
    witness = {"init": "|0>", "A0": "PERM()", "A1": "PERM((0 1))", "B0": "PERM()", "B1": "PERM((1 2))", "meas": "S={2}"}
    assert win_probability(strategy_from_descriptor(witness, 3)).w == 1.0
    assert all(v == 1.0 for v in reevaluate(rep))


def test_dimensional_witness_gap():
    assert qudit_permutation_search(2).best_w == 0.75
    assert qudit_permutation_search(3).best_w == 1.0


@pytest.mark.parametrize("d", [4, 5])
def test_permutation_search_larger_d(d):
    rep = qudit_permutation_search(d, max_optima=20)
    assert rep.best_w == 1.0
    assert len(rep.optima) == 20
    assert all(v == 1.0 for v in reevaluate(rep))


def test_permutation_search_rejects_d():
    with pytest.raises(ValueError):
        qudit_permutation_search(6)


def test_chsh_optimal_strategy():
    opt = chsh_optimal_strategy()
    assert chsh_win_probability(opt) == pytest.approx(TSIRELSON, abs=1e-12)
    zz = ChshStrategy(opt.shared_state, opt.alice_meas, (gates.pauli_measurement("Z"),) * 2)
    assert chsh_win_probability(zz) == pytest.approx(0.75, abs=1e-12)
    product = ChshStrategy(basis_state(4, 0), opt.alice_meas, opt.bob_meas)
    assert chsh_win_probability(product) == pytest.approx(0.6767767, abs=1e-7)


def test_clifford_search_matches_oracle():
    from oracles import clifford_closure, clifford_game

    assert len(clifford_closure()) == 24
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)  # X measurement: c=1 is the -1 eigenvector
    best, count = clifford_game(plus, minus)
    rep = clifford_search_d2(max_optima=1)
    assert rep.best_w == pytest.approx(best, abs=1e-12)
    assert rep.n_optima == count
