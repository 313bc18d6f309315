"""Canonical CHSH* strategies and exhaustive searches over finite gate sets.

Searches evaluate every (A0, A1)-(B0, B1) gate pair with the exact engine
once, then combine the pair tables with numpy broadcasting; the four-gate
game value only ever needs p(c | A_a, B_b) for single pairs.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import gates
from .game import ChshStrategy, StrategyStar, win_probability
from .quantum import (
    BinaryMeasurement,
    DensityMatrix,
    apply_channel,
    outcome_probabilities,
    state_from_vector,
    unitary_as_channel,
)

TIE_TOL = 1e-12
GATE_KEYS = ("A0", "A1", "B0", "B1")

STABILIZER_STATES = {
    "|0>": (1, 0),
    "|1>": (0, 1),
    "|+>": (1, 1),
    "|->": (1, -1),
    "|+i>": (1, 1j),
    "|-i>": (1, -1j),
}

PAULI_MEASUREMENTS = ("X", "-X", "Y", "-Y", "Z", "-Z")


def init_from_label(label: str, d: int = 2) -> DensityMatrix:
    if d == 2 and label in STABILIZER_STATES:
        return state_from_vector(STABILIZER_STATES[label])
    if label.startswith("|") and label.endswith(">") and label[1:-1].isdigit():
        k = int(label[1:-1])
        v = np.zeros(d)
        v[k] = 1
        return state_from_vector(v)
    raise ValueError(f"unknown initial-state label {label!r}")


def measurement_from_label(label: str, d: int = 2) -> BinaryMeasurement:
    if label.startswith("S={") and label.endswith("}"):
        return gates.subset_measurement(d, [int(x) for x in label[3:-1].split(",")])
    sign = -1 if label.startswith("-") else 1
    return gates.pauli_measurement(label.lstrip("-"), sign)


def subset_label(subset) -> str:
    return "S={" + ",".join(str(j) for j in sorted(subset)) + "}"


def strategy_from_descriptor(desc: dict, d: int = 2) -> StrategyStar:
    """Rebuild a strategy from the label dictionary stored in a SearchReport."""
    ch = {k: gates.channel_from_label(desc[k], d) for k in GATE_KEYS}
    return StrategyStar(
        init_from_label(desc["init"], d),
        (ch["A0"], ch["A1"]),
        (ch["B0"], ch["B1"]),
        measurement_from_label(desc["meas"], d),
    )


@dataclass
class SearchReport:
    setting: str
    best_w: float
    optima: list[dict]
    search_space_size: int
    elapsed: float
    n_optima: int = 0
    d: int = 2

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Canonical strategies


@lru_cache(maxsize=1)
def _theta_fixed():
    # theta-independent parts; all immutable, so safe to share
    a = (unitary_as_channel(gates.identity(2)), unitary_as_channel(gates.rz(np.pi / 2)))
    return init_from_label("|+>"), a, gates.pauli_measurement("X")


def unitary_theta_strategy(theta: float) -> StrategyStar:
    """|+> input, A = (I, Rz(pi/2)), B = (Rz(-theta), Rz(theta)), X measurement."""
    init, a, meas = _theta_fixed()
    return StrategyStar(init, a, (gates.rz(-theta), gates.rz(theta)), meas)


def closed_form_w(theta):
    return 0.5 + np.sin(theta) / 4 + np.cos(theta) / 4


def irreversible_strategy() -> StrategyStar:
    """|0> input, A = (I, X), B = (ERASE, I), Z measurement: wins every round."""
    return StrategyStar(
        init_from_label("|0>"),
        (gates.identity(2), gates.pauli("X")),
        (gates.erase_channel(2), gates.identity(2)),
        gates.pauli_measurement("Z"),
    )


def chsh_optimal_strategy() -> ChshStrategy:
    """Phi+ with Alice measuring Z, X and Bob (Z+X)/sqrt2, (Z-X)/sqrt2."""
    bell = state_from_vector([1, 0, 0, 1])
    z, x = gates.pauli("Z").u, gates.pauli("X").u
    alice = (BinaryMeasurement.from_observable(z), BinaryMeasurement.from_observable(x))
    bob = (
        BinaryMeasurement.from_observable((z + x) / np.sqrt(2)),
        BinaryMeasurement.from_observable((z - x) / np.sqrt(2)),
    )
    return ChshStrategy(bell, alice, bob)


# ---------------------------------------------------------------------------
# Search machinery


def _pair_table(init: DensityMatrix, channels, meas: BinaryMeasurement) -> np.ndarray:
    """p1[i, j] = p(c=1) after channel i then channel j."""
    n = len(channels)
    p1 = np.empty((n, n))
    for i, ci in enumerate(channels):
        mid = apply_channel(init, ci)
        for j, cj in enumerate(channels):
            p1[i, j] = outcome_probabilities(apply_channel(mid, cj), meas)[1]
    return p1


def _snap_dyadic(p1: np.ndarray) -> np.ndarray:
    # Cliffords acting on stabilizer states give outcome probabilities in
    # {0, 1/2, 1}; remove the ~1e-16 round-off so ties compare exactly.
    snapped = np.round(p1 * 2) / 2
    if np.max(np.abs(snapped - p1)) > 1e-12:
        raise RuntimeError("stabilizer outcome probability is not a multiple of 1/2")
    return snapped


def _game_values(p1: np.ndarray) -> np.ndarray:
    """w[A0, A1, B0, B1] from the pair table of a single (init, meas) setting."""
    q = 1.0 - p1
    return (q[:, None, :, None] + q[:, None, None, :] + q[None, :, :, None] + p1[None, :, None, :]) / 4


def _lex_optima(w_blocks, gate_labels, init_labels, meas_labels, best, max_optima):
    """Collect optima of w_blocks[(init, meas)] sorted by their label tuple.

    The label order is (init, A0, A1, B0, B1, meas).
    """
    rank = np.argsort(np.argsort(gate_labels, kind="stable"), kind="stable")
    init_order = sorted(range(len(init_labels)), key=lambda i: init_labels[i])
    meas_order = sorted(range(len(meas_labels)), key=lambda m: meas_labels[m])
    meas_rank = np.argsort(np.argsort(meas_labels, kind="stable"), kind="stable")
    total = 0
    found = []
    for i in init_order:
        rows = []
        for m in meas_order:
            idx = np.argwhere(w_blocks[i, m] >= best - TIE_TOL)
            total += len(idx)
            if len(idx):
                rows.append(np.column_stack([rank[idx], np.full(len(idx), m), idx]))
        if not rows or (max_optima is not None and len(found) >= max_optima):
            continue
        allrows = np.vstack(rows)
        keys = (meas_rank[allrows[:, 4]], allrows[:, 3], allrows[:, 2], allrows[:, 1], allrows[:, 0])
        order = np.lexsort(keys)
        for r in order:
            if max_optima is not None and len(found) >= max_optima:
                break
            g = allrows[r, 5:]
            desc = {"init": init_labels[i]}
            desc.update({k: gate_labels[g[n]] for n, k in enumerate(GATE_KEYS)})
            desc["meas"] = meas_labels[allrows[r, 4]]
            found.append(desc)
    return found, total


def _search(setting, init_labels, meas_labels, gate_labels, d, max_optima, stabilizer=False):
    t0 = time.perf_counter()
    channels = [gates.channel_from_label(g, d) for g in gate_labels]
    n = len(channels)
    w = np.empty((len(init_labels), len(meas_labels), n, n, n, n))
    for i, il in enumerate(init_labels):
        init = init_from_label(il, d)
        for m, ml in enumerate(meas_labels):
            p1 = _pair_table(init, channels, measurement_from_label(ml, d))
            w[i, m] = _game_values(_snap_dyadic(p1) if stabilizer else p1)
    best = float(w.max())
    optima, total = _lex_optima(w, gate_labels, init_labels, meas_labels, best, max_optima)
    return SearchReport(
        setting=setting,
        best_w=best,
        optima=optima,
        search_space_size=int(w.size),
        elapsed=time.perf_counter() - t0,
        n_optima=int(total),
        d=d,
    )


def classical_search_d2(max_optima: int | None = None) -> SearchReport:
    """All 32 deterministic reversible bit strategies: init in {0, 1}, gates in {I, X}."""
    return _search("classical-d2", ["|0>", "|1>"], ["Z"], ["I", "X"], 2, max_optima, stabilizer=True)


def clifford_search_d2(extended: bool = False, max_optima: int | None = 100) -> SearchReport:
    """Exhaustive search with every gate drawn from the 24 single-qubit Cliffords.

    By default the input is |+> and the measurement X (331,776 strategies).
    ``extended`` also ranges over the six stabilizer states and the six signed
    Pauli measurements.
    """
    labels = gates.clifford_labels()
    if extended:
        return _search("clifford-d2-extended", list(STABILIZER_STATES), list(PAULI_MEASUREMENTS), labels, 2, max_optima, stabilizer=True)
    return _search("clifford-d2", ["|+>"], ["X"], labels, 2, max_optima, stabilizer=True)


def qudit_permutation_search(d: int, max_optima: int | None = 100) -> SearchReport:
    """Exhaustive search over reversible classical qudit strategies.

    Every gate is a permutation of the d basis states, the input is a basis
    state and the measurement is a subset binarizer (c=1 iff the final basis
    index lies in a nonempty proper subset S).

    Only the images x_a = A_a(init) matter for the B gates, so the optimum and
    the number of optima are counted through (x0, x1) classes; the listed
    optima are then produced lazily in label order.
    """
    if not 2 <= d <= 5:
        raise ValueError("qudit_permutation_search supports 2 <= d <= 5")
    t0 = time.perf_counter()
    perms = gates.all_permutations(d)
    plabels = [gates.perm_label(p) for p in perms]
    porder = sorted(range(len(perms)), key=lambda i: plabels[i])
    perms = np.array([perms[i] for i in porder])  # sorted by label
    plabels = [plabels[i] for i in porder]
    subsets = [s for r in range(1, d) for s in itertools.combinations(range(d), r)]
    slabels = [subset_label(s) for s in subsets]
    sorder = sorted(range(len(subsets)), key=lambda i: slabels[i])
    subsets = [subsets[i] for i in sorder]
    slabels = [slabels[i] for i in sorder]
    init_labels = sorted(f"|{j}>" for j in range(d))

    nP, nS = len(perms), len(subsets)
    member = np.zeros((nS, d), dtype=np.int8)
    for k, s in enumerate(subsets):
        member[k, list(s)] = 1
    # out[S, P, x] = 1 iff P maps x into S
    out = member[:, perms]  # (nS, nP, d)
    x0 = np.arange(d)[:, None]
    x1 = np.arange(d)[None, :]
    # B0 rounds want c=0 for both A images; the B1 round wants c=0 after A0, c=1 after A1.
    t_b0 = (1 - out)[:, :, :, None] + (1 - out)[:, :, None, :]  # (nS, nP, x0, x1)
    t_b1 = (1 - out)[:, :, :, None] + out[:, :, None, :]
    best_wins = int((t_b0.max(axis=1) + t_b1.max(axis=1)).max())

    # Number of optima: each (x0, x1) is reached by d * ((d-1)!)**2 (init, A0, A1)
    # triples; pair counts of (B0, B1) come from a histogram convolution.
    mult = d * math.factorial(d - 1) ** 2
    n_opt = 0
    for s in range(nS):
        for a in range(d):
            for b in range(d):
                h0 = np.bincount(t_b0[s, :, a, b], minlength=3)
                h1 = np.bincount(t_b1[s, :, a, b], minlength=3)
                n_opt += sum(int(h0[k]) * int(h1[best_wins - k]) for k in range(3) if 0 <= best_wins - k <= 2)
    n_opt *= mult

    optima: list[dict] = []
    for il in init_labels:
        if max_optima is not None and len(optima) >= max_optima:
            break
        j = int(il[1:-1])
        for ia, ib in itertools.product(range(nP), range(nP)):
            if max_optima is not None and len(optima) >= max_optima:
                break
            a_img, b_img = perms[ia][j], perms[ib][j]
            wins = t_b0[:, :, a_img, b_img][:, :, None] + t_b1[:, :, a_img, b_img][:, None, :]
            hits = np.argwhere(np.transpose(wins, (1, 2, 0)) == best_wins)  # (B0, B1, S), lex order
            for b0, b1, s in hits:
                if max_optima is not None and len(optima) >= max_optima:
                    break
                optima.append({
                    "init": il,
                    "A0": plabels[ia],
                    "A1": plabels[ib],
                    "B0": plabels[b0],
                    "B1": plabels[b1],
                    "meas": slabels[s],
                })
    return SearchReport(
        setting=f"permutation-qudit({d})",
        best_w=best_wins / 4,
        optima=optima,
        search_space_size=d * nP**4 * nS,
        elapsed=time.perf_counter() - t0,
        n_optima=n_opt,
        d=d,
    )


def reevaluate(report: SearchReport) -> list[float]:
    """Exact engine value of every listed optimum."""
    return [win_probability(strategy_from_descriptor(o, report.d)).w for o in report.optima]

