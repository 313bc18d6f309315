"""Exact evaluation of the single-player CHSH* game and the two-player CHSH game.

In CHSH* one system starts in ``init``, undergoes ``A[a]`` then ``B[b]`` and is
measured to give a bit ``c``; the round is won when ``c == a*b % 2``. Inputs
are uniform, so the game value is the mean of the four conditional success
probabilities.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .quantum import (
    BinaryMeasurement,
    DensityMatrix,
    DimensionError,
    QuantumChannel,
    UnitaryGate,
    apply_channel,
    outcome_probabilities,
    unitary_as_channel,
)

BITS = (0, 1)


class InvalidBoxError(ValueError):
    pass


def _as_channel(g) -> QuantumChannel:
    if isinstance(g, QuantumChannel):
        return g
    return unitary_as_channel(g)


@dataclass(frozen=True, eq=False)
class StrategyStar:
    """A full CHSH* strategy; gates may be given as unitaries or channels."""

    init: DensityMatrix
    a_gates: tuple
    b_gates: tuple
    meas: BinaryMeasurement

    def __post_init__(self):
        a = tuple(_as_channel(g) for g in self.a_gates)
        b = tuple(_as_channel(g) for g in self.b_gates)
        if len(a) != 2 or len(b) != 2:
            raise ValueError("need exactly two A gates and two B gates")
        d = self.init.d
        for ch in a + b:
            if ch.d_in != d or ch.d_out != d:
                raise DimensionError(f"gate dimensions ({ch.d_out}x{ch.d_in}) do not match d={d}")
        if self.meas.d != d:
            raise DimensionError(f"measurement dimension {self.meas.d} != {d}")
        object.__setattr__(self, "a_gates", a)
        object.__setattr__(self, "b_gates", b)

    @property
    def d(self) -> int:
        return self.init.d

    def swap_b(self) -> "StrategyStar":
        return StrategyStar(self.init, self.a_gates, self.b_gates[::-1], self.meas)


@dataclass(frozen=True)
class GameTable:
    """``success[a, b]`` = p(c = a*b | a, b); ``w`` is their mean."""

    success: np.ndarray
    w: float


def final_state(s: StrategyStar, a: int, b: int) -> DensityMatrix:
    return apply_channel(apply_channel(s.init, s.a_gates[a]), s.b_gates[b])


def outcome_table(s: StrategyStar) -> np.ndarray:
    """p(c=1 | a, b) as a 2x2 array."""
    p1 = np.empty((2, 2))
    for a, b in itertools.product(BITS, BITS):
        p1[a, b] = outcome_probabilities(final_state(s, a, b), s.meas)[1]
    return p1


def conditional_success(s: StrategyStar, a: int, b: int) -> float:
    if a not in BITS or b not in BITS:
        raise ValueError("inputs must be bits")
    probs = outcome_probabilities(final_state(s, a, b), s.meas)
    return probs[(a * b) % 2]


def win_probability(s: StrategyStar) -> GameTable:
    table = np.empty((2, 2))
    for a in BITS:
        mid = apply_channel(s.init, s.a_gates[a])
        for b in BITS:
            table[a, b] = outcome_probabilities(apply_channel(mid, s.b_gates[b]), s.meas)[(a * b) % 2]
    return GameTable(table, float(table.mean()))


def keyed_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a (seed, key...) tuple.

    Streams depend only on the key, never on the order they are created in,
    which is what makes parallel runs reproducible.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def play_round(s: StrategyStar, a: int, b: int, rng: np.random.Generator) -> int:
    """Sample the outcome bit c; consumes exactly one uniform draw from ``rng``."""
    p1 = outcome_probabilities(final_state(s, a, b), s.meas)[1]
    return int(rng.random() < p1)


# ---------------------------------------------------------------------------
# Two-player CHSH


@dataclass(frozen=True, eq=False)
class ChshStrategy:
    shared_state: DensityMatrix
    alice_meas: tuple
    bob_meas: tuple

    def __post_init__(self):
        if len(self.alice_meas) != 2 or len(self.bob_meas) != 2:
            raise ValueError("each party needs two binary measurements")
        da, db = self.alice_meas[0].d, self.bob_meas[0].d
        if any(m.d != da for m in self.alice_meas) or any(m.d != db for m in self.bob_meas):
            raise DimensionError("inconsistent local measurement dimensions")
        if da * db != self.shared_state.d:
            raise DimensionError(f"shared state dimension {self.shared_state.d} != {da}*{db}")
        object.__setattr__(self, "alice_meas", tuple(self.alice_meas))
        object.__setattr__(self, "bob_meas", tuple(self.bob_meas))


def _effects(m: BinaryMeasurement):
    return (m.effect0, m.effect1)


def chsh_correlation_box(c: ChshStrategy) -> np.ndarray:
    """p[x, y, a, b] for the quantum strategy."""
    rho = c.shared_state.rho
    p = np.empty((2, 2, 2, 2))
    for a, b in itertools.product(BITS, BITS):
        for x, ea in enumerate(_effects(c.alice_meas[a])):
            for y, eb in enumerate(_effects(c.bob_meas[b])):
                p[x, y, a, b] = np.trace(np.kron(ea, eb) @ rho).real
    return p


def _box_value(p: np.ndarray) -> float:
    total = 0.0
    for a, b, x, y in itertools.product(BITS, repeat=4):
        if (x ^ y) == a * b:
            total += p[x, y, a, b]
    return total / 4


def chsh_win_probability(c: ChshStrategy) -> float:
    return float(_box_value(chsh_correlation_box(c)))


@dataclass(frozen=True, eq=False)
class NoSignalingBox:
    """Conditional distribution ``p[x, y, a, b]`` = p(x, y | a, b)."""

    p: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (2, 2, 2, 2):
            raise InvalidBoxError(f"box must have shape (2,2,2,2), got {p.shape}")
        if np.any(p < -self.tol):
            raise InvalidBoxError("negative probability in box")
        if np.max(np.abs(p.sum(axis=(0, 1)) - 1)) > self.tol:
            raise InvalidBoxError("box is not normalized for every (a, b)")
        alice = p.sum(axis=1)  # [x, a, b]
        bob = p.sum(axis=0)  # [y, a, b]
        if np.max(np.abs(alice[:, :, 0] - alice[:, :, 1])) > self.tol:
            raise InvalidBoxError("Alice's marginal depends on Bob's input")
        if np.max(np.abs(bob[:, 0, :] - bob[:, 1, :])) > self.tol:
            raise InvalidBoxError("Bob's marginal depends on Alice's input")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


def box_win_probability(box: NoSignalingBox) -> float:
    return float(_box_value(box.p))


def pr_box() -> NoSignalingBox:
    p = np.zeros((2, 2, 2, 2))
    for a, b, x, y in itertools.product(BITS, repeat=4):
        if (x ^ y) == a * b:
            p[x, y, a, b] = 0.5
    return NoSignalingBox(p)


def deterministic_box(alice: tuple[int, int], bob: tuple[int, int]) -> NoSignalingBox:
    """Local deterministic box: x = alice[a], y = bob[b]."""
    p = np.zeros((2, 2, 2, 2))
    for a, b in itertools.product(BITS, BITS):
        p[alice[a], bob[b], a, b] = 1
    return NoSignalingBox(p)


def classical_chsh_value() -> float:
    """Best value over all 16 deterministic local strategies."""
    funcs = list(itertools.product(BITS, BITS))
    return max(box_win_probability(deterministic_box(f, g)) for f in funcs for g in funcs)


def unitary_strategy(init: DensityMatrix, gates: tuple[UnitaryGate, ...], meas: BinaryMeasurement) -> StrategyStar:
    """Convenience constructor from (A0, A1, B0, B1)."""
    a0, a1, b0, b1 = gates
    return StrategyStar(init, (a0, a1), (b0, b1), meas)
