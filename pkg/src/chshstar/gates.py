"""Named gates and channels: rotations, Paulis, the qubit Clifford group,
ERASE, permutation gates, qudit shift/clock, and SU(d) parametrizations.

Gate labels have a small text syntax::

    I  X  Y  Z  H  S  Rz(<radians>)  ERASE  PERM(<cycles>)

joined by ``*`` for products, read as a matrix product (``H*S`` is ``H @ S``,
so ``S`` acts first). Cycle notation is ``PERM((0 1)(2 3))``; the identity
permutation is ``PERM()``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .quantum import (
    BinaryMeasurement,
    QuantumChannel,
    UnitaryGate,
    compose_channels,
    equal_up_to_global_phase,
    unitary_as_channel,
)

CLIFFORD_DEDUP_TOL = 1e-9

_PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]]),
}


def rz(theta: float) -> UnitaryGate:
    return UnitaryGate(np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))


def ry(theta: float) -> UnitaryGate:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return UnitaryGate([[c, -s], [s, c]])


def pauli(which: str, d: int = 2) -> UnitaryGate:
    if d != 2:
        raise ValueError("pauli() is qubit-only; use generalized_shift/clock for d > 2")
    try:
        return UnitaryGate(_PAULI[which.upper()])
    except KeyError:
        raise ValueError(f"unknown Pauli {which!r}") from None


def hadamard() -> UnitaryGate:
    return UnitaryGate(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def phase_s() -> UnitaryGate:
    return UnitaryGate(np.diag([1, 1j]))


def identity(d: int = 2) -> UnitaryGate:
    return UnitaryGate(np.eye(d))


# ---------------------------------------------------------------------------
# Clifford group


@lru_cache(maxsize=None)
def _clifford_table() -> tuple[tuple[str, UnitaryGate], ...]:
    gens = (("H", hadamard()), ("S", phase_s()))
    found: list[tuple[str, UnitaryGate]] = [("I", identity(2))]
    frontier = list(found)
    while frontier:
        nxt = []
        for word, g in frontier:
            for name, gen in gens:
                cand = g @ gen
                if any(equal_up_to_global_phase(cand, h, CLIFFORD_DEDUP_TOL) for _, h in found):
                    continue
                label = name if word == "I" else f"{word}*{name}"
                found.append((label, cand))
                nxt.append((label, cand))
        frontier = nxt
        if len(found) > 24:
            break
    if len(found) != 24:
        raise RuntimeError(f"Clifford closure produced {len(found)} elements, expected 24")
    return tuple(found)


def clifford_group_qubit() -> list[UnitaryGate]:
    """The 24 single-qubit Cliffords modulo global phase, in BFS order from I."""
    return [g for _, g in _clifford_table()]


def clifford_labels() -> list[str]:
    """Shortest {H, S} words for :func:`clifford_group_qubit`, same order."""
    return [w for w, _ in _clifford_table()]


def clifford_index(u: UnitaryGate) -> int:
    """Position of ``u`` in the Clifford list, or -1 if it is not a Clifford."""
    for i, g in enumerate(clifford_group_qubit()):
        if equal_up_to_global_phase(u, g, CLIFFORD_DEDUP_TOL):
            return i
    return -1


# ---------------------------------------------------------------------------
# Channels and qudit gates


def erase_channel(d: int = 2, target_index: int = 0) -> QuantumChannel:
    """Reset channel sending every state to |target><target|."""
    if not 0 <= target_index < d:
        raise ValueError(f"target_index {target_index} outside 0..{d - 1}")
    ops = []
    for j in range(d):
        k = np.zeros((d, d))
        k[target_index, j] = 1
        ops.append(k)
    return QuantumChannel(tuple(ops))


def mixture_channel(channels: Sequence[QuantumChannel], weights: Sequence[float]) -> QuantumChannel:
    """Convex mixture; Kraus operators are scaled by sqrt(weight), zero weights dropped."""
    ops = []
    for ch, w in zip(channels, weights):
        if w < 0:
            raise ValueError("mixture weights must be nonnegative")
        if w > 0:
            ops.extend(np.sqrt(w) * k for k in ch.kraus)
    return QuantumChannel(tuple(ops))


def permutation_gate(perm: Sequence[int]) -> UnitaryGate:
    """Unitary with u[perm[j], j] = 1, i.e. |j> -> |perm[j]>."""
    perm = [int(p) for p in perm]
    d = len(perm)
    if sorted(perm) != list(range(d)):
        raise ValueError(f"{perm} is not a permutation of 0..{d - 1}")
    u = np.zeros((d, d))
    u[perm, np.arange(d)] = 1
    return UnitaryGate(u)


def perm_from_cycles(cycles: Sequence[Sequence[int]], d: int) -> tuple[int, ...]:
    perm = list(range(d))
    seen: set[int] = set()
    for cyc in cycles:
        for x in cyc:
            if not 0 <= x < d or x in seen:
                raise ValueError(f"bad cycle notation {cycles} for d={d}")
            seen.add(x)
        for i, x in enumerate(cyc):
            perm[x] = cyc[(i + 1) % len(cyc)]
    return tuple(perm)


def perm_to_cycles(perm: Sequence[int]) -> list[tuple[int, ...]]:
    """Nontrivial cycles, each starting at its smallest element."""
    seen: set[int] = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        j = perm[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        if len(cyc) > 1:
            cycles.append(tuple(cyc))
    return cycles


def generalized_shift(d: int) -> UnitaryGate:
    """X_d |j> = |j+1 mod d>."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return permutation_gate([(j + 1) % d for j in range(d)])


def generalized_clock(d: int) -> UnitaryGate:
    """Z_d = diag(omega^j), omega = exp(2 pi i / d)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return UnitaryGate(np.diag(np.exp(2j * np.pi * np.arange(d) / d)))


def pauli_measurement(which: str, sign: int = 1) -> BinaryMeasurement:
    """Measure ``sign * P``; eigenvalue +1 is reported as c=0."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return BinaryMeasurement.from_observable(sign * pauli(which).u)


def subset_measurement(d: int, subset) -> BinaryMeasurement:
    """Computational-basis binarizer: c=1 iff the outcome index is in ``subset``."""
    idx = sorted(set(int(j) for j in subset))
    if not idx or len(idx) == d or idx[0] < 0 or idx[-1] >= d:
        raise ValueError(f"subset {subset} must be a nonempty proper subset of 0..{d - 1}")
    e1 = np.zeros((d, d))
    e1[idx, idx] = 1
    return BinaryMeasurement.from_effect1(e1)


# ---------------------------------------------------------------------------
# Parametrizations


def su2_from_angles(alpha: float, beta: float, gamma: float) -> UnitaryGate:
    """ZYZ Euler angles: Rz(alpha) Ry(beta) Rz(gamma)."""
    return UnitaryGate(rz(alpha).u @ ry(beta).u @ rz(gamma).u)


def givens_pairs(d: int) -> list[tuple[int, int]]:
    # Reck-style triangular order; every pair (j, k), j < k, appears once.
    return [(j, k) for k in range(1, d) for j in range(k)]


def n_params(d: int) -> int:
    return d * d - 1


def su_matrix(d: int, params) -> np.ndarray:
    """Raw matrix behind :func:`unitary_from_params` (no validation)."""
    p = np.asarray(params, dtype=float)
    if p.shape != (n_params(d),):
        raise ValueError(f"expected {n_params(d)} parameters for d={d}, got {p.size}")
    if d == 2:
        a, b, g = p
        c, s = np.cos(b / 2), np.sin(b / 2)
        return np.array([
            [np.exp(-0.5j * (a + g)) * c, -np.exp(-0.5j * (a - g)) * s],
            [np.exp(0.5j * (a - g)) * s, np.exp(0.5j * (a + g)) * c],
        ])
    u = np.eye(d, dtype=complex)
    pairs = givens_pairs(d)
    for n, (j, k) in enumerate(pairs):
        theta, phi = p[2 * n], p[2 * n + 1]
        c, s, e = np.cos(theta), np.sin(theta), np.exp(1j * phi)
        cj, ck = u[:, j].copy(), u[:, k]
        u[:, j] = e * (c * cj + s * ck)
        u[:, k] = c * ck - s * cj
    phases = p[2 * len(pairs):]
    last = -(phases.sum() + p[1:2 * len(pairs):2].sum())
    return np.exp(1j * np.append(phases, last))[:, None] * u


def unitary_from_params(d: int, params: Sequence[float]) -> UnitaryGate:
    """Map d**2 - 1 reals onto SU(d).

    For d = 2 these are ZYZ Euler angles. For d >= 3 the layout is one
    (theta, phi) pair per Givens rotation in :func:`givens_pairs` order,
    followed by d - 1 diagonal phases; the last diagonal phase is fixed by
    det = 1.
    """
    return UnitaryGate(su_matrix(d, params))


# ---------------------------------------------------------------------------
# Labels


@dataclass(frozen=True)
class GateLabel:
    """One factor of a gate expression.

    ``params`` holds angles for ``Rz``; ``cycles`` holds cycle notation for
    ``PERM``.
    """

    name: str
    params: tuple[float, ...] = ()
    cycles: tuple[tuple[int, ...], ...] = ()

    def __str__(self) -> str:
        if self.name == "Rz":
            return f"Rz({self.params[0]!r})"
        if self.name == "PERM":
            return "PERM(" + "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles) + ")"
        return self.name


_SIMPLE = {"I", "X", "Y", "Z", "H", "S", "ERASE"}
_RZ = re.compile(r"^Rz\((.+)\)$")
_PERM = re.compile(r"^PERM\(((?:\(\s*\d+(?:\s+\d+)*\s*\))*)\)$")


def parse_label(text: str) -> list[GateLabel]:
    out = []
    for tok in text.strip().split("*"):
        tok = tok.strip()
        if tok in _SIMPLE:
            out.append(GateLabel(tok))
        elif m := _RZ.match(tok):
            out.append(GateLabel("Rz", (float(m.group(1)),)))
        elif m := _PERM.match(tok):
            cycles = tuple(tuple(int(x) for x in c.split()) for c in re.findall(r"\(([^()]*)\)", m.group(1)))
            out.append(GateLabel("PERM", cycles=cycles))
        else:
            raise ValueError(f"cannot parse gate label {tok!r}")
    return out


def format_label(labels: Sequence[GateLabel]) -> str:
    return "*".join(str(g) for g in labels)


def perm_label(perm: Sequence[int]) -> str:
    return str(GateLabel("PERM", cycles=tuple(perm_to_cycles(perm))))


def _atom_channel(g: GateLabel, d: int) -> QuantumChannel:
    if g.name == "ERASE":
        return erase_channel(d)
    if g.name == "PERM":
        return unitary_as_channel(permutation_gate(perm_from_cycles(g.cycles, d)))
    if g.name == "I":
        return unitary_as_channel(identity(d))
    if d != 2:
        raise ValueError(f"gate {g} is only defined for d=2")
    if g.name == "Rz":
        return unitary_as_channel(rz(g.params[0]))
    if g.name == "H":
        return unitary_as_channel(hadamard())
    if g.name == "S":
        return unitary_as_channel(phase_s())
    return unitary_as_channel(pauli(g.name))


def channel_from_label(text: str, d: int = 2) -> QuantumChannel:
    """Build the channel for a gate expression (products allowed, ERASE included)."""
    atoms = parse_label(text)
    ch = _atom_channel(atoms[-1], d)
    for g in reversed(atoms[:-1]):
        ch = compose_channels(ch, _atom_channel(g, d))
    return ch


def gate_from_label(text: str, d: int = 2) -> UnitaryGate:
    """Unitary for a gate expression; ERASE is rejected."""
    u = np.eye(d, dtype=complex)
    for g in parse_label(text):
        if g.name == "ERASE":
            raise ValueError("ERASE is not unitary; use channel_from_label")
        u = u @ _atom_channel(g, d).kraus[0]
    return UnitaryGate(u)


def all_permutations(d: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(d)))
