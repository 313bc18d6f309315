"""Dense small-dimension quantum primitives: states, unitaries, channels, POVMs.

Everything is a frozen dataclass around a read-only complex numpy array, and
constructors validate their invariants eagerly. Dimensions are tiny (d <= 8),
so nothing here tries to be clever about performance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12
PROB_TOL = 1e-12
MAX_DIM = 8


class QuantumError(ValueError):
    """Base class for invalid quantum objects."""


class InvalidStateError(QuantumError):
    pass


class DimensionError(QuantumError):
    pass


class UnitarityError(QuantumError):
    pass


class ChannelError(QuantumError):
    pass


class MeasurementError(QuantumError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_square(m: np.ndarray, what: str) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise QuantumError(f"{what} has non-finite entries")
    d = m.shape[0]
    if not 1 <= d <= MAX_DIM:
        raise DimensionError(f"{what} dimension {d} outside 1..{MAX_DIM}")
    return d


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        _check_square(rho, "density matrix")
        if np.max(np.abs(rho - dagger(rho))) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > TRACE_TOL:
            raise InvalidStateError(f"trace {np.trace(rho).real:.3g} != 1")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise InvalidStateError("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @property
    def d(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def _trusted(cls, rho: np.ndarray) -> "DensityMatrix":
        # For outputs of validated channels on validated states, which satisfy
        # the invariants by construction; skips the eigenvalue check.
        obj = object.__new__(cls)
        rho.setflags(write=False)
        object.__setattr__(obj, "rho", rho)
        return obj


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    u: np.ndarray

    def __post_init__(self):
        u = _frozen(self.u)
        d = _check_square(u, "unitary")
        if np.linalg.norm(dagger(u) @ u - np.eye(d)) > UNITARY_TOL:
            raise UnitarityError("matrix is not unitary")
        object.__setattr__(self, "u", u)

    @property
    def d(self) -> int:
        return self.u.shape[0]

    def __matmul__(self, other: "UnitaryGate") -> "UnitaryGate":
        return UnitaryGate(self.u @ other.u)

    def dagger(self) -> "UnitaryGate":
        return UnitaryGate(dagger(self.u))


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map given by Kraus operators of shape (d_out, d_in)."""

    kraus: tuple

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.kraus)
        if not ops:
            raise ChannelError("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one 2-D shape")
        d_out, d_in = shape
        if not (1 <= d_in <= MAX_DIM and 1 <= d_out <= MAX_DIM):
            raise DimensionError(f"channel dimensions {shape} outside 1..{MAX_DIM}")
        if len(ops) > d_in * d_out:
            raise ChannelError(f"{len(ops)} Kraus operators exceed d_in*d_out={d_in * d_out}")
        if any(not np.all(np.isfinite(k)) for k in ops):
            raise ChannelError("Kraus operator has non-finite entries")
        total = sum(dagger(k) @ k for k in ops)
        if np.linalg.norm(total - np.eye(d_in)) > UNITARY_TOL:
            raise ChannelError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ops)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]


@dataclass(frozen=True, eq=False)
class BinaryMeasurement:
    """Two-outcome POVM; ``effect0`` is outcome c=0, ``effect1`` is c=1."""

    effect0: np.ndarray
    effect1: np.ndarray

    def __post_init__(self):
        e0, e1 = _frozen(self.effect0), _frozen(self.effect1)
        d = _check_square(e0, "effect0")
        if _check_square(e1, "effect1") != d:
            raise DimensionError("effects have different dimensions")
        for e in (e0, e1):
            if np.max(np.abs(e - dagger(e))) > HERMITIAN_TOL:
                raise MeasurementError("effect is not Hermitian")
            ev = np.linalg.eigvalsh(e)
            if ev[0] < -PSD_TOL or ev[-1] > 1 + PSD_TOL:
                raise MeasurementError("effect eigenvalues outside [0, 1]")
        if np.max(np.abs(e0 + e1 - np.eye(d))) > UNITARY_TOL:
            raise MeasurementError("effects do not sum to identity")
        object.__setattr__(self, "effect0", e0)
        object.__setattr__(self, "effect1", e1)

    @property
    def d(self) -> int:
        return self.effect0.shape[0]

    @classmethod
    def from_effect1(cls, effect1) -> "BinaryMeasurement":
        e1 = np.asarray(effect1, dtype=complex)
        return cls(np.eye(e1.shape[0]) - e1, e1)

    @classmethod
    def from_observable(cls, obs) -> "BinaryMeasurement":
        """Projective measurement of a +/-1 observable; +1 maps to c=0."""
        obs = np.asarray(obs, dtype=complex)
        eye = np.eye(obs.shape[0])
        return cls((eye + obs) / 2, (eye - obs) / 2)


def state_from_vector(amplitudes: Sequence[complex]) -> DensityMatrix:
    """Return the pure state |psi><psi| of the normalized vector."""
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    if not np.all(np.isfinite(psi)):
        raise InvalidStateError("state vector has non-finite entries")
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise InvalidStateError("zero vector is not a state")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, psi.conj()))


def basis_state(d: int, index: int) -> DensityMatrix:
    v = np.zeros(d)
    v[index] = 1
    return state_from_vector(v)


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d) / d)


def unitary_as_channel(u: UnitaryGate | np.ndarray) -> QuantumChannel:
    if not isinstance(u, UnitaryGate):
        u = UnitaryGate(u)
    return QuantumChannel((u.u,))


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel((np.eye(d),))


def apply_channel(rho: DensityMatrix, ch: QuantumChannel) -> DensityMatrix:
    if ch.d_in != rho.d:
        raise DimensionError(f"channel input dimension {ch.d_in} != state dimension {rho.d}")
    out = sum(k @ rho.rho @ dagger(k) for k in ch.kraus)
    # Round-off from the sum can leave ~1e-17 anti-Hermitian parts.
    return DensityMatrix._trusted((out + dagger(out)) / 2)


def compose_channels(first: QuantumChannel, second: QuantumChannel) -> QuantumChannel:
    """Channel applying ``first`` then ``second``; zero Kraus products are dropped."""
    if first.d_out != second.d_in:
        raise DimensionError("channel dimensions do not chain")
    ops = [k2 @ k1 for k2 in second.kraus for k1 in first.kraus]
    ops = [k for k in ops if np.linalg.norm(k) > 1e-15]
    return QuantumChannel(tuple(ops))


def outcome_probabilities(rho: DensityMatrix, m: BinaryMeasurement) -> tuple[float, float]:
    if rho.d != m.d:
        raise DimensionError(f"measurement dimension {m.d} != state dimension {rho.d}")
    # tr(E rho) as an elementwise sum
    p = np.array([np.sum(m.effect0 * rho.rho.T), np.sum(m.effect1 * rho.rho.T)])
    if np.max(np.abs(p.imag)) > PROB_TOL:
        raise MeasurementError("outcome probability has an imaginary part")
    p = p.real
    if abs(p.sum() - 1) > PROB_TOL or np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
        raise MeasurementError(f"invalid outcome probabilities {p}")
    p = np.clip(p, 0.0, 1.0)
    return float(p[0]), float(p[1])


def _phase_anchor(u: np.ndarray, v: np.ndarray) -> complex:
    t = np.trace(dagger(v) @ u)
    if abs(t) > 1e-12:
        return t / abs(t)
    # Traceless overlap (e.g. X against itself times a Pauli): align on the
    # column of v with the largest norm.
    j = int(np.argmax(np.linalg.norm(v, axis=0)))
    overlap = np.vdot(v[:, j], u[:, j])
    if abs(overlap) < 1e-15:
        return 1.0
    return overlap / abs(overlap)


def global_phase_distance(u, v) -> float:
    """min over phi of ||u - e^{i phi} v||_F."""
    u = u.u if isinstance(u, UnitaryGate) else np.asarray(u, dtype=complex)
    v = v.u if isinstance(v, UnitaryGate) else np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError("gates have different dimensions")
    return float(np.linalg.norm(u - _phase_anchor(u, v) * v))


def equal_up_to_global_phase(u, v, tol: float = 1e-9) -> bool:
    return global_phase_distance(u, v) <= tol


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    if rho.d != sigma.d:
        raise DimensionError("states have different dimensions")
    ev = np.linalg.eigvalsh(rho.rho - sigma.rho)
    return float(min(1.0, 0.5 * np.sum(np.abs(ev))))


def tensor(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def random_unitary(d: int, rng: np.random.Generator) -> UnitaryGate:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return UnitaryGate(q)


def random_pure_state(d: int, rng: np.random.Generator) -> DensityMatrix:
    return state_from_vector(rng.standard_normal(d) + 1j * rng.standard_normal(d))
