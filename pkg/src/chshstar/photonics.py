"""Jones-calculus model of the polarization bench.

Polarization |H> is the computational |0>, |V> is |1>. Waveplate angles are
optical-axis orientations in radians, with the matrices

    HWP(a) = [[cos 2a, sin 2a], [sin 2a, -cos 2a]]
    QWP(a) = [[cos^2 a + i sin^2 a, (1 - i) sin a cos a],
              [(1 - i) sin a cos a, sin^2 a + i cos^2 a]]

Under this convention QWP(3pi/4) HWP(pi/4 + d) QWP(3pi/4) equals Rz(-4d) up to
a global phase, so Rz(theta) needs the middle plate at pi/4 - theta/4 (mod
pi/2). :func:`compile_rz` solves for that angle numerically rather than
trusting the relation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import gates
from .game import StrategyStar
from .quantum import (
    BinaryMeasurement,
    QuantumChannel,
    UnitaryGate,
    global_phase_distance,
    state_from_vector,
)

COMPILE_TOL = 1e-10
OUTER_QWP = 3 * np.pi / 4
MEASURE_HWP = np.pi / 8
_GRID = 64


class CompilationError(RuntimeError):
    pass


def hwp_matrix(alpha: float) -> UnitaryGate:
    c, s = np.cos(2 * alpha), np.sin(2 * alpha)
    return UnitaryGate([[c, s], [s, -c]])


def qwp_matrix(alpha: float) -> UnitaryGate:
    c, s = np.cos(alpha), np.sin(alpha)
    off = (1 - 1j) * s * c
    return UnitaryGate([[c * c + 1j * s * s, off], [off, s * s + 1j * c * c]])


@dataclass(frozen=True)
class WaveplateElement:
    kind: str
    angle: float
    flip_stage: bool = False

    def __post_init__(self):
        if self.kind not in ("HWP", "QWP"):
            raise ValueError(f"unknown waveplate kind {self.kind!r}")
        if not np.isfinite(self.angle):
            raise ValueError("waveplate angle must be finite")
        # Both plate types are pi-periodic in their orientation.
        object.__setattr__(self, "angle", float(np.mod(self.angle, np.pi)))

    def matrix(self) -> np.ndarray:
        return (hwp_matrix if self.kind == "HWP" else qwp_matrix)(self.angle).u


@dataclass(frozen=True)
class OpticalSequence:
    """Waveplates in the order the light meets them."""

    elements: tuple = ()

    def __str__(self) -> str:
        return format_sequence(self)


def format_sequence(seq: OpticalSequence) -> str:
    return ";".join(f"{e.kind}@{np.degrees(e.angle):.6f}" for e in seq.elements)


def parse_sequence(text: str) -> OpticalSequence:
    elements = []
    for tok in filter(None, (t.strip() for t in text.split(";"))):
        kind, _, deg = tok.partition("@")
        if not deg:
            raise ValueError(f"bad waveplate token {tok!r}")
        elements.append(WaveplateElement(kind.strip(), np.radians(float(deg))))
    return OpticalSequence(tuple(elements))


def sequence_unitary(seq: OpticalSequence) -> UnitaryGate:
    u = np.eye(2, dtype=complex)
    for e in seq.elements:
        u = e.matrix() @ u
    return UnitaryGate(u)


def qhq_sequence(middle: float, flip_stage: bool = False) -> OpticalSequence:
    return OpticalSequence((
        WaveplateElement("QWP", OUTER_QWP, flip_stage),
        WaveplateElement("HWP", middle, flip_stage),
        WaveplateElement("QWP", OUTER_QWP, flip_stage),
    ))


def _qhq_raw(middle: float) -> np.ndarray:
    q = qwp_matrix(OUTER_QWP).u
    return q @ hwp_matrix(middle).u @ q


def _residual(middle: float, target: UnitaryGate) -> float:
    return global_phase_distance(sequence_unitary(qhq_sequence(middle)), target)


def _grid_residuals(middles: np.ndarray, target: np.ndarray) -> np.ndarray:
    # Vectorized global-phase distance over many middle angles (coarse search only).
    q = qwp_matrix(OUTER_QWP).u
    c, s = np.cos(2 * middles), np.sin(2 * middles)
    h = np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2)
    u = q @ h @ q
    t = np.einsum("ij,kij->k", target.conj(), u)
    phase = np.where(np.abs(t) > 1e-12, t / np.maximum(np.abs(t), 1e-300), 1.0)
    return np.linalg.norm(u - phase[:, None, None] * target, axis=(1, 2))


def _z_mismatch(middle: float, target: np.ndarray) -> float:
    # Im(tr(Z M) conj(tr M)) with M = target^dag U: equals -2 sin(psi) when M is
    # a phase times Rz(psi), so it crosses zero with sign at the solution.
    m = target.conj().T @ _qhq_raw(middle)
    return float(np.imag((m[0, 0] - m[1, 1]) * np.conj(m[0, 0] + m[1, 1])))


def solve_middle_angle(theta: float) -> tuple[float, float]:
    """Middle HWP angle in [0, pi) realizing Rz(theta), and its phase residual.

    A coarse residual grid picks the basin, ``brentq`` then pins the sign
    change of a smooth mismatch inside it; the returned residual is the true
    global-phase distance of the compiled sequence.
    """
    return _solve_cached(float(theta))


@lru_cache(maxsize=4096)
def _solve_cached(theta: float) -> tuple[float, float]:
    target = gates.rz(theta)
    step = np.pi / _GRID
    grid = np.arange(_GRID) * step
    k = int(np.argmin(_grid_residuals(grid, target.u)))
    lo, hi = grid[k] - step, grid[k] + step
    g = lambda a: _z_mismatch(a, target.u)  # noqa: E731
    if g(lo) * g(hi) < 0:
        alpha = brentq(g, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    else:
        alpha = grid[k]
    alpha = float(np.mod(alpha, np.pi))
    return alpha, _residual(alpha, target)


def compile_rz(theta: float, flip_stage: bool = False) -> OpticalSequence:
    """QWP(135 deg) - HWP(solved) - QWP(135 deg) realizing Rz(theta)."""
    alpha, residual = solve_middle_angle(theta)
    if residual > COMPILE_TOL:
        raise CompilationError(f"Rz({theta}) compiled with residual {residual:.3g}")
    return qhq_sequence(alpha, flip_stage)


def _analyzer(hwp_angle: float) -> BinaryMeasurement:
    # HWP then PBS: transmitted H port is D0 (c=0), reflected V port is D1.
    u = hwp_matrix(hwp_angle).u
    return BinaryMeasurement(u.conj().T @ np.diag([1, 0]) @ u, u.conj().T @ np.diag([0, 1]) @ u)


def compile_measurement_x() -> BinaryMeasurement:
    """X measurement from the 22.5 deg HWP and a PBS; +1 (|+>) reads c=0."""
    return _analyzer(MEASURE_HWP)


def erase_unit_measurement(hwp_angle: float) -> BinaryMeasurement:
    """Outcome statistics of the output-port conversion unit followed by detection.

    D1 fires only for a V photon whose polarization the HWP turns to H, so
    effect1 = sin^2(2a) |V><V|. At 45 deg this is the Z measurement, at 0 deg
    every photon reaches D0.
    """
    e1 = np.diag([0.0, np.sin(2 * hwp_angle) ** 2])
    return BinaryMeasurement.from_effect1(e1)


def erase_unit_channel(hwp_angle: float) -> QuantumChannel:
    """A channel that, followed by a Z measurement, has the unit's statistics.

    Amplitude damping with gamma = cos^2(2a): ERASE at 0 deg, identity at 45 deg.
    """
    s, c = np.sin(2 * hwp_angle), np.cos(2 * hwp_angle)
    ops = [np.array([[1, 0], [0, s]]), np.array([[0, c], [0, 0]])]
    return QuantumChannel(tuple(k for k in ops if np.linalg.norm(k) > 0))


@dataclass(frozen=True)
class NoiseModel:
    angle_jitter_sigma: float = 0.0
    flip_error_prob: float = 0.0

    def __post_init__(self):
        if self.angle_jitter_sigma < 0:
            raise ValueError("angle_jitter_sigma must be >= 0")
        if not 0 <= self.flip_error_prob <= 1:
            raise ValueError("flip_error_prob must be in [0, 1]")


NO_NOISE = NoiseModel()


def perturb_angle(angle: float, noise: NoiseModel, rng: np.random.Generator) -> float:
    return angle + noise.angle_jitter_sigma * rng.standard_normal()


def perturb(seq: OpticalSequence, noise: NoiseModel, rng: np.random.Generator) -> OpticalSequence:
    """Jitter every angle; with ``flip_error_prob`` drop the flip stage.

    Flip-stage elements move together on one mount, so they are dropped as a
    unit. Draws are taken in a fixed order (one flip draw, then one normal per
    element) so the result only depends on the generator state.
    """
    dropped = rng.random() < noise.flip_error_prob
    out = []
    for e in seq.elements:
        jitter = perturb_angle(e.angle, noise, rng)
        if e.flip_stage and dropped:
            continue
        out.append(replace(e, angle=jitter))
    return OpticalSequence(tuple(out))


def compiled_strategy(theta: float, noise: NoiseModel = NO_NOISE, rng: np.random.Generator | None = None) -> StrategyStar:
    """The unitary-theta strategy as built on the bench.

    |+> comes from |H> through the 22.5 deg HWP, A1 = Rz(pi/2) is a flip-stage
    QWP-HWP-QWP block, B_b = Rz(-/+theta) share the QWP-HWP-QWP structure and
    the measurement is the 22.5 deg HWP + PBS analyzer.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    prep = sequence_unitary(perturb(OpticalSequence((WaveplateElement("HWP", MEASURE_HWP),)), noise, rng))
    init = state_from_vector(prep.u[:, 0])
    a1 = sequence_unitary(perturb(compile_rz(np.pi / 2, flip_stage=True), noise, rng))
    b0 = sequence_unitary(perturb(compile_rz(-theta), noise, rng))
    b1 = sequence_unitary(perturb(compile_rz(theta), noise, rng))
    meas = _analyzer(perturb_angle(MEASURE_HWP, noise, rng))
    return StrategyStar(init, (gates.identity(2), a1), (b0, b1), meas)


def compiled_irreversible_strategy(noise: NoiseModel = NO_NOISE, rng: np.random.Generator | None = None) -> StrategyStar:
    """|H> from the PBS, A1 = flip-stage HWP at 45 deg (X), B_b from the ERASE
    unit's HWP (0 deg for ERASE, 45 deg for I), then H/V detection."""
    rng = rng if rng is not None else np.random.default_rng(0)
    a1 = sequence_unitary(perturb(OpticalSequence((WaveplateElement("HWP", np.pi / 4, True),)), noise, rng))
    b0 = erase_unit_channel(perturb_angle(0.0, noise, rng))
    b1 = erase_unit_channel(perturb_angle(np.pi / 4, noise, rng))
    return StrategyStar(
        state_from_vector([1, 0]),
        (gates.identity(2), a1),
        (b0, b1),
        gates.pauli_measurement("Z"),
    )
