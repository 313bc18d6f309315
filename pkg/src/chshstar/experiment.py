"""Finite-shot Monte Carlo runs of the CHSH* experiment.

Every random draw comes from a stream keyed by (seed, point, replica, role):
role 0 supplies the (a, b) inputs, role 1 the outcome uniforms (one per shot,
in shot order), role 2 the optical noise realization. Results therefore do not
depend on how points or replicas are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .game import StrategyStar, keyed_stream, outcome_table, win_probability
from .photonics import NoiseModel, compiled_strategy
from .strategies import unitary_theta_strategy

ROLE_INPUTS, ROLE_OUTCOMES, ROLE_NOISE = 0, 1, 2
DEFAULT_SHOTS = 38_000  # 1000 runs x ~38 detected photons


def default_theta_grid(steps: int = 10) -> list[float]:
    return [k * (np.pi / 2) / steps for k in range(steps + 1)]


@dataclass(frozen=True)
class ExperimentConfig:
    theta_grid: tuple = tuple(default_theta_grid())
    shots_per_point: int = DEFAULT_SHOTS
    seed: int = 42
    noise: NoiseModel = field(default_factory=NoiseModel)
    use_compiled_optics: bool = False
    balanced: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in self.theta_grid))
        if not self.theta_grid:
            raise ValueError("theta_grid must be nonempty")
        if self.shots_per_point < 1:
            raise ValueError("shots_per_point must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SweepRecord:
    theta: float
    w_exact: float
    w_hat: float
    stderr: float
    shots: int
    seed: int


def binomial_stderr(w_hat: float, shots: int) -> float:
    return math.sqrt(w_hat * (1 - w_hat) / shots)


def draw_inputs(shots: int, rng: np.random.Generator, balanced: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random (a, b) per shot; ``balanced`` shuffles equal blocks instead."""
    if balanced:
        ab = np.resize(np.arange(4), shots)
        rng.shuffle(ab)
    else:
        ab = rng.integers(0, 4, size=shots)
    return ab >> 1, ab & 1


def run_point(s: StrategyStar, shots: int, seed: int, *key: int, balanced: bool = False) -> tuple[float, float]:
    """Play ``shots`` rounds; returns (w_hat, stderr).

    Vectorized equivalent of calling :func:`chshstar.game.play_round` once per
    shot with the role-1 stream: shot n is won iff ``u_n < p(c=1|a_n, b_n)``
    agrees with ``a_n * b_n``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    a, b = draw_inputs(shots, keyed_stream(seed, *key, ROLE_INPUTS), balanced)
    u = keyed_stream(seed, *key, ROLE_OUTCOMES).random(shots)
    c = (u < outcome_table(s)[a, b]).astype(int)
    w_hat = float(np.mean(c == (a & b)))
    return w_hat, binomial_stderr(w_hat, shots)


def _map(fn, items, workers: int) -> list:
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def point_strategy(cfg: ExperimentConfig, index: int) -> StrategyStar:
    theta = cfg.theta_grid[index]
    if cfg.use_compiled_optics:
        return compiled_strategy(theta, cfg.noise, keyed_stream(cfg.seed, index, 0, ROLE_NOISE))
    return unitary_theta_strategy(theta)


def sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """One record per grid angle, carrying the exact value and the shot estimate."""

    def one(i: int) -> SweepRecord:
        s = point_strategy(cfg, i)
        w_hat, err = run_point(s, cfg.shots_per_point, cfg.seed, i, 0, balanced=cfg.balanced)
        return SweepRecord(cfg.theta_grid[i], win_probability(s).w, w_hat, err, cfg.shots_per_point, cfg.seed)

    return _map(one, range(len(cfg.theta_grid)), cfg.workers)


def replicate_statistics(
    s: StrategyStar, shots: int, replicas: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    """Sample mean and sample standard deviation (ddof=1) of w_hat over replicas."""
    if replicas < 2:
        raise ValueError("replicas must be >= 2")
    est = _map(lambda r: run_point(s, shots, seed, 0, r)[0], range(replicas), workers)
    return float(np.mean(est)), float(np.std(est, ddof=1))
