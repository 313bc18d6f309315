"""Multi-start Nelder-Mead maximization of the CHSH* value over strategy families."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import gates
from .game import StrategyStar, keyed_stream, win_probability
from .quantum import BinaryMeasurement, DensityMatrix, basis_state, state_from_vector
from .strategies import init_from_label

FAMILIES = ("unitary-gates", "unitary-gates-free-init", "erase-augmented")


@dataclass(frozen=True, eq=False)
class OptimizationProblem:
    """A parametrized strategy family.

    ``unitary-gates``: the four gates are free SU(d) elements, the input and
    measurement are fixed (|+> and X for d=2; |0> and the S={2} binarizer for
    d=3). ``unitary-gates-free-init`` additionally parametrizes the input as
    U|0>. ``erase-augmented`` (d=2) uses |0> and Z, free A0, A1, B1, and
    B0 = lam*ERASE + (1-lam)*I with lam = sin(t)**2.
    """

    d: int
    family: str = "unitary-gates"
    init: DensityMatrix | None = None
    meas: BinaryMeasurement | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.d not in (2, 3):
            raise ValueError("optimizer supports d = 2 or 3")
        if self.family == "erase-augmented" and self.d != 2:
            raise ValueError("erase-augmented family is qubit-only")
        if self.init is None:
            if self.family == "erase-augmented" or self.d == 3:
                init = basis_state(self.d, 0)
            else:
                init = init_from_label("|+>")
            object.__setattr__(self, "init", init)
        if self.meas is None:
            if self.family == "erase-augmented":
                meas = gates.pauli_measurement("Z")
            elif self.d == 2:
                meas = gates.pauli_measurement("X")
            else:
                meas = gates.subset_measurement(3, [2])
            object.__setattr__(self, "meas", meas)

    @property
    def n_params(self) -> int:
        k = gates.n_params(self.d)
        if self.family == "unitary-gates":
            return 4 * k
        if self.family == "unitary-gates-free-init":
            return 5 * k
        return 3 * k + 1

    def strategy(self, params: Sequence[float]) -> StrategyStar:
        p = np.asarray(params, dtype=float)
        if p.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {p.size}")
        k = gates.n_params(self.d)
        us = [gates.unitary_from_params(self.d, p[i * k:(i + 1) * k]) for i in range(len(p) // k)]
        if self.family == "unitary-gates":
            return StrategyStar(self.init, (us[0], us[1]), (us[2], us[3]), self.meas)
        if self.family == "unitary-gates-free-init":
            psi = us[4].u[:, 0]
            return StrategyStar(state_from_vector(psi), (us[0], us[1]), (us[2], us[3]), self.meas)
        lam = math.sin(p[-1]) ** 2
        b0 = gates.mixture_channel(
            [gates.erase_channel(2), gates.unitary_as_channel(gates.identity(2))], [lam, 1 - lam]
        )
        return StrategyStar(self.init, (us[0], us[1]), (b0, us[2]), self.meas)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 50
    scale: float = 0.5
    tol: float = 1e-12
    max_iter: int = 20000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.scale <= 0 or self.max_iter < 1 or self.workers < 1:
            raise ValueError("restarts, scale, max_iter and workers must be positive")
        if self.tol < 1e-12:
            raise ValueError("tol must be >= 1e-12")


@dataclass
class OptimizationReport:
    best_w: float
    best_params: list[float]
    restarts: list[dict] = field(default_factory=list)
    n_evals: int = 0
    best_restart: int = 0


def objective(problem: OptimizationProblem, params: Sequence[float]) -> float:
    return win_probability(problem.strategy(params)).w


def _pure_vector(rho: DensityMatrix) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho.rho)
    if abs(vals[-1] - 1) > 1e-12:
        raise ValueError("fixed input state must be pure")
    return vecs[:, -1]


def fast_objective(problem: OptimizationProblem) -> Callable[[np.ndarray], float]:
    """Validation-free evaluator equal to ``objective(problem, .)``.

    Works on raw arrays (state vectors for the unitary families); used inside
    the simplex loop, where the dataclass checks dominate the cost.
    """
    d, k = problem.d, gates.n_params(problem.d)
    e1 = np.asarray(problem.meas.effect1)
    # success[a, b] = 1 - p1 when a*b = 0, p1 when a = b = 1
    sign = np.array([[-1, -1], [-1, 1]])
    offset = np.array([[1, 1], [1, 0]])

    def value(p1: np.ndarray) -> float:
        return float(np.mean(offset + sign * p1))

    if problem.family == "erase-augmented":
        rho0 = np.asarray(problem.init.rho)
        erase = [np.asarray(m) for m in gates.erase_channel(2).kraus]

        def f(params):
            p = np.asarray(params, dtype=float)
            a0, a1, b1 = (gates.su_matrix(2, p[i * k:(i + 1) * k]) for i in range(3))
            lam = math.sin(p[-1]) ** 2
            b0 = [np.sqrt(lam) * m for m in erase] + [np.sqrt(1 - lam) * np.eye(2)]
            p1 = np.empty((2, 2))
            for a, ua in enumerate((a0, a1)):
                mid = ua @ rho0 @ ua.conj().T
                for b, ks in enumerate((b0, [b1])):
                    out = sum(m @ mid @ m.conj().T for m in ks)
                    p1[a, b] = np.trace(e1 @ out).real
            return value(p1)

        return f

    psi_fixed = _pure_vector(problem.init)

    def f(params):
        p = np.asarray(params, dtype=float)
        us = [gates.su_matrix(d, p[i * k:(i + 1) * k]) for i in range(len(p) // k)]
        psi = us[4][:, 0] if problem.family == "unitary-gates-free-init" else psi_fixed
        phi = np.stack([us[0] @ psi, us[1] @ psi])  # (a, :)
        chi = np.stack([phi @ us[2].T, phi @ us[3].T], axis=1)  # (a, b, :)
        p1 = np.einsum("abi,ij,abj->ab", chi.conj(), e1, chi).real
        return value(p1)

    return f


def nelder_mead(f: Callable, start: Sequence[float], cfg: OptimizerConfig, callback=None):
    """Maximize ``f`` from ``start``; returns (params, value, info).

    Standard simplex coefficients (reflection 1, expansion 2, contraction 1/2,
    shrink 1/2); stops when the simplex value spread drops below ``cfg.tol`` or
    after ``cfg.max_iter`` iterations.
    """
    x0 = np.asarray(start, dtype=float)
    n = x0.size
    simplex = np.vstack([x0, x0 + cfg.scale * np.eye(n)])
    res = minimize(
        lambda x: -f(x),
        x0,
        method="Nelder-Mead",
        callback=callback,
        options={
            "initial_simplex": simplex,
            "fatol": cfg.tol,
            "xatol": np.inf,
            "maxiter": cfg.max_iter,
            "maxfev": 10**9,
            "adaptive": False,
        },
    )
    value = f(res.x)
    return res.x, value, {"n_iter": int(res.nit), "n_eval": int(res.nfev) + 1}


def _restart(problem: OptimizationProblem, cfg: OptimizerConfig, r: int):
    rng = keyed_stream(cfg.seed, r)
    start = rng.uniform(-np.pi, np.pi, problem.n_params)
    x, _, info = nelder_mead(fast_objective(problem), start, cfg)
    # Reported values always come from the exact engine.
    value = objective(problem, x)
    return x, value, {"restart": r, "start_w": objective(problem, start), "final_w": value, **info}


def optimize(problem: OptimizationProblem, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationReport:
    """Multi-start maximization; restart ``r`` starts from stream (seed, r).

    The report does not depend on ``cfg.workers``: results are merged in
    restart order and ties go to the lowest restart index.
    """
    if cfg.workers == 1:
        results = [_restart(problem, cfg, r) for r in range(cfg.restarts)]
    else:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda r: _restart(problem, cfg, r), range(cfg.restarts)))
    best = max(range(len(results)), key=lambda r: (results[r][1], -r))
    x, value, _ = results[best]
    return OptimizationReport(
        best_w=float(value),
        best_params=[float(v) for v in x],
        restarts=[info for _, _, info in results],
        n_evals=sum(info["n_eval"] + 1 for _, _, info in results),
        best_restart=best,
    )


def finite_difference_gradient(f: Callable, params: Sequence[float], h: float = 1e-5) -> np.ndarray:
    if h <= 0:
        raise ValueError("step must be positive")
    p = np.atleast_1d(np.asarray(params, dtype=float))
    grad = np.empty_like(p)
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = h
        grad[i] = (f(p + e) - f(p - e)) / (2 * h)
    return grad


def optimal_d2_params() -> np.ndarray:
    """Parameters of (I, Rz(pi/2), Rz(-pi/4), Rz(pi/4)) in the d=2 unitary-gates family."""
    return np.array([0, 0, 0, np.pi / 2, 0, 0, -np.pi / 4, 0, 0, np.pi / 4, 0, 0], dtype=float)
