"""Simulator, strategy search and Monte Carlo harness for the CHSH* game."""

from .experiment import ExperimentConfig, SweepRecord, replicate_statistics, run_point, sweep
from .game import (
    GameTable,
    NoSignalingBox,
    StrategyStar,
    chsh_win_probability,
    classical_chsh_value,
    keyed_stream,
    play_round,
    win_probability,
)
from .gates import channel_from_label, gate_from_label, parse_label, unitary_from_params
from .optimizer import OptimizationProblem, OptimizerConfig, optimize
from .photonics import NoiseModel, compile_rz, compiled_irreversible_strategy, compiled_strategy
from .quantum import BinaryMeasurement, DensityMatrix, QuantumChannel, UnitaryGate, apply_channel
from .strategies import (
    SearchReport,
    classical_search_d2,
    clifford_search_d2,
    closed_form_w,
    irreversible_strategy,
    qudit_permutation_search,
    unitary_theta_strategy,
)

__all__ = [
    "BinaryMeasurement", "DensityMatrix", "ExperimentConfig", "GameTable", "NoSignalingBox",
    "NoiseModel", "OptimizationProblem", "OptimizerConfig", "QuantumChannel", "SearchReport",
    "StrategyStar", "SweepRecord", "UnitaryGate", "apply_channel", "channel_from_label",
    "chsh_win_probability", "classical_chsh_value", "classical_search_d2", "clifford_search_d2",
    "closed_form_w", "compile_rz", "compiled_irreversible_strategy", "compiled_strategy",
    "gate_from_label", "irreversible_strategy", "keyed_stream", "optimize", "parse_label",
    "play_round", "qudit_permutation_search", "replicate_statistics", "run_point", "sweep",
    "unitary_from_params", "unitary_theta_strategy", "win_probability",
]
