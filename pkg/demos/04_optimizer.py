"""
Continuous optimization
=======================

Multi-start Nelder-Mead over SU(d) gate parameters. Qubits saturate at
cos^2(pi/8); a qutrit reaches 1, as does a qubit allowed a partial reset.
"""

import numpy as np

from chshstar.optimizer import OptimizationProblem, OptimizerConfig, optimize

cfg = OptimizerConfig(restarts=20, seed=1)
print("d=2:", optimize(OptimizationProblem(2), cfg).best_w, "vs", np.cos(np.pi / 8) ** 2)
print("qubit + partial reset:", optimize(OptimizationProblem(2, "erase-augmented"), OptimizerConfig(restarts=5, seed=1)).best_w)

# the qutrit run is slower; a handful of restarts is enough to see it
print("d=3:", optimize(OptimizationProblem(3), OptimizerConfig(restarts=10, seed=1)).best_w)
