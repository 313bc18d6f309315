"""
Finite-shot experiment
======================

38,000 random rounds per angle, as in a run of 1000 repetitions with about
38 detected photons each.
"""

import numpy as np

from chshstar.experiment import DEFAULT_SHOTS, ExperimentConfig, binomial_stderr, replicate_statistics, sweep
from chshstar.strategies import unitary_theta_strategy

for rec in sweep(ExperimentConfig()):
    print(f"theta={rec.theta:.4f}  exact={rec.w_exact:.4f}  measured={rec.w_hat:.4f} +/- {rec.stderr:.4f}")

mean, sd = replicate_statistics(unitary_theta_strategy(np.pi / 4), DEFAULT_SHOTS, 200, seed=1)
print(f"200 replicas at pi/4: mean {mean:.5f}, spread {sd:.5f}")

# near-perfect success leaves almost no binomial spread
print("shot-noise sd at w=0.9984:", binomial_stderr(0.9984, DEFAULT_SHOTS))
