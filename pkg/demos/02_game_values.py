"""
Evaluating CHSH* strategies
===========================

Exact winning probabilities for the rotation family, the reset strategy and
the two-player CHSH reference points.
"""

import numpy as np

from chshstar.game import box_win_probability, chsh_win_probability, classical_chsh_value, pr_box, win_probability
from chshstar.strategies import chsh_optimal_strategy, closed_form_w, irreversible_strategy, unitary_theta_strategy

for theta in np.linspace(0, np.pi / 2, 5):
    w = win_probability(unitary_theta_strategy(theta)).w
    print(f"theta={theta:.4f}  engine={w:.7f}  formula={closed_form_w(theta):.7f}")

table = win_probability(irreversible_strategy())
print("reset strategy:", table.w, table.success.tolist())

# two-player reference values
print("classical CHSH:", classical_chsh_value())
print("quantum CHSH:  ", chsh_win_probability(chsh_optimal_strategy()))
print("PR box:        ", box_win_probability(pr_box()))
