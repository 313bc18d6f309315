"""
States, channels and measurements
=================================

The small density-matrix toolkit everything else is built on.
"""

import numpy as np

from chshstar import gates
from chshstar.quantum import apply_channel, basis_state, outcome_probabilities, state_from_vector, trace_distance

# |+> as a density matrix
plus = state_from_vector([1, 1])
print(plus.rho.real)

# Rz(pi/2) rotates |+> towards |+i>
rotated = apply_channel(plus, gates.unitary_as_channel(gates.rz(np.pi / 2)))
print(np.round(rotated.rho, 3))

# the reset map sends anything to |0>
print(apply_channel(basis_state(2, 1), gates.erase_channel(2)).rho.real)

# X measurement on |0>: a fair coin
print(outcome_probabilities(basis_state(2, 0), gates.pauli_measurement("X")))

print("D(|0>, |+>) =", trace_distance(basis_state(2, 0), plus))
