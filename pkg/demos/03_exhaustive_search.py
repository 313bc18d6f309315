"""
Brute-force searches
====================

Deterministic bits and Clifford qubits stall at 3/4; permutations of a qutrit
already win every round.
"""

from chshstar.strategies import classical_search_d2, clifford_search_d2, qudit_permutation_search

for report in (classical_search_d2(), clifford_search_d2(), clifford_search_d2(extended=True)):
    print(f"{report.setting:22s} best={report.best_w}  space={report.search_space_size}  optima={report.n_optima}")

for d in (2, 3, 4):
    rep = qudit_permutation_search(d, max_optima=1)
    print(f"permutations d={d}: best={rep.best_w}  first optimum={rep.optima[0]}")
