"""
Misaligned optics
=================

Gaussian jitter on every plate angle, averaged over noise realizations.
"""

import numpy as np

from chshstar.game import keyed_stream, win_probability
from chshstar.photonics import NoiseModel, compiled_irreversible_strategy, compiled_strategy

for sigma in (0.0, 0.01, 0.02, 0.05):
    noise = NoiseModel(sigma)
    ws = [win_probability(compiled_strategy(np.pi / 4, noise, keyed_stream(s))).w for s in range(500)]
    print(f"sigma={sigma:.2f} rad  mean w={np.mean(ws):.5f}")

noise = NoiseModel(0.02)
ws = [win_probability(compiled_irreversible_strategy(noise, keyed_stream(s))).w for s in range(500)]
print("reset strategy at sigma=0.02:", np.mean(ws))
