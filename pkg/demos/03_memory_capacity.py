#!/usr/bin/env python3
"""Short-term memory capacity of a developed reservoir.

Drives the frozen post-development network with fresh uniform input and
trains one readout per delay. A reservoir in the locked band holds many
recent inputs; a chaotic one forgets almost immediately.
"""

import numpy as np

from kuramoto_rc import ReservoirConfig, gen_narma10, memory_capacity, run_pipeline

for label, lam, rho in (("locked", 4.0, 0.3), ("chaotic", 8.0, 2.0)):
    cfg = ReservoirConfig(lam=lam, spectral_target=rho, seed=5)
    data = gen_narma10(cfg.len_train + cfg.len_test, seed=2)
    developed = run_pipeline(cfg, data).network
    curve = memory_capacity(cfg, developed, k_max=40, seed=9)
    bar_unit = 40
    print(f"{label} reservoir (lam={lam}, rho={rho}): MC = {curve.total:.2f}")
    for k in (1, 2, 3, 5, 8, 13, 21, 34):
        value = curve.coefficients[k - 1]
        print(f"  k={k:<3} MC_k={value:.3f} " + "#" * int(round(bar_unit * value)))
    print()
