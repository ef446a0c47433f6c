#!/usr/bin/env python3
"""Error and synchrony over a small (coupling, radius) grid.

A condensed version of the full landscape sweep: prediction error and the
post-development order parameter move together, with the well-performing
cells sitting in the partially synchronized band.
"""

import numpy as np

from kuramoto_rc import ReservoirConfig, SweepSpec, run_grid_sweep

spec = SweepSpec(
    task="narma10",
    base=ReservoirConfig(),
    axes={
        "lam": [0.5, 1.0, 2.0, 4.0, 8.0],
        "spectral_target": [0.1, 0.3, 0.9, 1.5],
    },
    trials=2,
    master_seed=11,
    workers=2,
)
result = run_grid_sweep(spec)

lams = spec.axes["lam"]
rhos = spec.axes["spectral_target"]
cells = {(a["lam"], a["spectral_target"]): a for a in result.aggregates}

print("test MSE (rows: coupling strength, columns: spectral target)")
print("        " + "  ".join(f"rho={r:<6}" for r in rhos))
for lam in lams:
    row = "  ".join(f"{cells[(lam, r)]['test_mse_mean']:<10.4f}" for r in rhos)
    print(f"lam={lam:<4} {row}")

print()
print("order parameter r after development")
print("        " + "  ".join(f"rho={r:<6}" for r in rhos))
for lam in lams:
    row = "  ".join(f"{cells[(lam, r)]['order_r_mean']:<10.3f}" for r in rhos)
    print(f"lam={lam:<4} {row}")

high = [a["test_mse_mean"] for a in result.aggregates if a["order_r_mean"] > 0.5]
low = [a["test_mse_mean"] for a in result.aggregates if a["order_r_mean"] <= 0.5]
if high and low:
    print()
    print(f"mean MSE where r > 0.5 : {np.mean(high):.4f}  ({len(high)} cells)")
    print(f"mean MSE where r <= 0.5: {np.mean(low):.4f}  ({len(low)} cells)")
