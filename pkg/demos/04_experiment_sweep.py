"""
A small Monte Carlo sweep
=========================

Each (d, n) cell repeats sampling and reconstruction with its own seed.
Rows are one trial each; failures are rows too.  The summary holds box-plot
statistics per cell.
"""

from periodrecon import ExperimentConfig, run_experiment
from periodrecon.pipeline import box_columns

config = ExperimentConfig(
    signal={"type": "chirp-like", "period": 1.0},
    tau_ratio=0.39,
    d_values=[3],
    n_values=[2000, 8000],
    sigma=0.02,
    radius_rule="sigma",
    radius=5.0,
    trials=4,
    master_seed=7,
)
results = run_experiment(config)

for row in results.rows:
    status = row["failure"] or f"eps_2 = {row['eps_2']:.4f}"
    print(f"d={row['d']} n={row['n']:5d} trial {row['trial']}: {status}")

for cell in results.summary:
    print(f"n={cell['n']}: median eps_2 {cell['eps_2_median']}, failures {cell['failures']}")

# Per-cell columns, ready for any box-plot tool.
print(box_columns(results.rows, "eps_T"))
