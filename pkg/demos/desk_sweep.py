"""A small worker-ratio sweep for the private solvers, printed as CSV.

Each row is one method at one ratio, measured against its non-private
counterpart on the same synthetic batch.
"""

import sys

from privassign.harness import ExperimentConfig, format_rows, run_sweep, sweep_grid

if __name__ == "__main__":
    rows = []
    for algo in ("puce", "pdce", "pgt"):
        base = ExperimentConfig(algo=algo, n_tasks=200, batch_size=200, seed=1,
                                record_time=False)
        rows += run_sweep(sweep_grid(base, "worker_task_ratio", [1, 2, 3]))
    sys.stdout.write(format_rows(rows))
