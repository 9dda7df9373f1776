"""Random small instances shared by the solver tests."""

from __future__ import annotations

import numpy as np

from privassign.core import Instance, Task, Worker


def random_instance(rng: np.random.Generator, m: int, n: int, value=(2.0, 8.0),
                    radius=(1.0, 4.0), side=5.0, integer=False) -> Instance:
    if integer:
        tasks = [Task(i, (0.0, 0.0), float(rng.integers(int(value[0]), int(value[1]) + 1)))
                 for i in range(m)]
        workers = [Worker(j, (0.0, 0.0), float(radius[1])) for j in range(n)]
        dist = {(i, j): float(rng.integers(0, int(radius[1]) + 1))
                for i in range(m) for j in range(n) if rng.random() < 0.8}
        return Instance(tasks, workers, dist)
    tasks = [Task(i, tuple(rng.uniform(0, side, 2)), float(rng.uniform(*value))) for i in range(m)]
    workers = [Worker(j, tuple(rng.uniform(0, side, 2)), float(rng.uniform(*radius)))
               for j in range(n)]
    return Instance(tasks, workers)
