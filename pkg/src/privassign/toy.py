"""A three-task, three-worker instance with fixed observations.

Distances are given directly (no coordinates).  ``toy_pool`` injects, for each
in-range pair, three budgets with the obfuscated distance each one publishes,
so the solvers' decisions on this instance are fully determined.
"""

from __future__ import annotations

from .core import Instance, MatchState, Task, Worker
from .privacy import BudgetPool

VALUES = (12.4, 11.0, 13.0)
RADII = (15.0, 15.0, 10.0)

# (task index, worker index) -> true distance
DISTANCES = {
    (0, 0): 12.2, (1, 0): 3.61, (2, 0): 17.12,
    (0, 1): 5.0, (1, 1): 10.44, (2, 1): 12.21,
    (0, 2): 9.43, (1, 2): 18.25, (2, 2): 7.28,
}

# (task id, worker id) -> [(obfuscated distance, budget), ...] in slot order
OBSERVATIONS = {
    (1, 1): [(12.7, 0.1), (12.4, 0.3), (12.3, 0.4)],
    (1, 2): [(5.5, 4.6), (5.3, 4.65), (5.1, 4.8)],
    (1, 3): [(9.93, 0.1), (9.63, 0.4), (9.53, 0.4)],
    (2, 1): [(4.11, 6.99), (4.01, 7.1), (3.81, 7.2)],
    (2, 2): [(10.94, 0.1), (10.64, 0.2), (10.54, 0.5)],
    (3, 2): [(12.71, 0.1), (12.51, 0.3), (12.31, 0.4)],
    (3, 3): [(7.78, 5.4), (7.58, 5.5), (7.38, 5.6)],
}


def toy_instance() -> Instance:
    tasks = [Task(k + 1, (0.0, 0.0), v) for k, v in enumerate(VALUES)]
    workers = [Worker(k + 1, (0.0, 0.0), r) for k, r in enumerate(RADII)]
    return Instance(tasks, workers, DISTANCES)


def toy_pool() -> BudgetPool:
    pool = BudgetPool(z=3)
    for (t, w), obs in OBSERVATIONS.items():
        pool.inject(t, w, [e for _, e in obs], [d for d, _ in obs])
    return pool


def publish_first_slots(pool: BudgetPool):
    """Commit slot 0 of every injected pair, as if each had already published once."""
    for (t, w), bv in pool.items():
        bv.probe(0, 0.0)
        bv.commit(0, pool.ledger)


def toy_game_start() -> MatchState:
    """Task i held by worker i for every i."""
    return MatchState.from_pairs(3, [(0, 0), (1, 1), (2, 2)])
