"""Domain entities shared by every solver: tasks, workers, value functions,
problem instances and the one-to-one match state."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class Task:
    id: int
    location: tuple[float, float]
    value: float
    release_time: float = 0.0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"task {self.id}: value must be >= 0, got {self.value}")


@dataclass(frozen=True)
class Worker:
    id: int
    location: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"worker {self.id}: radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class ValueFunctions:
    """Linear distance and privacy value functions f_d(x)=alpha*x, f_p(x)=beta*x."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")

    def distance_cost(self, d: float) -> float:
        return self.alpha * d

    def distance_cost_inverse(self, value: float) -> float:
        return value / self.alpha

    def privacy_cost(self, eps: float) -> float:
        return self.beta * eps


def distance(task: Task, worker: Worker) -> float:
    """Euclidean distance between a task and a worker."""
    return math.hypot(task.location[0] - worker.location[0],
                      task.location[1] - worker.location[1])


class Instance:
    """A batch of tasks and workers with their in-range pairs.

    Solvers address tasks and workers by position (``i``, ``j``); ids are kept
    for keying random streams and for output.  ``distances`` optionally
    overrides the Euclidean metric with an explicit ``{(i, j): d}`` table, which
    is how hand-specified instances (no coordinates) are built.
    """

    def __init__(self, tasks: Sequence[Task], workers: Sequence[Worker],
                 distances: Optional[Mapping[tuple[int, int], float]] = None):
        self.tasks = tuple(tasks)
        self.workers = tuple(workers)
        for label, items in (("task", self.tasks), ("worker", self.workers)):
            ids = [x.id for x in items]
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {label} ids")
        self._dist: dict[tuple[int, int], float] = {}
        if distances is not None:
            for (i, j), d in distances.items():
                if d <= self.workers[j].radius:
                    self._dist[(i, j)] = float(d)
        else:
            self._build_reach()
        reach: list[list[int]] = [[] for _ in self.workers]
        cover: list[list[int]] = [[] for _ in self.tasks]
        for (i, j) in sorted(self._dist):
            reach[j].append(i)
            cover[i].append(j)
        self.reach = tuple(tuple(r) for r in reach)
        self.coverers = tuple(tuple(c) for c in cover)

    def _build_reach(self):
        if not self.tasks or not self.workers:
            return
        pts = np.array([t.location for t in self.tasks], dtype=float)
        tree = cKDTree(pts)
        for j, w in enumerate(self.workers):
            # small slack so boundary points survive the tree's float test;
            # membership is decided by the exact check below
            for i in tree.query_ball_point(w.location, w.radius * (1 + 1e-12) + 1e-12):
                d = distance(self.tasks[i], w)
                if d <= w.radius:
                    self._dist[(i, j)] = d

    @property
    def m(self) -> int:
        return len(self.tasks)

    @property
    def n(self) -> int:
        return len(self.workers)

    def in_reach(self, i: int, j: int) -> bool:
        return (i, j) in self._dist

    def dist(self, i: int, j: int) -> float:
        try:
            return self._dist[(i, j)]
        except KeyError:
            raise KeyError(f"task {self.tasks[i].id} is not in range of worker "
                           f"{self.workers[j].id}") from None

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self._dist)


@dataclass
class MatchState:
    """One-to-one allocation: ``allocation[i]`` is the worker index serving task i."""

    allocation: list[Optional[int]]
    matched_worker: dict[int, int] = field(default_factory=dict)

    @classmethod
    def empty(cls, m: int) -> "MatchState":
        return cls([None] * m)

    @classmethod
    def from_pairs(cls, m: int, pairs: Iterable[tuple[int, int]]) -> "MatchState":
        state = cls.empty(m)
        for i, j in pairs:
            state.assign(i, j)
        return state

    def copy(self) -> "MatchState":
        return MatchState(list(self.allocation), dict(self.matched_worker))

    def task_of(self, j: int) -> Optional[int]:
        return self.matched_worker.get(j)

    def assign(self, i: int, j: int):
        if j in self.matched_worker and self.matched_worker[j] != i:
            raise ValueError(f"worker {j} already holds task {self.matched_worker[j]}")
        prev = self.allocation[i]
        if prev is not None:
            del self.matched_worker[prev]
        self.allocation[i] = j
        self.matched_worker[j] = i

    def vacate(self, i: int):
        j = self.allocation[i]
        if j is not None:
            del self.matched_worker[j]
            self.allocation[i] = None

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.allocation) if j is not None]

    def check(self):
        seen = {}
        for i, j in enumerate(self.allocation):
            if j is None:
                continue
            if j in seen:
                raise AssertionError(f"worker {j} assigned to tasks {seen[j]} and {i}")
            seen[j] = i
        if seen != self.matched_worker:
            raise AssertionError("allocation and matched_worker disagree")


def true_utility(instance: Instance, vf: ValueFunctions, i: int, j: int,
                 spent_budget: float) -> float:
    """U_j(i) = v_i - f_d(d_ij) - f_p(spent)."""
    if not instance.in_reach(i, j):
        raise ValueError(f"task {instance.tasks[i].id} not in R_j of worker "
                         f"{instance.workers[j].id}")
    return (instance.tasks[i].value - vf.distance_cost(instance.dist(i, j))
            - vf.privacy_cost(spent_budget))


def objective_value(instance: Instance, vf: ValueFunctions, match: MatchState,
                    spent: Mapping[tuple[int, int], float]) -> float:
    """Total platform profit of a match.

    ``spent`` maps ``(i, j)`` to the budget that pair has consumed.  The privacy
    term is charged for every pair that ever proposed, matched or not.
    """
    total = 0.0
    for i, j in match.pairs():
        total += instance.tasks[i].value - vf.distance_cost(instance.dist(i, j))
    return total - vf.privacy_cost(math.fsum(spent.values()))
