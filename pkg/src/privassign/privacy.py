"""Laplace obfuscation, per-pair budget vectors and local-DP accounting.

Every task-worker pair owns ``Z`` budgets drawn i.i.d. from ``eps_range`` and
sorted ascending, so cheap (noisy) budgets are spent first.  Slot ``u`` of pair
``(task_id, worker_id)`` is a pure function of ``(seed, task_id, worker_id, u)``:
the pair's random stream is derived from the master seed with the ids as spawn
key, so the order in which solvers touch pairs cannot change sampled values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def laplace_from_uniform(u: float, scale: float) -> float:
    """Inverse CDF of Lap(0, scale) for ``u`` uniform in (-0.5, 0.5)."""
    if u == 0.0:
        return 0.0
    return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))


def _centered_uniform(rng: np.random.Generator) -> float:
    u = rng.random() - 0.5
    while u == -0.5:
        u = rng.random() - 0.5
    return u


def sample_laplace(rng: np.random.Generator, scale: float) -> float:
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    return laplace_from_uniform(_centered_uniform(rng), scale)


def obfuscate(d: float, eps: float, rng: np.random.Generator) -> float:
    """d + Lap(0, 1/eps).  Not clamped: obfuscated distances may be negative."""
    if not eps > 0:
        raise ValueError(f"privacy budget must be positive, got {eps}")
    if math.isinf(eps):
        return float(d)
    return d + sample_laplace(rng, 1.0 / eps)


@dataclass
class ObservationSet:
    """Published (obfuscated distance, budget) pairs for one task-worker pair."""

    pairs: list[tuple[float, float]] = field(default_factory=list)

    def add(self, d_hat: float, eps: float):
        if not eps > 0:
            raise ValueError("published budget must be positive")
        self.pairs.append((float(d_hat), float(eps)))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


class LdpLedger:
    """Committed budgets per worker and task, in commit order."""

    def __init__(self):
        self._spent: dict[int, dict[int, list[float]]] = {}

    def record(self, worker_id: int, task_id: int, eps: float):
        self._spent.setdefault(worker_id, {}).setdefault(task_id, []).append(eps)

    def spent(self, worker_id: int, task_id: int) -> float:
        return math.fsum(self._spent.get(worker_id, {}).get(task_id, ()))

    def worker_total(self, worker_id: int) -> float:
        return math.fsum(e for budgets in self._spent.get(worker_id, {}).values()
                         for e in budgets)

    def tasks_of(self, worker_id: int) -> dict[int, float]:
        return {t: math.fsum(b) for t, b in self._spent.get(worker_id, {}).items()}

    def workers(self) -> list[int]:
        return sorted(self._spent)


def ldp_level(ledger: LdpLedger, worker_id: int, radius: float) -> float:
    """Local-DP level r_j * sum_i b_ij . eps_ij of one worker."""
    return radius * ledger.worker_total(worker_id)


class BudgetError(RuntimeError):
    pass


class BudgetVector:
    """Budgets, consumption state and memoized obfuscated distances of one pair.

    ``probe`` draws (once) and returns slot ``u`` without spending it;
    ``commit`` spends the lowest unused slot and publishes its observation.
    """

    def __init__(self, budgets: Sequence[float], uniforms: Optional[Sequence[float]] = None,
                 samples: Optional[Sequence[float]] = None,
                 task_id: int = -1, worker_id: int = -1):
        self.budgets = tuple(float(b) for b in budgets)
        if not self.budgets or any(not b > 0 for b in self.budgets):
            raise ValueError("budget vector needs at least one positive budget")
        self.task_id = task_id
        self.worker_id = worker_id
        self._uniforms = tuple(uniforms) if uniforms is not None else None
        self.samples: list[Optional[float]] = [None] * len(self.budgets)
        if samples is not None:
            if len(samples) != len(self.budgets):
                raise ValueError("need one injected sample per budget")
            self.samples = [float(s) for s in samples]
        self.used = [False] * len(self.budgets)
        self.observations = ObservationSet()

    @property
    def size(self) -> int:
        return len(self.budgets)

    @property
    def n_used(self) -> int:
        return sum(self.used)

    @property
    def next_slot(self) -> Optional[int]:
        k = self.n_used
        return k if k < self.size else None

    @property
    def exhausted(self) -> bool:
        return self.n_used >= self.size

    def spent(self) -> float:
        return math.fsum(b for b, u in zip(self.budgets, self.used) if u)

    def probe(self, u: int, d: float) -> tuple[float, float]:
        if not 0 <= u < self.size:
            raise BudgetError(f"slot {u} out of range for Z={self.size}")
        if self.samples[u] is None:
            eps = self.budgets[u]
            if math.isinf(eps):
                self.samples[u] = float(d)
            else:
                self.samples[u] = d + laplace_from_uniform(self._uniforms[u], 1.0 / eps)
        return self.samples[u], self.budgets[u]

    def commit(self, u: int, ledger: Optional[LdpLedger] = None) -> tuple[float, float]:
        if not 0 <= u < self.size:
            raise BudgetError(f"slot {u} out of range for Z={self.size}")
        if self.used[u]:
            raise BudgetError(f"slot {u} already committed")
        if u != self.n_used:
            raise BudgetError(f"slot {u} committed out of order (next is {self.n_used})")
        if self.samples[u] is None:
            raise BudgetError(f"slot {u} must be probed before commit")
        self.used[u] = True
        pair = (self.samples[u], self.budgets[u])
        if not math.isinf(pair[1]):
            self.observations.add(*pair)
            if ledger is not None:
                ledger.record(self.worker_id, self.task_id, pair[1])
        return pair


class BudgetPool:
    """Lazily created budget vectors for every pair of a run, plus its ledger.

    With ``private=False`` the pool hands out noiseless vectors (infinite
    budgets, obfuscated distance equal to the real one) that only count slots;
    nothing is published to the ledger and no randomness is consumed.
    """

    def __init__(self, seed: int = 0, z: int = 7, eps_range: tuple[float, float] = (0.5, 1.75),
                 private: bool = True):
        lo, hi = eps_range
        if not (0 < lo <= hi):
            raise ValueError(f"bad eps_range {eps_range}")
        if z < 1:
            raise ValueError("budget group size must be >= 1")
        self.seed = int(seed)
        self.z = int(z)
        self.eps_range = (float(lo), float(hi))
        self.private = private
        self.ledger = LdpLedger()
        self._vectors: dict[tuple[int, int], BudgetVector] = {}

    def _draw(self, task_id: int, worker_id: int) -> BudgetVector:
        if not self.private:
            return BudgetVector([math.inf] * self.z, task_id=task_id, worker_id=worker_id)
        ss = np.random.SeedSequence(self.seed & (2**64 - 1), spawn_key=(task_id, worker_id))
        rng = np.random.default_rng(ss)
        lo, hi = self.eps_range
        budgets = np.sort(rng.uniform(lo, hi, self.z))
        uniforms = rng.random(self.z) - 0.5
        uniforms[uniforms == -0.5] = 0.0
        return BudgetVector(budgets.tolist(), uniforms.tolist(),
                            task_id=task_id, worker_id=worker_id)

    def vector(self, task_id: int, worker_id: int) -> BudgetVector:
        key = (task_id, worker_id)
        bv = self._vectors.get(key)
        if bv is None:
            bv = self._vectors[key] = self._draw(task_id, worker_id)
        return bv

    def inject(self, task_id: int, worker_id: int, budgets: Sequence[float],
               samples: Sequence[float]) -> BudgetVector:
        """Fix a pair's budgets and obfuscated distances (worked examples, tests)."""
        bv = BudgetVector(budgets, samples=samples, task_id=task_id, worker_id=worker_id)
        self._vectors[(task_id, worker_id)] = bv
        return bv

    def items(self):
        return self._vectors.items()

    def spent_by_pair(self) -> dict[tuple[int, int], float]:
        """Committed budget per (task_id, worker_id) pair, private pools only."""
        if not self.private:
            return {}
        return {k: bv.spent() for k, bv in self._vectors.items() if bv.n_used}
