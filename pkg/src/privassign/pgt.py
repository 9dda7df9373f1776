"""Best-response dynamics of the private assignment potential game.

Workers take turns in sweeps of ascending id.  On its turn a worker evaluates
every task in range (other than the one it holds) with the next unused budget
of that pair, and moves to the best one if the move's utility change is
positive.  Only an accepted move publishes the probed observation.  The run
stops after a sweep without a move.

The utility change of moving worker j from task i1 to task i2 is

    UT = [v2 - f_d(d~_new(i2, j)) - f_p(eps)]      winning i2
       + [-v2 + f_d(d~(i2, incumbent))]            incumbent defeated (0 if vacant)
       + [-v1 + f_d(d~(i1, j))]                    i1 abandoned (0 if j held nothing)

and equals the change of the potential ``potential``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .compare import EffectivePair, effective_pair
from .core import Instance, MatchState, ValueFunctions
from .privacy import BudgetError, BudgetPool

POTENTIAL_TOL = 1e-9


@dataclass(frozen=True)
class Response:
    task: int
    utility: float
    d_hat: float
    eps: float
    d_eff: float


@dataclass
class Turn:
    index: int
    worker: int
    responses: list[Response]
    accepted: Optional[Response]


@dataclass
class GameState:
    """A PGT run: allocation, published observations (in the pool) and trace."""

    instance: Instance
    vf: ValueFunctions
    pool: BudgetPool
    allocation: MatchState = None
    check_potential: bool = False
    turns: list[Turn] = field(default_factory=list)
    deviations: int = 0
    halted: bool = False
    _cursor: int = field(default=0, init=False, repr=False)
    _sweep_moved: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        if self.allocation is None:
            self.allocation = MatchState.empty(self.instance.m)
        self.allocation.check()
        for i, j in self.allocation.pairs():
            if not self.instance.in_reach(i, j):
                raise ValueError(f"initial pair ({i}, {j}) is out of range")
            if self.pool.private and not self._vector(i, j).observations:
                raise ValueError(f"initial pair ({i}, {j}) has no published observation")

    @property
    def private(self) -> bool:
        return self.pool.private

    def _vector(self, i: int, j: int):
        return self.pool.vector(self.instance.tasks[i].id, self.instance.workers[j].id)

    def effective(self, i: int, j: int) -> EffectivePair:
        if not self.private:
            return EffectivePair(self.instance.dist(i, j), math.inf)
        return effective_pair(self._vector(i, j).observations)

    def _d_cost(self, i: int, j: int) -> float:
        return self.vf.distance_cost(self.effective(i, j).d_eff)

    def response_utility(self, j: int, i2: int) -> Response:
        inst, vf = self.instance, self.vf
        if not inst.in_reach(i2, j):
            raise ValueError(f"task {i2} is not in range of worker {j}")
        i1 = self.allocation.task_of(j)
        if i1 == i2:
            raise ValueError("worker already holds the target task")
        d = inst.dist(i2, j)
        if self.private:
            bv = self._vector(i2, j)
            u = bv.next_slot
            if u is None:
                raise BudgetError(f"budgets of pair ({i2}, {j}) are exhausted")
            d_hat, eps = bv.probe(u, d)
            d_new = effective_pair(list(bv.observations) + [(d_hat, eps)]).d_eff
            cost = vf.privacy_cost(eps)
        else:
            d_hat, eps, d_new, cost = d, math.inf, d, 0.0
        v2 = inst.tasks[i2].value
        ut = v2 - vf.distance_cost(d_new) - cost
        incumbent = self.allocation.allocation[i2]
        if incumbent is not None:
            ut += -v2 + self._d_cost(i2, incumbent)
        if i1 is not None:
            ut += -inst.tasks[i1].value + self._d_cost(i1, j)
        return Response(i2, ut, d_hat, eps, d_new)

    def candidates(self, j: int) -> list[int]:
        held = self.allocation.task_of(j)
        out = []
        for i in self.instance.reach[j]:
            if i == held:
                continue
            if self.private and self._vector(i, j).exhausted:
                continue
            out.append(i)
        return out

    def best_response(self, j: int, responses: Optional[list] = None) -> Optional[Response]:
        best = None
        for i in self.candidates(j):
            r = self.response_utility(j, i)
            if responses is not None:
                responses.append(r)
            # ties keep the lower task index
            if best is None or r.utility > best.utility:
                best = r
        if best is None or best.utility <= 0:
            return None
        return best

    def potential(self) -> float:
        inst, vf = self.instance, self.vf
        total = math.fsum(inst.tasks[i].value - self._d_cost(i, j)
                          for i, j in self.allocation.pairs())
        if self.private:
            total -= vf.privacy_cost(math.fsum(self.pool.spent_by_pair().values()))
        return total

    def _accept(self, j: int, r: Response):
        before = self.potential() if self.check_potential else None
        if self.private:
            bv = self._vector(r.task, j)
            bv.commit(bv.next_slot, self.pool.ledger)
        held = self.allocation.task_of(j)
        if held is not None:
            self.allocation.vacate(held)
        incumbent = self.allocation.allocation[r.task]
        if incumbent is not None:
            self.allocation.vacate(r.task)
        self.allocation.assign(r.task, j)
        self.deviations += 1
        if before is not None:
            delta = self.potential() - before
            scale = max(1.0, abs(before), abs(r.utility))
            if abs(delta - r.utility) > POTENTIAL_TOL * scale:
                raise AssertionError(f"potential changed by {delta}, utility change {r.utility}")
            if not delta > 0:
                raise AssertionError("potential did not increase on an accepted move")

    def step(self) -> Turn:
        """Play the next worker's turn."""
        j = self._cursor
        responses: list[Response] = []
        best = self.best_response(j, responses)
        if best is not None:
            self._accept(j, best)
            self._sweep_moved = True
        turn = Turn(len(self.turns) + 1, j, responses, best)
        self.turns.append(turn)
        self._cursor = (j + 1) % self.instance.n
        if self._cursor == 0:
            self.halted = not self._sweep_moved
            self._sweep_moved = False
        return turn

    def run(self, max_turns: Optional[int] = None) -> MatchState:
        """Play turns until a sweep passes without a move (or ``max_turns`` in total)."""
        if self.instance.n == 0:
            self.halted = True
        while not self.halted and (max_turns is None or len(self.turns) < max_turns):
            self.step()
        return self.allocation

    def is_equilibrium(self) -> bool:
        return all(self.best_response(j) is None for j in range(self.instance.n))


def run_pgt(instance: Instance, vf: ValueFunctions, pool: BudgetPool,
            initial: Optional[MatchState] = None) -> MatchState:
    return GameState(instance, vf, pool, initial).run()


def _integral(x: float, scale: int) -> bool:
    y = x * scale
    return abs(y - round(y)) <= 1e-9 * max(1.0, abs(y))


def convergence_bound(instance: Instance, vf: ValueFunctions, pool: BudgetPool,
                      scale: int) -> int:
    """Upper bound on accepted moves of a run started from the empty allocation.

    Every move raises the potential by at least ``1/scale``, and the potential
    never exceeds the best matching with each pair at its smallest possible
    effective distance and no spend.  Requires a private pool; draws every slot.
    """
    from .baselines import max_weight_matching

    if not (isinstance(scale, int) and scale > 0):
        raise ValueError("scale must be a positive integer")
    if not pool.private:
        raise ValueError("convergence bound needs a private budget pool")
    weights = {}
    for i, j in instance.pairs():
        v = instance.tasks[i].value
        if not _integral(v, scale):
            raise ValueError(f"task value {v} is not a multiple of 1/{scale}")
        bv = pool.vector(instance.tasks[i].id, instance.workers[j].id)
        d = instance.dist(i, j)
        d_hats = []
        for u in range(bv.size):
            d_hat, eps = bv.probe(u, d)
            if not (_integral(vf.distance_cost(d_hat), scale)
                    and _integral(vf.privacy_cost(eps), scale)):
                raise ValueError(f"pair ({i}, {j}) slot {u} is not a multiple of 1/{scale}")
            d_hats.append(d_hat)
        weights[(i, j)] = v - vf.distance_cost(min(d_hats))
    best = max_weight_matching(weights)
    return int(round(scale * math.fsum(weights[p] for p in best)))


def epoa_bounds(instance: Instance, vf: ValueFunctions, pool: BudgetPool) -> tuple[float, float]:
    """(lower bound on EPoA, upper bound on EPoS = 1) from per-task utility extremes."""
    if not pool.private:
        raise ValueError("bounds need a private budget pool")
    budgets = {(i, j): pool.vector(instance.tasks[i].id, instance.workers[j].id).budgets
               for i, j in instance.pairs()}
    total_by_worker = [math.fsum(e for i in instance.reach[j] for e in budgets[(i, j)])
                       for j in range(instance.n)]
    u_min, u_max = [], []
    for i in range(instance.m):
        low, high = [], []
        for j in instance.coverers[i]:
            base = instance.tasks[i].value - vf.distance_cost(instance.dist(i, j))
            lo = base - vf.privacy_cost(total_by_worker[j])
            hi = base - vf.privacy_cost(min(budgets[(i, j)]))
            if lo > 0:
                low.append(lo)
            if hi > 0:
                high.append(hi)
        u_min.append(min(low) if low else 0.0)
        u_max.append(max(high) if high else 0.0)
    denom = math.fsum(u_max)
    if denom == 0:
        raise ValueError("no pair has positive optimistic utility; bound undefined")
    return math.fsum(u_min) / denom, 1.0
