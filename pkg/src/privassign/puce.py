"""Conflict-elimination solvers: PUCE and its distance / non-private / non-PPCF
variants.

Each round, every worker without a task proposes to the tasks in range that
pass the worker-side checks (positive prospective utility, likely to beat the
incumbent).  A proposal spends the pair's next budget and publishes the
obfuscated distance.  The server then ranks each contested task's proposers
together with its incumbent and removes winner conflicts.  The loop stops at
the first round without proposals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .cea import (SECOND_CHOICE, Candidate, ExactComparator, PcfComparator, build_rank_matrix,
                  resolve_conflicts)
from .compare import EffectivePair, effective_pair, pcf, ppcf, utility_shift
from .core import Instance, MatchState, ValueFunctions
from .privacy import BudgetPool

UTILITY = "utility"
DISTANCE = "distance"


@dataclass(frozen=True)
class SolverMode:
    objective: str = UTILITY          # "utility" (PUCE family) or "distance" (PDCE family)
    challenger_comparator: str = "ppcf"   # "ppcf" or "pcf" (the -nppcf variants)
    private: bool = True

    def __post_init__(self):
        if self.objective not in (UTILITY, DISTANCE):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.challenger_comparator not in ("ppcf", "pcf"):
            raise ValueError(f"unknown comparator {self.challenger_comparator!r}")


PUCE = SolverMode(UTILITY, "ppcf", True)
PUCE_NPPCF = SolverMode(UTILITY, "pcf", True)
PDCE = SolverMode(DISTANCE, "ppcf", True)
PDCE_NPPCF = SolverMode(DISTANCE, "pcf", True)
UCE = SolverMode(UTILITY, "ppcf", False)
DCE = SolverMode(DISTANCE, "ppcf", False)


@dataclass(frozen=True)
class Proposal:
    task: int
    worker: int
    d_eff: float
    eps_eff: float
    spent: float          # pair's committed budget including this proposal
    utility: Optional[float]   # worker's prospective utility (utility objective only)


@dataclass(frozen=True)
class ChallengerCheck:
    """Outcome of a worker's "can I beat the incumbent" test for one task."""

    task: int
    worker: int
    ppcf_ok: bool
    pcf_ok: bool
    proposed: bool


@dataclass
class RoundRecord:
    candidates: dict[int, list[Proposal]]
    allocation: list[Optional[int]]
    updated: bool


@dataclass
class ConflictElimination:
    """One run of a conflict-elimination solver on an instance."""

    instance: Instance
    vf: ValueFunctions
    pool: BudgetPool
    mode: SolverMode = PUCE
    allocation: MatchState = None
    rounds: list[RoundRecord] = field(default_factory=list)
    proposals: int = 0
    value_reads: int = 0
    challenger_checks: list[ChallengerCheck] = field(default_factory=list)

    def __post_init__(self):
        if self.allocation is None:
            self.allocation = MatchState.empty(self.instance.m)
        if self.mode.private != self.pool.private:
            raise ValueError("pool privacy does not match solver mode")

    # -- helpers -----------------------------------------------------------

    def _value(self, i: int) -> float:
        self.value_reads += 1
        return self.instance.tasks[i].value

    def _vector(self, i: int, j: int):
        return self.pool.vector(self.instance.tasks[i].id, self.instance.workers[j].id)

    def effective(self, i: int, j: int) -> EffectivePair:
        """Server-side effective pair (d~, eps~) of a pair that has published."""
        if not self.mode.private:
            return EffectivePair(self.instance.dist(i, j), math.inf)
        return effective_pair(self._vector(i, j).observations)

    def _spent(self, i: int, j: int) -> float:
        return self._vector(i, j).spent() if self.mode.private else 0.0

    def _key(self, i: int, j: int) -> Candidate:
        """Comparison key of a pair as the server sees it (smaller is better)."""
        eff = self.effective(i, j)
        d = eff.d_eff
        if self.mode.objective == UTILITY:
            value = self._value(i) - self.vf.privacy_cost(self._spent(i, j))
            d = d - self.vf.distance_cost_inverse(value)
        return Candidate(j, d, eff.eps_eff if self.mode.private else 1.0)

    # -- Algorithm steps ---------------------------------------------------

    def worker_proposal(self, not_winning) -> dict[int, list[Proposal]]:
        inst, vf = self.instance, self.vf
        private = self.mode.private
        cl: dict[int, list[Proposal]] = {i: [] for i in range(inst.m)}
        for j in sorted(not_winning):
            for i in inst.reach[j]:
                bv = self._vector(i, j)
                u = bv.next_slot
                if u is None:
                    continue
                d = inst.dist(i, j)
                eps_new = bv.budgets[u]
                spent_after = bv.spent() + eps_new if private else 0.0
                utility = None
                if self.mode.objective == UTILITY:
                    value = self._value(i)
                    utility = value - vf.distance_cost(d) - vf.privacy_cost(spent_after)
                    if utility <= 0:
                        continue
                d_hat, _ = bv.probe(u, d)
                incumbent = self.allocation.allocation[i]
                if incumbent is not None and incumbent != j:
                    if not self._beats_incumbent(i, j, d, bv, d_hat, eps_new, spent_after, incumbent):
                        continue
                bv.commit(u, self.pool.ledger)
                self.proposals += 1
                eff = self.effective(i, j)
                cl[i].append(Proposal(i, j, eff.d_eff, eff.eps_eff,
                                      spent_after, utility))
        return cl

    def _beats_incumbent(self, i, j, d, bv, d_hat, eps_new, spent_after, incumbent) -> bool:
        vf = self.vf
        inc = self.effective(i, incumbent)
        if not self.mode.private:
            # noiseless: with equal values and no privacy cost both objectives
            # reduce to a plain distance comparison
            return d < inc.d_eff
        own = effective_pair(list(bv.observations) + [(d_hat, eps_new)])
        if self.mode.objective == UTILITY:
            value = self._value(i)
            shifted = utility_shift(inc.d_eff, value - vf.privacy_cost(spent_after),
                                    value - vf.privacy_cost(self._spent(i, incumbent)), vf)
        else:
            shifted = inc.d_eff
        ppcf_ok = ppcf(d, shifted, inc.eps_eff) > 0.5
        pcf_ok = pcf(own.d_eff, shifted, own.eps_eff, inc.eps_eff) > 0.5
        if self.mode.challenger_comparator == "ppcf":
            ok = ppcf_ok and pcf_ok
        else:
            ok = pcf_ok
        self.challenger_checks.append(ChallengerCheck(i, j, ppcf_ok, pcf_ok, ok))
        return ok

    def winner_chosen(self, cl: dict[int, list[Proposal]],
                      prev: MatchState) -> tuple[MatchState, bool]:
        if not any(cl.values()):
            return prev, False
        m = self.instance.m
        result = MatchState.empty(m)
        contested: dict[int, list[Candidate]] = {}
        for i in range(m):
            props = cl.get(i, ())
            if not props:
                if prev.allocation[i] is not None:
                    result.assign(i, prev.allocation[i])
                continue
            row = [self._key(i, p.worker) for p in props]
            if prev.allocation[i] is not None:
                row.append(self._key(i, prev.allocation[i]))
            contested[i] = row
        comparator = PcfComparator() if self.mode.private else ExactComparator()
        rank = build_rank_matrix(contested, comparator)
        admissible = None
        if self.mode.objective == UTILITY:
            # a fallback is a server-side reassignment: only take it when the
            # server's own utility estimate v - f_d(d~) - f_p(spent) is positive
            admissible = lambda i, c: c.key < 0  # noqa: E731
        # the same keeper rule with and without noise, so a private run and its
        # non-private counterpart differ only by the noise and the spend
        resolved = resolve_conflicts(rank, comparator, m=m, admissible=admissible,
                                     blocked=frozenset(result.matched_worker),
                                     keeper=SECOND_CHOICE)
        for i, j in resolved.pairs():
            result.assign(i, j)
        return result, True

    def run(self, max_rounds: Optional[int] = None) -> MatchState:
        n = self.instance.n
        not_winning = set(range(n)) - set(self.allocation.matched_worker)
        while max_rounds is None or len(self.rounds) < max_rounds:
            cl = self.worker_proposal(not_winning)
            self.allocation, updated = self.winner_chosen(cl, self.allocation)
            self.rounds.append(RoundRecord(cl, list(self.allocation.allocation), updated))
            if not updated:
                break
            not_winning = set(range(n)) - set(self.allocation.matched_worker)
        return self.allocation


def run_puce(instance: Instance, vf: ValueFunctions, pool: BudgetPool,
             mode: SolverMode = PUCE) -> MatchState:
    return ConflictElimination(instance, vf, pool, mode).run()
