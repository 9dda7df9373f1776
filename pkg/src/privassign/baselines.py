"""Non-private reference solvers and the method dispatcher."""

from __future__ import annotations

import enum
from typing import Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Instance, MatchState, ValueFunctions
from .pgt import GameState
from .privacy import BudgetPool
from .puce import DCE, PDCE, PDCE_NPPCF, PUCE, PUCE_NPPCF, UCE, ConflictElimination


class BaselineKind(str, enum.Enum):
    PUCE = "puce"
    PUCE_NPPCF = "puce-nppcf"
    PDCE = "pdce"
    PDCE_NPPCF = "pdce-nppcf"
    UCE = "uce"
    DCE = "dce"
    PGT = "pgt"
    GT = "gt"
    GRD = "grd"
    HUNGARIAN = "hungarian"

    @property
    def private(self) -> bool:
        return self in _PRIVATE

    @property
    def counterpart(self) -> "BaselineKind":
        """Non-private method a private one is measured against."""
        return _COUNTERPART.get(self, self)


_PRIVATE = {BaselineKind.PUCE, BaselineKind.PUCE_NPPCF, BaselineKind.PDCE,
            BaselineKind.PDCE_NPPCF, BaselineKind.PGT}
_COUNTERPART = {
    BaselineKind.PUCE: BaselineKind.UCE,
    BaselineKind.PUCE_NPPCF: BaselineKind.UCE,
    BaselineKind.PDCE: BaselineKind.DCE,
    BaselineKind.PDCE_NPPCF: BaselineKind.DCE,
    BaselineKind.PGT: BaselineKind.GT,
}
_MODES = {
    BaselineKind.PUCE: PUCE, BaselineKind.PUCE_NPPCF: PUCE_NPPCF,
    BaselineKind.PDCE: PDCE, BaselineKind.PDCE_NPPCF: PDCE_NPPCF,
    BaselineKind.UCE: UCE, BaselineKind.DCE: DCE,
}


def _utilities(instance: Instance, vf: ValueFunctions) -> dict[tuple[int, int], float]:
    return {(i, j): instance.tasks[i].value - vf.distance_cost(instance.dist(i, j))
            for i, j in instance.pairs()}


def greedy(instance: Instance, vf: ValueFunctions) -> MatchState:
    """Repeatedly fix the best remaining positive pair (ties: lower task, then worker)."""
    util = _utilities(instance, vf)
    order = sorted((p for p, u in util.items() if u > 0), key=lambda p: (-util[p], p))
    match = MatchState.empty(instance.m)
    for i, j in order:
        if match.allocation[i] is None and match.task_of(j) is None:
            match.assign(i, j)
    return match


def max_weight_matching(weights: Mapping[tuple[int, int], float]) -> list[tuple[int, int]]:
    """Maximum-weight one-to-one matching over the positive entries of ``weights``."""
    pos = {p: w for p, w in weights.items() if w > 0}
    if not pos:
        return []
    rows = sorted({i for i, _ in pos})
    cols = sorted({j for _, j in pos})
    ri = {i: k for k, i in enumerate(rows)}
    cj = {j: k for k, j in enumerate(cols)}
    # missing pairs cost 0, i.e. leaving both sides unmatched
    cost = np.zeros((len(rows), len(cols)))
    for (i, j), w in pos.items():
        cost[ri[i], cj[j]] = -w
    r, c = linear_sum_assignment(cost)
    return sorted((rows[a], cols[b]) for a, b in zip(r, c) if (rows[a], cols[b]) in pos)


def hungarian(instance: Instance, vf: ValueFunctions) -> MatchState:
    """Exact maximum total utility v - f_d(d) over in-range pairs (no privacy cost)."""
    return MatchState.from_pairs(instance.m, max_weight_matching(_utilities(instance, vf)))


def run_variant(kind, instance: Instance, vf: ValueFunctions, pool: BudgetPool):
    """Run one method of the method matrix.  Returns ``(match, solver_or_None)``.

    Non-private methods ignore ``pool``'s randomness and use a noiseless pool
    with the same group size, so they consume no random numbers.
    """
    kind = BaselineKind(kind)
    if kind is BaselineKind.GRD:
        return greedy(instance, vf), None
    if kind is BaselineKind.HUNGARIAN:
        return hungarian(instance, vf), None
    if not kind.private:
        pool = BudgetPool(seed=pool.seed, z=pool.z, eps_range=pool.eps_range, private=False)
    if kind in (BaselineKind.PGT, BaselineKind.GT):
        game = GameState(instance, vf, pool)
        return game.run(), game
    solver = ConflictElimination(instance, vf, pool, _MODES[kind])
    return solver.run(), solver
