"""Rank-matrix construction and winner-conflict elimination.

Each task ranks its candidate workers by a comparison key (a distance, or a
utility rewritten as a distance).  Every task first takes its best candidate;
when several tasks pick the same worker, one keeps it and the rest fall back
to their next candidate, until no worker is picked twice.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .compare import pcf
from .core import MatchState


@dataclass(frozen=True)
class Candidate:
    worker: int
    key: float
    eps: float = 1.0


class ExactComparator:
    exact = True

    def less(self, a: Candidate, b: Candidate) -> bool:
        return a.key < b.key


class PcfComparator:
    """"a probably smaller than b" for keys observed through Laplace noise."""

    exact = False

    def less(self, a: Candidate, b: Candidate) -> bool:
        return pcf(a.key, b.key, a.eps, b.eps) > 0.5


RankMatrix = dict[int, list[Candidate]]


def build_rank_matrix(candidates: Mapping[int, Sequence[Candidate]], comparator) -> RankMatrix:
    def cmp(a: Candidate, b: Candidate) -> int:
        if comparator.less(a, b):
            return -1
        if comparator.less(b, a):
            return 1
        return (a.worker > b.worker) - (a.worker < b.worker)

    return {i: sorted(row, key=functools.cmp_to_key(cmp)) for i, row in candidates.items()}


REGRET = "regret"
SECOND_CHOICE = "second"


def resolve_conflicts(rank: RankMatrix, comparator, m: Optional[int] = None,
                      admissible: Optional[Callable[[int, Candidate], bool]] = None,
                      blocked: frozenset[int] = frozenset(),
                      keeper: Optional[str] = None) -> MatchState:
    """Resolve winner conflicts over ``rank`` and return the resulting match.

    ``admissible(task, candidate)`` filters the candidates a displaced task may
    fall back to (never a row's first choice); ``blocked`` workers are already
    committed elsewhere.

    ``keeper`` picks which task keeps a conflicted worker.  ``"second"``: the
    task whose next alternative is the most expensive, judged by the
    comparator alone (the current keys are assumed close).  ``"regret"``: the
    task with the largest key(next) - key(current), which minimizes the
    total key exactly; needs an exact comparator.  Default: ``"regret"`` for
    exact comparators, ``"second"`` otherwise.
    """
    if keeper is None:
        keeper = REGRET if comparator.exact else SECOND_CHOICE
    if keeper not in (REGRET, SECOND_CHOICE):
        raise ValueError(f"unknown keeper rule {keeper!r}")
    if keeper == REGRET and not comparator.exact:
        raise ValueError("the regret rule needs exact keys")
    if m is None:
        m = max(rank, default=-1) + 1
    pos: dict[int, int] = {}
    for i, row in rank.items():
        p = 0
        while p < len(row) and row[p].worker in blocked:
            p += 1
        pos[i] = p

    def advance(i: int, p: int, filtered: bool = True) -> int:
        row = rank[i]
        p += 1
        while p < len(row) and (row[p].worker in blocked
                                or (filtered and admissible is not None
                                    and not admissible(i, row[p]))):
            p += 1
        return p

    def keeps(u: int, v: int) -> bool:
        """True if task u should keep the contested worker over task v."""
        cu, cv = rank[u][pos[u]], rank[v][pos[v]]
        # the keeper is chosen on the raw ranking; admissibility only decides
        # where a displaced task can land
        nu_p, nv_p = advance(u, pos[u], False), advance(v, pos[v], False)
        nu = rank[u][nu_p] if nu_p < len(rank[u]) else None
        nv = rank[v][nv_p] if nv_p < len(rank[v]) else None
        if nu is None or nv is None:
            if nu is None and nv is None:
                return u < v
            return nu is None
        if keeper == REGRET:
            ru, rv = nu.key - cu.key, nv.key - cv.key
            if ru != rv:
                return ru > rv
        else:
            if comparator.less(nv, nu):
                return True
            if comparator.less(nu, nv):
                return False
        # tie: the task whose alternative has the lower worker id moves
        if nu.worker != nv.worker:
            return nv.worker < nu.worker
        return u < v

    limit = sum(len(r) for r in rank.values()) + 1
    for _ in range(limit):
        chosen: dict[int, list[int]] = {}
        for i in sorted(rank):
            if pos[i] < len(rank[i]):
                chosen.setdefault(rank[i][pos[i]].worker, []).append(i)
        conflicts = sorted(w for w, ts in chosen.items() if len(ts) > 1)
        if not conflicts:
            break
        tasks = chosen[conflicts[0]]
        kept = tasks[0]
        for t in tasks[1:]:
            if not keeps(kept, t):
                kept = t
        for t in tasks:
            if t != kept:
                pos[t] = advance(t, pos[t])
    else:  # pragma: no cover - every pass advances a pointer
        raise RuntimeError("conflict elimination did not terminate")

    match = MatchState.empty(m)
    for i in sorted(rank):
        if pos[i] < len(rank[i]):
            match.assign(i, rank[i][pos[i]].worker)
    return match
