import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privassign.cea import (REGRET, SECOND_CHOICE, Candidate, ExactComparator, PcfComparator,
                            build_rank_matrix, resolve_conflicts)

# distance rank matrix of a 3x3 instance: task -> [(worker, distance)]
DRM = {
    0: [(0, 9.06), (1, 9.85), (2, 12.04)],
    1: [(2, 2.09), (0, 10.44), (1, 12.59)],
    2: [(2, 2.00), (1, 11.28), (0, 18.87)],
}


def _rows(table, eps=1.0):
    return {i: [Candidate(w, d, eps) for w, d in row] for i, row in table.items()}


def test_build_rank_matrix_orders_rows():
    shuffled = {1: [Candidate(1, 12.59), Candidate(2, 2.09), Candidate(0, 10.44)]}
    rank = build_rank_matrix(shuffled, ExactComparator())
    assert [c.worker for c in rank[1]] == [2, 0, 1]


def test_single_candidate_rows_are_identity():
    rank = build_rank_matrix({0: [Candidate(4, 1.0)], 1: [Candidate(2, 3.0)]}, ExactComparator())
    assert resolve_conflicts(rank, ExactComparator()).allocation == [4, 2]


def test_ties_go_to_lower_worker():
    rank = build_rank_matrix({0: [Candidate(3, 1.0), Candidate(1, 1.0)]}, ExactComparator())
    assert [c.worker for c in rank[0]] == [1, 3]


def test_random_rows_sort_by_true_distance():
    rng = random.Random(5)
    for _ in range(50):
        rows = {i: [Candidate(j, rng.uniform(0, 10)) for j in range(4)] for i in range(4)}
        rank = build_rank_matrix(rows, ExactComparator())
        for i, row in rows.items():
            assert rank[i] == sorted(row, key=lambda c: (c.key, c.worker))


@pytest.mark.parametrize("comparator", [ExactComparator(), PcfComparator()])
def test_rank_matrix_conflict_example(comparator):
    rank = build_rank_matrix(_rows(DRM), comparator)
    match = resolve_conflicts(rank, comparator)
    # worker 3 stays with task 3, task 2 falls back to worker 1, which then
    # pushes task 1 to worker 2
    assert match.allocation[2] == 2
    assert match.allocation[1] == 0
    assert match.allocation == [1, 0, 2]


def test_no_conflicts_everyone_gets_first_choice():
    rows = {0: [Candidate(0, 1.0), Candidate(1, 2.0)], 1: [Candidate(1, 1.0), Candidate(0, 2.0)]}
    assert resolve_conflicts(build_rank_matrix(rows, ExactComparator()),
                             ExactComparator()).allocation == [0, 1]


def test_exhausted_task_is_unmatched():
    rows = {0: [Candidate(0, 1.0)], 1: [Candidate(0, 2.0)]}
    match = resolve_conflicts(build_rank_matrix(rows, ExactComparator()), ExactComparator())
    assert sorted(j for j in match.allocation if j is not None) == [0]
    assert match.allocation.count(None) == 1


def test_blocked_and_admissible():
    rows = build_rank_matrix({0: [Candidate(0, -1.0), Candidate(1, -0.5), Candidate(2, 0.3)],
                              1: [Candidate(0, -2.0), Candidate(2, 5.0)]}, ExactComparator())
    match = resolve_conflicts(rows, ExactComparator(), blocked=frozenset({1}),
                              admissible=lambda i, c: c.key < 0)
    # task 1 has the larger regret and keeps worker 0; task 0 skips blocked
    # worker 1 and may not fall to worker 2
    assert match.allocation == [None, 0]


def _single_conflict_instance(draw, phi, spare):
    """``phi`` tasks all ranking worker 0 first, each with a private second choice."""
    rows = {}
    for u in range(phi):
        first = draw(st.floats(0.0, 5.0))
        second = first + draw(st.floats(0.01, 10.0))
        others = [Candidate(1 + spare * u + k, second + draw(st.floats(0.01, 10.0)))
                  for k in range(1, spare)]
        rows[u] = [Candidate(0, first), Candidate(1 + spare * u, second)] + others
    return rows


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), st.data())
def test_exact_resolution_matches_best_candidate_sum(phi, data):
    rows = _single_conflict_instance(data.draw, phi, spare=2)
    rank = build_rank_matrix(rows, ExactComparator())
    match = resolve_conflicts(rank, ExactComparator())
    cost = {i: {c.worker: c.key for c in row} for i, row in rows.items()}
    got = sum(cost[i][j] for i, j in match.pairs())
    # C_u: task u keeps the conflicted worker, every other task takes its second choice
    sums = [rank[u][0].key + sum(rank[v][1].key for v in rows if v != u) for u in rows]
    assert got == pytest.approx(min(sums), abs=1e-9)


def test_three_way_conflict_on_three_tasks():
    rows = {0: [Candidate(0, 1.0), Candidate(1, 4.0), Candidate(2, 9.0)],
            1: [Candidate(0, 1.5), Candidate(2, 3.0), Candidate(1, 9.5)],
            2: [Candidate(0, 2.0), Candidate(3, 8.0)]}
    rank = build_rank_matrix(rows, ExactComparator())
    match = resolve_conflicts(rank, ExactComparator())
    sums = {u: rank[u][0].key + sum(rank[v][1].key for v in rows if v != u) for u in rows}
    best = min(sums, key=sums.get)
    assert best == 2
    assert match.allocation == [1, 2, 0]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data(), st.booleans())
def test_resolution_is_one_to_one(m, n, data, noisy):
    rows = {}
    for i in range(m):
        ws = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
        rows[i] = [Candidate(j, data.draw(st.floats(-10, 10)), data.draw(st.floats(0.1, 5)))
                   for j in ws]
    comparator = PcfComparator() if noisy else ExactComparator()
    match = resolve_conflicts(build_rank_matrix(rows, comparator), comparator, m=m)
    match.check()
    for i, j in match.pairs():
        assert j in [c.worker for c in rows[i]]


def test_keeper_rules():
    rows = build_rank_matrix({0: [Candidate(0, 1.0), Candidate(1, 2.0)],
                              1: [Candidate(0, 0.0), Candidate(2, 1.5)]}, ExactComparator())
    # regret 1.0 vs 1.5: task 1 keeps worker 0; by second choice 2.0 > 1.5
    # task 0 keeps it
    assert resolve_conflicts(rows, ExactComparator(), keeper=REGRET).allocation == [1, 0]
    assert resolve_conflicts(rows, ExactComparator(), keeper=SECOND_CHOICE).allocation == [0, 2]
    with pytest.raises(ValueError):
        resolve_conflicts(rows, ExactComparator(), keeper="coin")
    with pytest.raises(ValueError):
        resolve_conflicts(rows, PcfComparator(), keeper=REGRET)
