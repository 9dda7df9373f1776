"""Walk through the three-task, three-worker toy instance with both solvers.

Observations are injected, so the output is the same on every run.
"""

from privassign.core import ValueFunctions
from privassign.pgt import GameState
from privassign.puce import PUCE, ConflictElimination
from privassign.toy import publish_first_slots, toy_game_start, toy_instance, toy_pool


def name_t(i):
    return f"t{i + 1}"


def name_w(j):
    return f"w{j + 1}"


def show_allocation(alloc):
    pairs = [f"{name_t(i)}->{name_w(j)}" for i, j in enumerate(alloc) if j is not None]
    idle = [name_t(i) for i, j in enumerate(alloc) if j is None]
    return ", ".join(pairs) + (f"  (unmatched: {', '.join(idle)})" if idle else "")


def conflict_elimination(vf):
    print("== conflict elimination (PUCE) ==")
    solver = ConflictElimination(toy_instance(), vf, toy_pool(), PUCE)
    solver.run()
    for k, rnd in enumerate(solver.rounds, 1):
        print(f"round {k}")
        for i, props in rnd.candidates.items():
            for p in props:
                print(f"  {name_w(p.worker)} proposes to {name_t(i)}: d~={p.d_eff:.2f} "
                      f"eps~={p.eps_eff:.2f} utility={p.utility:.2f}")
        if not any(rnd.candidates.values()):
            print("  no proposals, stop")
        else:
            print(f"  after conflict elimination: {show_allocation(rnd.allocation)}")
    print(f"final: {show_allocation(solver.allocation.allocation)}\n")


def game(vf):
    print("== potential game (PGT) ==")
    pool = toy_pool()
    publish_first_slots(pool)
    g = GameState(toy_instance(), vf, pool, toy_game_start(), check_potential=True)
    print(f"start: {show_allocation(g.allocation.allocation)}  potential={g.potential():.2f}")
    while not g.halted:
        turn = g.step()
        tried = ", ".join(f"{name_t(r.task)}:{r.utility:+.2f}" for r in turn.responses) or "none"
        if turn.accepted:
            r = turn.accepted
            print(f"turn {turn.index}: {name_w(turn.worker)} moves to {name_t(r.task)} "
                  f"(UT {r.utility:+.2f}, publishes d^={r.d_hat} at eps={r.eps}); "
                  f"potential={g.potential():.2f}")
        else:
            print(f"turn {turn.index}: {name_w(turn.worker)} stays (tried {tried})")
    print(f"equilibrium: {show_allocation(g.allocation.allocation)}")


if __name__ == "__main__":
    vf = ValueFunctions()
    conflict_elimination(vf)
    game(vf)
