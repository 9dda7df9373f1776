"""How often each comparator orders two noisy distances correctly.

PCF sees both distances through Laplace noise; PPCF knows one of them
exactly.  The table prints the empirical correct-ordering rate of each.
"""

import numpy as np

from privassign.compare import pcf, ppcf

TRIALS = 200_000


def rates(gap, eps_x, eps_y, rng):
    dx, dy = 5.0, 5.0 + gap
    hat_x = dx + rng.laplace(0.0, 1.0 / eps_x, TRIALS)
    hat_y = dy + rng.laplace(0.0, 1.0 / eps_y, TRIALS)
    by_pcf = np.mean(pcf(hat_x, hat_y, eps_x, eps_y) > 0.5)
    by_ppcf = np.mean(ppcf(np.full(TRIALS, dx), hat_y, eps_y) > 0.5)
    return by_pcf, by_ppcf


if __name__ == "__main__":
    rng = np.random.default_rng(7)
    print(f"{'gap':>5} {'eps_x':>6} {'eps_y':>6} {'PCF':>7} {'PPCF':>7}")
    for gap in (0.2, 1.0, 3.0):
        for eps_x, eps_y in ((0.5, 0.5), (0.5, 2.0), (2.0, 0.5), (2.0, 2.0)):
            a, b = rates(gap, eps_x, eps_y, rng)
            print(f"{gap:5.1f} {eps_x:6.1f} {eps_y:6.1f} {a:7.4f} {b:7.4f}")
