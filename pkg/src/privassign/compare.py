"""Probabilistic comparison of Laplace-obfuscated distances.

``pcf`` compares two obfuscated values, ``ppcf`` a real value against an
obfuscated one.  Both accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import ValueFunctions

EQUAL_RATE_RTOL = 1e-9


def _as_array(x, name):
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    return a


def _check_budget(eps, name):
    e = np.asarray(eps, dtype=float)
    if np.any(~(e > 0)) or np.any(~np.isfinite(e)):
        raise ValueError(f"{name} must be positive and finite")
    return e


def _nudge(p, s):
    # keep p > 1/2 <=> s > 0 exact even when s is below float resolution
    p = np.where((s > 0) & (p <= 0.5), np.nextafter(0.5, 1.0), p)
    p = np.where((s < 0) & (p >= 0.5), np.nextafter(0.5, 0.0), p)
    p = np.where(s == 0, 0.5, p)
    return np.clip(p, 0.0, 1.0)


def _diff_tail(s, a, b):
    """Pr[eta_a - eta_b > s] for s >= 0, eta ~ Lap(1/a), Lap(1/b)."""
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    delta = hi - lo
    equal = delta < EQUAL_RATE_RTOL * hi
    e_lo = np.exp(-lo * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        # b^2 e^{-as} - a^2 e^{-bs} over 2(b^2 - a^2), rewritten around the
        # smaller rate so that it stays accurate as the rates approach each other
        general = 0.5 * e_lo + e_lo * lo * lo * (-np.expm1(-delta * s)) / (2.0 * delta * (hi + lo))
    limit = 0.5 * e_lo * (1.0 + 0.5 * lo * s)
    return np.where(equal, limit, general)


def _scalar(*xs) -> bool:
    return all(type(x) in (float, int) for x in xs)


def _check_scalar(x, name):
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite")


def _check_scalar_budget(e, name):
    if not (e > 0 and math.isfinite(e)):
        raise ValueError(f"{name} must be positive and finite")


def _nudge_scalar(p, s):
    if s == 0:
        return 0.5
    if s > 0 and p <= 0.5:
        return math.nextafter(0.5, 1.0)
    if s < 0 and p >= 0.5:
        return math.nextafter(0.5, 0.0)
    return min(max(p, 0.0), 1.0)


def _pcf_scalar(da, db, a, b):
    _check_scalar(da, "d_hat_a")
    _check_scalar(db, "d_hat_b")
    _check_scalar_budget(a, "eps_a")
    _check_scalar_budget(b, "eps_b")
    s = db - da
    t = abs(s)
    lo, hi = min(a, b), max(a, b)
    delta = hi - lo
    e_lo = math.exp(-lo * t)
    if delta < EQUAL_RATE_RTOL * hi:
        tail = 0.5 * e_lo * (1.0 + 0.5 * lo * t)
    else:
        tail = 0.5 * e_lo + e_lo * lo * lo * (-math.expm1(-delta * t)) / (2.0 * delta * (hi + lo))
    p = 0.5 + (0.5 - tail) if s >= 0 else tail
    return _nudge_scalar(p, s)


def pcf(d_hat_a, d_hat_b, eps_a, eps_b):
    """Pr[d_a < d_b] given d_hat = d + Lap(0, 1/eps) for both values."""
    if _scalar(d_hat_a, d_hat_b, eps_a, eps_b):
        return _pcf_scalar(float(d_hat_a), float(d_hat_b), float(eps_a), float(eps_b))
    da = _as_array(d_hat_a, "d_hat_a")
    db = _as_array(d_hat_b, "d_hat_b")
    a = _check_budget(eps_a, "eps_a")
    b = _check_budget(eps_b, "eps_b")
    s = db - da
    tail = _diff_tail(np.abs(s), a, b)
    p = np.where(s >= 0, 0.5 + (0.5 - tail), tail)
    out = _nudge(p, s)
    return float(out) if out.ndim == 0 else out


def ppcf(d, d_hat, eps):
    """Pr[d < d_true] for a real value ``d`` and ``d_hat`` = d_true + Lap(0, 1/eps)."""
    if _scalar(d, d_hat, eps):
        _check_scalar(d, "d")
        _check_scalar(d_hat, "d_hat")
        _check_scalar_budget(eps, "eps")
        s = d_hat - d
        t = abs(s)
        p = 0.5 - 0.5 * math.expm1(-eps * t) if s >= 0 else 0.5 * math.exp(-eps * t)
        return _nudge_scalar(p, s)
    d = _as_array(d, "d")
    dh = _as_array(d_hat, "d_hat")
    e = _check_budget(eps, "eps")
    s = dh - d
    half_tail = 0.5 * np.exp(-e * np.abs(s))
    p = np.where(s >= 0, 0.5 - 0.5 * np.expm1(-e * np.abs(s)), half_tail)
    out = _nudge(p, s)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EffectivePair:
    d_eff: float
    eps_eff: float


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def effective_pair(obs: Iterable[tuple[float, float]]) -> EffectivePair:
    """Maximum-likelihood distance restricted to the published points.

    Minimizes sum_k eps_k |d_hat_k - d| over d in the published distances.
    Ties go to the largest budget, then the smallest distance.
    """
    pts = list(obs)
    if not pts:
        raise ValueError("effective pair of an empty observation set")
    if len(pts) == 1:
        return EffectivePair(*pts[0])
    best = None
    best_cost = math.inf
    for d, e in pts:
        cost = math.fsum(ek * abs(dk - d) for dk, ek in pts)
        if best is None or (cost < best_cost and not _close(cost, best_cost)):
            best, best_cost = (d, e), cost
        elif _close(cost, best_cost):
            if e > best[1] or (e == best[1] and d < best[0]):
                best = (d, e)
            best_cost = min(best_cost, cost)
    return EffectivePair(*best)


def utility_shift(d_hat_yb: float, value_a: float, value_b: float,
                  vf: ValueFunctions) -> float:
    """Shift b's distance so that U_a > U_b becomes d_a < shifted distance.

    ``value_a``/``value_b`` are utilities with the distance cost added back.
    """
    return d_hat_yb + vf.distance_cost_inverse(value_a) - vf.distance_cost_inverse(value_b)
