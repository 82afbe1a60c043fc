"""Computable bounds on the decoder's wrong-path probability and computation.

All bounds share the same ingredients: per-index error exponents at the
Chernoff-matched argument (1-r)/r, the bias schedule, and the partial-rate
profile of the code tree.  Probabilities are clipped to [0, 1]; the pre-clip
values are available for plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .construction import BitChannelTable, e0_rho
from .metric import BiasSchedule
from .rate_profile import PartialRateProfile


class BoundConditionError(ValueError):
    """A bound was evaluated outside the regime where it holds."""


def e0_profile(table: BitChannelTable, rho: float) -> np.ndarray:
    """Per-index E0(rho, W_N^(i)); the rho = 1 column is already tabulated."""
    if rho == 1.0:
        return np.asarray(table.cutoff, dtype=float)
    return np.array([e0_rho(m, rho) for m in table.mean])


@dataclass(frozen=True)
class EpsilonMargin:
    """Slack of the partial-rate condition; negative means it is violated."""

    value: float
    argmin_l: int
    valid: bool


def epsilon_margin(r: float, bias: BiasSchedule, table: BitChannelTable,
                   rates: PartialRateProfile) -> EpsilonMargin:
    """Largest epsilon with sum R_i <= r*sum(E0((1-r)/r) + b_i) - epsilon.

    Scans every prefix length l in 1..N and returns the minimum slack
    together with the minimizing l.  A negative value is reported as-is with
    valid=False: dependent bounds then refuse to evaluate.
    """
    _check_r(r)
    e0 = e0_profile(table, (1.0 - r) / r)
    lhs = np.cumsum(rates.rate[1:])
    rhs = r * np.cumsum(e0 + np.asarray(bias.b, dtype=float))
    margins = rhs - lhs
    l_idx = int(np.argmin(margins))
    eps = float(margins[l_idx])
    return EpsilonMargin(value=eps, argmin_l=l_idx + 1, valid=eps > 0.0)


def wrong_path_bound(l: int, alpha: float, r: float, bias: BiasSchedule,
                     table: BitChannelTable, clip: bool = True) -> float:
    """P[wrong-path metric >= correct-path minimum + alpha] at depth l."""
    _check_r(r)
    if not 1 <= l <= table.n_code:
        raise ValueError(f"l must be in 1..{table.n_code}")
    e0 = e0_profile(table, (1.0 - r) / r)
    exponent = -r * alpha - r * float(np.sum(e0[:l] + np.asarray(bias.b[:l], dtype=float)))
    raw = (l + 1) * 2.0 ** exponent
    return min(raw, 1.0) if clip else raw


def expected_c1_bound(epsilon: float) -> float:
    """Bound 4/(1 - 2^-eps)^2 on the mean computation of the first bit."""
    if not epsilon > 0:
        raise BoundConditionError("the partial-rate condition requires epsilon > 0")
    return 4.0 / (1.0 - 2.0 ** (-epsilon)) ** 2


def beta_select(rates: PartialRateProfile) -> float:
    """Largest Pareto shape satisfying beta*l*R_l <= sum_{i<=l} R_i.

    May be <= 1 for strongly irregular profiles; it is reported as-is and
    the Pareto bound refuses such values.
    """
    r = rates.rate[1:]
    if not np.any(r > 0):
        raise BoundConditionError("beta is undefined for an all-frozen code")
    cum = np.cumsum(r)
    l_all = np.arange(1, len(r) + 1)
    mask = r > 0
    return float(np.min(cum[mask] / (l_all[mask] * r[mask])))


def pareto_ccdf_bound(big_l: float, beta: float, epsilon: float,
                      clip: bool = True) -> float:
    """Pareto bound (4 / (L (1 - 2^(-eps/beta))^2))^beta on P(C_n >= L)."""
    if big_l < 1:
        raise ValueError("L must be >= 1")
    if not beta > 1:
        raise BoundConditionError("the Pareto bound requires beta > 1")
    if not epsilon > 0:
        raise BoundConditionError("the Pareto bound requires epsilon > 0")
    raw = (4.0 / (big_l * (1.0 - 2.0 ** (-epsilon / beta)) ** 2)) ** beta
    return min(raw, 1.0) if clip else raw


def optimal_delta(beta: float, r: float) -> float:
    """Threshold spacing beta/r that minimizes the Pareto bound."""
    _check_r(r)
    return beta / r


def wald_barrier_bound(mu: float, r0: float, bias: BiasSchedule,
                       table: BitChannelTable, clip: bool = True) -> float:
    """P(Gamma_min <= mu) <= 2^(-r0 mu) for an absorbing barrier mu <= 0."""
    if not -1.0 < r0 < 0.0:
        raise ValueError("r0 must lie in (-1, 0)")
    if mu > 0:
        raise ValueError("the barrier mu must be <= 0")
    raw = 2.0 ** (-r0 * mu)
    return min(raw, 1.0) if clip else raw


def bias_admissible(bias: BiasSchedule, table: BitChannelTable,
                    delta: float = 1.0, tol: float = 1e-9) -> tuple[bool, np.ndarray]:
    """Check b_i <= E0(delta, W_N^(i))/delta; returns (ok, violating indices)."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    limit = e0_profile(table, delta) / delta
    bad = np.flatnonzero(np.asarray(bias.b, dtype=float) > limit + tol)
    return bad.size == 0, bad + 1


def bounds_summary(r: float, bias: BiasSchedule, table: BitChannelTable,
                   rates: PartialRateProfile,
                   l_grid: np.ndarray | None = None) -> dict:
    """All bound quantities for one configuration, in JSON-friendly form."""
    eps = epsilon_margin(r, bias, table, rates)
    try:
        beta = beta_select(rates)
    except BoundConditionError:
        beta = float("nan")
    out = {
        "r": r,
        "epsilon": eps.value,
        "epsilon_argmin_l": eps.argmin_l,
        "epsilon_valid": eps.valid,
        "beta": beta,
        "delta_optimal": beta / r if math.isfinite(beta) else float("nan"),
        "e_c1_bound": float("nan"),
        "ccdf_bound": [],
    }
    if eps.valid:
        out["e_c1_bound"] = expected_c1_bound(eps.value)
        if beta > 1:
            grid = np.geomspace(1.0, 1e4, 41) if l_grid is None else np.asarray(l_grid)
            out["ccdf_bound"] = [
                (float(L), pareto_ccdf_bound(float(L), beta, eps.value)) for L in grid
            ]
    return out


def _check_r(r: float) -> None:
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
