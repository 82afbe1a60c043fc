"""Fano sequential decoding over the irregular PAC tree.

Thresholds are restricted to integer multiples of the spacing delta, start at
zero, tighten on first visits and loosen by delta when the search is stuck.
A visit is one forward move onto a node (the root is not counted); revisits
under lower thresholds are counted, matching the node-visit analysis the
revisit bound comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .metric import BiasSchedule, _gamma_branch
from .rate_profile import CodeSpec
from .sc_demapper import LLR_CAP, _sc_llr_at

_UNLIMITED = np.int64(2 ** 62)


@dataclass(frozen=True)
class FanoConfig:
    """Decoder knobs: threshold spacing, search limit, bias, tracing."""

    delta: float
    bias: BiasSchedule
    mnv: int | None = None  # None = unlimited search
    trace: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.mnv is not None and self.mnv < 0:
            raise ValueError("mnv must be nonnegative")


@dataclass
class DecodeRecord:
    """Outcome of one decoding session."""

    v_hat: np.ndarray
    visits_total: int
    visits_by_depth: np.ndarray
    hit_mnv: bool
    success: bool | None = None  # filled by the harness
    trace: np.ndarray | None = None  # Gamma along the accepted path, length N+1

    @property
    def anv(self) -> float:
        return self.visits_total / len(self.v_hat)


@njit(cache=True)
def _conv_base_bit(v: np.ndarray, taps: np.ndarray, d: int) -> np.uint8:
    """u_d of the branch v_d = 0, i.e. XOR of taps[1:] against the v history."""
    acc = np.uint8(0)
    m = taps.shape[0]
    jmax = d if d < m - 1 else m - 1
    for j in range(1, jmax + 1):
        if taps[j]:
            acc ^= v[d - j]
    return acc


@njit(cache=True)
def _fano_decode(chan_llrs, info_mask, taps, bias, delta, mnv,
                 v, u, visits_by_depth, gamma_path, zval, ranks, work, wa):
    """Run one Fano session; returns (visits_total, hit_mnv).

    Output arrays are caller-allocated: v/u hold the accepted path, and
    gamma_path[0..N] the partial path metric along it.
    """
    n = chan_llrs.shape[0]
    d = 0
    t_thr = 0.0
    visits = np.int64(0)
    hit = False
    gamma_path[0] = 0.0
    for i in range(n):
        visits_by_depth[i] = 0
    zval[0] = _sc_llr_at(chan_llrs, u, 0, work, wa)
    ranks[0] = 0

    while d < n:
        if visits >= mnv:
            hit = True
            break
        # look forward at the branch of the current rank
        lam = zval[d]
        u_base = _conv_base_bit(v, taps, d)
        if info_mask[d]:
            g_v0 = _gamma_branch(lam, u_base, bias[d])
            g_v1 = _gamma_branch(lam, u_base ^ np.uint8(1), bias[d])
            if g_v0 >= g_v1:
                if ranks[d] == 0:
                    v_try, g_try = np.uint8(0), g_v0
                else:
                    v_try, g_try = np.uint8(1), g_v1
            else:
                if ranks[d] == 0:
                    v_try, g_try = np.uint8(1), g_v1
                else:
                    v_try, g_try = np.uint8(0), g_v0
            n_branches_here = 2
        else:
            v_try, g_try = np.uint8(0), _gamma_branch(lam, u_base, bias[d])

        cand = gamma_path[d] + g_try
        if cand >= t_thr:
            # move forward
            prev = gamma_path[d]
            v[d] = v_try
            u[d] = u_base ^ v_try
            gamma_path[d + 1] = cand
            d += 1
            visits += 1
            visits_by_depth[d - 1] += 1
            if d < n:
                zval[d] = _sc_llr_at(chan_llrs, u, d, work, wa)
                ranks[d] = 0
            if prev < t_thr + delta:  # first visit: tighten
                t_thr = delta * math.floor(cand / delta)
            continue

        # stuck: move back while possible, else loosen the threshold
        while True:
            g_prev = gamma_path[d - 1] if d > 0 else -math.inf
            if g_prev >= t_thr:
                d -= 1
                limit = 2 if info_mask[d] else 1
                if ranks[d] + 1 < limit:
                    ranks[d] += 1
                    break
                # all branches tried at this node: keep moving back
            else:
                t_thr -= delta
                ranks[d] = 0
                break

    if hit:
        # greedy no-backtrack completion of the remaining bits
        while d < n:
            lam = zval[d]
            u_base = _conv_base_bit(v, taps, d)
            if info_mask[d]:
                g_v0 = _gamma_branch(lam, u_base, bias[d])
                g_v1 = _gamma_branch(lam, u_base ^ np.uint8(1), bias[d])
                if g_v0 >= g_v1:
                    v_try, g_try = np.uint8(0), g_v0
                else:
                    v_try, g_try = np.uint8(1), g_v1
            else:
                v_try, g_try = np.uint8(0), _gamma_branch(lam, u_base, bias[d])
            v[d] = v_try
            u[d] = u_base ^ v_try
            gamma_path[d + 1] = gamma_path[d] + g_try
            d += 1
            if d < n:
                zval[d] = _sc_llr_at(chan_llrs, u, d, work, wa)

    return visits, hit


def decode(channel_llrs: np.ndarray, spec: CodeSpec, config: FanoConfig) -> DecodeRecord:
    """Decode one received word; deterministic in (llrs, spec, config)."""
    llrs = np.clip(np.asarray(channel_llrs, dtype=np.float64), -LLR_CAP, LLR_CAP)
    n = spec.n_code
    if len(llrs) != n:
        raise ValueError(f"expected {n} LLRs, got {len(llrs)}")
    if len(config.bias.b) != n:
        raise ValueError("bias schedule length must equal N")
    info_mask = spec.info_mask()
    taps = np.asarray(spec.conn_poly, dtype=np.uint8)
    bias = np.asarray(config.bias.b, dtype=np.float64)
    mnv = _UNLIMITED if config.mnv is None else np.int64(config.mnv)

    v = np.zeros(n, dtype=np.uint8)
    u = np.zeros(n, dtype=np.uint8)
    visits_by_depth = np.zeros(n, dtype=np.int64)
    gamma_path = np.zeros(n + 1, dtype=np.float64)
    zval = np.zeros(n, dtype=np.float64)
    ranks = np.zeros(n, dtype=np.int8)
    work = np.empty(n, dtype=np.float64)
    wa = np.empty(n, dtype=np.uint8)

    visits, hit = _fano_decode(llrs, info_mask, taps, bias, float(config.delta),
                               mnv, v, u, visits_by_depth, gamma_path, zval,
                               ranks, work, wa)
    return DecodeRecord(v_hat=v, visits_total=int(visits),
                        visits_by_depth=visits_by_depth, hit_mnv=bool(hit),
                        trace=gamma_path.copy() if config.trace else None)


def revisit_bound(gamma_tilde: float, gamma_min: float, delta: float) -> int:
    """Largest possible visit count of a node with metric gamma_tilde.

    A node is enterable only at thresholds T <= gamma_tilde, at most once per
    threshold, and thresholds are multiples of delta never below t_min, the
    smallest multiple exceeding gamma_min - delta.  The count of admissible
    thresholds is the bound.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    t_min = delta * (math.floor((gamma_min - delta) / delta) + 1)
    if gamma_tilde < t_min:
        return 0
    return int(math.floor((gamma_tilde - t_min) / delta)) + 1
