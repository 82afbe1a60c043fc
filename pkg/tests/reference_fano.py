"""Instrumented pure-Python mirror of the compiled Fano kernel.

Shares the compiled scalar helpers (branch metric, bit-channel LLR) so all
floating-point values are bit-identical to the production decoder; only the
control flow is re-stated here.  Used by tests for kernel equivalence,
hand-checked step traces, and per-node visit instrumentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from paclab.fano import _conv_base_bit
from paclab.metric import _gamma_branch
from paclab.sc_demapper import LLR_CAP, _sc_llr_at


@dataclass
class NodeStats:
    visits: int = 0
    gamma: float = 0.0


@dataclass
class ReferenceResult:
    v_hat: np.ndarray
    visits_total: int
    visits_by_depth: np.ndarray
    gamma_path: np.ndarray
    hit_mnv: bool
    # instrumentation
    node_stats: dict = field(default_factory=dict)  # (depth, v-prefix) -> NodeStats
    steps: list = field(default_factory=list)  # (kind, depth_after, T_after, gamma)


def reference_decode(channel_llrs, spec, bias, delta, mnv=None, log_steps=False):
    """Fano search with per-node visit instrumentation.

    Returns a ReferenceResult whose counters must match the compiled kernel
    exactly for identical inputs.
    """
    llrs = np.clip(np.asarray(channel_llrs, dtype=np.float64), -LLR_CAP, LLR_CAP)
    n = spec.n_code
    info_mask = spec.info_mask()
    taps = np.asarray(spec.conn_poly, dtype=np.uint8)
    b = np.asarray(bias, dtype=np.float64)
    mnv = 2 ** 62 if mnv is None else int(mnv)

    v = np.zeros(n, dtype=np.uint8)
    u = np.zeros(n, dtype=np.uint8)
    gamma_path = np.zeros(n + 1)
    visits_by_depth = np.zeros(n, dtype=np.int64)
    zval = np.zeros(n)
    ranks = np.zeros(n, dtype=np.int64)
    work = np.empty(n)
    wa = np.empty(n, dtype=np.uint8)

    res = ReferenceResult(v_hat=v, visits_total=0, visits_by_depth=visits_by_depth,
                          gamma_path=gamma_path, hit_mnv=False)

    def branch(d, rank):
        """(v_bit, branch metric) of the rank-th best branch at depth d."""
        lam = zval[d]
        u_base = _conv_base_bit(v, taps, d)
        if info_mask[d]:
            g_v0 = _gamma_branch(lam, u_base, b[d])
            g_v1 = _gamma_branch(lam, u_base ^ np.uint8(1), b[d])
            pairs = [(0, g_v0), (1, g_v1)] if g_v0 >= g_v1 else [(1, g_v1), (0, g_v0)]
            return pairs[rank]
        return 0, _gamma_branch(lam, u_base, b[d])

    d = 0
    t_thr = 0.0
    visits = 0
    zval[0] = _sc_llr_at(llrs, u, 0, work, wa)
    ranks[0] = 0
    hit = False

    while d < n:
        if visits >= mnv:
            hit = True
            break
        v_try, g_try = branch(d, ranks[d])
        cand = gamma_path[d] + g_try
        if cand >= t_thr:
            prev = gamma_path[d]
            v[d] = v_try
            u[d] = _conv_base_bit(v, taps, d) ^ np.uint8(v_try)
            gamma_path[d + 1] = cand
            d += 1
            visits += 1
            visits_by_depth[d - 1] += 1
            key = (d, bytes(v[:d]))
            st = res.node_stats.setdefault(key, NodeStats())
            st.visits += 1
            st.gamma = cand
            if d < n:
                zval[d] = _sc_llr_at(llrs, u, d, work, wa)
                ranks[d] = 0
            if prev < t_thr + delta:
                t_thr = delta * math.floor(cand / delta)
            if log_steps:
                res.steps.append(("F", d, t_thr, cand))
            continue
        while True:
            g_prev = gamma_path[d - 1] if d > 0 else -math.inf
            if g_prev >= t_thr:
                d -= 1
                if log_steps:
                    res.steps.append(("B", d, t_thr, gamma_path[d]))
                limit = 2 if info_mask[d] else 1
                if ranks[d] + 1 < limit:
                    ranks[d] += 1
                    break
            else:
                t_thr -= delta
                ranks[d] = 0
                if log_steps:
                    res.steps.append(("L", d, t_thr, gamma_path[d]))
                break

    if hit:
        while d < n:
            v_try, g_try = branch(d, 0)
            v[d] = v_try
            u[d] = _conv_base_bit(v, taps, d) ^ np.uint8(v_try)
            gamma_path[d + 1] = gamma_path[d] + g_try
            d += 1
            if d < n:
                zval[d] = _sc_llr_at(llrs, u, d, work, wa)

    res.visits_total = visits
    res.hit_mnv = hit
    return res
