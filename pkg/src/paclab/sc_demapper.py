"""Bit-channel LLRs for the tree decoder, with forward/backward movement.

The decided-bit vector is authoritative: every demap recomputes the LLR path
from the channel observations, so the output is a pure function of the
channel LLRs and the decided prefix.  That makes history-independence exact
by construction and keeps backward moves O(1).
"""

from __future__ import annotations

import numpy as np
from numba import njit

#: Channel LLRs are clipped to +-LLR_CAP nats before demapping.
LLR_CAP = 200.0


@njit(cache=True)
def _f_pair(a: float, b: float) -> float:
    """Exact box-plus 2*atanh(tanh(a/2)tanh(b/2)) in overflow-safe form."""
    s = 1.0 if (a >= 0.0) == (b >= 0.0) else -1.0
    aa = abs(a)
    ab = abs(b)
    m = aa if aa < ab else ab
    return s * m + np.log1p(np.exp(-abs(a + b))) - np.log1p(np.exp(-abs(a - b)))


@njit(cache=True)
def _g_pair(a: float, b: float, u: np.uint8) -> float:
    return b + (a if u == 0 else -a)


@njit(cache=True)
def _polar_transform_inplace(bits: np.ndarray, length: int) -> None:
    h = length
    while h > 1:
        half = h // 2
        start = 0
        while start < length:
            for j in range(start, start + half):
                bits[j] ^= bits[j + half]
            start += h
        h = half


@njit(cache=True)
def _sc_llr_at(chan_llrs: np.ndarray, u_bits: np.ndarray, i: int,
               work: np.ndarray, wa: np.ndarray) -> float:
    """LLR of bit i (0-based) given decided bits u_bits[0:i].

    Walks the polarization tree from the channel level down: an f-combine
    when the target lies in the first half of the current segment, otherwise
    a g-combine against the polar transform of the segment's decided first
    half.  `work` (float, length N) and `wa` (uint8, length N) are scratch.
    """
    n = chan_llrs.shape[0]
    for j in range(n):
        work[j] = chan_llrs[j]
    seg = n
    base = 0
    il = i
    while seg > 1:
        half = seg // 2
        if il < half:
            for j in range(half):
                work[j] = _f_pair(work[j], work[half + j])
        else:
            for j in range(half):
                wa[j] = u_bits[base + j]
            _polar_transform_inplace(wa, half)
            for j in range(half):
                work[j] = _g_pair(work[j], work[half + j], wa[j])
            base += half
            il -= half
        seg = half
    return work[0]


@njit(cache=True)
def _sc_llr_forward(chan_llrs: np.ndarray, u_bits: np.ndarray,
                    out: np.ndarray, work: np.ndarray, wa: np.ndarray) -> None:
    """All N bit-channel LLRs along the given (genie) path."""
    n = chan_llrs.shape[0]
    for i in range(n):
        out[i] = _sc_llr_at(chan_llrs, u_bits, i, work, wa)


def f_llr(a: float, b: float) -> float:
    """Check-node update (exact box-plus)."""
    return float(_f_pair(float(a), float(b)))


def g_llr(a: float, b: float, u: int) -> float:
    """Bit-node update b + (1-2u)a."""
    return float(_g_pair(float(a), float(b), np.uint8(u)))


class DemapperState:
    """Movable decoder position on the polarization tree for one trial."""

    def __init__(self, channel_llrs: np.ndarray, llr_cap: float = LLR_CAP):
        llrs = np.asarray(channel_llrs, dtype=np.float64)
        n = len(llrs)
        if n < 1 or n & (n - 1):
            raise ValueError(f"length must be a power of two, got {n}")
        self.n_code = n
        self.channel_llrs = np.clip(llrs, -llr_cap, llr_cap)
        self.decided_bits = np.zeros(n, dtype=np.uint8)
        self.depth = 0
        self._work = np.empty(n, dtype=np.float64)
        self._wa = np.empty(n, dtype=np.uint8)

    def demap(self) -> float:
        """LLR of the next undecided bit given the current prefix."""
        if self.depth >= self.n_code:
            raise ValueError("demap called at full depth")
        return float(_sc_llr_at(self.channel_llrs, self.decided_bits,
                                self.depth, self._work, self._wa))

    def advance(self, u_bit: int) -> None:
        if self.depth >= self.n_code:
            raise ValueError("advance past full depth")
        self.decided_bits[self.depth] = u_bit & 1
        self.depth += 1

    def retreat(self) -> None:
        if self.depth <= 0:
            raise ValueError("retreat at the root")
        self.depth -= 1
