"""Reed-Muller rate profile and the tree-shape quantities derived from it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CodeSpec:
    """Block length, message length, information set and precoder taps.

    Indices in `info_set` are 1-based, matching the tree positions u_1..u_N.
    """

    n_code: int
    k_info: int
    info_set: tuple[int, ...]
    conn_poly: tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.n_code < 1 or self.n_code & (self.n_code - 1):
            raise ValueError(f"N must be a power of two, got {self.n_code}")
        if len(self.info_set) != self.k_info:
            raise ValueError("info_set size must equal k_info")
        if any(i < 1 or i > self.n_code for i in self.info_set):
            raise ValueError("info_set indices must lie in 1..N")
        if len(set(self.info_set)) != len(self.info_set):
            raise ValueError("info_set has repeated indices")
        if tuple(sorted(self.info_set)) != tuple(self.info_set):
            object.__setattr__(self, "info_set", tuple(sorted(self.info_set)))
        if not self.conn_poly or self.conn_poly[0] != 1:
            raise ValueError("conn_poly must be nonempty with leading coefficient 1")

    @property
    def rate(self) -> float:
        return self.k_info / self.n_code

    def info_mask(self) -> np.ndarray:
        """0/1 indicator over positions 1..N (0-indexed array)."""
        mask = np.zeros(self.n_code, dtype=np.uint8)
        for i in self.info_set:
            mask[i - 1] = 1
        return mask


@dataclass(frozen=True)
class PartialRateProfile:
    """Prefix counts lambda_i and partial rates R_i = lambda_i / i.

    Arrays have length N+1 and are indexed by prefix length, so lam[0] = 0
    and rate[i] is meaningful for i >= 1 (rate[0] is fixed to 0).
    """

    lam: np.ndarray
    rate: np.ndarray

    @property
    def n_code(self) -> int:
        return len(self.lam) - 1


def rm_profile(n_code: int, k_info: int, means: np.ndarray | None = None) -> tuple[int, ...]:
    """Information set of the Reed-Muller score rule.

    Picks the K indices with the largest row weight 2^popcount(i-1).  Ties at
    the cut weight are broken by larger bit-channel mean (when a construction
    table is supplied), then by larger index; the result is deterministic
    either way.
    """
    if n_code < 1 or n_code & (n_code - 1):
        raise ValueError(f"N must be a power of two, got {n_code}")
    if not 1 <= k_info <= n_code:
        raise ValueError(f"K must be in 1..{n_code}, got {k_info}")
    if means is not None and len(means) != n_code:
        raise ValueError("means must have length N")
    weights = np.array([bin(i).count("1") for i in range(n_code)])
    tie = np.zeros(n_code) if means is None else np.asarray(means, dtype=float)
    order = sorted(range(n_code), key=lambda i: (weights[i], tie[i], i), reverse=True)
    return tuple(sorted(i + 1 for i in order[:k_info]))


def partial_rates(info_set: tuple[int, ...], n_code: int) -> PartialRateProfile:
    """Cumulative information counts and partial rates of a profile."""
    lam = np.zeros(n_code + 1, dtype=np.int64)
    members = set(info_set)
    for i in range(1, n_code + 1):
        lam[i] = lam[i - 1] + (1 if i in members else 0)
    rate = np.zeros(n_code + 1)
    rate[1:] = lam[1:] / np.arange(1, n_code + 1)
    return PartialRateProfile(lam=lam, rate=rate)
