"""BPSK over AWGN: modulation, noise injection, SNR bookkeeping, LLRs.

All per-trial randomness flows from counter-based Philox streams keyed by
(master_seed, trial_index, lane), so any parallel arrangement of trials
reproduces the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DATA_LANE = 0
NOISE_LANE = 1


@dataclass(frozen=True)
class SnrSpec:
    """Operating point in dB under an explicit convention."""

    snr_db: float
    rate: float
    convention: str = "EbN0"  # or "EsN0"

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")
        if self.convention not in ("EbN0", "EsN0"):
            raise ValueError(f"unknown SNR convention {self.convention!r}")


def snr_to_sigma2(spec: SnrSpec) -> float:
    """Noise variance for unit-energy BPSK at the given operating point."""
    lin = 10.0 ** (spec.snr_db / 10.0)
    if spec.convention == "EbN0":
        return 1.0 / (2.0 * spec.rate * lin)
    return 1.0 / (2.0 * lin)


def modulate(bits: np.ndarray) -> np.ndarray:
    """Map bit b to (-1)^b: 0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def transmit(symbols: np.ndarray, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise of variance sigma2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return symbols + rng.normal(0.0, np.sqrt(sigma2), size=len(symbols))


def channel_llr(y: np.ndarray, sigma2: float) -> np.ndarray:
    """Channel-output LLRs 2*y/sigma2 (nats)."""
    return 2.0 * np.asarray(y, dtype=float) / sigma2


def trial_rng(master_seed: int, trial_index: int, lane: int = 0) -> np.random.Generator:
    """Independent, reproducible stream for one (trial, lane) pair."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index, lane))
    return np.random.Generator(np.random.Philox(seed=ss))
