"""Branch metric of the tree decoder and the bias-schedule design rules.

The demapper emits LLRs in nats; the metric works in bits, so the conversion
happens here and bias values stay in bits throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .channel import DATA_LANE, NOISE_LANE, SnrSpec, snr_to_sigma2, trial_rng
from .construction import BitChannelTable
from .encoder import pac_encode
from .rate_profile import CodeSpec
from .sc_demapper import LLR_CAP, _sc_llr_forward

_LOG2 = math.log(2.0)

BIAS_RULES = (
    "fixed",
    "capacity_scaled",
    "cutoff_scaled",
    "cutoff_info_only",
    "cutoff_frozen_only",
    "capacity_info_fixed_frozen",
)


@njit(cache=True)
def _softplus(x: float) -> float:
    # log(1 + e^x) without overflow
    if x > 0.0:
        return x + np.log1p(np.exp(-x))
    return np.log1p(np.exp(x))


@njit(cache=True)
def _gamma_branch(llr_nats: float, u_bit: np.uint8, bias_bits: float) -> float:
    """Branch metric 1 - log2(1 + z^-1 or z) - b with z = e^llr, in bits."""
    arg = -llr_nats if u_bit == 0 else llr_nats
    return 1.0 - _softplus(arg) / _LOG2 - bias_bits


def branch_metric(llr: float, u_bit: int, b_j: float) -> float:
    """Metric of one branch: llr in nats, bias and result in bits."""
    if not math.isfinite(llr):
        raise ValueError("llr must be finite")
    return float(_gamma_branch(float(llr), np.uint8(u_bit & 1), float(b_j)))


@dataclass(frozen=True)
class BiasSchedule:
    """Per-index bias values plus the rule and scale that produced them."""

    b: np.ndarray
    rule: str
    alpha: float = 1.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.b)):
            raise ValueError("bias values must be finite")


def build_bias(rule: str, table: BitChannelTable, spec: CodeSpec,
               alpha: float = 1.0, b_info: float | None = None,
               b_frozen: float = 0.0) -> BiasSchedule:
    """Materialize one of the design rules into a per-index schedule.

    fixed: b_info on A, b_frozen elsewhere.
    capacity_scaled / cutoff_scaled: alpha * I resp. alpha * E0, all indices.
    cutoff_info_only / cutoff_frozen_only: E0 restricted to A resp. A^c.
    capacity_info_fixed_frozen: I on A, b_frozen elsewhere.
    """
    if table.n_code != spec.n_code:
        raise ValueError("table and code spec disagree on N")
    mask = spec.info_mask().astype(bool)
    if rule == "fixed":
        if b_info is None:
            raise ValueError("fixed rule needs b_info")
        b = np.where(mask, float(b_info), float(b_frozen))
    elif rule == "capacity_scaled":
        b = alpha * table.capacity
    elif rule == "cutoff_scaled":
        b = alpha * table.cutoff
    elif rule == "cutoff_info_only":
        b = np.where(mask, table.cutoff, 0.0)
    elif rule == "cutoff_frozen_only":
        b = np.where(mask, 0.0, table.cutoff)
    elif rule == "capacity_info_fixed_frozen":
        b = np.where(mask, table.capacity, float(b_frozen))
    else:
        raise ValueError(f"unknown bias rule {rule!r}")
    return BiasSchedule(b=np.asarray(b, dtype=float), rule=rule, alpha=alpha)


@dataclass(frozen=True)
class DriftStats:
    """Genie-aided per-index branch-metric statistics."""

    is_info: np.ndarray
    bias: np.ndarray
    mean_correct: np.ndarray
    se_correct: np.ndarray
    mean_wrong: np.ndarray
    se_wrong: np.ndarray
    trials: int


@njit(cache=True)
def _drift_accumulate(chan_llrs, u_true, bias, sum_c, sum_c2, sum_w, sum_w2,
                      llrs_out, work, wa):
    n = chan_llrs.shape[0]
    _sc_llr_forward(chan_llrs, u_true, llrs_out, work, wa)
    for i in range(n):
        gc = _gamma_branch(llrs_out[i], u_true[i], bias[i])
        gw = _gamma_branch(llrs_out[i], u_true[i] ^ np.uint8(1), bias[i])
        sum_c[i] += gc
        sum_c2[i] += gc * gc
        sum_w[i] += gw
        sum_w2[i] += gw * gw


def genie_drift(table: BitChannelTable, schedule: BiasSchedule, spec: CodeSpec,
                snr: SnrSpec, trials: int, master_seed: int = 0) -> DriftStats:
    """Monte-Carlo estimate of the correct- and wrong-branch metric means.

    Each trial transmits a random codeword and evaluates, at every index, the
    branch metric of the transmitted bit and of its complement with the
    correct prefix supplied (genie).  Returns per-index means and standard
    errors of both.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = spec.n_code
    sigma2 = snr_to_sigma2(snr)
    bias = np.asarray(schedule.b, dtype=np.float64)
    sum_c = np.zeros(n)
    sum_c2 = np.zeros(n)
    sum_w = np.zeros(n)
    sum_w2 = np.zeros(n)
    llrs_out = np.empty(n)
    work = np.empty(n)
    wa = np.empty(n, dtype=np.uint8)
    for t in range(trials):
        data = trial_rng(master_seed, t, DATA_LANE).integers(0, 2, spec.k_info)
        _, u, x = pac_encode(data.astype(np.uint8), spec)
        noise = trial_rng(master_seed, t, NOISE_LANE).normal(0.0, math.sqrt(sigma2), n)
        y = (1.0 - 2.0 * x) + noise
        llrs = np.clip(2.0 * y / sigma2, -LLR_CAP, LLR_CAP)
        _drift_accumulate(llrs, u, bias, sum_c, sum_c2, sum_w, sum_w2,
                          llrs_out, work, wa)
    mean_c = sum_c / trials
    mean_w = sum_w / trials
    var_c = np.maximum(sum_c2 / trials - mean_c ** 2, 0.0)
    var_w = np.maximum(sum_w2 / trials - mean_w ** 2, 0.0)
    return DriftStats(is_info=spec.info_mask(), bias=bias.copy(),
                      mean_correct=mean_c, se_correct=np.sqrt(var_c / trials),
                      mean_wrong=mean_w, se_wrong=np.sqrt(var_w / trials),
                      trials=trials)
