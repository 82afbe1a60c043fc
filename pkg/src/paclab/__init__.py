"""PAC codes under Fano sequential decoding.

Construction of the polarized bit channels, PAC encoding, the biased
sequential-decoding metric, the Fano search itself, computable bounds on the
computation distribution, and a Monte-Carlo harness tying them together.
"""

from .channel import SnrSpec, snr_to_sigma2, trial_rng
from .construction import (BitChannelTable, ChannelParams, build_table,
                           cached_table, capacity_recursion, e0_rho, j_fun,
                           j_inv, mean_evolution, phi_fun, phi_inv,
                           z_and_cutoff)
from .encoder import (CONV_3211, conv_encode, insert_profile, pac_encode,
                      polar_transform, taps_from_octal)
from .fano import DecodeRecord, FanoConfig, decode, revisit_bound
from .metric import BiasSchedule, branch_metric, build_bias, genie_drift
from .rate_profile import CodeSpec, PartialRateProfile, partial_rates, rm_profile
from .sc_demapper import DemapperState, f_llr, g_llr

__all__ = [
    "BiasSchedule", "BitChannelTable", "ChannelParams", "CodeSpec",
    "CONV_3211", "DecodeRecord", "DemapperState", "FanoConfig",
    "PartialRateProfile", "SnrSpec", "branch_metric", "build_bias",
    "build_table", "cached_table", "capacity_recursion", "conv_encode",
    "decode", "e0_rho", "f_llr", "g_llr", "genie_drift", "insert_profile",
    "j_fun", "j_inv", "mean_evolution", "pac_encode", "partial_rates",
    "phi_fun", "phi_inv", "polar_transform", "revisit_bound", "rm_profile",
    "snr_to_sigma2", "taps_from_octal", "trial_rng", "z_and_cutoff",
]

__version__ = "0.1.0"
