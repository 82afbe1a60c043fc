import itertools
import math

import numpy as np
import pytest
from scipy.special import logsumexp

from paclab import CONV_3211, CodeSpec, cached_table, polar_transform, rm_profile


@pytest.fixture(scope="session")
def table_128_25():
    """Construction table for (128, R=1/2) at 2.5 dB Eb/N0 (cached on disk)."""
    return cached_table(128, 2.5, 0.5)


@pytest.fixture(scope="session")
def spec_128_64():
    return CodeSpec(128, 64, rm_profile(128, 64), CONV_3211)


@pytest.fixture(scope="session")
def spec_16_8():
    return CodeSpec(16, 8, rm_profile(16, 8), CONV_3211)


def brute_force_bit_llr(channel_llrs, prefix, i):
    """Bit-channel LLR by summation over all completions (exponential)."""
    n = len(channel_llrs)
    num, den = [], []
    for comp in itertools.product([0, 1], repeat=n - i - 1):
        for u_i, acc in ((0, num), (1, den)):
            u = np.array(list(prefix) + [u_i] + list(comp), dtype=np.uint8)
            x = polar_transform(u)
            acc.append(np.sum((1.0 - 2.0 * x) * channel_llrs / 2.0))
    return logsumexp(num) - logsumexp(den)
