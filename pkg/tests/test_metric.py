import math

import numpy as np
import pytest

from paclab.channel import SnrSpec
from paclab.metric import (BIAS_RULES, BiasSchedule, branch_metric, build_bias,
                           genie_drift)


class TestBranchMetric:
    def test_uninformative_observation(self):
        for b in (0.0, 0.5, 1.35):
            assert branch_metric(0.0, 0, b) == pytest.approx(-b, abs=1e-12)
            assert branch_metric(0.0, 1, b) == pytest.approx(-b, abs=1e-12)

    def test_certain_observation(self):
        b = 0.3
        assert branch_metric(200.0, 0, b) == pytest.approx(1.0 - b, abs=1e-9)
        assert branch_metric(200.0, 1, b) < -250  # capped, far negative

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            branch_metric(math.inf, 0, 0.0)

    def test_likelihood_identity(self):
        # 2^(gamma(0)+b) + 2^(gamma(1)+b) == 2 exactly (both posteriors sum to one)
        rng = np.random.default_rng(8)
        worst = 0.0
        for _ in range(100_000):
            llr = rng.uniform(-30, 30)
            b = rng.uniform(0, 1.5)
            g0 = branch_metric(llr, 0, b)
            g1 = branch_metric(llr, 1, b)
            worst = max(worst, abs(2.0 ** (g0 + b) + 2.0 ** (g1 + b) - 2.0))
        assert worst < 1e-9

    def test_identity_spot(self):
        g0 = branch_metric(1.3, 0, 0.7)
        g1 = branch_metric(1.3, 1, 0.7)
        assert 2.0 ** (g0 + 0.7) + 2.0 ** (g1 + 0.7) == pytest.approx(2.0, abs=1e-12)

    def test_upper_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            llr = rng.uniform(-50, 50)
            b = rng.uniform(-1, 2)
            assert branch_metric(llr, 0, b) <= 1 - b + 1e-12
            assert branch_metric(llr, 1, b) <= 1 - b + 1e-12

    def test_monotonicity(self):
        llrs = np.linspace(-20, 20, 101)
        g0 = [branch_metric(l, 0, 0.0) for l in llrs]
        g1 = [branch_metric(l, 1, 0.0) for l in llrs]
        assert np.all(np.diff(g0) > 0)
        assert np.all(np.diff(g1) < 0)


class TestBuildBias:
    def test_fixed_rule(self, table_128_25, spec_128_64):
        sched = build_bias("fixed", table_128_25, spec_128_64, b_info=1.35, b_frozen=0.0)
        mask = spec_128_64.info_mask().astype(bool)
        assert np.all(sched.b[mask] == 1.35)
        assert np.all(sched.b[~mask] == 0.0)

    def test_capacity_copy(self, table_128_25, spec_128_64):
        sched = build_bias("capacity_scaled", table_128_25, spec_128_64, alpha=1.0)
        np.testing.assert_array_equal(sched.b, table_128_25.capacity)

    def test_cutoff_scaled(self, table_128_25, spec_128_64):
        sched = build_bias("cutoff_scaled", table_128_25, spec_128_64, alpha=0.76)
        np.testing.assert_allclose(sched.b, 0.76 * table_128_25.cutoff, rtol=1e-12)

    def test_info_only_and_frozen_only(self, table_128_25, spec_128_64):
        mask = spec_128_64.info_mask().astype(bool)
        info_only = build_bias("cutoff_info_only", table_128_25, spec_128_64)
        assert np.all(info_only.b[~mask] == 0.0)
        np.testing.assert_array_equal(info_only.b[mask], table_128_25.cutoff[mask])
        frozen_only = build_bias("cutoff_frozen_only", table_128_25, spec_128_64)
        assert np.all(frozen_only.b[mask] == 0.0)
        np.testing.assert_array_equal(frozen_only.b[~mask], table_128_25.cutoff[~mask])

    def test_rule2_shape(self, table_128_25, spec_128_64):
        sched = build_bias("capacity_info_fixed_frozen", table_128_25, spec_128_64,
                           b_frozen=0.4)
        mask = spec_128_64.info_mask().astype(bool)
        np.testing.assert_array_equal(sched.b[mask], table_128_25.capacity[mask])
        assert np.all(sched.b[~mask] == 0.4)

    @pytest.mark.parametrize("rule", ["capacity_scaled", "cutoff_scaled"])
    def test_alpha_zero_is_all_zero(self, table_128_25, spec_128_64, rule):
        sched = build_bias(rule, table_128_25, spec_128_64, alpha=0.0)
        assert np.all(sched.b == 0.0)

    def test_unknown_rule(self, table_128_25, spec_128_64):
        with pytest.raises(ValueError):
            build_bias("nonsense", table_128_25, spec_128_64)

    def test_fixed_needs_b_info(self, table_128_25, spec_128_64):
        with pytest.raises(ValueError):
            build_bias("fixed", table_128_25, spec_128_64)


class TestGenieDrift:
    def test_zero_drift_with_capacity_bias(self, table_128_25, spec_128_64):
        # smoke-scale version of the acceptance run: most indices within 4 SE
        sched = build_bias("capacity_scaled", table_128_25, spec_128_64)
        snr = SnrSpec(2.5, 0.5, "EbN0")
        drift = genie_drift(table_128_25, sched, spec_128_64, snr,
                            trials=4000, master_seed=3)
        ok = np.abs(drift.mean_correct) <= 4.0 * drift.se_correct + 1e-12
        assert ok.mean() > 0.9

    def test_wrong_branch_below_minus_bias(self, table_128_25, spec_128_64):
        sched = build_bias("capacity_scaled", table_128_25, spec_128_64)
        snr = SnrSpec(2.5, 0.5, "EbN0")
        drift = genie_drift(table_128_25, sched, spec_128_64, snr,
                            trials=4000, master_seed=4)
        info = drift.is_info.astype(bool)
        ok = drift.mean_wrong[info] <= -drift.bias[info] + 4.0 * drift.se_wrong[info]
        assert ok.mean() > 0.9

    def test_noiseless_limits(self, table_128_25, spec_128_64):
        # zero bias, noiseless-ish channel: correct branch -> 1, wrong -> far negative
        sched = BiasSchedule(b=np.zeros(128), rule="fixed", alpha=0.0)
        snr = SnrSpec(30.0, 0.5, "EbN0")
        table = None  # unused by genie_drift
        drift = genie_drift(table_128_25, sched, spec_128_64, snr,
                            trials=50, master_seed=5)
        good = table_128_25.capacity > 0.999
        assert np.all(drift.mean_correct[good] > 0.99)
        assert np.all(drift.mean_wrong[good] < -50)

    def test_requires_trials(self, table_128_25, spec_128_64):
        sched = build_bias("capacity_scaled", table_128_25, spec_128_64)
        with pytest.raises(ValueError):
            genie_drift(table_128_25, sched, spec_128_64,
                        SnrSpec(2.5, 0.5), trials=0)
