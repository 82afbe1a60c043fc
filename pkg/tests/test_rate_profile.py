import numpy as np
import pytest

from paclab.rate_profile import CodeSpec, partial_rates, rm_profile


class TestRMProfile:
    def test_8_4(self):
        assert rm_profile(8, 4) == (4, 6, 7, 8)

    @pytest.mark.parametrize("k, wmin", [(64, 4), (29, 5), (99, 3)])
    def test_128_popcount_sets(self, k, wmin):
        expected = tuple(i for i in range(1, 129) if bin(i - 1).count("1") >= wmin)
        assert rm_profile(128, k) == expected

    def test_full_rate(self):
        assert rm_profile(16, 16) == tuple(range(1, 17))

    def test_deterministic(self):
        assert rm_profile(64, 30) == rm_profile(64, 30)

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            rm_profile(8, 0)
        with pytest.raises(ValueError):
            rm_profile(8, 9)

    def test_tie_break_by_mean(self):
        # (8, 2): the single weight-8 row wins, then one of the weight-4
        # rows {4, 6, 7}; the mean decides which.
        means = np.zeros(8)
        means[5] = 3.0  # index 6 (1-based)
        assert rm_profile(8, 2, means) == (6, 8)
        means[:] = 0.0
        means[3] = 3.0
        assert rm_profile(8, 2, means) == (4, 8)

    def test_tie_break_by_index_without_means(self):
        assert rm_profile(8, 2) == (7, 8)


class TestPartialRates:
    def test_8_4_prefix_counts(self):
        prof = partial_rates((4, 6, 7, 8), 8)
        np.testing.assert_array_equal(prof.lam[1:], [0, 0, 0, 1, 1, 2, 3, 4])
        assert prof.rate[8] == pytest.approx(0.5)

    def test_k_zero(self):
        prof = partial_rates((), 8)
        assert np.all(prof.rate == 0)
        assert prof.lam[8] == 0

    @pytest.mark.parametrize("n, k", [(16, 5), (32, 20), (128, 64)])
    def test_final_rate_is_k_over_n(self, n, k):
        prof = partial_rates(rm_profile(n, k), n)
        assert prof.rate[n] == pytest.approx(k / n)
        assert prof.lam[n] == k
        assert np.all(np.diff(prof.lam) >= 0)


class TestCodeSpec:
    def test_info_mask(self):
        spec = CodeSpec(8, 4, (4, 6, 7, 8))
        np.testing.assert_array_equal(spec.info_mask(), [0, 0, 0, 1, 0, 1, 1, 1])

    def test_validation(self):
        with pytest.raises(ValueError):
            CodeSpec(8, 3, (4, 6, 7, 8))
        with pytest.raises(ValueError):
            CodeSpec(8, 1, (9,))
        with pytest.raises(ValueError):
            CodeSpec(8, 1, (3,), conn_poly=(0, 1))

    def test_all_frozen_allowed(self):
        spec = CodeSpec(8, 0, ())
        assert spec.info_mask().sum() == 0
