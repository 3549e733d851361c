import itertools

import numpy as np
import pytest

from surrde.stats import (
    average_ranking,
    friedman_test,
    holm_correction,
    wilcoxon_signed_rank,
)


def wilcoxon_bruteforce_oracle(a, b):
    """Full enumeration over sign assignments, written independently."""
    from scipy.stats import rankdata

    d = np.asarray(a, float) - np.asarray(b, float)
    d = d[d != 0]
    n = len(d)
    ranks = rankdata(np.abs(d))
    observed = min(ranks[d < 0].sum(), ranks[d > 0].sum())
    count = 0
    for signs in itertools.product((0, 1), repeat=n):
        t = sum(r for r, s in zip(ranks, signs) if s)
        t = min(t, ranks.sum() - t)
        if t <= observed + 1e-12:
            count += 1
    return min(1.0, count / 2**n)


class TestAverageRanking:
    def test_dominant_config(self):
        m = [[1.0, 2.0], [3.0, 4.0], [0.0, 9.0]]
        assert average_ranking(m).tolist() == [1.0, 2.0]

    def test_tie_mid_rank(self):
        m = [[1.0, 1.0], [1.0, 2.0]]
        assert average_ranking(m).tolist() == [1.25, 1.75]

    def test_three_configs(self):
        m = [[1.0, 2.0, 3.0]] * 4
        assert average_ranking(m).tolist() == [1.0, 2.0, 3.0]

    def test_rank_sum_invariant(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(7, 5))
        assert average_ranking(m).sum() == pytest.approx(5 * 6 / 2)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            average_ranking([[1.0, 2.0]])


class TestFriedman:
    def test_all_tied(self):
        stat, p = friedman_test([[1.0, 1.0], [2.0, 2.0]])
        assert stat == 0.0 and p == 1.0

    def test_hand_computed_case(self):
        # n=4, k=3, fixed order every row: stat = 8.0, p = exp(-4)
        m = [[1.0, 2.0, 3.0]] * 4
        stat, p = friedman_test(m)
        assert stat == pytest.approx(8.0)
        assert p == pytest.approx(0.0183156, abs=1e-6)

    def test_column_permutation_invariant(self):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(6, 4))
        stat, _ = friedman_test(m)
        permuted = m[:, [2, 0, 3, 1]]
        stat_p, _ = friedman_test(permuted)
        assert stat == pytest.approx(stat_p)


class TestWilcoxon:
    def test_all_positive_six_pairs(self):
        a = [10.0, 11.0, 12.0, 13.0, 14.0, 15.0]
        b = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        w, p = wilcoxon_signed_rank(a, b)
        assert w == 0.0
        assert p == pytest.approx(2.0 / 64.0)

    def test_identical_samples(self):
        a = [1.0, 2.0, 3.0]
        assert wilcoxon_signed_rank(a, a)[1] == 1.0

    def test_sign_flip_symmetry(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=10)
        b = rng.normal(size=10)
        _, p1 = wilcoxon_signed_rank(a, b)
        _, p2 = wilcoxon_signed_rank(b, a)
        assert p1 == pytest.approx(p2)

    @pytest.mark.parametrize("n", [5, 7, 9, 12])
    def test_matches_bruteforce_oracle(self, n):
        rng = np.random.default_rng(n)
        for _ in range(10):
            a = rng.normal(size=n)
            b = rng.normal(size=n)
            _, p = wilcoxon_signed_rank(a, b)
            assert p == pytest.approx(wilcoxon_bruteforce_oracle(a, b), abs=1e-12)

    def test_ties_in_absolute_differences(self):
        a = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0]
        b = [2.0, 2.0, 3.0, 0.0, 4.0, 8.0]  # |d| all equal: mid-ranks
        _, p = wilcoxon_signed_rank(a, b)
        assert p == pytest.approx(wilcoxon_bruteforce_oracle(a, b), abs=1e-12)

    def test_large_sample_normal_approximation(self):
        rng = np.random.default_rng(2)
        a = rng.normal(0.5, 1.0, size=60)
        b = rng.normal(0.0, 1.0, size=60)
        _, p = wilcoxon_signed_rank(a, b)
        from scipy.stats import wilcoxon as scipy_wilcoxon

        ref = scipy_wilcoxon(a, b, correction=True, mode="approx").pvalue
        assert p == pytest.approx(ref, rel=1e-6)


class TestHolm:
    def test_two_values(self):
        assert holm_correction([0.01, 0.04]) == pytest.approx([0.02, 0.04])

    def test_single_value(self):
        assert holm_correction([0.5]) == [0.5]

    def test_monotonicity_clamp(self):
        assert holm_correction([0.03, 0.03, 0.03]) == pytest.approx(
            [0.09, 0.09, 0.09]
        )

    def test_adjusted_at_least_raw_and_monotone(self):
        rng = np.random.default_rng(3)
        p = rng.uniform(size=12)
        adj = np.asarray(holm_correction(p))
        assert (adj >= p - 1e-15).all()
        order = np.argsort(p)
        assert (np.diff(adj[order]) >= -1e-15).all()

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            holm_correction([0.5, 1.2])
