"""Nonparametric comparison across configurations: average ranks, Friedman,
Wilcoxon signed-rank (exact for small samples), and Holm correction."""

from __future__ import annotations

import numpy as np
from scipy.stats import chi2, norm, rankdata

EXACT_WILCOXON_LIMIT = 25


def _check_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
        raise ValueError("result matrix needs at least 2 rows and 2 columns")
    if np.any(~np.isfinite(m)):
        raise ValueError("result matrix has missing or non-finite entries")
    return m


def average_ranking(m) -> np.ndarray:
    """Mean rank per column; rank 1 is the lowest value, ties share mid-ranks."""
    m = _check_matrix(m)
    ranks = np.apply_along_axis(rankdata, 1, m)
    return ranks.mean(axis=0)


def friedman_test(m) -> tuple[float, float]:
    m = _check_matrix(m)
    n, k = m.shape
    mean_ranks = average_ranking(m)
    statistic = 12.0 * n / (k * (k + 1)) * np.sum(mean_ranks**2) - 3.0 * n * (k + 1)
    statistic = max(float(statistic), 0.0)
    if statistic == 0.0:
        return 0.0, 1.0
    return statistic, float(chi2.sf(statistic, k - 1))


def _exact_negative_rank_sum_tail(ranks: np.ndarray, t: float) -> float:
    """P(T <= t) where T sums a uniformly random subset of the given ranks.

    Ranks may be half-integers (mid-ranks); doubling makes them integral so
    the distribution can be tabulated by dynamic programming.
    """
    scaled = np.rint(ranks * 2).astype(int)
    total = int(scaled.sum())
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in scaled:
        counts[r:] += counts[: total + 1 - r].copy()
    threshold = int(np.floor(t * 2 + 1e-9))
    return counts[: threshold + 1].sum() / 2 ** len(ranks)


def wilcoxon_signed_rank(a, b) -> tuple[float, float]:
    """Two-sided signed-rank test; exact by enumeration up to n = 25.

    Returns (W, p) where W is the negative-rank sum.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("paired samples must have equal length")
    d = a - b
    d = d[d != 0.0]
    n = d.shape[0]
    if n == 0:
        return 0.0, 1.0
    ranks = rankdata(np.abs(d))
    w_neg = float(ranks[d < 0].sum())
    w_pos = float(ranks[d > 0].sum())
    t = min(w_neg, w_pos)
    if n <= EXACT_WILCOXON_LIMIT:
        p = 2.0 * _exact_negative_rank_sum_tail(ranks, t)
    else:
        mu = n * (n + 1) / 4.0
        sigma = np.sqrt(n * (n + 1) * (2 * n + 1) / 24.0)
        z = (t - mu + 0.5) / sigma
        p = 2.0 * float(norm.cdf(z))
    return w_neg, min(p, 1.0)


def holm_correction(p_values) -> list[float]:
    """Step-down Holm adjustment, returned in the original order."""
    p = np.asarray(p_values, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.shape[0]
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running_max = 0.0
    for j, idx in enumerate(order):
        candidate = min(1.0, (m - j) * p[idx])
        running_max = max(running_max, candidate)
        adjusted[idx] = running_max
    return adjusted.tolist()
