"""Efficiency and diagnostic metrics over run records.

Undefined values (empty windows, zero improvement, empty confusion
denominators) are reported as None so downstream aggregation can filter
them deliberately instead of propagating NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def best_at(curve, n: int) -> float:
    """Best fitness after at most n evaluations, from a (eval_index, best) curve."""
    if not curve or n < curve[0][0]:
        raise ValueError(f"evaluation count {n} precedes the curve start")
    value = curve[0][1]
    for idx, best in curve:
        if idx > n:
            break
        value = best
    return value


@dataclass(frozen=True)
class CostReduction:
    n: int
    m: int
    delta: int
    censored: bool  # baseline never reached the surrogate's value

    @property
    def ratio(self) -> float:
        return delta_e_ratio(self.n, self.m)


def delta_e(surrogate_curve, baseline_curve, n: int) -> CostReduction:
    """Evaluations the baseline needs beyond n to match the surrogate at n."""
    if not surrogate_curve or n > surrogate_curve[-1][0]:
        raise ValueError(f"evaluation count {n} beyond the surrogate curve")
    target = best_at(surrogate_curve, n)
    for idx, best in baseline_curve:
        if best <= target:
            return CostReduction(n=n, m=idx, delta=idx - n, censored=False)
    m = baseline_curve[-1][0]
    return CostReduction(n=n, m=m, delta=m - n, censored=True)


def delta_e_ratio(n: int, m: int) -> float:
    """Relative computational cost ratio n/m; values < 1 mean savings."""
    if m < 1:
        raise ValueError("baseline evaluation count must be >= 1")
    return n / m


def zeta(record, d: int, i: int) -> float | None:
    """Log mean improvement per true evaluation over the last d generations.

    The window is clipped to generation 0; returns None when the window saw
    no evaluations or no improvement.
    """
    if i < 1:
        raise ValueError("generation index must be >= 1")
    gens = record.generations
    if i >= len(gens):
        raise ValueError("generation index beyond the run")
    j = max(i - d, 0)
    v_i = gens[i].evaluations_used
    v_j = gens[j].evaluations_used
    if v_i == v_j:
        return None
    improvement = abs(gens[i].best_fitness - gens[j].best_fitness)
    if improvement == 0.0:
        return None
    return math.log(improvement / (v_i - v_j))


def confusion_rates(tp: int, fp: int, tn: int, fn: int):
    """(accuracy, sensitivity, specificity); None where the denominator is empty."""
    if min(tp, fp, tn, fn) < 0:
        raise ValueError("confusion counts must be >= 0")
    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total if total else None
    sensitivity = tp / (tp + fn) if (tp + fn) else None
    specificity = tn / (tn + fp) if (tn + fp) else None
    return accuracy, sensitivity, specificity
