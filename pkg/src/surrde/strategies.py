"""Accept/discard strategies relaxing the default surrogate filter.

The default rule only evaluates challengers the surrogate predicts to
improve the current slot. Three relaxations can grant a second chance:
a flat Bernoulli draw, a draw whose probability decays with the predicted
quality gap, and a draw whose probability grows with the challenger's
distance to the already-evaluated set. Combined strategies accept if any
enabled criterion fires (disjunction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_P_BASE = 0.2


@dataclass
class StrategyFlags:
    use_prob: bool = False
    use_qual: bool = False
    use_diver: bool = False
    p_base: float = DEFAULT_P_BASE

    def __post_init__(self):
        if not 0.0 < self.p_base < 1.0:
            raise ValueError("p_base must lie strictly between 0 and 1")

    @property
    def any_enabled(self) -> bool:
        return self.use_prob or self.use_qual or self.use_diver


@dataclass
class RunningMeans:
    """Incremental means of predicted-quality gaps and nearest-neighbor distances."""

    d_sum: float = 0.0
    d_count: int = 0
    v_sum: float = 0.0
    v_count: int = 0

    @property
    def d_bar(self) -> float:
        return self.d_sum / self.d_count if self.d_count else 0.0

    @property
    def v_bar(self) -> float:
        return self.v_sum / self.v_count if self.v_count else 0.0

    def update_pair(self, d: float) -> None:
        if d < 0:
            raise ValueError("pair distance must be >= 0")
        self.d_sum += d
        self.d_count += 1

    def update_nn(self, v: float) -> None:
        if v < 0:
            raise ValueError("nearest-neighbor distance must be >= 0")
        self.v_sum += v
        self.v_count += 1


def update_means(
    means: RunningMeans,
    new_pair_distance: float | None = None,
    new_nn_distance: float | None = None,
) -> RunningMeans:
    if new_pair_distance is not None:
        means.update_pair(new_pair_distance)
    if new_nn_distance is not None:
        means.update_nn(new_nn_distance)
    return means


def default_accept_surface(q_hat_challenger: float, q_current: float) -> bool:
    return q_hat_challenger < q_current


def prob_accept(rng: np.random.Generator, p: float) -> bool:
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability out of range")
    return rng.random() < p


def quality_distance_prob(
    q_hat_x: float, q_hat_challenger: float, d_bar: float, p_base: float = DEFAULT_P_BASE
) -> float:
    """Second-chance probability b**(-d), calibrated so p(d_bar) = p_base."""
    d = abs(q_hat_x - q_hat_challenger)
    if d == 0.0:
        return 1.0
    if d_bar <= 0.0:
        return p_base  # no calibration reference yet
    # b**(-d) with b = p_base**(-1/d_bar), evaluated in log space to avoid
    # overflow for tiny reference means.
    return math.exp(math.log(p_base) * d / d_bar)


def diversity_distance(x_challenger, evaluated_set) -> float:
    """Euclidean distance from the challenger to the closest evaluated point."""
    pts = np.asarray(evaluated_set, dtype=float)
    if pts.size == 0:
        raise ValueError("evaluated set is empty")
    diff = pts - np.asarray(x_challenger, dtype=float)
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))))


def diversity_prob(v: float, v_bar: float, p_base: float = DEFAULT_P_BASE) -> float:
    """Second-chance probability 1 - b**(-v), calibrated so p(v_bar) = p_base."""
    if v < 0 or v_bar < 0:
        raise ValueError("distances must be >= 0")
    if v == 0.0:
        return 0.0
    if v_bar <= 0.0:
        return p_base
    # 1 - b**(-v) with b = (1 - p_base)**(-1/v_bar), in log space.
    return 1.0 - math.exp(math.log(1.0 - p_base) * v / v_bar)


def combined_accept(
    surrogate_verdict: bool,
    flags: StrategyFlags,
    means: RunningMeans,
    rng: np.random.Generator,
    q_hat_x: float | None = None,
    q_hat_challenger: float | None = None,
    nn_distance: float | None = None,
) -> bool:
    """Disjunction of the default verdict and every enabled relaxation.

    Each enabled relaxation draws one Bernoulli per challenger. The
    quality-distance relaxation needs surface estimates for both points;
    without them (pairwise surrogates) it falls back to the flat p_base draw.
    """
    if surrogate_verdict:
        return True
    accepted = False
    if flags.use_prob:
        accepted |= prob_accept(rng, flags.p_base)
    if flags.use_qual:
        if q_hat_x is None or q_hat_challenger is None:
            p = flags.p_base
        else:
            p = quality_distance_prob(
                q_hat_x, q_hat_challenger, means.d_bar if means.d_count else 0.0,
                flags.p_base,
            )
        accepted |= prob_accept(rng, p)
    if flags.use_diver:
        if nn_distance is None:
            raise ValueError("diversity strategy requires the challenger nn distance")
        p = diversity_prob(
            nn_distance, means.v_bar if means.v_count else 0.0, flags.p_base
        )
        accepted |= prob_accept(rng, p)
    return accepted
