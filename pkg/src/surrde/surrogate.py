"""Surface and pairwise surrogate models with warm-up and trail-limited buffers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import learners
from .learners import LearnerSpec, TrainedModel

# Default warm-up generations per (learner kind, approach).
WARMUP_DEFAULTS = {
    ("random_forest", "surface"): 40,
    ("random_forest", "pairwise"): 20,
    ("mlp", "surface"): 30,
    ("mlp", "pairwise"): 2,
    ("ridge", "surface"): 10,
    ("ridge", "pairwise"): 2,
    ("decision_tree", "surface"): 30,
    ("decision_tree", "pairwise"): 4,
    ("gradient_boosting", "surface"): 2,
    ("gradient_boosting", "pairwise"): 6,
    ("gpr", "surface"): 10,
}

DEFAULT_TRAIL_SIZE = 45


def default_warmup(kind: str, approach: str) -> int:
    return WARMUP_DEFAULTS.get((kind, approach), 10)


@dataclass
class SurrogateConfig:
    approach: str  # "surface" | "pairwise"
    learner: LearnerSpec
    warmup_generations: int | None = None
    trail_size: int = DEFAULT_TRAIL_SIZE
    mapping: str = "extended"  # "plain" | "extended"

    def __post_init__(self):
        if self.approach not in ("surface", "pairwise"):
            raise ValueError(f"unknown approach: {self.approach!r}")
        expected_mode = "regressor" if self.approach == "surface" else "classifier"
        if self.learner.mode != expected_mode:
            raise ValueError(
                f"approach {self.approach!r} requires a {expected_mode} learner"
            )
        if self.mapping not in ("plain", "extended"):
            raise ValueError(f"unknown mapping: {self.mapping!r}")
        if self.warmup_generations is None:
            self.warmup_generations = default_warmup(self.learner.kind, self.approach)
        if self.warmup_generations < 1:
            raise ValueError("warmup_generations must be >= 1")
        if self.trail_size < 1:
            raise ValueError("trail_size must be >= 1")


def in_warmup(generation: int, cfg: SurrogateConfig) -> bool:
    if generation < 0:
        raise ValueError("generation must be >= 0")
    return generation < cfg.warmup_generations


def pairwise_label(q_x: float, q_y: float) -> int:
    """1 iff the second point strictly beats the first (ties map to 0)."""
    return 1 if q_y < q_x else 0


def pairwise_map(x, y, mapping: str = "extended") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("pairwise_map requires vectors of equal length")
    if mapping == "plain":
        return np.concatenate([x, y])
    if mapping == "extended":
        return np.concatenate([x, y, x - y])
    raise ValueError(f"unknown mapping: {mapping!r}")


class _GrowingMatrix:
    """Append-only row buffer with amortized growth."""

    def __init__(self, width: int):
        self._data = np.empty((64, width))
        self._n = 0

    def append(self, row):
        if self._n == self._data.shape[0]:
            grown = np.empty((self._data.shape[0] * 2, self._data.shape[1]))
            grown[: self._n] = self._data
            self._data = grown
        self._data[self._n] = row
        self._n += 1

    def view(self) -> np.ndarray:
        return self._data[: self._n]

    def __len__(self):
        return self._n


class SurfaceSurrogate:
    """Regression surrogate over (solution, fitness) points."""

    def __init__(self, cfg: SurrogateConfig, dim: int):
        assert cfg.approach == "surface"
        self.cfg = cfg
        self.dim = dim
        self._buffer = _GrowingMatrix(dim)
        self._targets: list[float] = []
        self.model: TrainedModel | None = None
        self._rows_at_last_fit = -1

    @property
    def fitted(self) -> bool:
        return self.model is not None

    @property
    def row_count(self) -> int:
        return len(self._buffer)

    def ingest(self, vector, fitness: float) -> None:
        self._buffer.append(vector)
        self._targets.append(fitness)

    def retrain(self, rng: np.random.Generator) -> None:
        if len(self._buffer) == 0:
            return
        if len(self._buffer) == self._rows_at_last_fit:
            return  # buffer unchanged since the last fit
        self.model = learners.fit(
            self.cfg.learner, self._buffer.view(), np.asarray(self._targets), rng
        )
        self._rows_at_last_fit = len(self._buffer)

    def estimate(self, x) -> float:
        if not self.fitted:
            raise RuntimeError("surrogate model not fitted")
        return learners.predict_value(self.model, x)


class PairwiseSurrogate:
    """Binary-classification surrogate over mapped solution pairs.

    Each newly evaluated point is paired with up to trail_size most recent
    previous evaluations, emitting both orientations of every pair.
    """

    def __init__(self, cfg: SurrogateConfig, dim: int):
        assert cfg.approach == "pairwise"
        self.cfg = cfg
        self.dim = dim
        width = 2 * dim if cfg.mapping == "plain" else 3 * dim
        self._buffer = _GrowingMatrix(width)
        self._labels: list[int] = []
        self._trail: deque = deque(maxlen=cfg.trail_size)
        self.model: TrainedModel | None = None
        self._rows_at_last_fit = -1

    @property
    def fitted(self) -> bool:
        return self.model is not None

    @property
    def row_count(self) -> int:
        return len(self._buffer)

    def ingest(self, vector, fitness: float) -> None:
        vector = np.asarray(vector, dtype=float)
        for partner, partner_q in self._trail:
            self._buffer.append(pairwise_map(partner, vector, self.cfg.mapping))
            self._labels.append(pairwise_label(partner_q, fitness))
            self._buffer.append(pairwise_map(vector, partner, self.cfg.mapping))
            self._labels.append(pairwise_label(fitness, partner_q))
        self._trail.append((vector, fitness))

    def retrain(self, rng: np.random.Generator) -> None:
        if len(self._buffer) == 0:
            return
        labels = np.asarray(self._labels)
        if labels.min() == labels.max():
            return  # single-class buffer: stay in pass-through state
        if len(self._buffer) == self._rows_at_last_fit:
            return
        self.model = learners.fit(self.cfg.learner, self._buffer.view(), labels, rng)
        self._rows_at_last_fit = len(self._buffer)

    def estimate(self, x, x_challenger) -> bool:
        """Whether the challenger is predicted to beat the current solution."""
        if not self.fitted:
            raise RuntimeError("surrogate model not fitted")
        row = pairwise_map(x, x_challenger, self.cfg.mapping)
        return bool(learners.predict_class(self.model, row))


def make_surrogate(cfg: SurrogateConfig, dim: int):
    if cfg.approach == "surface":
        return SurfaceSurrogate(cfg, dim)
    return PairwiseSurrogate(cfg, dim)
