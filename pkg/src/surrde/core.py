"""Shared domain types: quality comparison, budget accounting, RNG streams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Stable per-stream identifiers: enabling/disabling any feature must never
# change the draws seen by an unrelated stream.
STREAM_IDS = {
    "population_init": 0,
    "de_operators": 1,
    "strategy_bernoulli": 2,
    "learner_training": 3,
    "shift_generation": 4,
}


class BudgetExhaustedError(RuntimeError):
    """Raised when a true evaluation is requested past the budget limit."""


def is_better(a: float, b: float) -> bool:
    """Strict minimization order: a beats b iff a < b. Ties do not count."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"non-finite fitness in comparison: {a!r}, {b!r}")
    return a < b


def clamp(x, lower, upper):
    """Project a vector onto the box [lower, upper], component-wise."""
    x = np.asarray(x, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if x.shape != lower.shape or x.shape != upper.shape:
        raise ValueError(
            f"dimension mismatch: vector {x.shape}, bounds {lower.shape}/{upper.shape}"
        )
    return np.clip(x, lower, upper)


@dataclass
class Bounds:
    """Per-dimension box bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise ValueError("lower/upper bound shape mismatch")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def clamp(self, x):
        return clamp(x, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))


@dataclass(frozen=True)
class EvaluatedSolution:
    vector: np.ndarray
    fitness: float
    eval_index: int


@dataclass
class EvaluationLedger:
    """Counts true quality-function calls and keeps the best-so-far curve."""

    budget_limit: int
    used: int = 0
    best_curve: list = field(default_factory=list)

    def record(self, fitness: float) -> EvaluatedSolution:
        if self.used >= self.budget_limit:
            raise BudgetExhaustedError(
                f"evaluation budget of {self.budget_limit} exhausted"
            )
        if not math.isfinite(fitness):
            raise ValueError(f"non-finite fitness recorded: {fitness!r}")
        self.used += 1
        best = fitness if not self.best_curve else min(self.best_curve[-1][1], fitness)
        self.best_curve.append((self.used, best))
        return self.used

    @property
    def remaining(self) -> int:
        return self.budget_limit - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.budget_limit

    def best(self) -> float:
        if not self.best_curve:
            return math.inf
        return self.best_curve[-1][1]


class RngStreams:
    """Named independent deterministic random streams.

    Each stream is seeded from (base_seed, run_index, stream id) only, so the
    population_init stream is identical across configurations of the same run.
    """

    def __init__(self, base_seed: int, run_index: int = 0):
        self.base_seed = base_seed
        self.run_index = run_index
        self._streams: dict[str, np.random.Generator] = {}

    def get(self, name: str) -> np.random.Generator:
        if name not in STREAM_IDS:
            raise KeyError(f"unknown rng stream: {name}")
        if name not in self._streams:
            seq = np.random.SeedSequence(
                entropy=(self.base_seed, self.run_index, STREAM_IDS[name])
            )
            self._streams[name] = np.random.default_rng(seq)
        return self._streams[name]
