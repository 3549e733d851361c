"""Subprocess adapter for external expensive black-box objectives.

Wire protocol, per evaluation: one request line of D full-precision decimals
joined by single spaces, then one response line carrying a single decimal
fitness. Each evaluation runs in its own worker process; up to
``parallel_workers`` evaluations run concurrently.
"""

from __future__ import annotations

import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class BlackBoxError(RuntimeError):
    """Protocol or process failure; carries the batch index that failed."""

    def __init__(self, message: str, batch_index: int):
        super().__init__(message)
        self.batch_index = batch_index


class BlackBoxTimeout(BlackBoxError):
    pass


@dataclass
class BlackBoxSpec:
    command: Sequence[str]
    dim: int
    timeout: float = 60.0
    parallel_workers: int = 1

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.parallel_workers < 1:
            raise ValueError("parallel_workers must be >= 1")


def format_request(x) -> str:
    # repr gives the shortest round-trip decimal form, keeping replay bit-exact.
    return " ".join(repr(float(v)) for v in x) + "\n"


def _evaluate_one(spec: BlackBoxSpec, x, index: int) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != spec.dim:
        raise BlackBoxError(
            f"vector at index {index} has {x.shape[0]} components, expected {spec.dim}",
            index,
        )
    proc = subprocess.Popen(
        list(spec.command),
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    try:
        out, _ = proc.communicate(format_request(x), timeout=spec.timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.wait()
        raise BlackBoxTimeout(
            f"evaluation at index {index} exceeded timeout of {spec.timeout}s", index
        )
    line = out.splitlines()[0].strip() if out.splitlines() else ""
    try:
        return float(line)
    except ValueError:
        raise BlackBoxError(
            f"non-numeric reply at index {index}: {line!r}", index
        ) from None


def blackbox_evaluate(spec: BlackBoxSpec, batch) -> list[float]:
    """Evaluate a batch of vectors, results returned in batch order."""
    batch = list(batch)
    if spec.parallel_workers == 1 or len(batch) <= 1:
        return [_evaluate_one(spec, x, i) for i, x in enumerate(batch)]
    with ThreadPoolExecutor(max_workers=spec.parallel_workers) as pool:
        futures = [
            pool.submit(_evaluate_one, spec, x, i) for i, x in enumerate(batch)
        ]
        return [f.result() for f in futures]
