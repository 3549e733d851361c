"""Supervised learners behind a uniform fit/predict surface.

Every learner is a configured scikit-learn estimator (the classifier kinds
mirror their regressor counterparts), so trained models keep the usual
sklearn API underneath. All stochastic training draws its seed from the
provided learner_training stream, never from global state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import (
    GradientBoostingClassifier,
    GradientBoostingRegressor,
    RandomForestClassifier,
    RandomForestRegressor,
)
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import RBF
from sklearn.linear_model import Ridge, RidgeClassifier
from sklearn.neural_network import MLPClassifier, MLPRegressor
from sklearn.tree import DecisionTreeClassifier, DecisionTreeRegressor

LEARNER_KINDS = (
    "ridge",
    "decision_tree",
    "random_forest",
    "gradient_boosting",
    "mlp",
    "gpr",
)

GPR_BASE_JITTER = 1e-10
GPR_MAX_JITTER = 1e-4


@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    mode: str  # "regressor" | "classifier"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in LEARNER_KINDS:
            raise ValueError(f"unknown learner kind: {self.kind!r}")
        if self.mode not in ("regressor", "classifier"):
            raise ValueError(f"unknown learner mode: {self.mode!r}")
        if self.kind == "gpr" and self.mode != "regressor":
            raise ValueError("gpr supports regressor mode only")


class _ConstantClassifier:
    """Degenerate model for single-class training sets."""

    def __init__(self, label: int):
        self.label = int(label)

    def predict(self, X):
        return np.full(len(X), self.label, dtype=int)

    def get_params(self, deep=False):
        return {"label": self.label}


def _build(spec: LearnerSpec, seed: int):
    p = dict(spec.params)
    reg = spec.mode == "regressor"
    if spec.kind == "ridge":
        cls = Ridge if reg else RidgeClassifier
        return cls(**{"alpha": 1.0, **p})
    if spec.kind == "decision_tree":
        cls = DecisionTreeRegressor if reg else DecisionTreeClassifier
        return cls(**{"random_state": seed, **p})
    if spec.kind == "random_forest":
        defaults = {
            "random_state": seed,
            "n_estimators": 40,
            "bootstrap": True,
            "max_features": (1.0 / 3.0) if reg else "sqrt",
        }
        cls = RandomForestRegressor if reg else RandomForestClassifier
        return cls(**{**defaults, **p})
    if spec.kind == "gradient_boosting":
        defaults = {
            "random_state": seed,
            "n_estimators": 50,
            "max_depth": 3,
            "learning_rate": 0.3,
        }
        cls = GradientBoostingRegressor if reg else GradientBoostingClassifier
        return cls(**{**defaults, **p})
    if spec.kind == "mlp":
        defaults = {
            "random_state": seed,
            "hidden_layer_sizes": (100,),
            "activation": "relu",
            "solver": "adam",
            "learning_rate_init": 0.01,
            "max_iter": 20,
        }
        cls = MLPRegressor if reg else MLPClassifier
        return cls(**{**defaults, **p})
    if spec.kind == "gpr":
        length_scale = p.pop("length_scale", 1.0)
        jitter = p.pop("jitter", GPR_BASE_JITTER)
        return GaussianProcessRegressor(
            kernel=RBF(length_scale=length_scale),
            alpha=jitter,
            optimizer=None,
            random_state=seed,
            **p,
        )
    raise AssertionError(spec.kind)


@dataclass
class TrainedModel:
    spec: LearnerSpec
    estimator: object
    feature_count: int
    training_row_count: int

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.feature_count:
            raise ValueError(
                f"feature-count mismatch: model expects {self.feature_count}, "
                f"got {x.shape[1]}"
            )
        return x


def fit(spec: LearnerSpec, X, y, rng: np.random.Generator) -> TrainedModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("empty or malformed training set")
    if X.shape[0] != y.shape[0]:
        raise ValueError("row/target count mismatch")
    seed = int(rng.integers(2**32))
    if spec.mode == "classifier":
        labels = np.unique(y)
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("classifier targets must be in {0, 1}")
        if labels.shape[0] == 1:
            est = _ConstantClassifier(labels[0])
            return TrainedModel(spec, est, X.shape[1], X.shape[0])
    est = _build(spec, seed)
    with warnings.catch_warnings():
        # MLP with max_iter=20 stops before sklearn's convergence criterion.
        warnings.simplefilter("ignore")
        if spec.kind == "gpr":
            est = _fit_gpr_with_jitter(est, X, y)
        else:
            est.fit(X, y.astype(int) if spec.mode == "classifier" else y)
    return TrainedModel(spec, est, X.shape[1], X.shape[0])


def _fit_gpr_with_jitter(est, X, y):
    while True:
        try:
            est.fit(X, y)
            return est
        except np.linalg.LinAlgError:
            if est.alpha * 10 > GPR_MAX_JITTER:
                raise
            est.alpha *= 10


def predict_value(model: TrainedModel, x) -> float:
    if model.spec.mode != "regressor":
        raise ValueError("predict_value requires a regressor model")
    return float(model.estimator.predict(model._check(x))[0])


def predict_values(model: TrainedModel, X) -> np.ndarray:
    if model.spec.mode != "regressor":
        raise ValueError("predict_values requires a regressor model")
    return np.asarray(model.estimator.predict(model._check(X)), dtype=float)


def predict_class(model: TrainedModel, x) -> int:
    if model.spec.mode != "classifier":
        raise ValueError("predict_class requires a classifier model")
    return int(model.estimator.predict(model._check(x))[0])


def latin_hypercube_sample(n: int, bounds, rng: np.random.Generator) -> np.ndarray:
    """n points with one sample per equal-width stratum in every dimension."""
    if n < 1:
        raise ValueError("n must be >= 1")
    dim = bounds.dim
    u = (rng.random((n, dim)) + np.column_stack(
        [rng.permutation(n) for _ in range(dim)]
    )) / n
    return bounds.lower + u * (bounds.upper - bounds.lower)


def dump_model(model: TrainedModel) -> str:
    """Self-describing text dump of a fitted model (debugging aid)."""
    lines = [
        "surrde-model v1",
        f"kind={model.spec.kind} mode={model.spec.mode}",
        f"features={model.feature_count} rows={model.training_row_count}",
    ]
    params = model.estimator.get_params(deep=False)
    for key in sorted(params):
        lines.append(f"param {key}={params[key]!r}")
    coef = getattr(model.estimator, "coef_", None)
    if coef is not None:
        lines.append(f"coef={np.asarray(coef).ravel().tolist()!r}")
        lines.append(f"intercept={getattr(model.estimator, 'intercept_', None)!r}")
    return "\n".join(lines) + "\n"
