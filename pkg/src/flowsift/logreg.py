"""Binary logistic regression, written out from first principles.

Deterministic full-batch gradient descent with backtracking step halving:
no solver library, no stochasticity, so identical inputs give bit-identical
models and run-to-run variation can only come from data splits. Numerics are
kept overflow-safe throughout: the sigmoid never exponentiates a positive
argument and the loss uses the log(1 + e^-|z|) form rather than log(sigmoid).
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ._util import atomic_write_text
from .errors import (CorruptModel, NonFiniteLoss, SchemaMismatch,
                     SchemaVersionMismatch, ShapeMismatch, SingleClassInput)
from .features import (FeatureMatrix, StandardizationParams, standardize_fit)

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    l2_lambda: float = 1e-4
    learning_rate: float = 0.5
    max_iter: int = 2000
    tol: float = 1e-8
    class_weight_mode: str = "balanced"

    def __post_init__(self):
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.class_weight_mode not in ("none", "balanced"):
            raise ValueError("class_weight_mode must be 'none' or 'balanced'")


@dataclass(eq=False)
class LogRegModel:
    weights: np.ndarray
    bias: float
    feature_names: tuple[str, ...]
    standardization: StandardizationParams
    threshold: float
    hyperparams: HyperParams
    training_meta: dict

    def __post_init__(self):
        self.feature_names = tuple(self.feature_names)
        if len(self.weights) != len(self.feature_names):
            raise ValueError("weights length must match feature_names")
        if not (np.isfinite(self.weights).all() and math.isfinite(self.bias)):
            raise ValueError("model parameters must be finite")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogRegModel):
            return NotImplemented
        s, o = self.standardization, other.standardization
        return (np.array_equal(self.weights, other.weights)
                and self.bias == other.bias
                and self.feature_names == other.feature_names
                and tuple(s.feature_names) == tuple(o.feature_names)
                and np.array_equal(s.means, o.means)
                and np.array_equal(s.scales, o.scales)
                and np.array_equal(s.constant_flags, o.constant_flags)
                and self.threshold == other.threshold
                and self.hyperparams == other.hyperparams
                and self.training_meta == other.training_meta)


@dataclass
class TrainReport:
    loss_trace: list[float]
    converged: bool
    iterations_run: int
    wall_time_s: float


def sigmoid(z):
    """1 / (1 + e^-z), branch on sign so exp never sees a positive argument."""
    arr = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(arr))
    out = np.where(arr >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    if np.isscalar(z) or arr.ndim == 0:
        return float(out)
    return out


def _check_shapes(weights, X, y, class_weights):
    if X.ndim != 2:
        raise ShapeMismatch(f"X must be 2-D, got ndim={X.ndim}")
    n, f = X.shape
    if len(weights) != f:
        raise ShapeMismatch(f"weights has {len(weights)} entries for {f} features")
    if len(y) != n or len(class_weights) != n:
        raise ShapeMismatch(
            f"row mismatch: X has {n}, y has {len(y)}, "
            f"class_weights has {len(class_weights)}")


def loss(weights, bias: float, X, y, class_weights, l2_lambda: float) -> float:
    """Weighted mean negative log-likelihood plus (l2/2)*||w||^2.

    Per-sample NLL is max(z,0) - y*z + log1p(e^-|z|), which equals
    -[y log p + (1-y) log(1-p)] without ever forming log(sigmoid). The mean is
    normalized by the sum of class weights; the bias is not regularized.
    """
    weights = np.asarray(weights, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    class_weights = np.asarray(class_weights, dtype=np.float64)
    _check_shapes(weights, X, y, class_weights)
    z = X @ weights + bias
    per_sample = np.maximum(z, 0.0) - y * z + np.log1p(np.exp(-np.abs(z)))
    nll = float((class_weights * per_sample).sum() / class_weights.sum())
    return nll + 0.5 * l2_lambda * float(weights @ weights)


def gradient(weights, bias: float, X, y, class_weights,
             l2_lambda: float) -> tuple[np.ndarray, float]:
    """Analytic gradient of loss: ((1/Σc)Σ cᵢ(pᵢ-yᵢ)xᵢ + λw, (1/Σc)Σ cᵢ(pᵢ-yᵢ))."""
    weights = np.asarray(weights, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    class_weights = np.asarray(class_weights, dtype=np.float64)
    _check_shapes(weights, X, y, class_weights)
    p = sigmoid(X @ weights + bias)
    r = class_weights * (p - y) / class_weights.sum()
    return X.T @ r + l2_lambda * weights, float(r.sum())


def class_weights_for(y: np.ndarray, mode: str) -> np.ndarray:
    """Per-sample weights: all-ones, or balanced cᵢ = N / (2 * N_class(yᵢ))."""
    y = np.asarray(y)
    n = len(y)
    n_pos = int((y == 1).sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput(
            f"training data has {n_pos} positive and {n_neg} negative rows")
    if mode == "none":
        return np.ones(n)
    if mode == "balanced":
        w_pos = n / (2.0 * n_pos)
        w_neg = n / (2.0 * n_neg)
        return np.where(y == 1, w_pos, w_neg)
    raise ValueError(f"unknown class_weight_mode {mode!r}")


_MAX_HALVINGS = 60


def fit(matrix: FeatureMatrix, hyperparams: HyperParams | None = None,
        seed: int = 0, threshold: float = 0.5) -> tuple[LogRegModel, TrainReport]:
    """Train on a labeled feature matrix.

    Features are standardized against this data; weights and bias start at
    zero; each iteration takes a full-batch gradient step at learning_rate,
    halving the step while it would increase the loss. Stops at max_iter, when
    an accepted step improves the loss by less than tol, when the gradient
    inf-norm falls below tol, or when no halved step can decrease the loss
    (numerical floor).

    The seed does not influence the optimization (it is deterministic); it is
    recorded in training_meta so run provenance survives serialization.
    """
    hp = hyperparams if hyperparams is not None else HyperParams()
    t0 = time.perf_counter()
    y = np.asarray(matrix.y, dtype=np.float64)
    class_weights = class_weights_for(y, hp.class_weight_mode)
    params = standardize_fit(matrix)
    Xs = params.transform(matrix.X)

    w = np.zeros(matrix.n_features)
    b = 0.0
    current = loss(w, b, Xs, y, class_weights, hp.l2_lambda)
    if not math.isfinite(current):
        raise NonFiniteLoss(f"initial loss is {current}")
    trace = [current]
    converged = False
    for _ in range(hp.max_iter):
        dw, db = gradient(w, b, Xs, y, class_weights, hp.l2_lambda)
        if not (np.isfinite(dw).all() and math.isfinite(db)):
            raise NonFiniteLoss("gradient is non-finite")
        if max(float(np.abs(dw).max(initial=0.0)), abs(db)) < hp.tol:
            converged = True
            break
        step = hp.learning_rate
        accepted = False
        for _ in range(_MAX_HALVINGS):
            w_new = w - step * dw
            b_new = b - step * db
            candidate = loss(w_new, b_new, Xs, y, class_weights, hp.l2_lambda)
            if math.isfinite(candidate) and candidate <= current:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        improvement = current - candidate
        w, b, current = w_new, b_new, candidate
        trace.append(current)
        if improvement < hp.tol:
            converged = True
            break

    meta = {
        "iterations_run": len(trace) - 1,
        "final_loss": current,
        "seed": seed,
        "positive_classes": matrix.meta.get("positive_classes"),
    }
    model = LogRegModel(
        weights=w,
        bias=b,
        feature_names=matrix.feature_names,
        standardization=params,
        threshold=threshold,
        hyperparams=hp,
        training_meta=meta,
    )
    report = TrainReport(
        loss_trace=trace,
        converged=converged,
        iterations_run=len(trace) - 1,
        wall_time_s=time.perf_counter() - t0,
    )
    return model, report


def _check_schema(model: LogRegModel, matrix: FeatureMatrix) -> None:
    if matrix.feature_names != model.feature_names:
        raise SchemaMismatch(
            f"model expects features {list(model.feature_names)}, "
            f"matrix has {list(matrix.feature_names)}")


def predict_proba(model: LogRegModel, matrix: FeatureMatrix) -> np.ndarray:
    """P(positive) per row; the matrix schema must equal the model's."""
    _check_schema(model, matrix)
    Xs = model.standardization.transform(matrix.X)
    return sigmoid(Xs @ model.weights + model.bias)


def predict_label(model: LogRegModel, matrix: FeatureMatrix) -> np.ndarray:
    """Hard labels: probability >= threshold counts as positive."""
    return (predict_proba(model, matrix) >= model.threshold).astype(np.int8)


def save_model(path: str, model: LogRegModel) -> None:
    """Serialize to canonical JSON. Floats use Python's shortest round-trip
    repr, so load_model reproduces every field bit-for-bit."""
    s = model.standardization
    payload = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "feature_names": list(model.feature_names),
        "weights": [float(v) for v in model.weights],
        "bias": float(model.bias),
        "standardization": {
            "means": [float(v) for v in s.means],
            "scales": [float(v) for v in s.scales],
            "constant_flags": [bool(v) for v in s.constant_flags],
        },
        "threshold": float(model.threshold),
        "hyperparams": {
            "l2_lambda": model.hyperparams.l2_lambda,
            "learning_rate": model.hyperparams.learning_rate,
            "max_iter": model.hyperparams.max_iter,
            "tol": model.hyperparams.tol,
            "class_weight_mode": model.hyperparams.class_weight_mode,
        },
        "training_meta": model.training_meta,
    }
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_model(path: str) -> LogRegModel:
    """Read a model file; rejects unknown schema versions and mangled files."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise CorruptModel(f"{path}: expected a JSON object")
    version = payload.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"{path}: schema_version {version!r}, expected {MODEL_SCHEMA_VERSION}")
    try:
        std = payload["standardization"]
        params = StandardizationParams(
            feature_names=tuple(payload["feature_names"]),
            means=np.array(std["means"], dtype=np.float64),
            scales=np.array(std["scales"], dtype=np.float64),
            constant_flags=np.array(std["constant_flags"], dtype=bool),
        )
        hp = HyperParams(**payload["hyperparams"])
        model = LogRegModel(
            weights=np.array(payload["weights"], dtype=np.float64),
            bias=float(payload["bias"]),
            feature_names=tuple(payload["feature_names"]),
            standardization=params,
            threshold=float(payload["threshold"]),
            hyperparams=hp,
            training_meta=dict(payload["training_meta"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"{path}: {exc}") from None
    if not (len(params.means) == len(params.scales)
            == len(params.constant_flags) == len(model.weights)):
        raise CorruptModel(f"{path}: array lengths disagree")
    return model
