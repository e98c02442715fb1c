#     Adpersuasion detects persuasive text and analyses political advertising.
#
#     Copyright (C) 2024  Adpersuasion contributors
#
#     This program is free software: you can redistribute it and/or modify
#     it under the terms of the GNU General Public License as published by
#     the Free Software Foundation, either version 3 of the License, or
#     (at your option) any later version.
#
#     This program is distributed in the hope that it will be useful,
#     but WITHOUT ANY WARRANTY; without even the implied warranty of
#     MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#     GNU General Public License for more details.
#
#     You should have received a copy of the GNU General Public License
#     along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Multi-label linear sigmoid classifier trained with the asymmetric weighted binary cross-entropy:

    L(y, p) = 1/N * sum_i w_i * BCE(y_i, p_i),   w_i = beta * y_i + (1 - beta) * (1 - y_i)

N counts every (instance, label) entry and probabilities are clamped to [eps, 1 - eps] inside the
logarithms. Training is full-batch gradient descent from zero weights with a fixed learning rate;
the logit gradient of an entry is w_i * (p_i - y_i) / N.
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence
import json
import math

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.special import expit

from adpersuasion.corpus import LabeledSentence, LabelSchema, binarize
from adpersuasion.errors import (ArtifactIntegrityError, ConfigError, DivergenceError, InputFormatError,
                                 MissingArtifactError, ShapeMismatchError)
from adpersuasion.features import Featurizer, featurizer_from_dict
from adpersuasion.log import get_logger
from adpersuasion.metrics import f1_macro, f1_micro

log = get_logger()

MODEL_FORMAT = "adpersuasion-linear"
MODEL_VERSION = 1
DEFAULT_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))
"""0.05, 0.10, ..., 0.95"""


@dataclass(frozen=True)
class LossConfig:
    beta: float = 0.5
    eps: float = 1e-7

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0.0 < self.eps < 0.5:
            raise ConfigError(f"eps must lie in (0, 0.5), got {self.eps}")

    @classmethod
    def balanced(cls, Y: Any, eps: float = 1e-7) -> "LossConfig":
        """
        beta = n_neg / (n_pos + n_neg), which upweights positives when labels are sparse.
        """
        Y = np.asarray(Y)
        if not Y.size:
            raise ConfigError("cannot derive beta from an empty label matrix")
        n_pos = int(Y.sum())
        return cls(beta=(Y.size - n_pos) / Y.size, eps=eps)

    def to_dict(self) -> dict[str, float]:
        return {"beta": self.beta, "eps": self.eps}


@dataclass(frozen=True)
class CalibrationConfig:
    threshold: float = 0.5
    grid: tuple[float, ...] = DEFAULT_GRID

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold}")
        if not self.grid:
            raise ConfigError("threshold grid is empty")
        if any(not 0.0 < t < 1.0 for t in self.grid) or any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("threshold grid must be strictly increasing within (0, 1)")


class Target(str, Enum):
    MULTILABEL = "multilabel"
    BINARY = "binary"


def _as_label_matrix(Y: Any) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2:
        raise ShapeMismatchError("label matrix must be 2-D")
    if Y.size and not np.isin(Y, (0.0, 1.0)).all():
        raise InputFormatError("label matrix must contain only 0 and 1")
    return Y


def check_prob_matrix(P: Any) -> np.ndarray:
    """
    Validates a probability matrix: finite entries in [0, 1]; a vector is read as one column.
    """
    P = np.asarray(P, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2:
        raise ShapeMismatchError("probability matrix must be 2-D")
    if not np.all(np.isfinite(P)) or np.any(P < 0.0) or np.any(P > 1.0):
        raise InputFormatError("probabilities must be finite and lie in [0, 1]")
    return P


@dataclass(frozen=True, eq=False)
class TrainBatch:
    """
    Feature rows X with their 0/1 label matrix Y.
    """
    X: sparse.csr_matrix
    Y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", sparse.csr_matrix(self.X))
        object.__setattr__(self, "Y", _as_label_matrix(self.Y))
        if self.X.shape[0] != self.Y.shape[0]:
            raise ShapeMismatchError(f"{self.X.shape[0]} feature rows but {self.Y.shape[0]} label rows")

    @property
    def n(self) -> int:
        """Number of (instance, label) terms in the loss mean."""
        return int(self.Y.size)


@dataclass(frozen=True, eq=False)
class LinearModel:
    """
    W has one row per feature plus a trailing bias row, and one column per label.
    """
    W: np.ndarray
    label_names: tuple[str, ...]
    schema_id: str
    target: Target = Target.MULTILABEL
    featurizer: Optional[Featurizer] = None
    loss_history: tuple[float, ...] = ()
    seed: int = 0
    loss: Optional[LossConfig] = None

    def __post_init__(self):
        W = np.array(self.W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] < 1:
            raise ShapeMismatchError("W must be a 2-D matrix with a bias row")
        if W.shape[1] != len(self.label_names):
            raise ShapeMismatchError(f"W has {W.shape[1]} columns for {len(self.label_names)} labels")
        if not np.all(np.isfinite(W)):
            raise ShapeMismatchError("W contains non-finite weights")
        W.flags.writeable = False
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "label_names", tuple(self.label_names))
        object.__setattr__(self, "target", Target(self.target))
        object.__setattr__(self, "loss_history", tuple(float(v) for v in self.loss_history))

    @property
    def n_features(self) -> int:
        return self.W.shape[0] - 1

    @property
    def n_labels(self) -> int:
        return self.W.shape[1]

    @property
    def vocab_hash(self) -> str:
        return self.featurizer.digest() if self.featurizer is not None else ""

    def with_weights(self, W: np.ndarray) -> "LinearModel":
        return LinearModel(W, self.label_names, self.schema_id, self.target, self.featurizer,
                           self.loss_history, self.seed, self.loss)


def add_bias(X: Any) -> sparse.csr_matrix:
    """Appends a constant 1 column."""
    X = X if sparse.issparse(X) else sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    return sparse.hstack([X, np.ones((X.shape[0], 1))], format="csr")


def _weights(Y: np.ndarray, beta: float) -> np.ndarray:
    return beta * Y + (1.0 - beta) * (1.0 - Y)


def _weighted_bce(Y: np.ndarray, P: np.ndarray, cfg: LossConfig) -> float:
    clamped = np.clip(P, cfg.eps, 1.0 - cfg.eps)
    bce = -(Y * np.log(clamped) + (1.0 - Y) * np.log1p(-clamped))
    return float(np.sum(_weights(Y, cfg.beta) * bce) / Y.size)


def asymmetric_bce(Y: Any, P: Any, cfg: LossConfig) -> float:
    """
    Asymmetric weighted binary cross-entropy.
    :param Y: 0/1 label matrix.
    :param P: probability matrix of the same shape.
    :param cfg: beta and clamping epsilon.
    :return: mean weighted BCE over every matrix entry.
    """
    Y = _as_label_matrix(Y)
    P = check_prob_matrix(P)
    if Y.shape != P.shape:
        raise ShapeMismatchError(f"labels {Y.shape} and probabilities {P.shape} differ in shape")
    if not Y.size:
        raise ShapeMismatchError("loss of an empty matrix is undefined")
    return _weighted_bce(Y, P, cfg)


def _gradient(Xb: sparse.csr_matrix, Y: np.ndarray, W: np.ndarray, cfg: LossConfig) -> np.ndarray:
    P = expit(np.asarray(Xb @ W))
    G = _weights(Y, cfg.beta) * (P - Y) / Y.size
    return np.asarray(Xb.T @ G)


def loss_gradient(X: Any, Y: Any, model: LinearModel, cfg: LossConfig) -> np.ndarray:
    """
    Gradient of asymmetric_bce with respect to W (bias row included).
    :param X: feature rows without the bias column.
    :param Y: 0/1 label matrix.
    :param model: current weights.
    :param cfg: loss configuration.
    :return: matrix shaped like model.W.
    :raises DivergenceError: an intermediate value is not finite.
    """
    Xb = add_bias(X)
    Y = _as_label_matrix(Y)
    if Xb.shape[1] != model.W.shape[0]:
        raise ShapeMismatchError(f"{Xb.shape[1] - 1} features but the model expects {model.n_features}")
    if Y.shape != (Xb.shape[0], model.n_labels):
        raise ShapeMismatchError(f"label matrix {Y.shape} does not match {(Xb.shape[0], model.n_labels)}")
    grad = _gradient(Xb, Y, model.W, cfg)
    if not np.all(np.isfinite(grad)):
        raise DivergenceError("non-finite gradient, reduce the learning rate")
    return grad


def fit_weights(X: Any, Y: Any, cfg: LossConfig, lr: float, epochs: int,
                divergence_factor: float = 2.0) -> tuple[np.ndarray, list[float]]:
    """
    Full-batch gradient descent from zero weights.
    :param X: feature rows without the bias column.
    :param Y: 0/1 label matrix.
    :param cfg: loss configuration.
    :param lr: learning rate.
    :param epochs: number of full-batch updates.
    :param divergence_factor: an epoch whose loss exceeds the previous one by this factor aborts training.
    :return: weights and the loss after every epoch.
    """
    if epochs < 1:
        raise ConfigError(f"epochs must be at least 1, got {epochs}")
    if not math.isfinite(lr) or lr <= 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    batch = TrainBatch(X, Y)
    if not batch.n:
        raise ConfigError("empty training set")
    Xb = add_bias(batch.X)
    Y = batch.Y
    W = np.zeros((Xb.shape[1], Y.shape[1]))
    previous = _weighted_bce(Y, expit(np.asarray(Xb @ W)), cfg)
    history: list[float] = []
    for epoch in range(1, epochs + 1):
        W = W - lr * _gradient(Xb, Y, W, cfg)
        loss = _weighted_bce(Y, expit(np.asarray(Xb @ W)), cfg)
        if not math.isfinite(loss) or not np.all(np.isfinite(W)):
            log.error("training diverged", epoch=epoch, loss=loss)
            raise DivergenceError("loss or weights became non-finite", epoch, loss)
        if loss > previous * divergence_factor:
            log.error("training diverged", epoch=epoch, loss=loss, previous=previous)
            raise DivergenceError(f"loss grew more than {divergence_factor}x in one epoch", epoch, loss)
        history.append(loss)
        log.debug("epoch finished", epoch=epoch, loss=loss)
        previous = loss
    return W, history


def label_matrix(sentences: Sequence[LabeledSentence], schema: LabelSchema,
                 target: Target = Target.MULTILABEL) -> np.ndarray:
    """
    Dense 0/1 label matrix; the binary target has the single column 'persuasive'.
    """
    target = Target(target)
    if target is Target.BINARY:
        return np.array([[1.0 if binarize(s).is_persuasive else 0.0] for s in sentences]).reshape(-1, 1)
    Y = np.zeros((len(sentences), len(schema)))
    for i, sentence in enumerate(sentences):
        for label in sentence.labels:
            if not 0 <= label < len(schema):
                raise InputFormatError(f"label id {label} outside the schema")
            Y[i, label] = 1.0
    return Y


def target_names(schema: LabelSchema, target: Target) -> tuple[str, ...]:
    return ("persuasive",) if Target(target) is Target.BINARY else schema.names


def train(sentences: Sequence[LabeledSentence], featurizer: Featurizer, schema: LabelSchema,
          cfg: Optional[LossConfig] = None, lr: float = 2.0, epochs: int = 500, seed: int = 0,
          target: Target = Target.MULTILABEL, divergence_factor: float = 2.0) -> LinearModel:
    """
    Fits the featurizer on the training texts and trains the linear model.
    :param sentences: training sentences.
    :param featurizer: unfitted featurizer, fitted here.
    :param schema: label schema.
    :param cfg: loss configuration, LossConfig.balanced(Y) when None.
    :param lr: learning rate.
    :param epochs: number of epochs, at least 1.
    :param seed: recorded with the model; the optimizer itself draws no random numbers.
    :param target: multilabel techniques or the binary persuasive label.
    :param divergence_factor: see fit_weights.
    :return: trained LinearModel with its loss history.
    """
    if not sentences:
        raise ConfigError("empty training set")
    if epochs < 1:
        raise ConfigError(f"epochs must be at least 1, got {epochs}")
    target = Target(target)
    X = featurizer.fit_transform([s.text for s in sentences])
    Y = label_matrix(sentences, schema, target)
    if cfg is None:
        cfg = LossConfig.balanced(Y)
    W, history = fit_weights(X, Y, cfg, lr, epochs, divergence_factor)
    log.info("trained model", target=target.value, n=len(sentences), features=featurizer.dim,
             epochs=epochs, beta=cfg.beta, loss=history[-1])
    return LinearModel(W, target_names(schema, target), schema.schema_id, target, featurizer,
                       tuple(history), seed, cfg)


def predict_proba(model: LinearModel, X: Any) -> np.ndarray:
    """
    Entrywise sigmoid of the logits.
    :param X: feature rows without the bias column.
    """
    Xb = add_bias(X)
    if Xb.shape[1] != model.W.shape[0]:
        raise ShapeMismatchError(f"{Xb.shape[1] - 1} features but the model expects {model.n_features}")
    return expit(np.asarray(Xb @ model.W))


def predict_texts(model: LinearModel, texts: Sequence[str]) -> np.ndarray:
    if model.featurizer is None:
        raise ConfigError("model has no featurizer attached")
    if not texts:
        return np.zeros((0, model.n_labels))
    return predict_proba(model, model.featurizer.transform(texts))


def apply_threshold(P: Any, threshold: float) -> np.ndarray:
    """Entry is 1 iff its probability is >= threshold."""
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold}")
    return (check_prob_matrix(P) >= threshold).astype(np.int64)


def collapse_to_binary(P: Any, threshold: float) -> np.ndarray:
    """Persuasive iff any technique reaches the threshold."""
    return apply_threshold(P, threshold).max(axis=1, initial=0)


@dataclass(frozen=True)
class CalibrationPoint:
    threshold: float
    f1_micro: float
    f1_macro: float
    n_positive: int


@dataclass(frozen=True)
class CalibrationResult:
    points: tuple[CalibrationPoint, ...]
    recommended: float
    default: float = 0.5

    def to_dict(self) -> dict[str, Any]:
        return {
            "recommended_threshold": self.recommended,
            "default_threshold": self.default,
            "curve": [{"threshold": p.threshold, "f1_micro": p.f1_micro, "f1_macro": p.f1_macro,
                       "n_positive": p.n_positive} for p in self.points],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(p) for p in self.points],
                            columns=["threshold", "f1_micro", "f1_macro", "n_positive"])


def calibrate(P_dev: Any, Y_dev: Any, grid: Sequence[float] = DEFAULT_GRID, default: float = 0.5,
              include_absent: bool = True) -> CalibrationResult:
    """
    Sweeps thresholds over a development set.
    The recommendation maximizes F1-micro; ties go to the threshold closest to `default`, then the lower one.
    :param P_dev: development probabilities.
    :param Y_dev: development gold labels.
    :param grid: candidate thresholds.
    :param default: tie-break anchor, the retained default threshold.
    :param include_absent: macro convention, see metrics.f1_macro.
    :return: CalibrationResult with the full curve.
    """
    grid = CalibrationConfig(default, tuple(grid)).grid
    P = check_prob_matrix(P_dev)
    Y = _as_label_matrix(Y_dev).astype(np.int64)
    if P.shape != Y.shape:
        raise ShapeMismatchError(f"probabilities {P.shape} and labels {Y.shape} differ in shape")
    points = []
    for threshold in grid:
        pred = apply_threshold(P, threshold)
        points.append(CalibrationPoint(threshold, f1_micro(pred, Y), f1_macro(pred, Y, include_absent),
                                       int(pred.sum())))
    best = max(p.f1_micro for p in points)
    ties = [p.threshold for p in points if p.f1_micro >= best - 1e-12]
    recommended = min(ties, key=lambda t: (abs(t - default), t))
    log.info("calibrated threshold", recommended=recommended, f1_micro=best)
    return CalibrationResult(tuple(points), recommended, default)


def save_model(path: str | Path, model: LinearModel):
    """
    Writes the model as JSON; weights are row-major doubles at full repr precision.
    """
    if model.featurizer is None:
        raise ConfigError("only models with a featurizer can be saved")
    document = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "schema_id": model.schema_id,
        "labels": list(model.label_names),
        "target": model.target.value,
        "vocab_hash": model.vocab_hash,
        "shape": list(model.W.shape),
        "weights": model.W.reshape(-1).tolist(),
        "featurizer": model.featurizer.to_dict(),
        "loss_history": list(model.loss_history),
        "seed": model.seed,
        "loss": model.loss.to_dict() if model.loss is not None else None,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    """
    Reads a model file and verifies its vocabulary hash.
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"model file not found: {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        if document.get("format") != MODEL_FORMAT or document.get("version") != MODEL_VERSION:
            raise ArtifactIntegrityError(f"{path}: not a {MODEL_FORMAT} v{MODEL_VERSION} model")
        featurizer = featurizer_from_dict(document["featurizer"])
        shape = tuple(document["shape"])
        W = np.asarray(document["weights"], dtype=np.float64).reshape(shape)
        loss = LossConfig(**document["loss"]) if document.get("loss") else None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as ex:
        raise ArtifactIntegrityError(f"{path}: malformed model file ({ex})") from ex
    if featurizer.digest() != document["vocab_hash"]:
        raise ArtifactIntegrityError(f"{path}: vocabulary hash mismatch")
    return LinearModel(W, tuple(document["labels"]), document["schema_id"], Target(document["target"]),
                       featurizer, tuple(document.get("loss_history", ())), int(document.get("seed", 0)), loss)
