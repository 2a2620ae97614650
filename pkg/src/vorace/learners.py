"""Small base classifiers with randomly sampled hyperparameters.

Three kinds: a CART-style decision tree (gini or entropy), naive Bayes
(categorical counts with add-one smoothing, Gaussian numerical likelihoods)
and k-nearest neighbours.  All of them output a probability per class.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from .core import InvalidInputError, ScoreVector
from .data import CATEGORICAL, Dataset

KINDS = ("decision-tree", "naive-bayes", "knn")
CRITERIA = ("gini", "entropy")
DT_DEPTH_RANGE = (5, 25)
KNN_K_RANGE = (1, 32)


def sample_geometric(lo: int, hi: int, rng: np.random.Generator) -> int:
    """floor(e^x) with x ~ U[ln lo, ln hi]: log-uniform integers in [lo, hi]."""
    if lo < 1 or lo > hi:
        raise InvalidInputError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    x = rng.uniform(math.log(lo), math.log(hi))
    # exp/log round-off can land a hair outside the range
    return int(min(max(math.floor(math.exp(x)), lo), hi))


@dataclass(frozen=True)
class LearnerConfig:
    kind: str
    dt_criterion: str = "gini"
    dt_max_depth: int = 10
    knn_k: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown learner kind {self.kind!r}")
        if self.dt_criterion not in CRITERIA:
            raise InvalidInputError(f"unknown criterion {self.dt_criterion!r}")
        if self.kind == "decision-tree" and not DT_DEPTH_RANGE[0] <= self.dt_max_depth <= DT_DEPTH_RANGE[1]:
            raise InvalidInputError(f"tree depth {self.dt_max_depth} outside {DT_DEPTH_RANGE}")
        if self.knn_k < 1:
            raise InvalidInputError("knn_k must be >= 1")


def sample_learner_config(rng: np.random.Generator) -> LearnerConfig:
    """Draw kind, tree criterion/depth and neighbour count; every field is drawn every time."""
    kind = KINDS[int(rng.integers(len(KINDS)))]
    criterion = CRITERIA[int(rng.integers(len(CRITERIA)))]
    depth = int(rng.integers(DT_DEPTH_RANGE[0], DT_DEPTH_RANGE[1] + 1))
    k = sample_geometric(*KNN_K_RANGE, rng)
    seed = int(rng.integers(2**63))
    return LearnerConfig(kind, criterion, depth, k, seed)


# --------------------------------------------------------------------------
# decision tree
# --------------------------------------------------------------------------


def _impurity(counts: np.ndarray, criterion: str) -> np.ndarray:
    total = counts.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, counts / np.maximum(total, 1), 0.0)
        if criterion == "gini":
            return 1.0 - np.sum(frac**2, axis=-1)
        logs = np.where(frac > 0, np.log2(np.where(frac > 0, frac, 1.0)), 0.0)
        return -np.sum(frac * logs, axis=-1)


class DecisionTree:
    """Binary tree on ``x[feature] <= threshold``; leaves store class frequencies."""

    def __init__(self, criterion: str = "gini", max_depth: int = 10):
        self.criterion = criterion
        self.max_depth = max_depth
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[np.ndarray] = []

    def fit(self, X: np.ndarray, y: np.ndarray, m: int) -> DecisionTree:
        self.m = m
        self._grow(X, y, 0)
        self._freeze()
        return self

    def _new_node(self, counts: np.ndarray) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(counts / counts.sum())
        return len(self.feature) - 1

    def _grow(self, X: np.ndarray, y: np.ndarray, depth: int) -> int:
        counts = np.bincount(y, minlength=self.m).astype(np.float64)
        node = self._new_node(counts)
        if depth >= self.max_depth or np.count_nonzero(counts) <= 1 or len(y) < 2:
            return node
        split = self._best_split(X, y, counts)
        if split is None:
            return node
        j, thr = split
        mask = X[:, j] <= thr
        self.feature[node] = j
        self.threshold[node] = thr
        self.left[node] = self._grow(X[mask], y[mask], depth + 1)
        self.right[node] = self._grow(X[~mask], y[~mask], depth + 1)
        return node

    def _best_split(self, X: np.ndarray, y: np.ndarray, counts: np.ndarray) -> tuple[int, float] | None:
        n, d = X.shape
        order = np.argsort(X, axis=0, kind="stable")
        xs = np.take_along_axis(X, order, axis=0)
        onehot = np.eye(self.m)[y[order]]  # (n, d, m)
        left = np.cumsum(onehot, axis=0)[:-1]  # rows 0..i go left
        right = counts - left
        n_left = np.arange(1, n)[:, None]
        weighted = (n_left * _impurity(left, self.criterion) + (n - n_left) * _impurity(right, self.criterion)) / n
        weighted[xs[1:] <= xs[:-1]] = np.inf  # no threshold between equal values
        flat = int(np.argmin(weighted))  # first minimum: lowest row, then lowest feature
        i, j = divmod(flat, d)
        if not np.isfinite(weighted[i, j]) or weighted[i, j] >= _impurity(counts, self.criterion) - 1e-12:
            return None
        return j, float((xs[i, j] + xs[i + 1, j]) / 2)

    def _freeze(self) -> None:
        self._feature = np.array(self.feature, dtype=np.int64)
        self._threshold = np.array(self.threshold)
        self._left = np.array(self.left, dtype=np.int64)
        self._right = np.array(self.right, dtype=np.int64)
        self._value = np.array(self.value)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self._feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self._feature[cur]] <= self._threshold[cur]
            node[idx] = np.where(go_left, self._left[cur], self._right[cur])
            active = self._feature[node] >= 0
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self._value[self.apply(X)]

    @property
    def depth(self) -> int:
        def walk(i: int) -> int:
            if self.feature[i] < 0:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))

        return walk(0)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion, "max_depth": self.max_depth, "m": self.m,
            "feature": self.feature, "threshold": self.threshold,
            "left": self.left, "right": self.right, "value": [v.tolist() for v in self.value],
        }

    @classmethod
    def from_dict(cls, d: dict) -> DecisionTree:
        tree = cls(d["criterion"], d["max_depth"])
        tree.m = d["m"]
        tree.feature, tree.threshold = list(d["feature"]), list(d["threshold"])
        tree.left, tree.right = list(d["left"]), list(d["right"])
        tree.value = [np.array(v) for v in d["value"]]
        tree._freeze()
        return tree


# --------------------------------------------------------------------------
# naive Bayes
# --------------------------------------------------------------------------


class NaiveBayes:
    def __init__(self, kinds: tuple[str, ...], n_categories: np.ndarray):
        self.kinds = tuple(kinds)
        self.n_categories = np.asarray(n_categories, dtype=np.int64)

    def fit(self, X: np.ndarray, y: np.ndarray, m: int) -> NaiveBayes:
        self.m = m
        counts = np.bincount(y, minlength=m).astype(np.float64)
        with np.errstate(divide="ignore"):
            self.log_prior = np.log(counts / counts.sum())
        num = [j for j, k in enumerate(self.kinds) if k != CATEGORICAL]
        self.numeric = np.array(num, dtype=np.int64)
        self.mean = np.zeros((m, len(num)))
        self.var = np.ones((m, len(num)))
        if num:
            Xn = X[:, num]
            eps = max(1e-9 * float(Xn.var(axis=0).max()), 1e-12)
            for c in range(m):
                rows = Xn[y == c]
                if len(rows):
                    self.mean[c] = rows.mean(axis=0)
                    self.var[c] = rows.var(axis=0) + eps
        self.tables: dict[int, np.ndarray] = {}
        for j, kind in enumerate(self.kinds):
            if kind != CATEGORICAL:
                continue
            k = int(self.n_categories[j])
            table = np.ones((m, k))  # add-one smoothing
            np.add.at(table, (y, X[:, j].astype(np.int64)), 1.0)
            self.tables[j] = np.log(table / table.sum(axis=1, keepdims=True))
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        logp = np.broadcast_to(self.log_prior, (X.shape[0], self.m)).copy()
        if self.numeric.size:
            Xn = X[:, self.numeric][:, None, :]
            ll = -0.5 * (np.log(2 * np.pi * self.var) + (Xn - self.mean) ** 2 / self.var)
            logp += ll.sum(axis=2)
        for j, table in self.tables.items():
            codes = np.clip(X[:, j].astype(np.int64), 0, table.shape[1] - 1)
            logp += table[:, codes].T
        logp -= logp.max(axis=1, keepdims=True)
        prob = np.exp(logp)
        return prob / prob.sum(axis=1, keepdims=True)

    def to_dict(self) -> dict:
        return {
            "kinds": list(self.kinds), "n_categories": self.n_categories.tolist(), "m": self.m,
            "log_prior": [None if math.isinf(v) else v for v in self.log_prior.tolist()],
            "numeric": self.numeric.tolist(), "mean": self.mean.tolist(), "var": self.var.tolist(),
            "tables": {str(j): t.tolist() for j, t in self.tables.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> NaiveBayes:
        nb = cls(tuple(d["kinds"]), np.array(d["n_categories"]))
        nb.m = d["m"]
        nb.log_prior = np.array([-np.inf if v is None else v for v in d["log_prior"]])
        nb.numeric = np.array(d["numeric"], dtype=np.int64)
        nb.mean, nb.var = np.array(d["mean"]).reshape(nb.m, -1), np.array(d["var"]).reshape(nb.m, -1)
        nb.tables = {int(j): np.array(t) for j, t in d["tables"].items()}
        return nb


# --------------------------------------------------------------------------
# k nearest neighbours
# --------------------------------------------------------------------------


class KNearest:
    """Squared Euclidean distance on numerical columns plus 0/1 mismatch on categorical ones."""

    def __init__(self, k: int, kinds: tuple[str, ...]):
        self.k = k
        self.kinds = tuple(kinds)

    def fit(self, X: np.ndarray, y: np.ndarray, m: int) -> KNearest:
        self.m = m
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self._cat = np.array([k == CATEGORICAL for k in self.kinds], dtype=bool)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        diff = X[:, None, :] - self.X[None, :, :]
        dist = np.where(self._cat, diff != 0, diff**2).sum(axis=2)
        k = min(self.k, self.X.shape[0])
        nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
        votes = self.y[nearest]
        prob = np.zeros((X.shape[0], self.m))
        np.add.at(prob, (np.arange(X.shape[0])[:, None], votes), 1.0)
        return prob / k

    def to_dict(self) -> dict:
        return {"k": self.k, "kinds": list(self.kinds), "m": self.m, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> KNearest:
        return cls(d["k"], tuple(d["kinds"])).fit(np.array(d["X"]), np.array(d["y"], dtype=np.int64), d["m"])


class ConstantModel:
    def __init__(self, label: int, m: int):
        self.label = label
        self.m = m

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros((X.shape[0], self.m))
        out[:, self.label] = 1.0
        return out

    def to_dict(self) -> dict:
        return {"label": self.label, "m": self.m}

    @classmethod
    def from_dict(cls, d: dict) -> ConstantModel:
        return cls(d["label"], d["m"])


_MODEL_TYPES = {"decision-tree": DecisionTree, "naive-bayes": NaiveBayes, "knn": KNearest, "constant": ConstantModel}


@dataclass
class TrainedClassifier:
    config: LearnerConfig
    model: Any
    validation_accuracy: float
    m: int
    n_features: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Class probabilities for a (rows, features) array."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise InvalidInputError(f"expected (rows, {self.n_features}) features, got {X.shape}")
        return self.model.predict_proba(X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_json(self) -> str:
        model_type = "constant" if isinstance(self.model, ConstantModel) else self.config.kind
        return json.dumps({
            "config": asdict(self.config), "model_type": model_type, "model": self.model.to_dict(),
            "validation_accuracy": self.validation_accuracy, "m": self.m, "n_features": self.n_features,
        })

    @classmethod
    def from_json(cls, text: str) -> TrainedClassifier:
        d = json.loads(text)
        model = _MODEL_TYPES[d["model_type"]].from_dict(d["model"])
        return cls(LearnerConfig(**d["config"]), model, d["validation_accuracy"], d["m"], d["n_features"])


def predict_proba(classifier: TrainedClassifier, sample) -> ScoreVector:
    """Probability vector for a single sample."""
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError("a single sample must be 1-d")
    return ScoreVector(tuple(classifier.predict_proba(x[None, :])[0]), probabilities=True)


def train(config: LearnerConfig, train: Dataset, validation: Dataset | None = None) -> TrainedClassifier:
    """Fit one classifier; its validation accuracy is measured on ``validation``.

    With no (or an empty) validation set the training accuracy is recorded
    instead.  A single-class training set gives a constant classifier.
    """
    if train.n_rows == 0:
        raise InvalidInputError("empty training set")
    if validation is not None and validation.X.shape[1] != train.X.shape[1]:
        raise InvalidInputError("training and validation schemas differ")
    m = train.m
    present = np.unique(train.y)
    if len(present) == 1:
        model: Any = ConstantModel(int(present[0]), m)
    elif config.kind == "decision-tree":
        model = DecisionTree(config.dt_criterion, config.dt_max_depth).fit(train.X, train.y, m)
    elif config.kind == "naive-bayes":
        model = NaiveBayes(train.kinds, train.n_categories()).fit(train.X, train.y, m)
    else:
        model = KNearest(config.knn_k, train.kinds).fit(train.X, train.y, m)
    clf = TrainedClassifier(config, model, 0.0, m, train.X.shape[1])
    held = validation if validation is not None and validation.n_rows else train
    clf.validation_accuracy = float(np.mean(clf.predict(held.X) == held.y))
    return clf
