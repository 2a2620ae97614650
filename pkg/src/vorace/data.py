"""Tabular datasets: CSV loading with encoding/imputation/scaling, stratified folds, F1."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .core import InvalidInputError

NUMERICAL = "numerical"
CATEGORICAL = "categorical"
FIXTURES = ("iris", "wine", "balance-scale")


@dataclass(frozen=True)
class Dataset:
    """Encoded feature matrix plus per-column metadata.

    Categorical columns hold integer codes into ``categories[j]``; numerical
    columns are min-max scaled to [0, 1].
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    kinds: tuple[str, ...]
    categories: tuple[tuple[str, ...] | None, ...]
    class_names: tuple[str, ...]
    missing_allowed: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise InvalidInputError("X must be (rows, features) with one label per row")
        if len(self.class_names) < 2:
            raise InvalidInputError("a dataset needs at least two classes")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise InvalidInputError("label codes out of range")

    @property
    def m(self) -> int:
        return len(self.class_names)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def __len__(self) -> int:
        return self.n_rows

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.m)

    def subset(self, idx: Sequence[int] | np.ndarray) -> Dataset:
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            self.X[idx], self.y[idx], self.feature_names, self.kinds, self.categories,
            self.class_names, self.missing_allowed,
        )

    def decode(self, column: int, code: int) -> str:
        cats = self.categories[column]
        if cats is None:
            raise InvalidInputError(f"column {self.feature_names[column]!r} is numerical")
        return cats[int(code)]

    def n_categories(self) -> np.ndarray:
        return np.array([0 if c is None else len(c) for c in self.categories], dtype=np.int64)


def _read_schema(schema: dict | str | Path) -> dict:
    if isinstance(schema, dict):
        return schema
    try:
        return json.loads(Path(schema).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read schema {schema}: {exc}") from None


def load_csv(path: str | Path, schema: dict | str | Path) -> Dataset:
    """Load a headed CSV according to a JSON schema.

    Schema keys: ``label`` (column name), ``columns`` ({name: "numerical" |
    "categorical"}), optional ``missing`` (tokens read as missing, default
    ``["?", ""]``), ``classes`` (allowed labels, in code order) and ``ignore``
    (columns to drop).  Missing cells are imputed with the column mode
    (categorical) or median (numerical).
    """
    schema = _read_schema(schema)
    label = schema.get("label")
    columns: dict[str, str] = schema.get("columns", {})
    missing = set(schema.get("missing", ["?", ""]))
    ignore = set(schema.get("ignore", []))
    for name, kind in columns.items():
        if kind not in (NUMERICAL, CATEGORICAL):
            raise InvalidInputError(f"column {name!r}: unknown kind {kind!r}")
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InvalidInputError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if label not in header:
        raise InvalidInputError(f"label column {label!r} not in header {header}")
    undeclared = [h for h in header if h != label and h not in columns and h not in ignore]
    if undeclared:
        raise InvalidInputError(f"columns {undeclared} have no declared type")
    absent = [c for c in columns if c not in header]
    if absent:
        raise InvalidInputError(f"declared columns {absent} not in header")
    features = [h for h in header if h in columns]
    col_idx = [header.index(h) for h in features]
    label_idx = header.index(label)

    declared = schema.get("classes")
    raw_cells: list[list[str | None]] = []
    raw_labels: list[str] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InvalidInputError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
        lab = row[label_idx].strip()
        if lab in missing:
            raise InvalidInputError(f"row {lineno}: missing label")
        if declared is not None and lab not in declared:
            raise InvalidInputError(f"row {lineno}: unknown label {lab!r}")
        cells: list[str | None] = []
        for name, j in zip(features, col_idx):
            cell = row[j].strip()
            if cell in missing:
                cells.append(None)
                continue
            if columns[name] == NUMERICAL:
                try:
                    float(cell)
                except ValueError:
                    raise InvalidInputError(f"row {lineno}: column {name!r} is not numeric: {cell!r}") from None
            cells.append(cell)
        raw_cells.append(cells)
        raw_labels.append(lab)
    if not raw_cells:
        raise InvalidInputError(f"{path} has no data rows")

    class_names = tuple(declared) if declared is not None else tuple(sorted(set(raw_labels)))
    code = {c: i for i, c in enumerate(class_names)}
    y = np.array([code[lab] for lab in raw_labels], dtype=np.int64)
    if np.any(np.bincount(y, minlength=len(class_names)) == 0):
        empty = [c for c, k in zip(class_names, np.bincount(y, minlength=len(class_names))) if k == 0]
        raise InvalidInputError(f"classes {empty} have no examples")

    n = len(raw_cells)
    X = np.empty((n, len(features)))
    kinds, categories, missing_allowed = [], [], []
    for j, name in enumerate(features):
        col = [r[j] for r in raw_cells]
        present = [c for c in col if c is not None]
        missing_allowed.append(len(present) < n)
        if not present:
            raise InvalidInputError(f"column {name!r} has no values")
        if columns[name] == CATEGORICAL:
            cats = tuple(sorted(set(present)))
            counts = {c: present.count(c) for c in cats}
            mode = max(cats, key=lambda c: (counts[c], -cats.index(c)))
            lut = {c: i for i, c in enumerate(cats)}
            X[:, j] = [lut[c if c is not None else mode] for c in col]
            kinds.append(CATEGORICAL)
            categories.append(cats)
        else:
            vals = np.array([np.nan if c is None else float(c) for c in col])
            vals[np.isnan(vals)] = np.median(vals[~np.isnan(vals)])
            X[:, j] = scale_min_max(vals)
            kinds.append(NUMERICAL)
            categories.append(None)
    return Dataset(X, y, tuple(features), tuple(kinds), tuple(categories), class_names, tuple(missing_allowed))


def scale_min_max(values: np.ndarray) -> np.ndarray:
    """Map min to 0 and max to 1; a constant column maps to 0."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def fixture_paths(name: str) -> tuple[Path, Path]:
    if name not in FIXTURES:
        raise InvalidInputError(f"unknown fixture {name!r}; bundled: {', '.join(FIXTURES)}")
    base = resources.files("vorace") / "fixtures"
    return Path(str(base / f"{name}.csv")), Path(str(base / f"{name}.schema.json"))


def load_fixture(name: str) -> Dataset:
    csv_path, schema_path = fixture_paths(name)
    return load_csv(csv_path, schema_path)


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[np.ndarray, ...]
    seed: int
    n_rows: int = field(default=0)

    @property
    def k(self) -> int:
        return len(self.folds)

    def splits(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield (train, test) index arrays; with one fold both are the whole set."""
        if self.k == 1:
            yield self.folds[0], self.folds[0]
            return
        for i, test in enumerate(self.folds):
            train = np.sort(np.concatenate([f for j, f in enumerate(self.folds) if j != i]))
            yield train, test


def stratified_kfold(labels: Dataset | np.ndarray, k: int, seed: int) -> FoldPlan:
    """Shuffle each class, concatenate classes and deal rows round-robin into k folds.

    Every fold then holds within one row of its proportional share of each
    class.
    """
    y = labels.y if isinstance(labels, Dataset) else np.asarray(labels, dtype=np.int64)
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    present = np.bincount(y)
    present = present[present > 0]
    if k > present.min():
        raise InvalidInputError(f"k={k} exceeds the smallest class size {present.min()}")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(y == c)) for c in np.unique(y)])
    folds = tuple(np.sort(order[i::k]) for i in range(k))
    return FoldPlan(folds, seed, len(y))


def stratified_holdout(y: np.ndarray, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Split row positions into (keep, held_out) with ``fraction`` of each class held out.

    Each class keeps at least one row; a class with at least two rows gives up
    at least one.
    """
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    keep, held = [], []
    for c in np.unique(y):
        rows = rng.permutation(np.flatnonzero(y == c))
        h = int(round(fraction * len(rows)))
        h = min(max(h, 1 if len(rows) > 1 else 0), len(rows) - 1)
        held.append(rows[:h])
        keep.append(rows[h:])
    return np.sort(np.concatenate(keep)), np.sort(np.concatenate(held))


def f1_score(y_true, y_pred, mode: str = "macro", positive=1) -> float:
    """Binary F1 of ``positive`` or macro F1 over the classes present in ``y_true``."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise InvalidInputError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise InvalidInputError("empty label arrays")
    if mode == "binary":
        return _f1_for(y_true, y_pred, positive)
    if mode == "macro":
        return float(np.mean([_f1_for(y_true, y_pred, c) for c in np.unique(y_true)]))
    raise InvalidInputError(f"unknown F1 mode {mode!r}")


def _f1_for(y_true, y_pred, c) -> float:
    tp = np.sum((y_pred == c) & (y_true == c))
    fp = np.sum((y_pred == c) & (y_true != c))
    fn = np.sum((y_pred != c) & (y_true == c))
    denom = 2 * tp + fp + fn
    return float(2 * tp / denom) if denom else 0.0
