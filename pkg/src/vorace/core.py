"""Domain types shared across the package: labels, ballots, score vectors, profiles."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


@dataclass(frozen=True)
class ClassLabel:
    index: int
    name: str | None = None

    def __str__(self) -> str:
        return self.name if self.name is not None else f"c{self.index + 1}"


@dataclass(frozen=True)
class ScoreVector:
    """Per-class nonnegative scores.

    ``probabilities=True`` additionally requires the entries to sum to one,
    which is the contract for classifier outputs.
    """

    scores: tuple[float, ...]
    probabilities: bool = False

    def __post_init__(self) -> None:
        scores = tuple(float(s) for s in self.scores)
        object.__setattr__(self, "scores", scores)
        if not scores:
            raise InvalidInputError("score vector is empty")
        if not all(math.isfinite(s) for s in scores):
            raise InvalidInputError(f"non-finite score in {scores}")
        if any(s < 0 for s in scores):
            raise InvalidInputError(f"negative score in {scores}")
        if self.probabilities and abs(sum(scores) - 1.0) > 1e-6:
            raise InvalidInputError(f"probabilities sum to {sum(scores)}, not 1")

    @property
    def m(self) -> int:
        return len(self.scores)

    def __len__(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class Ranking:
    """A strict total order over class indices, most preferred first."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(c) for c in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise InvalidInputError(f"{order} is not a permutation of 0..{len(order) - 1}")

    @property
    def m(self) -> int:
        return len(self.order)

    @property
    def top(self) -> int:
        return self.order[0]

    def position(self, c: int) -> int:
        return self.order.index(c)

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


def ranking_from_scores(scores: ScoreVector | Sequence[float]) -> Ranking:
    """Order classes by descending score; equal scores keep ascending index order."""
    if not isinstance(scores, ScoreVector):
        scores = ScoreVector(tuple(scores))
    order = np.argsort(-np.asarray(scores.scores), kind="stable")
    return Ranking(tuple(int(c) for c in order))


def rankings_from_score_matrix(scores: np.ndarray) -> np.ndarray:
    """Row-wise ``ranking_from_scores`` for an (k, m) array; returns int64 (k, m)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] == 0:
        raise InvalidInputError(f"expected a 2-d score matrix, got shape {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise InvalidInputError("non-finite score in matrix")
    return np.argsort(-scores, axis=1, kind="stable").astype(np.int64)


@dataclass(frozen=True)
class Profile:
    """n ballots over the same m classes, with optional voter metadata."""

    rankings: tuple[Ranking, ...]
    validation_accuracy: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        rankings = tuple(r if isinstance(r, Ranking) else Ranking(tuple(r)) for r in self.rankings)
        object.__setattr__(self, "rankings", rankings)
        if not rankings:
            raise InvalidInputError("a profile needs at least one ranking")
        m = rankings[0].m
        if m < 2:
            raise InvalidInputError("a profile needs at least two classes")
        if any(r.m != m for r in rankings):
            raise InvalidInputError("all rankings must be over the same classes")
        n = len(rankings)
        if self.validation_accuracy is not None:
            acc = tuple(float(a) for a in self.validation_accuracy)
            if len(acc) != n:
                raise InvalidInputError(f"{len(acc)} accuracies for {n} rankings")
            if any(not (0.0 <= a <= 1.0) for a in acc):
                raise InvalidInputError("validation accuracies must lie in [0, 1]")
            object.__setattr__(self, "validation_accuracy", acc)
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != n:
                raise InvalidInputError(f"{len(w)} weights for {n} rankings")
            if any(not math.isfinite(x) or x < 0 for x in w):
                raise InvalidInputError("weights must be finite and nonnegative")
            object.__setattr__(self, "weights", w)

    @classmethod
    def from_scores(
        cls,
        vectors: Iterable[ScoreVector | Sequence[float]],
        validation_accuracy: Sequence[float] | None = None,
        weights: Sequence[float] | None = None,
    ) -> Profile:
        rankings = tuple(ranking_from_scores(v) for v in vectors)
        return cls(
            rankings,
            None if validation_accuracy is None else tuple(validation_accuracy),
            None if weights is None else tuple(weights),
        )

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return self.rankings[0].m

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array([r.order for r in self.rankings], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def weight_array(self) -> np.ndarray:
        w = np.ones(self.n) if self.weights is None else np.array(self.weights, dtype=np.float64)
        w.setflags(write=False)
        return w

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "rankings": [list(r.order) for r in self.rankings],
            "validation_accuracy": None if self.validation_accuracy is None else list(self.validation_accuracy),
            "weights": None if self.weights is None else list(self.weights),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Profile:
        try:
            rankings = data["rankings"]
        except (KeyError, TypeError):
            raise InvalidInputError("profile JSON needs a 'rankings' list") from None
        profile = cls(
            tuple(Ranking(tuple(r)) for r in rankings),
            data.get("validation_accuracy"),
            data.get("weights"),
        )
        if "m" in data and data["m"] != profile.m:
            raise InvalidInputError(f"declared m={data['m']} but rankings have m={profile.m}")
        return profile

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> Profile:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"malformed profile JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> Profile:
        return cls.from_json(Path(path).read_text())
