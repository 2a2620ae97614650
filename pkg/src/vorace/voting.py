"""Voting rules over classifier ballots, plus the score-sum baseline.

Every rule produces one score per class; the winner is drawn from the set of
classes sharing the maximal score by a :class:`TiePolicy`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .core import InvalidInputError, Profile, Ranking, ScoreVector

DEFAULT_KEMENY_THRESHOLD = 5
MAX_KEMENY_THRESHOLD = 8


class TiePolicy(str, enum.Enum):
    LEXICOGRAPHIC = "lexicographic"
    BEST_CLASSIFIER = "best-classifier"

    @classmethod
    def parse(cls, value: TiePolicy | str | None) -> TiePolicy | None:
        if value is None or isinstance(value, TiePolicy):
            return value
        try:
            return cls(value)
        except ValueError:
            valid = ", ".join(t.value for t in cls)
            raise InvalidInputError(f"unknown tie policy {value!r}; expected one of {valid}") from None


@dataclass(frozen=True)
class RuleResult:
    rule_scores: tuple[float, ...]
    winner: int
    tied_set: frozenset[int]
    consensus: Ranking | None = field(default=None, compare=False)

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        m = len(self.rule_scores)
        names = list(labels) if labels is not None else [f"c{i + 1}" for i in range(m)]
        out = {
            "winner": self.winner,
            "winner_label": names[self.winner],
            "rule_scores": list(self.rule_scores),
            "tied_set": sorted(self.tied_set),
        }
        if self.consensus is not None:
            out["consensus"] = list(self.consensus.order)
        return out


def tied_classes(scores: Sequence[float]) -> frozenset[int]:
    arr = np.asarray(scores, dtype=np.float64)
    return frozenset(int(c) for c in np.flatnonzero(_kernels._tied_mask_numpy(arr)))


def _resolve_policy(tie: TiePolicy | str | None, accuracy) -> TiePolicy:
    policy = TiePolicy.parse(tie)
    if policy is None:
        return TiePolicy.BEST_CLASSIFIER if accuracy is not None else TiePolicy.LEXICOGRAPHIC
    return policy


def break_tie(
    tied: set[int] | frozenset[int],
    profile: Profile | None,
    tie: TiePolicy | str | None = None,
) -> int:
    """Pick one class out of ``tied``.

    Lexicographic picks the smallest index.  Best-classifier picks the tied
    class ranked highest by the voter with the highest validation accuracy,
    the lower voter index winning accuracy ties.
    """
    if not tied:
        raise InvalidInputError("cannot break a tie over an empty set")
    accuracy = None if profile is None else profile.validation_accuracy
    policy = _resolve_policy(tie, accuracy)
    if policy is TiePolicy.LEXICOGRAPHIC or len(tied) == 1:
        return min(tied)
    if accuracy is None:
        raise InvalidInputError("best-classifier tie-breaking needs validation accuracies")
    best_voter = int(np.argmax(accuracy))
    for c in profile.rankings[best_voter]:
        if c in tied:
            return c
    raise InvalidInputError(f"tied classes {sorted(tied)} are not in the ballot")  # pragma: no cover


def _result(scores: np.ndarray, profile: Profile | None, tie, consensus: Ranking | None = None) -> RuleResult:
    scores = np.asarray(scores, dtype=np.float64)
    tied = tied_classes(scores)
    return RuleResult(tuple(float(s) for s in scores), break_tie(tied, profile, tie), tied, consensus)


def plurality(profile: Profile, tie: TiePolicy | str | None = None) -> RuleResult:
    """Score = (weighted) number of ballots placing the class first."""
    return _result(_kernels.plurality_scores(profile.array, profile.weight_array), profile, tie)


def borda(profile: Profile, tie: TiePolicy | str | None = None) -> RuleResult:
    """Position i (1-indexed) on a ballot is worth m - i points."""
    return _result(_kernels.borda_scores(profile.array, profile.weight_array), profile, tie)


def copeland(profile: Profile, tie: TiePolicy | str | None = None) -> RuleResult:
    """One point per pairwise majority win, half a point per pairwise tie."""
    P = _kernels.pairwise_matrix(profile.array, profile.weight_array)
    return _result(_kernels.copeland_scores(P), profile, tie)


def agreement(ranking: Sequence[int], profile: Profile) -> float:
    """Total (weighted) pairwise agreement between ``ranking`` and every ballot."""
    P = _kernels.pairwise_matrix(profile.array, profile.weight_array)
    return _agreement(list(ranking), P)


def _agreement(order: list[int], P: np.ndarray) -> float:
    total = 0.0
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            total += P[a, b]
    return float(total)


def kemeny_exact(
    profile: Profile,
    tie: TiePolicy | str | None = None,
    threshold: int = DEFAULT_KEMENY_THRESHOLD,
) -> RuleResult:
    """Exact Kemeny consensus by branch and bound over rankings.

    ``rule_scores[c]`` is the best agreement reachable by a ranking with c on
    top, so the tied set is exactly the set of tops of optimal consensus
    rankings.
    """
    if not 2 <= threshold <= MAX_KEMENY_THRESHOLD:
        raise InvalidInputError(f"exact Kemeny threshold must be in [2, {MAX_KEMENY_THRESHOLD}]")
    if profile.m > threshold:
        raise InvalidInputError(
            f"exact Kemeny refused for m={profile.m} > threshold {threshold}; use kemeny_heuristic"
        )
    P = _kernels.pairwise_matrix(profile.array, profile.weight_array)
    best, witnesses = _kernels.kemeny_top_scores(P)
    result = _result(best, profile, tie)
    consensus = Ranking(tuple(int(c) for c in witnesses[result.winner]))
    return RuleResult(result.rule_scores, result.winner, result.tied_set, consensus)


def _hill_climb(order: list[int], P: np.ndarray, start: int = 0) -> list[int]:
    # swapping adjacent a, b changes agreement by P[b, a] - P[a, b]
    order = list(order)
    improved = True
    while improved:
        improved = False
        for i in range(start, len(order) - 1):
            a, b = order[i], order[i + 1]
            if P[b, a] - P[a, b] > _kernels.TIE_TOL:
                order[i], order[i + 1] = b, a
                improved = True
    return order


def kemeny_heuristic(profile: Profile, tie: TiePolicy | str | None = None) -> RuleResult:
    """Local-search Kemeny for any number of classes.

    The consensus is the adjacent-swap local optimum reached from the Borda
    ranking.  Each class's score is the agreement of a local optimum with that
    class pinned on top (or of the consensus itself, when it is the top).
    """
    P = _kernels.pairwise_matrix(profile.array, profile.weight_array)
    borda_scores = _kernels.borda_scores(profile.array, profile.weight_array)
    start = [int(c) for c in np.argsort(-borda_scores, kind="stable")]
    consensus = _hill_climb(start, P)
    scores = np.empty(profile.m)
    for c in range(profile.m):
        pinned = [c] + [x for x in start if x != c]
        scores[c] = _agreement(_hill_climb(pinned, P, start=1), P)
    scores[consensus[0]] = max(scores[consensus[0]], _agreement(consensus, P))
    result = _result(scores, profile, tie)
    return RuleResult(result.rule_scores, result.winner, result.tied_set, Ranking(tuple(consensus)))


def kemeny(
    profile: Profile,
    tie: TiePolicy | str | None = None,
    threshold: int = DEFAULT_KEMENY_THRESHOLD,
) -> RuleResult:
    """Exact Kemeny when m <= threshold, local search otherwise."""
    if profile.m <= threshold:
        return kemeny_exact(profile, tie, threshold)
    return kemeny_heuristic(profile, tie)


def sum_aggregate(
    predictions: Sequence[ScoreVector | Sequence[float]],
    tie: TiePolicy | str | None = None,
    validation_accuracy: Sequence[float] | None = None,
) -> RuleResult:
    """Add the classifiers' score vectors and elect the argmax."""
    if len(predictions) == 0:
        raise InvalidInputError("sum aggregation needs at least one score vector")
    vectors = [p if isinstance(p, ScoreVector) else ScoreVector(tuple(p)) for p in predictions]
    m = vectors[0].m
    if any(v.m != m for v in vectors):
        raise InvalidInputError("score vectors have different lengths")
    totals = np.sum([v.scores for v in vectors], axis=0)
    profile = None
    if validation_accuracy is not None or TiePolicy.parse(tie) is TiePolicy.BEST_CLASSIFIER:
        profile = Profile.from_scores(vectors, validation_accuracy)
    return _result(totals, profile, tie)


RULES: dict[str, Callable[..., RuleResult]] = {
    "plurality": plurality,
    "borda": borda,
    "copeland": copeland,
    "kemeny": kemeny,
}
RULE_NAMES = ("plurality", "borda", "copeland", "kemeny", "sum")


def elect(
    profile: Profile,
    rule: str,
    tie: TiePolicy | str | None = None,
    kemeny_threshold: int = DEFAULT_KEMENY_THRESHOLD,
    scores: Sequence[Sequence[float]] | None = None,
) -> RuleResult:
    """Run a rule by name.  ``sum`` needs the raw score vectors in ``scores``."""
    if rule == "sum":
        if scores is None:
            raise InvalidInputError("the sum rule needs score vectors, not just rankings")
        return sum_aggregate(scores, tie, profile.validation_accuracy)
    if rule == "kemeny":
        return kemeny(profile, tie, kemeny_threshold)
    if rule == "kemeny-exact":
        return kemeny_exact(profile, tie, max(kemeny_threshold, profile.m))
    if rule == "kemeny-heuristic":
        return kemeny_heuristic(profile, tie)
    try:
        fn = RULES[rule]
    except KeyError:
        raise InvalidInputError(f"unknown rule {rule!r}; valid rules: {', '.join(RULE_NAMES)}") from None
    return fn(profile, tie)
