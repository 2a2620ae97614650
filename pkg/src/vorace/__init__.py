"""Voting ensembles of randomly configured classifiers, with exact accuracy theory and simulation."""

from .core import ClassLabel, InvalidInputError, Profile, Ranking, ScoreVector, ranking_from_scores
from .voting import (
    RuleResult,
    TiePolicy,
    borda,
    break_tie,
    copeland,
    elect,
    kemeny,
    kemeny_exact,
    kemeny_heuristic,
    plurality,
    sum_aggregate,
)

__version__ = "0.1.0"

__all__ = [
    "ClassLabel",
    "InvalidInputError",
    "Profile",
    "Ranking",
    "RuleResult",
    "ScoreVector",
    "TiePolicy",
    "borda",
    "break_tie",
    "copeland",
    "elect",
    "kemeny",
    "kemeny_exact",
    "kemeny_heuristic",
    "plurality",
    "ranking_from_scores",
    "sum_aggregate",
]
