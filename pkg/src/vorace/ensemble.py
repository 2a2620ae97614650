"""Random-profile ensembles: train n randomly configured classifiers, vote per sample, cross-validate."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ClassLabel, InvalidInputError, Profile, rankings_from_score_matrix
from .data import Dataset, f1_score, stratified_holdout, stratified_kfold
from .learners import TrainedClassifier, sample_learner_config, train
from .voting import DEFAULT_KEMENY_THRESHOLD, MAX_KEMENY_THRESHOLD, RULE_NAMES, TiePolicy, elect

VALIDATION_FRACTION = 0.1


@dataclass(frozen=True)
class EnsembleConfig:
    n: int
    rule: str = "plurality"
    tie: TiePolicy | str | None = None
    seed: int = 0
    kemeny_exact_threshold: int = DEFAULT_KEMENY_THRESHOLD

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidInputError("ensemble size n must be >= 1")
        if self.rule not in RULE_NAMES:
            raise InvalidInputError(f"unknown rule {self.rule!r}; valid rules: {', '.join(RULE_NAMES)}")
        object.__setattr__(self, "tie", TiePolicy.parse(self.tie))
        if not 2 <= self.kemeny_exact_threshold <= MAX_KEMENY_THRESHOLD:
            raise InvalidInputError(f"kemeny_exact_threshold must lie in [2, {MAX_KEMENY_THRESHOLD}]")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "n": self.n, "rule": self.rule, "tie": None if self.tie is None else self.tie.value,
            "seed": self.seed, "kemeny_exact_threshold": self.kemeny_exact_threshold,
        }


def _child_seed(seed: int, *path: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=path).generate_state(1, np.uint64)[0])


def build_profile(train_set: Dataset, validation: Dataset | None, config: EnsembleConfig) -> list[TrainedClassifier]:
    """Train ``config.n`` classifiers, classifier i drawing its configuration from stream (seed, i)."""
    profile = []
    for i in range(config.n):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(i,)))
        profile.append(train(sample_learner_config(rng), train_set, validation))
    return profile


def _elect_rows(probas: np.ndarray, accuracy: tuple[float, ...], rule: str, tie, threshold: int) -> np.ndarray:
    """Winners for each row of an (n, rows, m) stack of probability vectors."""
    n, rows, m = probas.shape
    ballots = rankings_from_score_matrix(probas.reshape(n * rows, m)).reshape(n, rows, m)
    winners = np.empty(rows, dtype=np.int64)
    for r in range(rows):
        profile = Profile(tuple(map(tuple, ballots[:, r].tolist())), accuracy)
        scores = probas[:, r] if rule == "sum" else None
        winners[r] = elect(profile, rule, tie, threshold, scores).winner
    return winners


def predict(profile: Sequence[TrainedClassifier], X: np.ndarray, config: EnsembleConfig) -> np.ndarray:
    """Ensemble winners for every row of ``X``."""
    if not profile:
        raise InvalidInputError("empty profile")
    probas = np.stack([clf.predict_proba(X) for clf in profile])
    accuracy = tuple(clf.validation_accuracy for clf in profile)
    return _elect_rows(probas, accuracy, config.rule, config.tie, config.kemeny_exact_threshold)


def vorace_predict(profile: Sequence[TrainedClassifier], sample, config: EnsembleConfig) -> ClassLabel:
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError("a single sample must be 1-d")
    return ClassLabel(int(predict(profile, x[None, :], config)[0]))


@dataclass(frozen=True)
class EvalReport:
    """Per-fold macro F1 of the ensemble and of its members."""

    rule: str
    fold_scores: tuple[float, ...]
    individual_mean_scores: tuple[float, ...]
    individual_best_scores: tuple[float, ...]
    config: dict = field(default_factory=dict)
    dataset: str = ""
    mean: float = field(init=False)
    std: float = field(init=False)
    mean_individual: float = field(init=False)
    best_individual: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.fold_scores:
            raise InvalidInputError("a report needs at least one fold")
        object.__setattr__(self, "mean", float(np.mean(self.fold_scores)))
        object.__setattr__(self, "std", float(np.std(self.fold_scores)))
        object.__setattr__(self, "mean_individual", float(np.mean(self.individual_mean_scores)))
        object.__setattr__(self, "best_individual", float(np.mean(self.individual_best_scores)))

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset, "rule": self.rule, "config": self.config,
            "mean": self.mean, "std": self.std,
            "mean_individual": self.mean_individual, "best_individual": self.best_individual,
            "fold_scores": list(self.fold_scores),
            "individual_mean_scores": list(self.individual_mean_scores),
            "individual_best_scores": list(self.individual_best_scores),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    CSV_FIELDS = ("dataset", "rule", "n", "folds", "mean", "std", "mean_individual", "best_individual")

    def csv_row(self) -> dict:
        return {
            "dataset": self.dataset, "rule": self.rule, "n": self.config.get("n", ""),
            "folds": len(self.fold_scores), "mean": f"{self.mean:.6f}", "std": f"{self.std:.6f}",
            "mean_individual": f"{self.mean_individual:.6f}", "best_individual": f"{self.best_individual:.6f}",
        }


def reports_to_csv(reports: Sequence[EvalReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=EvalReport.CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.csv_row())
    return buf.getvalue()


def evaluate_rules(
    dataset: Dataset,
    config: EnsembleConfig,
    rules: Sequence[str],
    folds: int = 10,
    repeats: int = 1,
    name: str = "",
) -> dict[str, EvalReport]:
    """Repeated stratified k-fold evaluation of several rules over the same trained profiles.

    In every fold a stratified tenth of the training portion is held out to
    measure each classifier's validation accuracy (used for tie-breaking).
    """
    if repeats < 1:
        raise InvalidInputError("repeats must be >= 1")
    for rule in rules:
        EnsembleConfig(config.n, rule, config.tie, config.seed, config.kemeny_exact_threshold)
    ensemble = {rule: [] for rule in rules}
    ind_mean, ind_best = [], []
    for r in range(repeats):
        plan = stratified_kfold(dataset, folds, _child_seed(config.seed, r))
        for f, (tr, te) in enumerate(plan.splits()):
            keep, held = stratified_holdout(dataset.y[tr], VALIDATION_FRACTION, _child_seed(config.seed, r, f, 0))
            fit_set, val_set, test_set = dataset.subset(tr[keep]), dataset.subset(tr[held]), dataset.subset(te)
            fold_cfg = EnsembleConfig(config.n, config.rule, config.tie, _child_seed(config.seed, r, f, 1),
                                      config.kemeny_exact_threshold)
            profile = build_profile(fit_set, val_set, fold_cfg)
            probas = np.stack([clf.predict_proba(test_set.X) for clf in profile])
            accuracy = tuple(clf.validation_accuracy for clf in profile)
            individual = [f1_score(test_set.y, p.argmax(axis=1)) for p in probas]
            ind_mean.append(float(np.mean(individual)))
            ind_best.append(float(np.max(individual)))
            for rule in rules:
                winners = _elect_rows(probas, accuracy, rule, config.tie, config.kemeny_exact_threshold)
                ensemble[rule].append(f1_score(test_set.y, winners))
    out = {}
    for rule in rules:
        cfg = EnsembleConfig(config.n, rule, config.tie, config.seed, config.kemeny_exact_threshold).to_dict()
        cfg.update(folds=folds, repeats=repeats)
        out[rule] = EvalReport(rule, tuple(ensemble[rule]), tuple(ind_mean), tuple(ind_best), cfg, name)
    return out


def evaluate(dataset: Dataset, config: EnsembleConfig, folds: int = 10, repeats: int = 1, name: str = "") -> EvalReport:
    return evaluate_rules(dataset, config, [config.rule], folds, repeats, name)[config.rule]
