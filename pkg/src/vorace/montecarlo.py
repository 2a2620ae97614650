"""Seeded simulation of independent (or overlapping) classifier votes.

Class 0 plays the correct class.  A voter's first choice is class 0 with its
accuracy, otherwise a uniformly drawn wrong class; the rest of the ballot is
a uniform random order of the remaining classes.

Trials are cut into fixed blocks of ``BLOCK_SIZE``; block ``b`` draws from a
Philox stream keyed by ``SeedSequence(seed, spawn_key=(b,))``, so the result
does not depend on how many threads process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from ._accel import thread_count
from .core import InvalidInputError
from .theory import as_rational, p_tilde
from .voting import DEFAULT_KEMENY_THRESHOLD, MAX_KEMENY_THRESHOLD

BLOCK_SIZE = 4096

MODELS = ("iid", "hetero", "overlap")
SIM_RULES = {
    "plurality": _kernels.PLURALITY,
    "borda": _kernels.BORDA,
    "copeland": _kernels.COPELAND,
    "kemeny": _kernels.KEMENY,
}
SIM_TIES = {
    "strict": _kernels.STRICT,
    "lexicographic": _kernels.LEXICOGRAPHIC,
    "best-classifier": _kernels.BEST_CLASSIFIER,
}


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``tie`` is ``strict`` (a shared maximum counts as a loss), ``lexicographic``
    (class 0 wins any tie it is part of) or ``best-classifier`` (the most
    accurate voter's ballot decides; the first voter when accuracies are equal).
    """

    n: int
    m: int
    trials: int
    seed: int = 0
    model: str = "iid"
    p: float | None = None
    accuracies: tuple[float, ...] | None = None
    rho: float | None = None
    rule: str = "plurality"
    tie: str = "strict"
    kemeny_threshold: int = DEFAULT_KEMENY_THRESHOLD

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise InvalidInputError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidInputError("trials must be a positive integer")
        if self.m < 2:
            raise InvalidInputError("m must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        if self.rule not in SIM_RULES:
            raise InvalidInputError(f"unknown rule {self.rule!r}; expected one of {tuple(SIM_RULES)}")
        if self.tie not in SIM_TIES:
            raise InvalidInputError(f"unknown tie mode {self.tie!r}; expected one of {tuple(SIM_TIES)}")
        if self.rule == "kemeny" and self.m > min(self.kemeny_threshold, MAX_KEMENY_THRESHOLD):
            raise InvalidInputError(f"simulated Kemeny is exact only; m={self.m} exceeds the threshold")
        if self.model == "hetero":
            if not self.accuracies:
                raise InvalidInputError("the hetero model needs per-voter accuracies")
            acc = tuple(float(a) for a in self.accuracies)
            if len(acc) != self.n:
                raise InvalidInputError(f"{len(acc)} accuracies for n={self.n}")
            if any(not 0 <= a <= 1 for a in acc):
                raise InvalidInputError("accuracies must lie in [0, 1]")
            object.__setattr__(self, "accuracies", acc)
        else:
            if self.p is None or not 0 <= self.p <= 1:
                raise InvalidInputError("p must be given and lie in [0, 1]")
        if self.n < 1:
            raise InvalidInputError("n must be >= 1")
        if self.model == "overlap":
            if self.rho is None:
                raise InvalidInputError("the overlap model needs rho")
            p_tilde(self.p, self.rho)  # validates rho <= p, rho < 1

    def voter_accuracies(self) -> np.ndarray:
        if self.model == "hetero":
            return np.array(self.accuracies, dtype=np.float64)
        return np.full(self.n, float(self.p))

    def to_dict(self) -> dict:
        out = asdict(self)
        if out["accuracies"] is not None:
            out["accuracies"] = list(out["accuracies"])
        return out


@dataclass(frozen=True)
class SimResult:
    wins: int
    trials: int
    rate: float = field(init=False)
    stderr: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0 <= self.wins <= self.trials:
            raise InvalidInputError("wins must lie in [0, trials]")
        rate = self.wins / self.trials
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "stderr", math.sqrt(rate * (1 - rate) / self.trials))

    def to_dict(self) -> dict:
        return {"wins": self.wins, "trials": self.trials, "rate": self.rate, "stderr": self.stderr}


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_ballots(config: SimConfig, rng: np.random.Generator, size: int, full: bool) -> np.ndarray:
    """Draw ``size`` trials: (size, n) first choices, or (size, n, m) full ballots."""
    n, m = config.n, config.m
    acc = config.voter_accuracies()
    if config.model == "overlap":
        easy = rng.random(size) < float(config.rho)
        hard_acc = float(p_tilde(as_rational(config.p), as_rational(config.rho)))
        acc = np.where(easy[:, None], 1.0, hard_acc)
    correct = rng.random((size, n)) < acc
    wrong = rng.integers(1, m, size=(size, n))
    tops = np.where(correct, 0, wrong)
    if not full:
        return tops
    keys = rng.random((size, n, m))
    np.put_along_axis(keys, tops[:, :, None], -1.0, axis=2)
    return np.argsort(keys, axis=2, kind="stable")


def _needs_full_ballots(config: SimConfig) -> bool:
    return config.rule != "plurality" or config.tie == "best-classifier"


def _block_wins(config: SimConfig, block: int, size: int) -> int:
    rng = block_rng(config.seed, block)
    rule, tie = SIM_RULES[config.rule], SIM_TIES[config.tie]
    if not _needs_full_ballots(config):
        return _kernels.mc_plurality_tops(sample_ballots(config, rng, size, full=False), config.m, tie)
    ballots = sample_ballots(config, rng, size, full=True)
    best_voter = int(np.argmax(config.voter_accuracies()))
    return _kernels.mc_wins(ballots, np.ones(config.n), rule, tie, best_voter)


def simulate(config: SimConfig, threads: int | None = None) -> SimResult:
    """Estimate the probability that class 0 is elected under ``config``."""
    sizes = [BLOCK_SIZE] * (config.trials // BLOCK_SIZE)
    if config.trials % BLOCK_SIZE:
        sizes.append(config.trials % BLOCK_SIZE)
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(sizes) == 1:
        wins = sum(_block_wins(config, b, s) for b, s in enumerate(sizes))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            wins = sum(pool.map(lambda bs: _block_wins(config, *bs), enumerate(sizes)))
    return SimResult(int(wins), config.trials)


def empirical_voter_accuracy(config: SimConfig, trials: int | None = None) -> SimResult:
    """Fraction of individual votes for class 0 over the sampled trials (pools all voters)."""
    trials = config.trials if trials is None else trials
    correct = 0
    done = 0
    block = 0
    while done < trials:
        size = min(BLOCK_SIZE, trials - done)
        tops = sample_ballots(config, block_rng(config.seed, block), size, full=False)
        correct += int((tops == 0).sum())
        done += size
        block += 1
    return SimResult(correct, trials * config.n)
