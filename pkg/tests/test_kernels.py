"""The numba kernels and their numpy fallbacks must agree exactly."""

import numpy as np
import pytest

from vorace import _kernels
from vorace._accel import HAVE_NUMBA, backend, using_backend
from vorace.montecarlo import SimConfig, simulate

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def random_rankings(rng, k, m):
    return np.argsort(rng.random((k, m)), axis=1)


def both(fn, *args):
    with using_backend("numba"):
        a = fn(*args)
    with using_backend("numpy"):
        b = fn(*args)
    return a, b


@pytest.mark.parametrize("seed", range(20))
def test_tallies_agree(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 7))
    r = random_rankings(rng, int(rng.integers(1, 12)), m)
    w = rng.integers(0, 4, len(r)).astype(float)
    for fn in (_kernels.pairwise_matrix, _kernels.borda_scores, _kernels.plurality_scores):
        a, b = both(fn, r, w)
        assert np.array_equal(a, b)
    P = _kernels.pairwise_matrix(r, w)
    a, b = both(_kernels.copeland_scores, P)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("seed", range(30))
def test_kemeny_agrees(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 7))
    r = random_rankings(rng, int(rng.integers(1, 10)), m)
    P = _kernels.pairwise_matrix(r, np.ones(len(r)))
    (best_a, wit_a), (best_b, wit_b) = both(_kernels.kemeny_top_scores, P)
    assert np.allclose(best_a, best_b)
    assert np.array_equal(wit_a, wit_b)


@pytest.mark.parametrize("rule", [_kernels.PLURALITY, _kernels.BORDA, _kernels.COPELAND, _kernels.KEMENY])
@pytest.mark.parametrize("tie", [_kernels.STRICT, _kernels.LEXICOGRAPHIC, _kernels.BEST_CLASSIFIER])
def test_monte_carlo_tallies_agree(rule, tie):
    rng = np.random.default_rng(rule * 10 + tie)
    ballots = np.argsort(rng.random((500, 5, 4)), axis=2)
    a, b = both(_kernels.mc_wins, ballots, np.ones(5), rule, tie, 2)
    assert a == b
    tops = ballots[:, :, 0]
    a, b = both(_kernels.mc_plurality_tops, tops, 4, tie if tie != _kernels.BEST_CLASSIFIER else 0)
    assert a == b


def test_simulation_identical_across_backends():
    cfg = SimConfig(n=5, m=4, trials=5000, seed=12, p=0.45, rule="kemeny", tie="best-classifier")
    a, b = both(simulate, cfg)
    assert a == b


def test_backend_context_restores():
    before = backend()
    with using_backend("numpy"):
        assert backend() == "numpy"
    assert backend() == before


def test_unknown_backend():
    with pytest.raises(ValueError):
        with using_backend("cuda"):
            pass
