"""Numeric kernels, each with a numba loop form and a vectorized numpy form.

Both forms return identical results; the public wrappers dispatch on the
backend chosen in :mod:`vorace._accel`.  Ballot arrays hold class indices,
most preferred first.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import numpy as np

from ._accel import njit, use_numba

PLURALITY, BORDA, COPELAND, KEMENY = 0, 1, 2, 3
STRICT, LEXICOGRAPHIC, BEST_CLASSIFIER = 0, 1, 2

TIE_TOL = 1e-9
_PRUNE_EPS = 1e-12


# --------------------------------------------------------------------------
# numba loop forms
# --------------------------------------------------------------------------


@njit
def _pairwise_loop(rankings, weights):
    n, m = rankings.shape
    P = np.zeros((m, m))
    for v in range(n):
        w = weights[v]
        for i in range(m):
            a = rankings[v, i]
            for j in range(i + 1, m):
                P[a, rankings[v, j]] += w
    return P


@njit
def _plurality_loop(rankings, weights, m):
    scores = np.zeros(m)
    for v in range(rankings.shape[0]):
        scores[rankings[v, 0]] += weights[v]
    return scores


@njit
def _borda_loop(rankings, weights):
    n, m = rankings.shape
    scores = np.zeros(m)
    for v in range(n):
        for pos in range(m):
            scores[rankings[v, pos]] += weights[v] * (m - 1 - pos)
    return scores


@njit
def _copeland_loop(P):
    m = P.shape[0]
    scores = np.zeros(m)
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            d = P[a, b] - P[b, a]
            if d > TIE_TOL:
                scores[a] += 1.0
            elif d >= -TIE_TOL:
                scores[a] += 0.5
    return scores


@njit
def _kemeny_loop(P):
    """Best pairwise agreement for every choice of top class, by branch and bound.

    Candidates are explored in ascending index order and an incumbent is only
    replaced on strict improvement, so the witness ranking for each top is the
    lexicographically first optimum.
    """
    m = P.shape[0]
    M = np.maximum(P, P.T)
    best = np.full(m, -np.inf)
    perms = np.zeros((m, m), dtype=np.int64)
    perm = np.zeros(m, dtype=np.int64)
    used = np.zeros(m, dtype=np.bool_)
    nxt = np.zeros(m + 1, dtype=np.int64)
    vals = np.zeros(m + 1)
    ubs = np.zeros(m + 1)
    for c in range(m):
        used[:] = False
        used[c] = True
        perm[0] = c
        v0 = 0.0
        for b in range(m):
            if b != c:
                v0 += P[c, b]
        ub0 = 0.0
        for a in range(m):
            for b in range(a + 1, m):
                if a != c and b != c:
                    ub0 += M[a, b]
        vals[1] = v0
        ubs[1] = ub0
        nxt[1] = 0
        d = 1
        while d >= 1:
            if d == m:
                if vals[d] > best[c]:
                    best[c] = vals[d]
                    perms[c, :] = perm
                d -= 1
                used[perm[d]] = False
                continue
            x = nxt[d]
            while x < m and used[x]:
                x += 1
            if x == m:
                d -= 1
                if d >= 1:
                    used[perm[d]] = False
                continue
            nxt[d] = x + 1
            inc = 0.0
            dec = 0.0
            for b in range(m):
                if not used[b] and b != x:
                    inc += P[x, b]
                    dec += M[x, b]
            nv = vals[d] + inc
            nub = ubs[d] - dec
            if best[c] > -np.inf and nv + nub <= best[c] + _PRUNE_EPS:
                continue
            perm[d] = x
            used[x] = True
            vals[d + 1] = nv
            ubs[d + 1] = nub
            nxt[d + 1] = 0
            d += 1
    return best, perms


@njit
def _correct_wins(scores, tie, ballot, best_voter):
    # class 0 is the correct class
    m = scores.shape[0]
    mx = scores[0]
    for c in range(1, m):
        if scores[c] > mx:
            mx = scores[c]
    tol = TIE_TOL * max(1.0, abs(mx))
    if scores[0] < mx - tol:
        return False
    if tie == LEXICOGRAPHIC:
        return True
    if tie == STRICT:
        for c in range(1, m):
            if scores[c] >= mx - tol:
                return False
        return True
    for pos in range(m):
        c = ballot[best_voter, pos]
        if scores[c] >= mx - tol:
            return c == 0
    return False


@njit
def _mc_wins_loop(ballots, weights, rule, tie, best_voter):
    T, n, m = ballots.shape
    wins = 0
    for t in range(T):
        b = ballots[t]
        if rule == PLURALITY:
            scores = _plurality_loop(b, weights, m)
        elif rule == BORDA:
            scores = _borda_loop(b, weights)
        else:
            P = _pairwise_loop(b, weights)
            if rule == COPELAND:
                scores = _copeland_loop(P)
            else:
                scores, _ = _kemeny_loop(P)
        if _correct_wins(scores, tie, b, best_voter):
            wins += 1
    return wins


@njit
def _mc_plurality_tops_loop(tops, m, tie):
    T, n = tops.shape
    counts = np.zeros(m, dtype=np.int64)
    wins = 0
    for t in range(T):
        counts[:] = 0
        for v in range(n):
            counts[tops[t, v]] += 1
        mx = counts.max()
        if counts[0] != mx:
            continue
        if tie == STRICT:
            k = 0
            for c in range(m):
                if counts[c] == mx:
                    k += 1
            if k == 1:
                wins += 1
        else:
            wins += 1
    return wins


# --------------------------------------------------------------------------
# numpy forms
# --------------------------------------------------------------------------


def _positions(rankings: np.ndarray) -> np.ndarray:
    return np.argsort(rankings, axis=-1, kind="stable")


def _pairwise_numpy(rankings, weights):
    pos = _positions(rankings)
    prefers = pos[:, :, None] < pos[:, None, :]
    return np.tensordot(weights, prefers.astype(np.float64), axes=(0, 0))


def _plurality_numpy(rankings, weights, m):
    return np.bincount(rankings[:, 0], weights=weights, minlength=m).astype(np.float64)


def _borda_numpy(rankings, weights):
    m = rankings.shape[1]
    pos = _positions(rankings)
    return weights @ (m - 1 - pos).astype(np.float64)


def _copeland_numpy(P):
    d = P - P.T
    pts = np.where(d > TIE_TOL, 1.0, np.where(d >= -TIE_TOL, 0.5, 0.0))
    np.fill_diagonal(pts, 0.0)
    return pts.sum(axis=1)


@lru_cache(maxsize=None)
def _all_permutations(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    perms = np.array(list(permutations(range(m))), dtype=np.int64)
    iu, ju = np.triu_indices(m, k=1)
    return perms, iu, ju


def _kemeny_numpy(P):
    """Exhaustive agreement over all m! rankings, best per top class."""
    m = P.shape[0]
    perms, iu, ju = _all_permutations(m)
    agreement = P[perms[:, iu], perms[:, ju]].sum(axis=1)
    best = np.empty(m)
    witness = np.empty((m, m), dtype=np.int64)
    block = perms.shape[0] // m
    # itertools.permutations emits rankings grouped by their first element
    for c in range(m):
        seg = agreement[c * block:(c + 1) * block]
        k = int(np.argmax(seg))
        best[c] = seg[k]
        witness[c] = perms[c * block + k]
    return best, witness


def _tied_mask_numpy(scores):
    mx = scores.max(axis=-1, keepdims=True)
    tol = TIE_TOL * np.maximum(1.0, np.abs(mx))
    return scores >= mx - tol


def _decide_numpy(scores, tie, ballots, best_voter):
    tied = _tied_mask_numpy(scores)
    if tie == LEXICOGRAPHIC:
        return tied[:, 0]
    if tie == STRICT:
        return tied[:, 0] & (tied.sum(axis=1) == 1)
    ranked = ballots[:, best_voter, :]
    ranked_tied = np.take_along_axis(tied, ranked, axis=1)
    first = np.argmax(ranked_tied, axis=1)
    chosen = ranked[np.arange(ranked.shape[0]), first]
    return chosen == 0


def _mc_wins_numpy(ballots, weights, rule, tie, best_voter):
    T, n, m = ballots.shape
    if rule == PLURALITY:
        onehot = ballots[:, :, 0, None] == np.arange(m)
        scores = np.einsum("v,tvc->tc", weights, onehot.astype(np.float64))
    else:
        pos = _positions(ballots)
        if rule == BORDA:
            scores = np.einsum("v,tvc->tc", weights, (m - 1 - pos).astype(np.float64))
        else:
            prefers = (pos[:, :, :, None] < pos[:, :, None, :]).astype(np.float64)
            P = np.einsum("v,tvab->tab", weights, prefers)
            if rule == COPELAND:
                d = P - np.swapaxes(P, 1, 2)
                pts = np.where(d > TIE_TOL, 1.0, np.where(d >= -TIE_TOL, 0.5, 0.0))
                pts[:, np.arange(m), np.arange(m)] = 0.0
                scores = pts.sum(axis=2)
            else:
                scores = np.stack([_kemeny_numpy(P[t])[0] for t in range(T)]) if T else np.zeros((0, m))
    return int(_decide_numpy(scores, tie, ballots, best_voter).sum())


def _mc_plurality_tops_numpy(tops, m, tie):
    counts = (tops[:, :, None] == np.arange(m)).sum(axis=1)
    mx = counts.max(axis=1)
    won = counts[:, 0] == mx
    if tie == STRICT:
        won &= (counts == mx[:, None]).sum(axis=1) == 1
    return int(won.sum())


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def _as_rankings(rankings) -> np.ndarray:
    return np.ascontiguousarray(rankings, dtype=np.int64)


def _as_weights(weights) -> np.ndarray:
    return np.ascontiguousarray(weights, dtype=np.float64)


def pairwise_matrix(rankings, weights) -> np.ndarray:
    """P[a, b] = total weight of ballots placing a above b."""
    r, w = _as_rankings(rankings), _as_weights(weights)
    return _pairwise_loop(r, w) if use_numba() else _pairwise_numpy(r, w)


def plurality_scores(rankings, weights) -> np.ndarray:
    r, w = _as_rankings(rankings), _as_weights(weights)
    m = r.shape[1]
    return _plurality_loop(r, w, m) if use_numba() else _plurality_numpy(r, w, m)


def borda_scores(rankings, weights) -> np.ndarray:
    r, w = _as_rankings(rankings), _as_weights(weights)
    return _borda_loop(r, w) if use_numba() else _borda_numpy(r, w)


def copeland_scores(P) -> np.ndarray:
    P = np.ascontiguousarray(P, dtype=np.float64)
    return _copeland_loop(P) if use_numba() else _copeland_numpy(P)


def kemeny_top_scores(P) -> tuple[np.ndarray, np.ndarray]:
    """For each class c: the best agreement of any ranking topped by c, and one such ranking."""
    P = np.ascontiguousarray(P, dtype=np.float64)
    return _kemeny_loop(P) if use_numba() else _kemeny_numpy(P)


def mc_wins(ballots, weights, rule: int, tie: int, best_voter: int = 0) -> int:
    """Count trials in which class 0 is elected; ``ballots`` has shape (trials, n, m)."""
    b = np.ascontiguousarray(ballots, dtype=np.int64)
    w = _as_weights(weights)
    if use_numba():
        return int(_mc_wins_loop(b, w, rule, tie, best_voter))
    return _mc_wins_numpy(b, w, rule, tie, best_voter)


def mc_plurality_tops(tops, m: int, tie: int) -> int:
    """Plurality fast path when only first choices were sampled (unit weights)."""
    t = np.ascontiguousarray(tops, dtype=np.int64)
    if use_numba():
        return int(_mc_plurality_tops_loop(t, m, tie))
    return _mc_plurality_tops_numpy(t, m, tie)
