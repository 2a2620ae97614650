"""Exact probability that a plurality ensemble elects the correct class.

Everything here works on :class:`fractions.Fraction`; floats appear only when a
caller converts a result for display.  Voter model throughout: each of n
voters picks the correct class c* with probability p (or p_i), otherwise one
of the m - 1 wrong classes uniformly at random.

Three normalizations of the generating-function formula are offered (see
:class:`KVariant`) because they disagree with each other and only the
``model`` one equals the voter model's true probability; the brute-force
:func:`t_p_oracle` settles which is which.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterator, Sequence

from .core import InvalidInputError

Rational = Fraction | int | float | str

ORACLE_MAX_OUTCOMES = 250_000
ORACLE_MAX_HETERO_VOTERS = 16

# worked instance (n=3, m=4, p=0.8) and the constants printed for it
PUBLISHED_EXAMPLE = {"n": 3, "m": 4, "p": Fraction(4, 5), "K": Fraction(1728, 1000), "T": Fraction(963, 1000)}


def as_rational(x: Rational) -> Fraction:
    """Convert to an exact rational; floats go through their shortest repr, so 0.8 -> 4/5."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidInputError("boolean is not a probability")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidInputError(f"cannot read {x!r} as a rational number") from None


def _probability(x: Rational, name: str = "p") -> Fraction:
    q = as_rational(x)
    if not 0 <= q <= 1:
        raise InvalidInputError(f"{name}={q} is outside [0, 1]")
    return q


def _check_nm(n: int, m: int) -> None:
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n}")
    if int(m) != m or m < 2:
        raise InvalidInputError(f"m must be an integer >= 2, got {m}")


# --------------------------------------------------------------------------
# parameter containers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoryParams:
    n: int
    m: int
    p: Fraction

    def __post_init__(self) -> None:
        _check_nm(self.n, self.m)
        object.__setattr__(self, "p", _probability(self.p))


@dataclass(frozen=True)
class HeteroParams:
    accuracies: tuple[Fraction, ...]
    m: int

    def __post_init__(self) -> None:
        acc = tuple(_probability(a, "p_i") for a in self.accuracies)
        _check_nm(len(acc), self.m)
        object.__setattr__(self, "accuracies", acc)

    @property
    def n(self) -> int:
        return len(self.accuracies)


@dataclass(frozen=True)
class OverlapParams:
    n: int
    m: int
    p: Fraction
    rho: Fraction

    def __post_init__(self) -> None:
        _check_nm(self.n, self.m)
        p = _probability(self.p)
        rho = _probability(self.rho, "rho")
        if rho > p:
            raise InvalidInputError(f"overlap rho={rho} exceeds accuracy p={p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rho", rho)


class KVariant(str, enum.Enum):
    """Normalization applied to the generating-function sum.

    THEOREM divides by sum_j C(n,j) p^j ((m-1)(1-p))^(n-j); EXAMPLE uses m-2 in
    place of m-1, which reproduces the published K = 1.728 for n=3, m=4, p=0.8;
    MODEL drops K and weights each wrong vote by (1-p)/(m-1), giving the
    voter model's exact probability.
    """

    THEOREM = "theorem"
    EXAMPLE = "example"
    MODEL = "model"


# --------------------------------------------------------------------------
# exact polynomials
# --------------------------------------------------------------------------


class RationalPolynomial:
    """Sparse univariate polynomial with Fraction coefficients (zeros never stored)."""

    __slots__ = ("_c",)

    def __init__(self, coefficients: dict[int, Rational] | Sequence[Rational] | None = None):
        items = enumerate(coefficients) if isinstance(coefficients, (list, tuple)) else (coefficients or {}).items()
        c: dict[int, Fraction] = {}
        for e, v in items:
            if e < 0:
                raise InvalidInputError("negative exponent")
            q = as_rational(v)
            if q:
                c[int(e)] = q
        self._c = c

    @property
    def coefficients(self) -> dict[int, Fraction]:
        return dict(self._c)

    @property
    def degree(self) -> int:
        return max(self._c, default=-1)

    def coeff(self, e: int) -> Fraction:
        return self._c.get(e, Fraction(0))

    def truncate(self, max_degree: int) -> RationalPolynomial:
        return RationalPolynomial({e: v for e, v in self._c.items() if e <= max_degree})

    def multiply(self, other: RationalPolynomial, max_degree: int | None = None) -> RationalPolynomial:
        out: dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            if max_degree is not None and e1 > max_degree:
                continue
            for e2, v2 in other._c.items():
                e = e1 + e2
                if max_degree is not None and e > max_degree:
                    continue
                out[e] = out.get(e, 0) + v1 * v2
        return RationalPolynomial(out)

    def power(self, k: int, max_degree: int | None = None) -> RationalPolynomial:
        result = RationalPolynomial({0: 1})
        base = self if max_degree is None else self.truncate(max_degree)
        while k:
            if k & 1:
                result = result.multiply(base, max_degree)
            k >>= 1
            if k:
                base = base.multiply(base, max_degree)
        return result

    def __mul__(self, other: RationalPolynomial) -> RationalPolynomial:
        return self.multiply(other)

    def __call__(self, x: Rational) -> Fraction:
        x = as_rational(x)
        return sum((v * x**e for e, v in self._c.items()), Fraction(0))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalPolynomial) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __repr__(self) -> str:
        terms = " + ".join(f"({v})x^{e}" for e, v in sorted(self._c.items()))
        return f"RationalPolynomial({terms or '0'})"


def truncated_exponential(i: int) -> RationalPolynomial:
    """sum_{j<i} x^j / j!"""
    return RationalPolynomial({j: Fraction(1, factorial(j)) for j in range(i)})


def generating_function(m: int, i: int, max_degree: int | None = None) -> RationalPolynomial:
    """(sum_{j<i} x^j/j!)^(m-1), optionally truncated above ``max_degree``."""
    return truncated_exponential(i).power(m - 1, max_degree)


def gen_fun_coeff(m: int, i: int, n: int) -> Fraction:
    """Coefficient of x^(n-i) in the generating function for i correct votes.

    Times (n-i)!, it counts the ways to spread the n-i wrong votes over the
    m-1 wrong classes with fewer than i votes each.
    """
    if m < 2:
        raise InvalidInputError("m must be >= 2")
    if not 1 <= i <= n:
        raise InvalidInputError(f"need 1 <= i <= n, got i={i}, n={n}")
    d = n - i
    if d > (i - 1) * (m - 1):
        return Fraction(0)
    return generating_function(m, i, d).coeff(d)


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------


def normalization_constant(n: int, m: int, p: Rational, variant: KVariant | str = KVariant.THEOREM) -> Fraction:
    variant = KVariant(variant)
    p = _probability(p)
    if variant is KVariant.MODEL:
        return Fraction(1)
    base = m - 1 if variant is KVariant.THEOREM else m - 2
    return sum((comb(n, j) * p**j * (base * (1 - p)) ** (n - j) for j in range(n + 1)), Fraction(0))


def t_p_paper(n: int, m: int, p: Rational, variant: KVariant | str = KVariant.MODEL) -> Fraction:
    """The generating-function accuracy formula under the chosen normalization.

    The (1-p)^n (p/(1-p))^i factor is expanded to p^i (1-p)^(n-i) with 0^0 = 1,
    so p = 1 needs no special case.
    """
    params = TheoryParams(n, m, p)
    n, m, p = params.n, params.m, params.p
    variant = KVariant(variant)
    start = -(-n // m)
    total = Fraction(0)
    if variant is KVariant.MODEL:
        e = (1 - p) / (m - 1)
        for i in range(start, n + 1):
            phi = gen_fun_coeff(m, i, n)
            if phi:
                total += comb(n, i) * p**i * phi * factorial(n - i) * e ** (n - i)
        return total
    for i in range(start, n + 1):
        phi = gen_fun_coeff(m, i, n)
        if phi:
            total += comb(n, i) * p**i * (1 - p) ** (n - i) * phi * factorial(n - i)
    K = normalization_constant(n, m, p, variant)
    if K == 0:
        raise InvalidInputError(f"normalization constant vanishes for variant {variant.value} at p={p}, m={m}")
    return total / K


def _binary_tail(n: int, p: Fraction, start: int) -> Fraction:
    # integer arithmetic on p = a/b keeps large-n tails fast
    a, b = p.numerator, p.denominator
    c = b - a
    num = 0
    for i in range(max(start, 0), n + 1):
        num += comb(n, i) * a**i * c ** (n - i)
    return Fraction(num, b**n)


def t_p_binary(n: int, p: Rational, tie: str = "strict") -> Fraction:
    """Two-class accuracy as a binomial tail.

    ``strict`` sums i > n/2 (a tie is a loss), ``as-written`` sums from
    ceil(n/2), which counts even-n ties as wins.
    """
    _check_nm(n, 2)
    p = _probability(p)
    if tie == "strict":
        return _binary_tail(n, p, n // 2 + 1)
    if tie == "as-written":
        return _binary_tail(n, p, -(-n // 2))
    raise InvalidInputError(f"unknown binary tie mode {tie!r}; expected 'strict' or 'as-written'")


def t_p_derivative_binary(n: int, p: Rational) -> Fraction:
    """d/dp of the as-written two-class tail: c C(n,c) p^(c-1) (1-p)^(n-c), c = ceil(n/2)."""
    _check_nm(n, 2)
    p = _probability(p)
    c = -(-n // 2)
    return c * comb(n, c) * p ** (c - 1) * (1 - p) ** (n - c)


def wrong_vote_win_weight(m: int, s: int, n: int) -> Fraction:
    """P(every wrong class gets < s of the n - s wrong votes), votes uniform over m - 1 classes."""
    if s == 0:
        return Fraction(0)
    return gen_fun_coeff(m, s, n) * factorial(n - s) / Fraction(m - 1) ** (n - s)


def _correct_count_distribution(accuracies: Sequence[Fraction]) -> list[Fraction]:
    # P(|S*| = s): grouping the subsets by size
    dist = [Fraction(1)]
    for q in accuracies:
        nxt = [Fraction(0)] * (len(dist) + 1)
        for s, w in enumerate(dist):
            nxt[s] += w * (1 - q)
            nxt[s + 1] += w * q
        dist = nxt
    return dist


def t_hetero(accuracies: Sequence[Rational], m: int) -> Fraction:
    """Exact accuracy when voter i is correct with its own probability p_i.

    Sums, over the set S* of correct voters, P(S*) times the probability that
    the wrong voters leave every wrong class below |S*|.  Subsets are grouped
    by size, since the second factor depends only on |S*|.
    """
    params = HeteroParams(tuple(accuracies), m)
    n = params.n
    dist = _correct_count_distribution(params.accuracies)
    return sum((dist[s] * wrong_vote_win_weight(m, s, n) for s in range(1, n + 1)), Fraction(0))


def t_hetero_partition_sum(accuracies: Sequence[Rational], m: int) -> Fraction:
    """Unnormalized sum over winning partitions: sum of prod p_i prod (1 - p_i), one term per partition.

    No normalization constant is applied; the count of winning partitions for
    a given S* is phi_{|S*|} (n - |S*|)!.
    """
    params = HeteroParams(tuple(accuracies), m)
    n = params.n
    dist = _correct_count_distribution(params.accuracies)
    return sum((dist[s] * gen_fun_coeff(m, s, n) * factorial(n - s) for s in range(1, n + 1)), Fraction(0))


def p_tilde(p: Rational, rho: Rational) -> Fraction:
    """Accuracy left on the hard inputs once a fraction rho of easy ones is removed."""
    p = _probability(p)
    rho = _probability(rho, "rho")
    if rho >= 1:
        raise InvalidInputError("rho must be < 1")
    if rho > p:
        raise InvalidInputError(f"rho={rho} exceeds p={p}")
    return (p - rho) / (1 - rho)


def overlap_bound(n: int, m: int, p: Rational, rho: Rational) -> Fraction:
    """Lower bound (1 - rho) T(p~) + rho on accuracy with overlap rho."""
    params = OverlapParams(n, m, p, rho)
    pt = p_tilde(params.p, params.rho)
    if m == 2:
        t = t_p_binary(n, pt, "strict")
    else:
        t = t_p_paper(n, m, pt, KVariant.MODEL)
    return (1 - params.rho) * t + params.rho


def mu_pid(n: int, m: int, p: Rational) -> Fraction:
    """Identification rate under the independent-maximum approximation.

    N_t ~ Bin(n, p) correct votes; each wrong class N_s ~ Bin(n, e) with
    e = (1-p)/(m-1), treated as independent of N_t and of each other:
    P_id = sum_{j>=1} P(N_t = j) sum_{k<j} P(N_s^max = k), where
    P(N_s^max = k) = sum_{h=1}^{m-1} C(m-1, h) P(N_s = k)^h P(N_s < k)^(m-1-h).
    """
    params = TheoryParams(n, m, p)
    n, m, p = params.n, params.m, params.p
    e = (1 - p) / (m - 1)
    ns = [comb(n, k) * e**k * (1 - e) ** (n - k) for k in range(n + 1)]
    below = [Fraction(0)]
    for k in range(n + 1):
        below.append(below[-1] + ns[k])
    pmax = [
        sum((comb(m - 1, h) * ns[k] ** h * below[k] ** (m - 1 - h) for h in range(1, m)), Fraction(0))
        for k in range(n + 1)
    ]
    cum = Fraction(0)
    total = Fraction(0)
    for j in range(1, n + 1):
        cum += pmax[j - 1]
        total += comb(n, j) * p**j * (1 - p) ** (n - j) * cum
    return total


# --------------------------------------------------------------------------
# brute-force oracle
# --------------------------------------------------------------------------

ORACLE_TIES = ("strict-win", "uniform-tiebreak", "lexicographic")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


def _win_share(correct: int, wrong: tuple[int, ...], tie: str) -> Fraction:
    top = max(wrong, default=0)
    if correct > top:
        return Fraction(1)
    if correct < top or tie == "strict-win":
        return Fraction(0)
    if tie == "lexicographic":
        return Fraction(1)
    return Fraction(1, 1 + sum(1 for w in wrong if w == correct))


def _multinomial(counts: Sequence[int]) -> int:
    out = factorial(sum(counts))
    for k in counts:
        out //= factorial(k)
    return out


def _wrong_vote_share(m: int, correct: int, wrong_votes: int, tie: str) -> Fraction:
    total = Fraction(0)
    for counts in _compositions(wrong_votes, m - 1):
        share = _win_share(correct, counts, tie)
        if share:
            total += _multinomial(counts) * share
    return total / Fraction(m - 1) ** wrong_votes


def t_p_oracle(
    n: int,
    m: int,
    p: Rational | Sequence[Rational],
    tie: str = "strict-win",
) -> Fraction:
    """Exact win probability of c* by enumerating every vote-count outcome.

    With a scalar p the multinomial distribution of counts over (c*, wrong
    classes) is enumerated directly.  With per-voter accuracies every subset
    of correct voters is enumerated explicitly.  Independent of the
    generating-function machinery.
    """
    if tie not in ORACLE_TIES:
        raise InvalidInputError(f"unknown oracle tie mode {tie!r}; expected one of {ORACLE_TIES}")
    if isinstance(p, (list, tuple)):
        params = HeteroParams(tuple(p), m)
        if params.n != n:
            raise InvalidInputError(f"{params.n} accuracies given for n={n}")
        return _oracle_hetero(params, tie)
    params = TheoryParams(n, m, p)
    outcomes = comb(n + m - 1, m - 1)
    if outcomes > ORACLE_MAX_OUTCOMES:
        raise InvalidInputError(
            f"oracle needs {outcomes} vote-count outcomes for n={n}, m={m}; limit is {ORACLE_MAX_OUTCOMES}"
        )
    p = params.p
    e = (1 - p) / (m - 1)
    total = Fraction(0)
    for counts in _compositions(n, m):
        share = _win_share(counts[0], counts[1:], tie)
        if share:
            total += _multinomial(counts) * p ** counts[0] * e ** (n - counts[0]) * share
    return total


def _oracle_hetero(params: HeteroParams, tie: str) -> Fraction:
    n, m = params.n, params.m
    if n > ORACLE_MAX_HETERO_VOTERS:
        raise InvalidInputError(f"heterogeneous oracle enumerates 2^n subsets; n={n} exceeds {ORACLE_MAX_HETERO_VOTERS}")
    # with no correct votes c* cannot even tie, since n >= 1 votes go elsewhere
    share = [_wrong_vote_share(m, s, n - s, tie) if s else Fraction(0) for s in range(n + 1)]
    total = Fraction(0)
    acc = params.accuracies
    for mask in range(1 << n):
        s = bin(mask).count("1")
        if not share[s]:
            continue
        w = Fraction(1)
        for i, q in enumerate(acc):
            w *= q if mask >> i & 1 else 1 - q
        total += w * share[s]
    return total


# --------------------------------------------------------------------------
# audit
# --------------------------------------------------------------------------


def formula_audit(n: int, m: int, p: Rational) -> dict:
    """Side-by-side values of every normalization against the oracle.

    For the published worked instance the printed constants are included and
    each disagreement is listed under ``discrepancies``.
    """
    params = TheoryParams(n, m, p)
    n, m, p = params.n, params.m, params.p
    report: dict = {"n": n, "m": m, "p": p}
    report["K_theorem"] = normalization_constant(n, m, p, KVariant.THEOREM)
    report["K_example"] = normalization_constant(n, m, p, KVariant.EXAMPLE)
    for variant in KVariant:
        try:
            report[f"T_{variant.value}"] = t_p_paper(n, m, p, variant)
        except InvalidInputError:
            report[f"T_{variant.value}"] = None
    try:
        report["T_oracle"] = t_p_oracle(n, m, p, "strict-win")
    except InvalidInputError:
        report["T_oracle"] = None
    report["mu_pid"] = mu_pid(n, m, p)
    notes = []
    pub = PUBLISHED_EXAMPLE
    if (n, m, p) == (pub["n"], pub["m"], pub["p"]):
        report["K_published"] = pub["K"]
        report["T_published"] = pub["T"]
        if report["K_theorem"] != pub["K"]:
            notes.append(
                f"K from its defining sum is {report['K_theorem']} = {float(report['K_theorem'])}, "
                f"printed K is {float(pub['K'])}"
            )
        if report["K_example"] == pub["K"]:
            notes.append("printed K equals the sum with (m-2)^(n-j), not (m-1)^(n-j)")
    oracle = report["T_oracle"]
    if oracle is not None:
        for variant in (KVariant.THEOREM, KVariant.EXAMPLE):
            value = report[f"T_{variant.value}"]
            if value is not None and value != oracle:
                notes.append(f"T with {variant.value} K is {float(value):.6f}, oracle gives {oracle} = {float(oracle):.6f}")
        if report["T_model"] != oracle:
            notes.append("model normalization disagrees with the oracle")
    report["discrepancies"] = notes
    return report
