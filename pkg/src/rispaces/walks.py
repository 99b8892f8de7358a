"""Laws of symmetric Bernoulli walks and signed indicator sums.

``walk_distribution(k)`` is the law of a sum of k independent symmetric signs.
``signed_indicator_sum_tail(n, u, s)`` is the exact upper tail of |sum of n
independent copies of (indicator of measure u) * (independent sign)|: condition
on the number k of active indicators (binomial) and apply the walk tail,

    P(|S_n| >= s) = sum_{k=s}^n C(n,k) u^k (1-u)^(n-k) P(|W_k| >= s).

Two arithmetic backends.  Exact ``fractions.Fraction`` is the default up to
k <= 64, where it is both fast and bit-reproducible.  Beyond that everything
runs in log space (gammaln log-binomials, logaddexp accumulation): the deep
tail atoms carry probabilities far below float underflow yet still dominate
weighted-rearrangement norms, so they must not be truncated to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from .stepfn import StepFunction

__all__ = [
    "EXACT_MAX_STEPS",
    "IntegerDistribution",
    "walk_distribution",
    "walk_abs_tail",
    "walk_abs_layers",
    "signed_indicator_sum_tail",
    "signed_indicator_sum_log_tails",
    "signed_indicator_sum_tail_leading",
    "signed_indicator_sum_expectation",
]

LN2 = math.log(2.0)

# Exact rational arithmetic on k-step walks costs ~k^2 big-int digits per
# cumulative tail; 64 steps stays below a millisecond, 2^14 steps costs ~10 s.
EXACT_MAX_STEPS = 64

Prob = Union[Fraction, float]


class IntegerDistribution:
    """Probability law on a finite set of integers.

    Atom weights are either all ``Fraction`` (exact mode: mass must equal 1)
    or all floats (mass within 1e-12 of 1).  Zero-probability atoms are
    dropped on construction.
    """

    __slots__ = ("_atoms", "_exact")

    def __init__(self, atoms: Dict[int, Prob]):
        cleaned = {int(v): p for v, p in atoms.items() if p != 0}
        if not cleaned:
            raise ValueError("distribution needs at least one atom")
        exact = all(isinstance(p, Rational) for p in cleaned.values())
        if exact:
            cleaned = {v: Fraction(p) for v, p in cleaned.items()}
            if any(p < 0 for p in cleaned.values()):
                raise ValueError("negative probability")
            if sum(cleaned.values()) != 1:
                raise ValueError("probabilities must sum to 1")
        else:
            cleaned = {v: float(p) for v, p in cleaned.items()}
            if any(p < 0 for p in cleaned.values()):
                raise ValueError("negative probability")
            if abs(math.fsum(cleaned.values()) - 1.0) > 1e-12:
                raise ValueError("probabilities must sum to 1 within 1e-12")
        self._atoms = dict(sorted(cleaned.items()))
        self._exact = exact

    @property
    def is_exact(self) -> bool:
        return self._exact

    def support(self) -> Tuple[int, ...]:
        return tuple(self._atoms)

    def prob(self, v: int) -> Prob:
        zero = Fraction(0) if self._exact else 0.0
        return self._atoms.get(int(v), zero)

    def abs_law(self) -> Dict[int, Prob]:
        """Law of |X| as a value -> probability dict."""
        out: Dict[int, Prob] = {}
        for v, p in self._atoms.items():
            a = abs(v)
            out[a] = out.get(a, Fraction(0) if self._exact else 0.0) + p
        return dict(sorted(out.items()))

    def tail_abs(self, s: int) -> Prob:
        """P(|X| >= s)."""
        vals = [p for v, p in self._atoms.items() if abs(v) >= s]
        if not vals:
            return Fraction(0) if self._exact else 0.0
        return sum(vals) if self._exact else math.fsum(vals)

    def expectation_abs(self) -> Prob:
        vals = [abs(v) * p for v, p in self._atoms.items()]
        return sum(vals) if self._exact else math.fsum(vals)

    def to_step_function(self) -> StepFunction:
        """Decreasing rearrangement of |X| as a step function on (0, 1]."""
        law = sorted(self.abs_law().items(), key=lambda kv: -kv[0])
        values = [kv[0] for kv in law]
        probs = [kv[1] for kv in law]
        if self._exact:
            bps = [Fraction(0)]
            for p in probs:
                bps.append(bps[-1] + p)
            return StepFunction(bps, [Fraction(v) for v in values])
        bps = np.concatenate(([0.0], np.cumsum(np.asarray(probs, dtype=float))))
        bps[-1] = 1.0
        return StepFunction(bps, np.asarray(values, dtype=float))

    def to_json_dict(self) -> dict:
        atoms = [
            [v, f"{p.numerator}/{p.denominator}" if self._exact else p]
            for v, p in self._atoms.items()
        ]
        return {"atoms": atoms}

    @classmethod
    def from_json_dict(cls, d: dict) -> "IntegerDistribution":
        atoms: Dict[int, Prob] = {}
        for v, p in d["atoms"]:
            atoms[int(v)] = Fraction(p) if isinstance(p, str) else float(p)
        return cls(atoms)

    def __eq__(self, other):
        if not isinstance(other, IntegerDistribution):
            return NotImplemented
        return self._exact == other._exact and self._atoms == other._atoms

    __hash__ = None

    def __repr__(self):
        kind = "exact" if self._exact else "float"
        return f"IntegerDistribution({len(self._atoms)} atoms, {kind})"


def walk_distribution(k: int, exact: Optional[bool] = None) -> IntegerDistribution:
    """Law of the k-step symmetric walk: P(W_k = k - 2j) = C(k,j) / 2^k."""
    if k < 0:
        raise ValueError("step count must be nonnegative")
    if exact is None:
        exact = k <= EXACT_MAX_STEPS
    if exact:
        if k > EXACT_MAX_STEPS:
            raise ValueError(f"exact mode is capped at k <= {EXACT_MAX_STEPS}")
        denom = 2**k
        atoms: Dict[int, Prob] = {
            k - 2 * j: Fraction(math.comb(k, j), denom) for j in range(k + 1)
        }
    else:
        lp = _log_walk_row(k)
        atoms = {k - 2 * j: float(np.exp(lp[j])) for j in range(k + 1)}
        # exp() truncates the far tail; renormalize the visible part.
        total = math.fsum(atoms.values())
        atoms = {v: p / total for v, p in atoms.items() if p > 0}
    return IntegerDistribution(atoms)


@lru_cache(maxsize=256)
def _abs_tail_fractions(k: int) -> Tuple[Fraction, ...]:
    """(P(|W_k| >= s))_{s=0..k} as exact rationals.

    P(|W_k| >= s) = 2^(1-k) * sum_{j <= (k-s)//2} C(k,j) for s >= 1, by the
    symmetry of the two strict half-tails.
    """
    if k > EXACT_MAX_STEPS:
        raise ValueError(f"exact walk tails are capped at {EXACT_MAX_STEPS} steps")
    if k == 0:
        return (Fraction(1),)
    denom = 2 ** (k - 1)
    comb_prefix = [math.comb(k, 0)]
    for j in range(1, k + 1):
        comb_prefix.append(comb_prefix[-1] + math.comb(k, j))
    tails = [Fraction(1)]
    for s in range(1, k + 1):
        tails.append(Fraction(comb_prefix[(k - s) // 2], denom))
    return tuple(tails)


def _log_walk_row(k: int) -> np.ndarray:
    """log P(W_k = k - 2j) for j = 0..k."""
    j = np.arange(k + 1, dtype=float)
    return gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1) - k * LN2


@lru_cache(maxsize=8)
def _log_walk_tail_matrix(n: int) -> np.ndarray:
    """M[k, s] = log P(|W_k| >= s) for 0 <= k, s <= n.  Memory is O(n^2)."""
    M = np.full((n + 1, n + 1), -np.inf)
    M[:, 0] = 0.0
    for k in range(1, n + 1):
        H = np.logaddexp.accumulate(_log_walk_row(k))
        s = np.arange(1, k + 1)
        M[k, 1 : k + 1] = LN2 + H[(k - s) // 2]
    return M


def walk_abs_tail(k: int, s: int, exact: Optional[bool] = None) -> Prob:
    """P(|W_k| >= s)."""
    if k < 0 or s < 0:
        raise ValueError("k and s must be nonnegative")
    if exact is None:
        exact = k <= EXACT_MAX_STEPS
    if s > k:
        return Fraction(0) if exact else 0.0
    if exact:
        return _abs_tail_fractions(k)[s]
    if s == 0:
        return 1.0
    H = np.logaddexp.accumulate(_log_walk_row(k))
    return float(np.exp(LN2 + H[(k - s) // 2]))


def walk_abs_layers(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """(values, log_tails) of |W_k|: values descending, log P(|W_k| >= value).

    This is the layered form of the decreasing rearrangement used by the
    log-space norm routines; unlike ``walk_distribution`` it stays O(k) in
    memory and keeps the deep tail at full log precision.
    """
    if k < 0:
        raise ValueError("step count must be nonnegative")
    if k == 0:
        return np.asarray([0.0]), np.asarray([0.0])
    values = np.arange(k, -1 if k % 2 == 0 else 0, -2, dtype=float)
    H = np.logaddexp.accumulate(_log_walk_row(k))
    log_tails = np.empty(values.size)
    pos = values > 0
    log_tails[pos] = LN2 + H[((k - values[pos].astype(int)) // 2)]
    log_tails[~pos] = 0.0
    return values, np.minimum(log_tails, 0.0)


def _validate_nus(n: int, u, s: Optional[int] = None) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not 0 < u <= 1:
        raise ValueError("indicator measure u must lie in (0, 1]")
    if s is not None and not 1 <= s <= n:
        raise ValueError("level s must satisfy 1 <= s <= n")


def signed_indicator_sum_tail(
    n: int, u, s: int, exact: Optional[bool] = None
) -> Prob:
    """P(|S_n| >= s) for the n-fold signed indicator sum with measure u."""
    _validate_nus(n, u, s)
    if exact is None:
        exact = isinstance(u, Rational) and n <= EXACT_MAX_STEPS
    if exact:
        if not isinstance(u, Rational):
            raise ValueError("exact mode needs a rational u")
        if n > EXACT_MAX_STEPS:
            raise ValueError(f"exact mode is capped at n <= {EXACT_MAX_STEPS}")
        uf = Fraction(u)
        total = Fraction(0)
        for k in range(s, n + 1):
            binom = math.comb(n, k) * uf**k * (1 - uf) ** (n - k)
            total += binom * _abs_tail_fractions(k)[s]
        return total
    if n <= 2048:
        return float(np.exp(signed_indicator_sum_log_tails(n, float(u))[s - 1]))
    # One level at very large n: skip the O(n^2) tail matrix.
    u = float(u)
    k = np.arange(n + 1, dtype=float)
    lB = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    if u == 1.0:
        lB = np.full(n + 1, -np.inf)
        lB[n] = 0.0
    else:
        lB = lB + k * math.log(u) + (n - k) * math.log1p(-u)
    pieces = [
        lB[kk] + LN2 + np.logaddexp.accumulate(_log_walk_row(kk))[(kk - s) // 2]
        for kk in range(s, n + 1)
    ]
    return float(np.exp(min(logsumexp(np.asarray(pieces)), 0.0)))


def signed_indicator_sum_log_tails(n: int, u: float) -> np.ndarray:
    """log P(|S_n| >= s) for s = 1..n, assembled fully in log space."""
    _validate_nus(n, u)
    u = float(u)
    k = np.arange(n + 1, dtype=float)
    lbinom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    if u == 1.0:
        lB = np.full(n + 1, -np.inf)
        lB[n] = 0.0
    else:
        lB = lbinom + k * math.log(u) + (n - k) * math.log1p(-u)
    if n <= 2048:
        M = _log_walk_tail_matrix(n)
        return np.minimum(logsumexp(M[:, 1:] + lB[:, None], axis=0), 0.0)
    # beyond the cached-matrix cap, accumulate per k in O(n) memory
    out = np.full(n, -np.inf)
    for kk in range(1, n + 1):
        if lB[kk] == -np.inf:
            continue
        acc = np.logaddexp.accumulate(_log_walk_row(kk))
        s = np.arange(1, kk + 1)
        np.logaddexp(out[:kk], lB[kk] + LN2 + acc[(kk - s) // 2], out=out[:kk])
    return np.minimum(out, 0.0)


def signed_indicator_sum_tail_leading(
    n: int, u, s: int, exact: Optional[bool] = None
) -> Prob:
    """Small-u leading term 2^(1-s) C(n,s) u^s of the tail at level s."""
    _validate_nus(n, u, s)
    if exact is None:
        exact = isinstance(u, Rational)
    if exact:
        return Fraction(2 * math.comb(n, s), 2**s) * Fraction(u) ** s
    lead = (1 - s) * LN2 + _log_binom_scalar(n, s) + s * math.log(float(u))
    return float(np.exp(lead))


def _log_binom_scalar(n: int, s: int) -> float:
    return float(gammaln(n + 1) - gammaln(s + 1) - gammaln(n - s + 1))


def signed_indicator_sum_expectation(
    n: int, u, exact: Optional[bool] = None
) -> Prob:
    """E|S_n| = sum_{s>=1} P(|S_n| >= s) (integer layer-cake)."""
    _validate_nus(n, u)
    if exact is None:
        exact = isinstance(u, Rational) and n <= EXACT_MAX_STEPS
    if exact:
        return sum(
            signed_indicator_sum_tail(n, u, s, exact=True) for s in range(1, n + 1)
        )
    lt = signed_indicator_sum_log_tails(n, float(u))
    return float(np.exp(logsumexp(lt)))
