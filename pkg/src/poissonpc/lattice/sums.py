"""Difference sets with multiplicities and the weighted counts ``S`` and ``S~``.

``S(X, alpha, M, K)`` sums ``alpha(x1) alpha(x2)`` over ``1 <= m1, m2 <= M``
and ``x1, x2`` in ``X`` with ``|m1 x1 - m2 x2| <= K``.  ``S~`` is the same
count with the multipliers restricted to the dyadic range ``N < n <= 2N``,
optionally weighted by ``beta(n1) beta(n2)``.

Three interchangeable methods compute the counts:

``brute``
    every ``(m1, m2, x1, x2)``; O(M^2 |X|^2).
``interval``
    for each ``(m1, x1, x2)`` the admissible ``m2`` form an interval whose
    end points are found by division and corrected on the exact predicate;
    O(M |X|^2).
``productsort``
    sort the M |X| weighted products ``m x`` and count near pairs with a
    cumulative-weight window; O(M |X| log(M |X|)).

All three evaluate the same floating-point predicate
``|fl(m1 x1) - fl(m2 x2)| <= K`` and agree exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .._numeric import monotone_first, near_pair_count, sort_with_weights
from .._validation import ValidationError, check_ascending, check_cap, check_positive, check_prefix

PRODUCT_CAP = 40_000_000
BRUTE_CAP = 50_000_000


@dataclass(frozen=True)
class DifferenceWeights:
    """Ascending difference values ``x`` with positive integer weights ``alpha``."""

    x: np.ndarray
    alpha: np.ndarray
    source_n: int = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        alpha = np.asarray(self.alpha, dtype=np.int64)
        if x.shape != alpha.shape or x.ndim != 1:
            raise ValidationError("x and alpha must be 1-D arrays of equal length")
        if x.size and np.any(np.diff(x) <= 0):
            raise ValidationError("difference values must be strictly ascending")
        if np.any(alpha < 1):
            raise ValidationError("weights must be positive integers")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "alpha", alpha)

    def __len__(self):
        return self.x.shape[0]

    @classmethod
    def from_pairs(cls, pairs, source_n=None):
        pairs = sorted(pairs)
        return cls(np.array([p[0] for p in pairs], dtype=np.float64),
                   np.array([p[1] for p in pairs], dtype=np.int64), source_n)

    def restrict(self, lo, hi):
        """Entries with ``lo <= x < hi``."""
        a = np.searchsorted(self.x, lo, side="left")
        b = np.searchsorted(self.x, hi, side="left")
        return DifferenceWeights(self.x[a:b], self.alpha[a:b], self.source_n)

    def split_unit(self):
        """``(X-, X+)``: entries below 1 and entries at least 1."""
        return self.restrict(-np.inf, 1.0), self.restrict(1.0, np.inf)


@dataclass(frozen=True)
class DyadicBlock(DifferenceWeights):
    """The restriction of a difference set to ``[2**k, 2**(k + 1))``."""

    k: int = 0

    def __post_init__(self):
        super().__post_init__()
        lo, hi = 2.0**self.k, 2.0 ** (self.k + 1)
        if self.x.size and (self.x[0] < lo or self.x[-1] >= hi):
            raise ValidationError(f"block k={self.k} has entries outside [{lo}, {hi})")


def differences(window, N=None, coalesce_eps=0.0):
    """Positive pairwise differences ``x_n2 - x_n1`` (``n1 < n2 <= N``) with multiplicities."""
    vals = np.asarray(getattr(window, "values", window), dtype=np.float64)
    N = vals.shape[0] if N is None else check_prefix(vals.shape[0], N)
    vals = vals[:N]
    check_ascending(vals, name="window")
    iu = np.triu_indices(N, k=1)
    d = np.sort((vals[None, :] - vals[:, None])[iu])
    if d.size and d[0] <= 0:
        raise ValidationError("nonpositive difference; the window has repeated values")
    if d.size == 0:
        return DifferenceWeights(np.empty(0), np.empty(0, dtype=np.int64), N)
    # a new group starts wherever the gap to the previous value exceeds eps
    starts = np.concatenate([[True], np.diff(d) > coalesce_eps])
    group = np.cumsum(starts) - 1
    alpha = np.bincount(group).astype(np.int64)
    x = d[starts]
    return DifferenceWeights(x, alpha, N)


def l1_norm(weights):
    return int(np.sum(weights.alpha, dtype=np.int64))


def l2_norm_sq(weights, N):
    """``sum alpha(x1) alpha(x2)`` over pairs with ``|x1 - x2| <= 1/N``."""
    N = check_positive(N, "N")
    return near_pair_count(weights.x, 1.0 / N, weights=weights.alpha)


def l2_norm_approx(weights, N):
    return math.sqrt(l2_norm_sq(weights, N))


def dyadic_blocks(weights):
    """Nonempty blocks ``X_k = X cap [2**k, 2**(k + 1))``; entries below 1 are skipped."""
    _, plus = weights.split_unit()
    if len(plus) == 0:
        return []
    ks = np.floor(np.log2(plus.x)).astype(np.int64)
    # log2 can round across a power of two; fix against the exact bounds
    ks = np.where(2.0 ** ks > plus.x, ks - 1, ks)
    ks = np.where(2.0 ** (ks + 1) <= plus.x, ks + 1, ks)
    blocks = []
    for k in np.unique(ks):
        sel = ks == k
        blocks.append(DyadicBlock(plus.x[sel], plus.alpha[sel], weights.source_n, k=int(k)))
    return blocks


def norm_sums_hold(weights, blocks, N):
    """Check ``sum ||alpha_k||_1^2 <= ||alpha||_1^2`` and the same for the ``(2, N)`` norm."""
    l1 = sum(l1_norm(b) ** 2 for b in blocks) <= l1_norm(weights) ** 2
    l2 = sum(l2_norm_sq(b, N) for b in blocks) <= l2_norm_sq(weights, N)
    return l1 and l2


def _multiplier_range(N):
    """Integers ``n`` with ``N < n <= 2N``."""
    return np.arange(math.floor(N) + 1, math.floor(2 * N) + 1, dtype=np.int64)


def _weights_dtype(*arrays):
    out = np.result_type(*[np.asarray(a).dtype for a in arrays])
    if np.issubdtype(out, np.bool_):
        return np.int64
    return out


def _finish(total, dtype):
    if np.issubdtype(dtype, np.integer):
        return int(total)
    if np.issubdtype(dtype, np.complexfloating):
        return complex(total)
    return float(total)


def _brute(mults, mw, x, alpha, K, strict):
    dtype = _weights_dtype(mw, alpha)
    p = mults[:, None] * x[None, :]
    w = (mw[:, None] * alpha[None, :]).astype(dtype)
    pf, wf = p.ravel(), w.ravel()
    total = 0
    for p1, w1 in zip(pf, wf):
        diff = np.abs(p1 - pf)
        hit = diff < K if strict else diff <= K
        total = total + w1 * np.sum(wf[hit])
    return _finish(total, dtype)


def _interval(mults, mw, x, alpha, K, strict):
    """Per ``(m1, x1, x2)`` count the admissible contiguous run of multipliers."""
    dtype = _weights_dtype(mw, alpha)
    n_lo, n_hi = int(mults[0]), int(mults[-1])
    # multipliers are contiguous integers; cumulative beta weights by offset
    cum = np.concatenate([np.zeros(1, dtype=dtype), np.cumsum(mw.astype(dtype))])
    total = 0
    for i1, m1 in enumerate(mults):
        p1 = m1 * x
        w1 = mw[i1] * alpha
        P1 = np.repeat(p1, x.size)
        X2 = np.tile(x, x.size)
        W = (np.repeat(w1, x.size) * np.tile(alpha, x.size)).astype(dtype)

        def reached(m, r):
            d = P1[r] - m * X2[r]
            return d < K if strict else d <= K

        def right_of(m, r):
            d = m * X2[r] - P1[r]
            return d >= K if strict else d > K
        with np.errstate(invalid="ignore"):
            first_guess = np.ceil((P1 - K) / X2)
            end_guess = np.floor((P1 + K) / X2) + 1
        first = monotone_first(np.clip(first_guess, n_lo, n_hi + 1), reached, n_lo, n_hi + 1)
        end = monotone_first(np.clip(end_guess, n_lo, n_hi + 1), right_of, n_lo, n_hi + 1)
        end = np.maximum(end, first)
        run = cum[end - n_lo] - cum[first - n_lo]
        total = total + np.sum(W * run)
    return _finish(total, dtype)


def _productsort(mults, mw, x, alpha, K, strict):
    dtype = _weights_dtype(mw, alpha)
    p = (mults[:, None] * x[None, :]).ravel()
    w = (mw[:, None] * alpha[None, :]).astype(dtype).ravel()
    v, w = sort_with_weights(p, w)
    return near_pair_count(v, K, weights=w, strict=strict)


_METHODS = {"brute": _brute, "interval": _interval, "productsort": _productsort}


def _dispatch(mults, mw, x, alpha, K, method, strict):
    if mults.size == 0 or x.size == 0:
        return 0
    size = mults.size * x.size
    if method == "auto":
        method = "productsort"
    if method not in _METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {sorted(_METHODS)}")
    if method == "brute":
        check_cap(size * size, BRUTE_CAP, "brute-force term count")
    elif method == "interval":
        check_cap(size * x.size, BRUTE_CAP * 4, "interval-per-row term count")
    else:
        check_cap(size, PRODUCT_CAP, "ProductSort product count")
    return _METHODS[method](mults, mw, x, alpha, K, strict)


def count_S(weights, M, K, method="auto", *, strict=False):
    """Weighted count ``S(X, alpha, M, K)`` over ``1 <= m1, m2 <= M``."""
    M = check_positive(M, "M")
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    K = check_positive(K, "K", allow_zero=strict is False)
    mults = np.arange(1, math.floor(M) + 1, dtype=np.int64)
    return _dispatch(mults, np.ones_like(mults), weights.x, weights.alpha, K, method, strict)


def count_S_dyadic(block, N, K, beta=None, method="auto", *, strict=False):
    """``S~(X_k, alpha, beta, N, K)`` with ``N < n1, n2 <= 2N``.

    ``beta`` (optional) is indexed over the multiplier range in order; it may
    be integer, real or complex.  The default is ``beta = 1``.
    """
    N = check_positive(N, "N")
    K = check_positive(K, "K", allow_zero=True)
    mults = _multiplier_range(N)
    if beta is None:
        mw = np.ones_like(mults)
    else:
        mw = np.asarray(beta)
        if mw.shape != mults.shape:
            raise ValidationError(f"beta has length {mw.size}, expected {mults.size} for N={N}")
    return _dispatch(mults, mw, block.x, block.alpha, K, method, strict)


def count_S_multipliers(weights, mults, K, *, strict=False):
    """Weighted count over an explicit increasing multiplier array (ProductSort)."""
    mults = np.asarray(mults, dtype=np.int64)
    return _dispatch(mults, np.ones_like(mults), weights.x, weights.alpha, K, "productsort", strict)


def count_sum_below(weights, M, K, *, strict=True):
    """``sum alpha(x1) alpha(x2)`` over ``m1 x1 + m2 x2 < K`` (``<= K`` if not strict)."""
    mults = np.arange(1, math.floor(M) + 1, dtype=np.int64)
    if mults.size == 0 or len(weights) == 0:
        return 0
    p = (mults[:, None] * weights.x[None, :]).ravel()
    w = np.tile(weights.alpha, mults.size)
    v, w = sort_with_weights(p, w)
    cum = np.concatenate([[0], np.cumsum(w)])
    # for each product p1 count weight of products p2 with p1 + p2 < K
    def over(j, r):
        s = v[r] + v[j]
        return s >= K if strict else s > K
    guess = np.searchsorted(v, K - v, side="left")
    end = monotone_first(guess, over, 0, v.size)
    return int(np.sum(w * cum[end]))
