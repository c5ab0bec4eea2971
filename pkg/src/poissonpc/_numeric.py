"""Sorted-array counting kernels and small numerical utilities.

The counting kernels answer "how many (weighted) ordered pairs lie within
distance t" on a sorted array.  ``np.searchsorted`` gives a first guess for
each window boundary, which is then corrected against the exact
floating-point predicate ``fl(v[j] - v[i]) <= t``.  The corrected counts are
therefore identical to a brute-force double loop that evaluates the same
predicate, not merely close to it.
"""

from dataclasses import dataclass

import numpy as np


def monotone_first(guess, pred, lo, hi):
    """Smallest ``j`` in ``[lo, hi]`` with ``pred(j)`` true, per row.

    ``pred(j, rows)`` evaluates a predicate that is false-then-true along
    ``j`` for each row, for ``j`` in ``[lo, hi)``; ``hi`` means "never".
    ``guess`` is refined by stepping in both directions, so a good guess
    costs O(1) passes.
    """
    j = np.clip(np.asarray(guess, dtype=np.int64), lo, hi)
    rows = np.arange(j.shape[0])
    while True:
        idx = np.nonzero(j > lo)[0]
        if idx.size == 0:
            break
        move = idx[pred(j[idx] - 1, rows[idx])]
        if move.size == 0:
            break
        j[move] -= 1
    while True:
        idx = np.nonzero(j < hi)[0]
        if idx.size == 0:
            break
        move = idx[~pred(j[idx], rows[idx])]
        if move.size == 0:
            break
        j[move] += 1
    return j


def _boundary(values, guess, pred):
    return monotone_first(guess, pred, 0, values.shape[0])


def window_bounds(v, t, *, strict=False, centers=None):
    """Index windows ``[lo, hi)`` of entries within ``t`` of each center.

    ``v`` must be sorted ascending.  Membership of ``v[j]`` in the window of
    center ``c`` is the exact predicate ``fl(|v[j] - c|) <= t`` (``< t`` when
    ``strict``).  ``centers`` defaults to ``v`` itself.
    """
    v = np.asarray(v, dtype=np.float64)
    c = v if centers is None else np.asarray(centers, dtype=np.float64)
    if strict:
        def above(j, r):
            return (v[j] - c[r]) >= t

        def inside_left(j, r):
            return (c[r] - v[j]) < t
        hi_guess = np.searchsorted(v, c + t, side="left")
        lo_guess = np.searchsorted(v, c - t, side="right")
    else:
        def above(j, r):
            return (v[j] - c[r]) > t

        def inside_left(j, r):
            return (c[r] - v[j]) <= t
        hi_guess = np.searchsorted(v, c + t, side="right")
        lo_guess = np.searchsorted(v, c - t, side="left")
    hi = _boundary(v, hi_guess, above)
    lo = _boundary(v, lo_guess, inside_left)
    return lo, np.maximum(hi, lo)


def near_pair_count(v, t, *, weights=None, strict=False):
    """Weighted count of ordered pairs ``(i, j)`` with ``|v[i] - v[j]| <= t``.

    Pairs with ``i == j`` are included.  ``v`` must be sorted ascending and
    ``weights`` aligned with it.  Integer weights give an exact Python int;
    float or complex weights give the corresponding scalar.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return 0
    lo, hi = window_bounds(v, t, strict=strict)
    if weights is None:
        return int(np.sum(hi - lo, dtype=np.int64))
    w = np.asarray(weights)
    cum = np.concatenate([np.zeros(1, dtype=w.dtype), np.cumsum(w)])
    total = np.sum(w * (cum[hi] - cum[lo]))
    if np.issubdtype(w.dtype, np.integer):
        return int(total)
    return total.item()


def sort_with_weights(values, weights=None):
    order = np.argsort(values, kind="stable")
    v = np.asarray(values)[order]
    if weights is None:
        return v, None
    return v, np.asarray(weights)[order]


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of ``log2 value = slope * log2 N + intercept``."""

    Ns: tuple
    log_values: tuple
    slope: float
    intercept: float
    residual: float

    def predict(self, n):
        return 2.0 ** (self.slope * np.log2(n) + self.intercept)


def fit_exponent(ns, values, *, offset=0.0):
    """Ordinary least squares on ``(log2 N, log2(value + offset))``.

    ``residual`` is the root-mean-square deviation of the fitted line in
    log2 units.
    """
    ns = np.asarray(ns, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64) + offset
    if ns.size < 3:
        raise ValueError("an exponent fit needs at least 3 data points")
    if np.any(ns <= 0) or np.any(vals <= 0):
        raise ValueError("exponent fits need positive N and positive values")
    lx = np.log2(ns)
    ly = np.log2(vals)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return ExponentFit(
        Ns=tuple(int(n) if float(n).is_integer() else float(n) for n in ns),
        log_values=tuple(float(y) for y in ly),
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def horner(coeffs, x):
    """Evaluate a polynomial with coefficients ordered high to low."""
    acc = np.zeros_like(np.asarray(x, dtype=np.float64))
    for c in coeffs:
        acc = acc * x + c
    return acc
