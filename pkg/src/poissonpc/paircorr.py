"""Pair-correlation counts of a sequence reduced modulo one."""

from dataclasses import dataclass

import numpy as np

from ._numeric import _boundary, window_bounds
from ._validation import ValidationError, check_positive

NEAREST = "nearest"
FRACTIONAL = "frac"
_CONVENTIONS = (NEAREST, FRACTIONAL)
_WRAP_EPS = 1e-15


@dataclass(frozen=True)
class PairCorrConfig:
    s_grid: tuple = (1.0,)
    convention: str = NEAREST
    scale_alpha: float = 1.0

    def __post_init__(self):
        grid = tuple(float(s) for s in self.s_grid)
        object.__setattr__(self, "s_grid", grid)
        if not grid:
            raise ValidationError("s_grid must be nonempty")
        if any(s <= 0 for s in grid):
            raise ValidationError("every s must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("s_grid must be strictly ascending")
        if self.convention not in _CONVENTIONS:
            raise ValidationError(f"convention must be one of {_CONVENTIONS}, got {self.convention!r}")


@dataclass(frozen=True)
class PairCorrCurve:
    N: int
    s: tuple
    counts: tuple

    @property
    def R(self):
        return tuple(c / self.N for c in self.counts)

    def rows(self):
        for s, c in zip(self.s, self.counts):
            yield s, c, c / self.N

    def __len__(self):
        return len(self.s)


def reduce_mod_one(values, scale=1.0):
    """``frac(scale * x)`` with values within 1e-15 of 1.0 clamped to 0."""
    u = np.asarray(values, dtype=np.float64) * scale
    u = u - np.floor(u)
    u[u >= 1.0 - _WRAP_EPS] = 0.0
    return u


def _threshold(s, N, convention):
    t = check_positive(s, "s") / N
    if convention == NEAREST and t > 0.5:
        raise ValidationError(f"s/N = {t} exceeds 1/2 under the nearest-integer convention")
    return t


def _count_nearest(u_sorted, t):
    """Ordered pairs ``i != j`` with ``min(d, 1 - d) <= t`` where ``d = |u_i - u_j|``."""
    n = u_sorted.shape[0]
    idx = np.arange(n)
    _, hi = window_bounds(u_sorted, t)
    # rows i: direct neighbours j in (i, hi_i) satisfy d <= t
    direct = np.sum(hi - idx - 1, dtype=np.int64)

    def wraps(j, r):
        return (1.0 - (u_sorted[j] - u_sorted[r])) <= t
    guess = np.searchsorted(u_sorted, u_sorted + (1.0 - t), side="left")
    first_wrap = _boundary(u_sorted, guess, wraps)
    first_wrap = np.maximum(first_wrap, hi)
    wrapped = np.sum(n - first_wrap, dtype=np.int64)
    return 2 * int(direct + wrapped)


def _count_fractional(u_sorted, t):
    """Ordered pairs ``i != j`` with ``frac(u_i - u_j) <= t``.

    For ``u_i >= u_j`` the fractional part is ``u_i - u_j``; otherwise it is
    ``1 - (u_j - u_i)``.  The relation is not symmetric in ``i, j``.
    """
    n = u_sorted.shape[0]
    idx = np.arange(n)
    lo, hi = window_bounds(u_sorted, t)
    # pairs (i, j) with u_j <= u_i: j in [lo_i, i) plus ties above i
    below = np.sum(idx - lo, dtype=np.int64)
    ties_above = np.sum(_ties_above(u_sorted), dtype=np.int64)

    def wraps(j, r):
        return (1.0 - (u_sorted[j] - u_sorted[r])) <= t
    guess = np.searchsorted(u_sorted, u_sorted + (1.0 - t), side="left")
    first_wrap = _boundary(u_sorted, guess, wraps)
    # j above i with u_j > u_i wraps to 1 - (u_j - u_i)
    strict_above = idx + 1 + _ties_above(u_sorted)
    first_wrap = np.maximum(first_wrap, strict_above)
    wrapped = np.sum(n - first_wrap, dtype=np.int64)
    return int(below + ties_above + wrapped)


def _ties_above(u_sorted):
    """For each i, the number of j > i with u_j == u_i."""
    last = np.searchsorted(u_sorted, u_sorted, side="right")
    return last - np.arange(u_sorted.shape[0]) - 1


def _count(u_sorted, t, convention):
    if convention == NEAREST:
        return _count_nearest(u_sorted, t)
    return _count_fractional(u_sorted, t)


def pair_correlation(values, s, config=None, *, method="sort"):
    """Return ``(count, R)`` for one ``s``.

    ``count`` is the number of ordered pairs ``n1 != n2`` whose scaled,
    reduced values are within ``s/N`` (non-strict); ``R = count / N``.
    ``method="brute"`` runs the O(N^2) double loop used as the oracle.
    """
    config = config or PairCorrConfig(s_grid=(s,))
    values = getattr(values, "values", values)
    values = np.asarray(values, dtype=np.float64)
    N = values.shape[0]
    if N < 2:
        raise ValidationError("pair correlation needs N >= 2")
    t = _threshold(s, N, config.convention)
    u = reduce_mod_one(values, config.scale_alpha)
    if method == "brute":
        count = brute_pair_count(u, t, config.convention)
    elif method == "sort":
        count = _count(np.sort(u), t, config.convention)
    else:
        raise ValidationError(f"unknown method {method!r}")
    return count, count / N


def brute_pair_count(u, t, convention=NEAREST, *, chunk=2048):
    """O(N^2) count over reduced values ``u``; the independent oracle."""
    u = np.asarray(u, dtype=np.float64)
    n = u.shape[0]
    total = 0
    for start in range(0, n, chunk):
        rows = u[start:start + chunk, None]
        if convention == NEAREST:
            d = np.abs(rows - u[None, :])
            d = np.minimum(d, 1.0 - d)
        else:
            d = rows - u[None, :]
            d = np.where(d >= 0, d, 1.0 + d)
        hit = d <= t
        block = np.arange(start, min(start + chunk, n))
        hit[block - start, block] = False
        total += int(np.count_nonzero(hit))
    return total


def pair_correlation_curve(values, config):
    """Counts over the whole ``s`` grid, sharing one sort."""
    values = np.asarray(getattr(values, "values", values), dtype=np.float64)
    N = values.shape[0]
    if N < 2:
        raise ValidationError("pair correlation needs N >= 2")
    thresholds = [_threshold(s, N, config.convention) for s in config.s_grid]
    u = np.sort(reduce_mod_one(values, config.scale_alpha))
    counts = tuple(_count(u, t, config.convention) for t in thresholds)
    return PairCorrCurve(N=N, s=config.s_grid, counts=counts)


def ppc_deviation(curve):
    """``max |R(s) / (2s) - 1|`` over the curve rows."""
    rows = list(curve.rows()) if hasattr(curve, "rows") else list(curve)
    if not rows:
        raise ValidationError("empty pair-correlation curve")
    devs = []
    for row in rows:
        s, R = row[0], row[-1]
        devs.append(abs(R / (2.0 * s) - 1.0))
    return max(devs)
