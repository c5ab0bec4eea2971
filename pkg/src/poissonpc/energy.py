"""Exact and approximate additive energies, plus the convex discretization pipeline."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import fit_exponent, near_pair_count
from ._validation import (
    ValidationError,
    check_ascending,
    check_cap,
    check_count,
    check_positive,
    check_prefix,
)
from .sequences import generate

TWO_POINTER_MAX_N = 4096
BRUTE_MAX_N = 160
SLACK = 1e-9


@dataclass(frozen=True)
class EnergyResult:
    N: int
    gamma: object
    value: int
    method: str
    slack: tuple = field(default=None, compare=False)

    @property
    def boundary_sensitive(self):
        """True when recounting at ``gamma * (1 +- 1e-9)`` changes the count."""
        if self.slack is None:
            return None
        return self.slack[0] != self.value or self.slack[1] != self.value


def _as_values(window):
    return np.asarray(getattr(window, "values", window), dtype=np.float64)


def pair_sum_counts(values):
    """Multiplicity map ``r(s) = #{(a, b) : x_a + x_b = s}`` over ordered pairs."""
    vals = np.asarray(values, dtype=np.int64)
    sums = (vals[:, None] + vals[None, :]).ravel()
    _, counts = np.unique(sums, return_counts=True)
    return counts


def additive_energy_int(A):
    """``E(A) = #{a1 + a2 = a3 + a4}``, computed as ``sum_s r(s)^2``."""
    elems = np.unique(np.asarray(list(A), dtype=np.int64))
    if elems.size == 0:
        return 0
    r = pair_sum_counts(elems)
    return int(np.sum(r.astype(object) ** 2))


def _integer_values(vals):
    if not np.all(np.isfinite(vals)) or np.any(vals != np.round(vals)):
        raise ValidationError("exact energy needs integer-valued terms; use approx_energy instead")
    if np.any(np.abs(vals) >= 2**52):
        raise ValidationError("integer values too large for exact float representation")
    return vals.astype(np.int64)


def truncated_energy(window, N=None):
    """``E_N``: quadruples of indices ``<= N`` with ``x_n1 + x_n2 = x_n3 + x_n4``."""
    vals = _as_values(window)
    N = vals.shape[0] if N is None else check_prefix(vals.shape[0], N)
    ints = _integer_values(vals[:N])
    r = pair_sum_counts(ints)
    return int(np.sum(r.astype(object) ** 2))


def _brute_energy(vals, gamma):
    total = 0
    # x1 - x2 + x3 - x4, one n1 slab at a time
    d34 = vals[:, None] - vals[None, :]
    for x1 in vals:
        d12 = x1 - vals
        expr = d12[:, None, None] + d34[None, :, :]
        total += int(np.count_nonzero(np.abs(expr) < gamma))
    return total


def _two_pointer_energy(vals, gamma):
    sums = np.sort((vals[:, None] + vals[None, :]).ravel())
    return near_pair_count(sums, gamma, strict=True)


def approx_energy(window, N=None, gamma=1.0, *, method="auto", slack=False):
    """``E*_{N,gamma}``: quadruples with ``|x_n1 - x_n2 + x_n3 - x_n4| < gamma``.

    ``method`` is ``"twopointer"`` (sorted pairwise sums, O(N^2 log N)),
    ``"brute"`` (the O(N^4) oracle) or ``"auto"``.
    """
    vals = _as_values(window)
    N = vals.shape[0] if N is None else check_prefix(vals.shape[0], N)
    gamma = check_positive(gamma, "gamma")
    vals = vals[:N]
    if method == "auto":
        method = "twopointer"
    if method == "twopointer":
        check_cap(N, TWO_POINTER_MAX_N, f"TwoPointer N (memory ~{8 * N * N / 2**20:.0f} MiB of sums)")
        count = _two_pointer_energy
        label = "TwoPointer"
    elif method == "brute":
        check_cap(N, BRUTE_MAX_N, "brute-force N")
        count = _brute_energy
        label = "Brute"
    else:
        raise ValidationError(f"unknown energy method {method!r}")
    value = count(vals, gamma)
    bounds = None
    if slack:
        bounds = (count(vals, gamma * (1 - SLACK)), count(vals, gamma * (1 + SLACK)))
    return EnergyResult(N=N, gamma=gamma, value=value, method=label, slack=bounds)


def energy_exponent(spec, Ns, gamma_rule=("const", 1.0)):
    """Fit ``log2 E*`` against ``log2 N``.

    ``gamma_rule`` is ``("const", gamma)`` or ``"one_over_n"``.
    """
    Ns = [check_count(n, "N") for n in Ns]
    if len(Ns) < 3:
        raise ValidationError("energy_exponent needs at least 3 values of N")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValidationError("Ns must be strictly ascending")
    window = generate(spec, Ns[-1]) if not hasattr(spec, "values") else spec
    values = []
    for n in Ns:
        if gamma_rule == "one_over_n":
            gamma = 1.0 / n
        else:
            kind, gamma = gamma_rule
            if kind != "const":
                raise ValidationError(f"unknown gamma rule {gamma_rule!r}")
        values.append(approx_energy(window, n, gamma).value)
    return fit_exponent(Ns, values), values


def union_energy_check(sets):
    """``(E(union)^(1/4), sum_j E(A_j)^(1/4))`` for pairwise disjoint integer sets."""
    sets = [set(int(a) for a in s) for s in sets]
    if not sets or any(not s for s in sets):
        raise ValidationError("union_energy_check needs nonempty sets")
    union = set()
    for s in sets:
        if union & s:
            raise ValidationError("sets are not pairwise disjoint")
        union |= s
    lhs = additive_energy_int(union) ** 0.25
    rhs = math.fsum(additive_energy_int(s) ** 0.25 for s in sets)
    return lhs, rhs


def is_convex(values):
    """True iff consecutive gaps strictly increase."""
    vals = np.asarray(getattr(values, "values", values), dtype=np.float64)
    if vals.shape[0] < 3:
        raise ValidationError("is_convex needs at least 3 values")
    return bool(np.all(np.diff(vals, n=2) > 0))


def discretize_convex(window, k_exponent=0.01, *, K=None):
    """Return ``(K, X)`` with ``X_n = floor(K x_n)`` and ``K = floor(N**k_exponent)``."""
    vals = _as_values(window)
    N = vals.shape[0]
    if N >= 3 and not is_convex(vals):
        raise ValidationError("discretize_convex needs a convex window")
    if K is None:
        K = math.floor(N**k_exponent + 1e-12)
    K = check_count(K, "K")
    X = np.floor(K * vals).astype(np.int64)
    if np.unique(X).size != N:
        raise ValidationError(f"floor(K x_n) collides for K={K}; window too flat")
    return K, X


def residue_partition(integers, K):
    """Split ``X_1..X_N`` into classes ``{X_j : j = k mod K}`` for ``k = 0..K-1``."""
    K = check_count(K, "K")
    items = list(integers)
    return [items[(k - 1) % K::K] for k in range(K)]


def growth_sum(window, N=None):
    """``sum 1/sqrt(x_n2 - x_n1)`` over ``n1 < n2 <= N`` with gap at least 1."""
    vals = _as_values(window)
    N = vals.shape[0] if N is None else check_prefix(vals.shape[0], N)
    if N < 2:
        raise ValidationError("growth_sum needs N >= 2")
    vals = vals[:N]
    check_ascending(vals, name="window")
    iu = np.triu_indices(N, k=1)
    d = (vals[None, :] - vals[:, None])[iu]
    d = d[d >= 1.0]
    return float(np.sum(d**-0.5))


def binned_r(window, N=None):
    """Histogram ``r(k)`` of pairwise differences in ``[k, k + 1)``, ``k >= 1``."""
    vals = _as_values(window)
    N = vals.shape[0] if N is None else check_prefix(vals.shape[0], N)
    vals = vals[:N]
    check_ascending(vals, name="window")
    iu = np.triu_indices(N, k=1)
    d = (vals[None, :] - vals[:, None])[iu]
    d = d[d >= 1.0]
    ks, counts = np.unique(np.floor(d).astype(np.int64), return_counts=True)
    return {int(k): int(c) for k, c in zip(ks, counts)}


def near_sum_count(values, K):
    """``#{|X_n1 - X_n2 + X_n3 - X_n4| <= K}`` for integer values."""
    ints = np.asarray(values, dtype=np.int64)
    sums = np.sort((ints[:, None] + ints[None, :]).ravel()).astype(np.float64)
    return near_pair_count(sums, float(K))

