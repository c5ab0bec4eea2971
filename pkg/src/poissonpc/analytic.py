"""Dirichlet-polynomial mean values, characters, Weyl sums and Hua-type moments."""

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numeric import horner
from ._validation import CapacityError, ValidationError, check_cap, check_count, check_positive
from .energy import approx_energy
from .lattice.sums import _multiplier_range, count_S_dyadic
from .reports import RatioReport
from .sequences import Polynomial, generate

GRID_CAP = 2**24
POINTS_PER_PERIOD = 24
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MomentResult:
    value: float
    grid_size: int
    error_estimate: float
    method: str


def _points(points):
    """Accept ``[(x, a), ...]`` or anything with ``.x`` and ``.alpha``."""
    if hasattr(points, "x") and hasattr(points, "alpha"):
        return np.asarray(points.x, dtype=np.float64), np.asarray(points.alpha)
    arr = list(points)
    x = np.array([p[0] for p in arr], dtype=np.float64)
    a = np.array([p[1] for p in arr])
    return x, a


def dirichlet_poly(points, t):
    """``sum alpha(x) x^(-it)`` with compensated accumulation."""
    x, a = _points(points)
    if np.any(x <= 0):
        raise ValidationError("Dirichlet polynomial frequencies need x > 0")
    phase = -float(t) * np.log(x)
    terms = a * np.exp(1j * phase)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _simpson(y, h):
    n = y.shape[0] - 1
    return h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:n:2]) + 2.0 * np.sum(y[2:n - 1:2]))


class _Factor:
    """A trigonometric sum ``sum w_j exp(i f_j t)`` evaluated on t-grids."""

    def __init__(self, freqs, weights):
        self.freqs = np.asarray(freqs, dtype=np.float64)
        self.weights = np.asarray(weights, dtype=np.complex128)

    @property
    def spread(self):
        if self.freqs.size == 0:
            return 0.0
        return float(self.freqs.max() - self.freqs.min())

    def __call__(self, t, chunk=4096):
        out = np.empty(t.shape[0], dtype=np.complex128)
        step = max(1, chunk * 64 // max(1, self.freqs.size))
        for s in range(0, t.shape[0], step):
            tt = t[s:s + step]
            out[s:s + step] = np.exp(1j * np.outer(tt, self.freqs)) @ self.weights
        return out


def _dirichlet_factor(x, a):
    if np.any(np.asarray(x) <= 0):
        raise ValidationError("Dirichlet polynomial frequencies need x > 0")
    return _Factor(-np.log(x), a)


def _n_factor(N, beta=None):
    n = _multiplier_range(N).astype(np.float64)
    b = np.ones_like(n) if beta is None else np.asarray(beta)
    if b.shape != n.shape:
        raise ValidationError(f"beta has length {b.size}, expected {n.size}")
    return _Factor(-np.log(n), b)


def _integrate_sq(factors, T, points_per_period=POINTS_PER_PERIOD, normalise=True):
    """``(1/T) int_{-T}^{T} |prod factors|^2 dt`` by Simpson with a grid-doubling check."""
    T = check_positive(T, "T")
    band = sum(f.spread for f in factors)
    if band == 0:
        intervals = 2
    else:
        h = TWO_PI / (band * points_per_period)
        intervals = max(2, math.ceil(2 * T / h))
    intervals += intervals % 2
    check_cap(2 * intervals + 1, GRID_CAP, "quadrature grid size")

    def run(n):
        t = np.linspace(-T, T, n + 1)
        y = np.ones(n + 1, dtype=np.complex128)
        for f in factors:
            y *= f(t)
        return _simpson(np.abs(y) ** 2, 2 * T / n)

    coarse = run(intervals)
    fine = run(2 * intervals)
    scale = 1.0 / T if normalise else 1.0
    return MomentResult(
        value=float(fine * scale),
        grid_size=2 * intervals + 1,
        error_estimate=float(abs(fine - coarse) / 15.0 * scale),
        method="Refined",
    )


def mean_value_integral(points, T, *, N=None, beta=None, kind="dirichlet",
                        points_per_period=POINTS_PER_PERIOD):
    """``(1/T) int_{-T}^{T} |D(t)|^2 dt``.

    ``kind="dirichlet"``: ``D(t) = sum alpha(x) x^(-it)``, multiplied by
    ``sum_{N < n <= 2N} beta(n) n^(-it)`` when ``N`` is given.
    ``kind="additive"``: ``D(t) = sum alpha_m e(x_m t)`` with ``e(u) = exp(2 pi i u)``.
    """
    x, a = _points(points)
    if kind == "dirichlet":
        factors = [_dirichlet_factor(x, a)]
        if N is not None:
            factors.append(_n_factor(N, beta))
    elif kind == "additive":
        if N is not None:
            raise ValidationError("the additive kind has no n-sum")
        factors = [_Factor(TWO_PI * x, a)]
    else:
        raise ValidationError(f"unknown kind {kind!r}")
    return _integrate_sq(factors, T, points_per_period)


def mean_value_closed_form(points, T, *, kind="additive"):
    """Exact ``(1/T) int_{-T}^{T} |D|^2`` from ``int e^{i w t} dt = 2 sin(w T) / w``."""
    x, a = _points(points)
    freqs = TWO_PI * x if kind == "additive" else -np.log(x)
    w = freqs[:, None] - freqs[None, :]
    kernel = 2.0 * np.sinc(w * T / math.pi)
    a = a.astype(np.complex128)
    return float(np.real(a @ kernel @ np.conj(a)))


def close_pair_count(points, T):
    """``sum |alpha_i alpha_j|`` over pairs with ``2T |x_i - x_j| <= 1``."""
    x, a = _points(points)
    close = 2.0 * T * np.abs(x[:, None] - x[None, :]) <= 1.0
    w = np.abs(a)
    return float(w @ close @ w)


def sum_integral_sandwich(block, N, T, beta=None):
    """Compare ``S~(X_k, alpha, N, 2^k N / T)`` with the Dirichlet mean value.

    Returns ``(lower, upper)``: ``lower`` has ``lhs = S~`` and ``rhs`` the
    integral, ``upper`` the reverse.  Both ratios should stay bounded.
    """
    K = 2.0**block.k * N / T
    absbeta = None if beta is None else np.abs(beta)
    s_tilde = count_S_dyadic(block, N, K, beta=absbeta)
    if absbeta is not None:
        s_tilde = float(np.real(s_tilde))
    mv = mean_value_integral(block, T, N=N, beta=beta)
    params = {"k": block.k, "N": N, "T": T, "K": K, "quad_error": mv.error_estimate}
    lower = RatioReport("sum_integral_lower", lhs=float(s_tilde), rhs=mv.value, params=params)
    upper = RatioReport("sum_integral_upper", lhs=mv.value, rhs=float(s_tilde), params=params)
    return lower, upper


def is_prime(q):
    q = int(q)
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def primitive_root(q):
    phi = q - 1
    factors = {p for p in range(2, phi + 1) if phi % p == 0 and is_prime(p)}
    for g in range(2, q):
        if all(pow(g, phi // p, q) != 1 for p in factors):
            return g
    return 1


@dataclass(frozen=True)
class CharacterTable:
    """All Dirichlet characters modulo a prime ``q``.

    ``values[a, j]`` is ``chi_a(j)`` for ``j = 0..q-1``; ``chi_0`` is principal.
    """

    q: int
    primitive_root: int
    values: np.ndarray

    def __len__(self):
        return self.values.shape[0]

    def __call__(self, a, j):
        return self.values[a, np.asarray(j) % self.q]


def dirichlet_characters(q):
    """Characters mod prime ``q`` via discrete logarithms to the smallest primitive root."""
    q = check_count(q, "q", minimum=2)
    if not is_prime(q):
        raise ValidationError(f"q={q} is not prime")
    if q > 10**4:
        raise ValidationError(f"q={q} exceeds the table limit 10^4")
    g = primitive_root(q)
    phi = q - 1
    dlog = np.zeros(q, dtype=np.int64)
    power = 1
    for ell in range(phi):
        dlog[power] = ell
        power = power * g % q
    a = np.arange(phi)[:, None]
    values = np.exp(2j * math.pi * a * dlog[None, :] / phi)
    values[:, 0] = 0.0
    gram = values[:, 1:] @ np.conj(values[:, 1:]).T
    if not np.allclose(gram, phi * np.eye(phi), atol=1e-8 * phi):
        raise RuntimeError(f"character orthogonality failed for q={q}")
    return CharacterTable(q=q, primitive_root=g, values=values)


def smallest_prime_between(lo, hi):
    for q in range(math.ceil(lo), math.floor(hi) + 1):
        if is_prime(q):
            return q
    raise ValidationError(f"no prime in [{lo}, {hi}]")


def amplification_check(block, N, J, T):
    """Range-lengthening by characters: ``J * I(N) / I(theta J N)`` minimised over theta.

    ``I(L) = int_{-T}^{T} |sum alpha(x) x^(-it) sum_{L < m <= 2L} m^(-it)|^2 dt``.
    The report also carries the character identity
    ``sum_chi sigma(chi) / (phi(q) * #{j ~ J} * I(N))``, which is exactly 1 when
    ``q > J``.
    """
    J = check_count(J, "J")
    q = smallest_prime_between(4 * J, 8 * J)
    table = dirichlet_characters(q)
    x, a = _points(block)
    A = _dirichlet_factor(x, a)
    lhs = _integrate_sq([A, _n_factor(N)], T, normalise=False).value
    rhs = {}
    for theta in (1, 2):
        rhs[theta] = _integrate_sq([A, _n_factor(theta * J * N)], T, normalise=False).value
    ratios = {theta: lhs * J / rhs[theta] for theta in rhs}
    best = min(ratios, key=ratios.get)

    js = _multiplier_range(J)
    sigma_total = 0.0
    for row in table.values:
        chi = _Factor(-np.log(js.astype(np.float64)), row[js % q])
        sigma_total += _integrate_sq([A, _n_factor(N), chi], T, normalise=False).value
    identity = sigma_total / ((q - 1) * js.size * lhs)
    params = {"k": getattr(block, "k", None), "N": N, "J": J, "T": T, "q": q,
              "character_identity": identity}
    return RatioReport("amplification", lhs=lhs * J, rhs=rhs[best], params=params, witness=best)


def _poly_values_exact(coeffs, N):
    """Integer polynomial values ``p(1..N)`` as Python ints, or None if not integral."""
    fracs = [Fraction(c).limit_denominator(10**12) for c in coeffs]
    if any(f.denominator != 1 for f in fracs) or any(float(f) != float(c) for f, c in zip(fracs, coeffs)):
        return None
    out = []
    for n in range(1, N + 1):
        acc = 0
        for c in fracs:
            acc = acc * n + int(c)
        out.append(acc)
    return out


def weyl_sum(coeffs, N, x):
    """``sum_{n <= N} e(p(n) x)``, coefficients high to low."""
    N = check_count(N, "N", minimum=0)
    if N == 0:
        return 0j
    exact = _poly_values_exact(coeffs, N)
    if exact is not None and isinstance(x, Fraction):
        phases = np.array([float((v * x) % 1) for v in exact])
    elif exact is not None:
        phases = np.array([v * float(x) for v in exact], dtype=np.float64) % 1.0
    else:
        n = np.arange(1, N + 1, dtype=np.float64)
        phases = (horner(coeffs, n) * float(x)) % 1.0
    terms = np.exp(2j * math.pi * phases)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _power_of_sq(mod_sq, s):
    """``(|S|^2)^s`` by repeated squaring."""
    result = np.ones_like(mod_sq)
    base = mod_sq.copy()
    while s:
        if s & 1:
            result *= base
        s >>= 1
        if s:
            base = base * base
    return result


def _nyquist_moment(values, s, G):
    v = np.asarray(values, dtype=object)
    shifted = np.array([int(a - min(values)) for a in values], dtype=np.int64)
    h = np.bincount(shifted % G, minlength=G).astype(np.float64)
    S = np.fft.ifft(h) * G
    return float(np.mean(_power_of_sq(np.abs(S) ** 2, s))), v


def hua_moment(coeffs, N, two_s, method="auto", *, tol=1e-10, max_grid=GRID_CAP):
    """``int_0^1 |sum_{n <= N} e(p(n) x)|^(2s) dx``.

    Integer polynomials use an FFT on a uniform grid finer than the
    trigonometric degree, where the trapezoid rule is exact; the error
    estimate is the change on doubling that grid.  Real polynomials use
    composite Simpson with grid doubling until the estimate drops below
    ``tol`` (relative).
    """
    N = check_count(N, "N")
    two_s = check_count(two_s, "2s", minimum=2)
    if two_s % 2:
        raise ValidationError("the moment exponent must be even")
    s = two_s // 2
    exact = _poly_values_exact(coeffs, N)
    if method == "auto":
        method = "nyquist" if exact is not None else "refined"
    if method == "nyquist":
        if exact is None:
            raise ValidationError("NyquistExact needs integer coefficients")
        top = max(abs(v) for v in exact)
        G = 1 << max(4, (two_s * top + 1).bit_length())
        check_cap(2 * G, max_grid, "Nyquist grid size")
        value, _ = _nyquist_moment(exact, s, G)
        check, _ = _nyquist_moment(exact, s, 2 * G)
        return MomentResult(value, G, abs(check - value), "NyquistExact")
    if method != "refined":
        raise ValidationError(f"unknown moment method {method!r}")
    n = np.arange(1, N + 1, dtype=np.float64)
    pv = horner(coeffs, n)

    def simpson(intervals):
        x = np.linspace(0.0, 1.0, intervals + 1)
        y = np.empty(intervals + 1)
        step = max(1, 2**22 // N)
        for a in range(0, x.size, step):
            S = np.exp(2j * math.pi * np.outer(x[a:a + step], pv)).sum(axis=1)
            y[a:a + step] = _power_of_sq(np.abs(S) ** 2, s)
        return _simpson(y, 1.0 / intervals)

    intervals = 1 << max(6, (int(np.max(np.abs(pv)) * two_s) + 1).bit_length())
    prev = simpson(intervals)
    while True:
        intervals *= 2
        if intervals + 1 > max_grid:
            raise CapacityError(f"Simpson grid would exceed {max_grid} points")
        cur = simpson(intervals)
        err = abs(cur - prev) / 15.0
        if err <= tol * max(1.0, abs(cur)):
            return MomentResult(float(cur), intervals + 1, float(err), "Refined")
        prev = cur


def equal_sum_count(values, s):
    """Ordered solutions of ``v(n_1) + ... + v(n_s) = v(m_1) + ... + v(m_s)``.

    Exact integer arithmetic by convolving the value distribution ``s`` times.
    """
    s = check_count(s, "s")
    base = Counter(int(v) for v in values)
    dist = Counter({0: 1})
    for _ in range(s):
        nxt = Counter()
        for total, c in dist.items():
            for v, m in base.items():
                nxt[total + v] += c * m
        dist = nxt
    return sum(c * c for c in dist.values())


def vinogradov_count(k, s, N, *, cap=10**7):
    """``J_{s,k}(N)``: solutions of ``sum n_i^j = sum m_i^j`` for ``j = 1..k``, variables in ``[1, N]``."""
    k, s, N = check_count(k, "k"), check_count(s, "s"), check_count(N, "N")
    check_cap(N**s, cap, "N^s tuples")
    powers = np.arange(1, N + 1, dtype=np.int64)[:, None] ** np.arange(1, k + 1, dtype=np.int64)[None, :]
    acc = np.zeros((1, k), dtype=np.int64)
    for _ in range(s):
        acc = (acc[:, None, :] + powers[None, :, :]).reshape(-1, k)
    radices = [s * N**j + 1 for j in range(1, k + 1)]
    if math.prod(radices) < 2**62:
        key = np.zeros(acc.shape[0], dtype=np.int64)
        scale = 1
        for j in range(k):
            key += acc[:, j] * scale
            scale *= radices[j]
        _, counts = np.unique(key, return_counts=True)
    else:
        _, counts = np.unique(acc, axis=0, return_counts=True)
    return int(np.sum(counts.astype(object) ** 2))


def quadruple_moment_check(coeffs, N):
    """``E*_N`` (gamma = 1) against the fourth moment of the Weyl sum of ``p``."""
    window = generate(Polynomial(tuple(coeffs)), N)
    energy = approx_energy(window, N, 1.0).value
    moment = hua_moment(coeffs, N, 4)
    return RatioReport("quadruple_moment", lhs=float(energy), rhs=moment.value,
                       params={"N": N, "coeffs": tuple(coeffs), "quad_error": moment.error_estimate})
