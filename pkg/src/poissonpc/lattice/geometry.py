"""Two-dimensional geometry of numbers for the bodies
``B(x1, x2, N, K) = {(y1, y2) in [-2N, 2N]^2 : |x1 y1 - x2 y2| <= K}``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .._validation import CapacityError, ValidationError, check_positive

ENUM_CAP = 10**6
COUNT_WINDOW_CAP = 10**4


@dataclass(frozen=True)
class LatticeBody:
    x1: float
    x2: float
    N: float
    K: float

    def __post_init__(self):
        for name in ("x1", "x2", "N", "K"):
            check_positive(getattr(self, name), name)

    @property
    def half_width(self):
        return 2.0 * self.N

    def scaled(self, r):
        """The dilate ``r B``, which is ``B(x1, x2, r N, r K)``."""
        r = check_positive(r, "r")
        return LatticeBody(self.x1, self.x2, self.N * r, self.K * r)


@dataclass(frozen=True)
class MinimaResult:
    lambda1: float
    lambda2: float
    v1: tuple
    v2: tuple


def gauge(body, v):
    """Minkowski functional ``F(v) = inf{lam : v in lam B}``."""
    v1, v2 = (float(c) for c in v)
    if v1 == 0 and v2 == 0:
        raise ValidationError("the gauge of the zero vector is not used")
    w = body.half_width
    return max(abs(v1) / w, abs(v2) / w, abs(body.x1 * v1 - body.x2 * v2) / body.K)


def _gauge_many(body, vecs):
    vecs = np.asarray(vecs, dtype=np.float64)
    w = body.half_width
    return np.maximum.reduce([
        np.abs(vecs[:, 0]) / w,
        np.abs(vecs[:, 1]) / w,
        np.abs(body.x1 * vecs[:, 0] - body.x2 * vecs[:, 1]) / body.K,
    ])


def gauss_reduce(basis, form=None, *, max_iter=10_000):
    """Lagrange-Gauss reduction of a 2-D basis under a positive definite form.

    ``form`` is the 2x2 Gram matrix ``G`` so that ``|v|^2 = v G v^T``
    (identity by default).  Returns ``(b1, b2)`` with
    ``|b1| <= |b2| <= |b2 +- b1|``.
    """
    G = np.eye(2) if form is None else np.asarray(form, dtype=np.float64)
    b1 = np.asarray(basis[0], dtype=np.float64)
    b2 = np.asarray(basis[1], dtype=np.float64)
    if abs(b1[0] * b2[1] - b1[1] * b2[0]) == 0:
        raise ValidationError("degenerate basis")
    integral = np.all(b1 == np.round(b1)) and np.all(b2 == np.round(b2))

    def q(u, v):
        return float(u @ G @ v)

    if q(b1, b1) > q(b2, b2):
        b1, b2 = b2, b1
    for _ in range(max_iter):
        mu = round(q(b1, b2) / q(b1, b1))
        if mu:
            b2 = b2 - mu * b1
        if q(b2, b2) >= q(b1, b1):
            break
        b1, b2 = b2, b1
    else:
        raise RuntimeError(f"Gauss reduction did not terminate after {max_iter} steps")
    if integral:
        b1, b2 = np.round(b1).astype(np.int64), np.round(b2).astype(np.int64)
    return b1, b2


def _body_form(body):
    """Gram matrix of ``(v1/w)^2 + (v2/w)^2 + ((x1 v1 - x2 v2)/K)^2``.

    It satisfies ``F(v)^2 <= Q(v) <= 3 F(v)^2``.
    """
    w = body.half_width
    a = np.array([body.x1, -body.x2]) / body.K
    return np.diag([1.0 / w**2, 1.0 / w**2]) + np.outer(a, a)


def _canonical(v):
    v = (int(v[0]), int(v[1]))
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = (-v[0], -v[1])
    return v


def _tie_key(v):
    return (abs(v[0]), abs(v[1]), v[0], v[1])


def _candidates(body, radius, *, cap=ENUM_CAP):
    """All nonzero integer vectors with ``F(v) <= radius``, up to sign."""
    G = _body_form(body)
    b1, b2 = gauss_reduce(([1, 0], [0, 1]), G)
    b1f, b2f = b1.astype(np.float64), b2.astype(np.float64)
    q11 = b1f @ G @ b1f
    mu = (b1f @ G @ b2f) / q11
    q_star = b2f @ G @ b2f - mu**2 * q11
    # F(v) <= radius implies Q(v) <= 3 radius^2
    bound = 3.0 * radius**2 * (1 + 1e-9)
    c_max = math.floor(math.sqrt(bound / q_star))
    est = (2 * c_max + 1) * (2 * math.sqrt(bound / q11) + 1)
    if est > cap:
        raise CapacityError(f"enumeration of ~{est:.3g} vectors exceeds the cap {cap}")
    out = []
    for c in range(0, c_max + 1):
        rem = bound - c * c * q_star
        if rem < 0:
            continue
        half = math.sqrt(rem / q11)
        centre = -c * mu
        a_lo, a_hi = math.ceil(centre - half), math.floor(centre + half)
        a = np.arange(a_lo, a_hi + 1, dtype=np.int64)
        if c == 0:
            a = a[a > 0]
        if a.size:
            vecs = a[:, None] * b1[None, :] + c * b2[None, :]
            out.append(vecs)
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    vecs = np.concatenate(out)
    keep = _gauge_many(body, vecs) <= radius * (1 + 1e-12)
    return vecs[keep]


def successive_minima(body, *, cap=ENUM_CAP):
    """Exact successive minima of ``body`` with respect to ``Z^2``.

    A Gauss-reduced basis for a quadratic form comparable to the gauge gives
    an upper bound ``U`` for ``lambda_2``; every vector with ``F(v) <= U`` is
    then enumerated.  Attainers are canonicalised to a positive leading
    coordinate and ties broken by ``(|v1|, |v2|, v1, v2)``.
    """
    G = _body_form(body)
    b1, b2 = gauss_reduce(([1, 0], [0, 1]), G)
    upper = max(gauge(body, b1), gauge(body, b2))
    vecs = _candidates(body, upper, cap=cap)
    vals = _gauge_many(body, vecs)
    items = sorted(
        ((float(g), _canonical(v)) for g, v in zip(vals, vecs)),
        key=lambda t: (t[0], _tie_key(t[1])),
    )
    lam1, v1 = items[0]
    for lam2, v2 in items:
        if v1[0] * v2[1] - v1[1] * v2[0] != 0:
            break
    else:
        raise RuntimeError("no independent vector found below the reduced-basis bound")
    return MinimaResult(lam1, lam2, v1, v2)


def _clip(poly, a, b, c):
    """Sutherland-Hodgman clip of ``poly`` to the half plane ``a y1 + b y2 <= c``."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _shoelace(poly):
    if len(poly) < 3:
        return 0.0
    xs = np.array([p[0] for p in poly])
    ys = np.array([p[1] for p in poly])
    return 0.5 * abs(float(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1))))


def body_area(body):
    """``(area, parallelogram_bound)`` with the bound ``4 (2N) K / x1``."""
    w = body.half_width
    square = [(-w, -w), (w, -w), (w, w), (-w, w)]
    poly = _clip(square, body.x1, -body.x2, body.K)
    poly = _clip(poly, -body.x1, body.x2, body.K)
    return _shoelace(poly), 4.0 * w * body.K / body.x1


def lattice_point_count(body):
    """``|B cap Z^2|`` by scanning ``y1`` and counting the admissible ``y2`` run."""
    w = body.half_width
    if w > COUNT_WINDOW_CAP:
        raise CapacityError(f"2N = {w} exceeds the enumeration window {COUNT_WINDOW_CAP}")
    y1 = np.arange(-math.floor(w), math.floor(w) + 1, dtype=np.int64)
    wmax = math.floor(w)
    t = body.x1 * y1
    lo = np.maximum(np.ceil((t - body.K) / body.x2), -wmax).astype(np.int64)
    hi = np.minimum(np.floor((t + body.K) / body.x2), wmax).astype(np.int64)
    # correct division rounding on the exact predicate |x1 y1 - x2 y2| <= K
    for _ in range(3):
        step = (lo - 1 >= -wmax) & (np.abs(t - body.x2 * (lo - 1)) <= body.K)
        lo = np.where(step, lo - 1, lo)
        bad = (lo <= hi) & (np.abs(t - body.x2 * lo) > body.K)
        lo = np.where(bad, lo + 1, lo)
        step = (hi + 1 <= wmax) & (np.abs(t - body.x2 * (hi + 1)) <= body.K)
        hi = np.where(step, hi + 1, hi)
        bad = (lo <= hi) & (np.abs(t - body.x2 * hi) > body.K)
        hi = np.where(bad, hi - 1, hi)
    return int(np.sum(np.maximum(hi - lo + 1, 0)))


def minkowski_check(body):
    """``mu(B) lambda1 lambda2``; Minkowski's second theorem puts it in ``[2, 4]``."""
    m = successive_minima(body)
    area, _ = body_area(body)
    return area * m.lambda1 * m.lambda2, m, area


def count_vs_minima_check(body):
    """``|B cap Z^2| / prod max(1, 1/lambda_j)``."""
    m = successive_minima(body)
    count = lattice_point_count(body)
    denom = max(1.0, 1.0 / m.lambda1) * max(1.0, 1.0 / m.lambda2)
    return count / denom, count, m
