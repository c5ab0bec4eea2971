"""Sequence families: generation, loading and the simple growth checks."""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from ._numeric import horner
from ._validation import ValidationError, check_count, check_values

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Power:
    """``alpha * n**theta``."""

    alpha: float = 1.0
    theta: float = 2.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ValidationError(f"Power needs theta > 0, got {self.theta}")


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in ``n`` with coefficients ordered high to low."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 3:
            raise ValidationError(f"Polynomial needs degree >= 2, got coefficients {coeffs}")
        if coeffs[0] == 0:
            raise ValidationError("Polynomial leading coefficient must be nonzero")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_integral(self):
        return all(float(c).is_integer() for c in self.coeffs)


@dataclass(frozen=True)
class ConvexSynthetic:
    """Gaps ``g_1 = c``, ``g_n = g_{n-1} + c * n**gap_exponent``; values are partial sums."""

    c: float = 1.0
    gap_exponent: float = -0.25

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError(f"ConvexSynthetic needs c > 0, got {self.c}")


@dataclass(frozen=True)
class SigmaBeta:
    """``alpha * sigma_beta(n)`` with ``sigma_beta(n) = sum_{d | n} d**beta``."""

    alpha: float = 1.0
    beta: float = 1.0


@dataclass(frozen=True)
class External:
    path: str


SequenceSpec = Union[Power, Polynomial, ConvexSynthetic, SigmaBeta, External]


@dataclass(frozen=True)
class SequenceWindow:
    """A finite truncation ``x_1, ..., x_N`` kept in natural index order."""

    values: np.ndarray
    spec: object = None
    sorted_ascending: bool = field(default=None)

    def __post_init__(self):
        values = check_values(self.values)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        monotone = bool(np.all(np.diff(values) > 0))
        if self.sorted_ascending is None:
            object.__setattr__(self, "sorted_ascending", monotone)
        elif self.sorted_ascending and not monotone:
            raise ValidationError("sorted_ascending is set but values are not strictly increasing")

    @property
    def N(self):
        return self.values.shape[0]

    def __len__(self):
        return self.N

    def prefix(self, n):
        n = check_count(n, "N")
        if n > self.N:
            raise ValidationError(f"N={n} exceeds the window length {self.N}")
        return SequenceWindow(self.values[:n], self.spec)

    def sorted(self):
        """Ascending copy; raises on repeated values."""
        vals = np.sort(self.values)
        if np.any(np.diff(vals) == 0):
            raise ValidationError("window has repeated values and cannot be strictly ascending")
        return SequenceWindow(vals, self.spec, sorted_ascending=True)

    @property
    def duplicate_count(self):
        return int(self.N - np.unique(self.values).size)


def sigma_sieve(n_max, beta):
    """``sigma_beta(n)`` for ``n = 1..n_max`` by a divisor sieve."""
    n_max = check_count(n_max, "N")
    out = np.zeros(n_max + 1, dtype=np.float64)
    exact = float(beta).is_integer() and beta >= 0
    if exact:
        acc = [0] * (n_max + 1)
        b = int(beta)
        for d in range(1, n_max + 1):
            w = d**b
            for m in range(d, n_max + 1, d):
                acc[m] += w
        out[:] = acc
    else:
        for d in range(1, n_max + 1):
            out[d::d] += float(d) ** beta
    return out[1:]


def generate(spec, N):
    """Evaluate ``spec`` at ``n = 1..N`` (natural index order)."""
    N = check_count(N, "N")
    n = np.arange(1, N + 1, dtype=np.float64)
    if isinstance(spec, Power):
        values = spec.alpha * n**spec.theta
    elif isinstance(spec, Polynomial):
        values = horner(spec.coeffs, n)
    elif isinstance(spec, ConvexSynthetic):
        gaps = np.empty(N)
        gaps[0] = spec.c
        if N > 1:
            gaps[1:] = spec.c + np.cumsum(spec.c * n[1:] ** spec.gap_exponent)
        values = np.cumsum(gaps)
    elif isinstance(spec, SigmaBeta):
        values = spec.alpha * sigma_sieve(N, spec.beta)
    elif isinstance(spec, External):
        window = load_sequence(spec.path)
        return window.prefix(N)
    else:
        raise ValidationError(f"unknown sequence spec {spec!r}")
    return SequenceWindow(values, spec)


def parse_spec(text):
    """Parse the CLI mini-language, e.g. ``power:alpha=1.414,theta=2``."""
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    if kind == "poly":
        try:
            return Polynomial(tuple(float(c) for c in body.split(",")))
        except ValueError as exc:
            raise ValidationError(f"bad polynomial spec {text!r}: {exc}") from exc
    if kind == "file":
        return External(body)
    kwargs = {}
    for item in filter(None, (p.strip() for p in body.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValidationError(f"expected key=value in {text!r}, got {item!r}")
        try:
            kwargs[key.strip()] = float(val)
        except ValueError as exc:
            raise ValidationError(f"bad number {val!r} in {text!r}") from exc
    table = {
        "power": (Power, {"alpha": "alpha", "theta": "theta"}),
        "sigma": (SigmaBeta, {"alpha": "alpha", "beta": "beta"}),
        "convex": (ConvexSynthetic, {"c": "c", "e": "gap_exponent"}),
    }
    if kind not in table:
        raise ValidationError(f"unknown sequence kind {kind!r} in {text!r}")
    cls, names = table[kind]
    unknown = set(kwargs) - set(names)
    if unknown:
        raise ValidationError(f"unknown parameters {sorted(unknown)} for {kind}")
    return cls(**{names[k]: v for k, v in kwargs.items()})


def check_spacing(window, c, eta):
    """True iff ``x_{n+1} - x_n >= c * n**(eta - 1)`` for every ``1 <= n < N``."""
    if not window.sorted_ascending:
        raise ValidationError("check_spacing needs an ascending window")
    if not 0 < eta <= 1:
        raise ValidationError(f"eta must lie in (0, 1], got {eta}")
    gaps = np.diff(window.values)
    n = np.arange(1, window.N, dtype=np.float64)
    return bool(np.all(gaps >= c * n ** (eta - 1.0)))


def short_interval_count(window, X, H):
    """Number of terms with ``X <= x_n <= X + H``."""
    if not H > 0:
        raise ValidationError(f"H must be positive, got {H}")
    vals = np.sort(window.values)
    lo = np.searchsorted(vals, X, side="left")
    hi = np.searchsorted(vals, X + H, side="right")
    return int(hi - lo)


def load_sequence(path):
    """Read one decimal real per line; ``#`` starts a comment line."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"sequence file not found: {path}")
    values = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                x = float(text)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: cannot parse {text!r} as a real") from None
            if not math.isfinite(x):
                raise ValidationError(f"{path}:{lineno}: non-finite value {text!r}")
            values.append(x)
    if not values:
        raise ValidationError(f"{path}: no values")
    window = SequenceWindow(np.array(values), External(str(path)))
    if window.duplicate_count:
        log.warning("%s: %d repeated values", path, window.duplicate_count)
    return window


def save_sequence(window, path):
    lines = [f"# N={window.N} spec={window.spec!r}"]
    lines += [f"{x:.17g}" for x in window.values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
