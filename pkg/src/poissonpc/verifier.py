"""Numerical stress tests for the recursive counting inequalities and the
two counting conditions that imply metric Poissonian pair correlation.

Each ``verify_*`` function evaluates both sides of one inequality on a
concrete instance and returns a :class:`RatioReport`.  Where an inequality
asserts that *some* parameter choice (a dyadic length, a dilation factor)
works, the harness takes the most favourable choice, i.e. the one with the
smallest ratio, and records it as the witness.  Growth factors written as
``X^{o(1)}`` are instantiated as ``X^eps``.
"""

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._numeric import fit_exponent, monotone_first
from ._validation import ValidationError, check_count, check_positive
from .energy import energy_exponent
from .lattice.geometry import LatticeBody, count_vs_minima_check, minkowski_check
from .lattice.sums import (count_S, count_S_dyadic, count_sum_below, differences, dyadic_blocks,
                           l1_norm, l2_norm_sq)
from .paircorr import NEAREST, PairCorrConfig, brute_pair_count, pair_correlation_curve, ppc_deviation, reduce_mod_one
from .reports import RatioReport, SweepResult
from .sequences import Polynomial, Power, generate, parse_spec

log = logging.getLogger(__name__)

DEFAULT_EPS = 0.1


def _dyadic_range(top):
    """Powers of two ``1, 2, 4, ... <= top``."""
    out, n = [], 1
    while n <= top:
        out.append(n)
        n *= 2
    return out


def _check_plus(weights):
    if len(weights) and weights.x[0] < 1:
        raise ValidationError("the inequality harness needs difference values >= 1")


def _best(name, lhs, candidates, params):
    """Report for the candidate right-hand side giving the smallest ratio."""
    witness, rhs = max(candidates, key=lambda c: c[1])
    return RatioReport(name, lhs=float(lhs), rhs=float(rhs), params=params, witness=witness)


def verify_dyadic_partition(weights, M, K, *, eps=DEFAULT_EPS):
    """``S(X, M, K)`` against ``sum_k S~(X_k, N, 4K)`` for the best dyadic ``N``.

    Candidates are ``N = 1, 2, 4, ... <= M``, the dyadic lengths whose range
    ``N < n <= 2N`` meets ``[1, M]`` and stays within ``2M``.

    ``params["allowance"]`` carries the ``(MK)^eps`` growth factor.
    """
    _check_plus(weights)
    lhs = count_S(weights, M, K)
    blocks = dyadic_blocks(weights)
    cands = [(N, sum(count_S_dyadic(b, N, 4 * K) for b in blocks)) for N in _dyadic_range(M)]
    return _best("dyadic_partition", lhs, cands,
                 {"M": M, "K": K, "allowance": (M * K) ** eps})


def verify_linear(block, N, K, J, beta=None):
    """``S~(X_k, beta, N, JK)`` against ``J S~(X_k, |beta|, N, K)``."""
    J = check_positive(J, "J")
    absbeta = None if beta is None else np.abs(beta)
    lhs = abs(count_S_dyadic(block, N, J * K, beta=beta))
    rhs = J * abs(count_S_dyadic(block, N, K, beta=absbeta))
    return RatioReport("linear", lhs=float(lhs), rhs=float(rhs),
                       params={"k": block.k, "N": N, "K": K, "J": J})


def verify_decreasing(block, N, K, N0, *, eps=DEFAULT_EPS):
    """``S~(X_k, N, K)`` against the three-term bound, best dyadic ``L <= 4 N0``."""
    N0 = check_positive(N0, "N0")
    if N0 > N:
        raise ValidationError(f"N0={N0} must not exceed N={N}")
    lhs = count_S_dyadic(block, N, K)
    l1sq = l1_norm(block) ** 2
    fixed = N * K / 2**block.k * l1sq + N / N0 * l1sq
    scale = N ** (1 + eps) / N0
    cands = [(L, fixed + scale * count_S_dyadic(block, L, N0 * K / N)) for L in _dyadic_range(4 * N0)]
    return _best("decreasing", lhs, cands, {"k": block.k, "N": N, "K": K, "N0": N0})


def verify_increasing(block, N, K, J):
    """``S~(X_k, N, K)`` against ``S~(X_k, theta J N, J K) / J`` for the best ``theta``."""
    J = check_positive(J, "J")
    lhs = count_S_dyadic(block, N, K)
    cands = [(theta, count_S_dyadic(block, theta * J * N, J * K) / J) for theta in (1, 2)]
    return _best("increasing", lhs, cands, {"k": block.k, "N": N, "K": K, "J": J})


def verify_multiplicative(block, N, K, *, eps=DEFAULT_EPS):
    """``S~(X_k, N, K)`` against ``N^eps ||alpha_k||_{2,N/K} S~(X_k, theta N^2, NK)^(1/2)``."""
    lhs = count_S_dyadic(block, N, K)
    norm = math.sqrt(l2_norm_sq(block, N / K))
    cands = [(theta, N**eps * norm * math.sqrt(count_S_dyadic(block, theta * N * N, N * K)))
             for theta in (1, 2)]
    return _best("multiplicative", lhs, cands, {"k": block.k, "N": N, "K": K})


def verify_l2_monotonicity(block, N, M):
    """``||alpha_k||_{2,N}^2`` against ``(M/N) ||alpha_k||_{2,M}^2``."""
    if M < N:
        raise ValidationError(f"M={M} must be at least N={N}")
    lhs = l2_norm_sq(block, N)
    rhs = M / N * l2_norm_sq(block, M)
    return RatioReport("l2_monotonicity", lhs=float(lhs), rhs=float(rhs),
                       params={"k": getattr(block, "k", None), "N": N, "M": M})


def main_bound_terms(weights, M, K, *, eps=DEFAULT_EPS):
    """The three terms of the final bound for ``S(X, M, K)`` with ``o(1) = eps``."""
    _check_plus(weights)
    grow = (M * K) ** eps
    l2 = math.sqrt(l2_norm_sq(weights, M))
    l1 = l1_norm(weights)
    growth_sum = float(np.sum(weights.alpha / np.sqrt(weights.x)))
    return (
        M**1.5 * K * grow * l2 * growth_sum,
        (M * K) ** 0.5 * grow * l1 * l2,
        M * K * grow * l2 * l2,
    )


def verify_main_bound(weights, M, K, *, eps=DEFAULT_EPS):
    lhs = count_S(weights, M, K)
    terms = main_bound_terms(weights, M, K, eps=eps)
    return RatioReport("main_bound", lhs=float(lhs), rhs=float(sum(terms)),
                       params={"M": M, "K": K, "terms": terms})


def rt_multiplier_limit(N, eps):
    return math.floor(N ** (1 + eps))


def _count_small_multiples(weights, M, K):
    """``sum alpha(x) #{1 <= m <= M : m x < K}`` with an exact boundary fix-up."""
    x = weights.x
    if x.size == 0:
        return 0
    guess = np.minimum(np.ceil(K / x) - 1, M).astype(np.int64)
    # number of admissible m is the first m >= 1 with m x >= K, minus one
    first = monotone_first(np.maximum(guess + 1, 1), lambda m, r: m * x[r] >= K, 1, M + 1)
    return int(np.sum(weights.alpha * (first - 1)))


def rt_sums(window, N=None, eps=0.05):
    """The two counting conditions at level ``N``.

    ``sum1`` counts ``(m, n1 != n2)`` with ``1 <= m <= N^(1+eps)`` and
    ``m |x_n1 - x_n2| < N^eps``.  ``sum2`` counts the signed four-fold
    condition.  Folding negative multipliers onto positive ones turns it into
    ``8 (S_strict(X, M, N^eps) + #{m1 x1 + m2 x2 < N^eps})``, where ``X`` are
    the positive differences with multiplicities.
    """
    weights = differences(window, N)
    N = weights.source_n
    M = rt_multiplier_limit(N, eps)
    K = N**eps
    sum1 = 2 * _count_small_multiples(weights, M, K)
    near = count_S(weights, M, K, strict=True)
    far = count_sum_below(weights, M, K, strict=True)
    return sum1, 8 * (near + far)


def rt_sums_brute(window, N=None, eps=0.05):
    """Literal evaluation over signed multipliers and ordered index pairs (small ``N`` only)."""
    vals = np.asarray(getattr(window, "values", window), dtype=np.float64)
    N = vals.size if N is None else N
    vals = vals[:N]
    M = rt_multiplier_limit(N, eps)
    K = N**eps
    i, j = np.nonzero(~np.eye(N, dtype=bool))
    d = vals[i] - vals[j]
    pos = np.arange(1, M + 1)
    sum1 = int(np.sum(pos[:, None] * np.abs(d)[None, :] < K))
    signed = np.concatenate([-pos[::-1], pos])
    u = (signed[:, None] * d[None, :]).ravel()
    if u.size**2 > 5 * 10**7:
        raise ValidationError("brute-force RT sums are limited to tiny N")
    sum2 = int(np.sum(np.abs(u[:, None] - u[None, :]) < K))
    return sum1, sum2


# ---------------------------------------------------------------------------
# batteries


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key] = value
    return cfg


def _ints(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def thread_count(requested=None):
    env = os.environ.get("PAIRCORR_THREADS")
    value = env if env else requested
    if value in (None, "", "auto"):
        return os.cpu_count() or 1
    return check_count(int(value), "threads")


def _parallel_map(fn, items, threads):
    """Order-preserving map; results never depend on ``threads``."""
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _geometry_sweep(cfg, rng, threads):
    count = int(cfg.get("instances", 200))
    bodies = []
    for _ in range(count):
        x1, x2 = np.exp(rng.uniform(0.0, math.log(64.0), size=2))
        N = float(np.exp(rng.uniform(math.log(2.0), math.log(256.0))))
        K = float(np.exp(rng.uniform(math.log(0.05), math.log(8.0))))
        bodies.append(LatticeBody(float(x1), float(x2), N, K))

    def one(body):
        product, m, area = minkowski_check(body)
        ratio, pts, _ = count_vs_minima_check(body)
        doubled, _, _ = count_vs_minima_check(LatticeBody(body.x1, body.x2, 2 * body.N, body.K))
        return {"x1": body.x1, "x2": body.x2, "N": body.N, "K": body.K,
                "lambda1": m.lambda1, "lambda2": m.lambda2, "area": area,
                "minkowski_product": product, "lattice_count": pts,
                "count_ratio": ratio, "count_ratio_doubled": doubled}

    rows = _parallel_map(one, bodies, threads)
    products = [r["minkowski_product"] for r in rows]
    base = [r["count_ratio"] for r in rows]
    doubled = [r["count_ratio_doubled"] for r in rows]
    window = (min(base), max(base))
    window2 = (min(doubled), max(doubled))
    stability = max(window2[0] / window[0], window[0] / window2[0],
                    window2[1] / window[1], window[1] / window2[1])
    summary = {
        "minkowski_min": min(products), "minkowski_max": max(products),
        "count_window": list(window), "count_window_doubled": list(window2),
        "count_window_spread": window[1] / window[0], "count_window_stability": stability,
        "pass": {
            "minkowski": bool(min(products) >= 2 - 1e-6 and max(products) <= 4 + 1e-6),
            "count_sandwich": bool(window[1] / window[0] <= 64 and stability < 2),
        },
    }
    return rows, summary


def _ppc_convergence(cfg, rng, threads):
    spec = parse_spec(cfg.get("spec", "poly:1,0,0"))
    alpha = float(cfg.get("alpha", math.sqrt(2.0)))
    ladder = _ints(cfg.get("ns", "1024,4096,16384,32768"))
    s_grid = tuple(_floats(cfg.get("s_grid", "0.5,1,1.5,2,2.5,3")))
    brute_n = int(cfg.get("brute_n", 4096))
    config = PairCorrConfig(s_grid=s_grid, convention=NEAREST, scale_alpha=alpha)
    window = generate(spec, max(ladder + [brute_n]))

    def one(N):
        return N, pair_correlation_curve(window.prefix(N), config)

    curves = _parallel_map(one, ladder, threads)
    rows, deviations = [], {}
    for N, curve in curves:
        deviations[str(N)] = ppc_deviation(curve)
        for s, c, R in curve.rows():
            rows.append({"N": N, "s": s, "count": c, "R": R, "R_over_2s": R / (2 * s)})
    brute_curve = pair_correlation_curve(window.prefix(brute_n), config)
    u = reduce_mod_one(window.prefix(brute_n).values, alpha)
    brute_counts = [brute_pair_count(u, s / brute_n, NEAREST) for s in s_grid]
    brute_ok = list(brute_curve.counts) == brute_counts
    top = str(max(ladder))
    summary = {
        "deviation": deviations, "brute_n": brute_n, "brute_counts": brute_counts,
        "pass": {"deviation": bool(deviations[top] <= 0.15), "brute_match": bool(brute_ok)},
    }
    return rows, summary


def _energy_slopes(cfg, rng, threads):
    families = [
        ("n^2", Polynomial((1, 0, 0)), _ints(cfg.get("ns_square", "64,128,256,512,1024,2048")), 2.5),
        ("n^3+n", Polynomial((1, 0, 1, 0)), _ints(cfg.get("ns_cubic", "64,128,256,512,1024")), 2.6),
    ]
    gamma = float(cfg.get("gamma", 1.0))

    def one(fam):
        name, spec, ns, limit = fam
        fit, values = energy_exponent(spec, ns, gamma_rule=("const", gamma))
        return name, ns, fit, values, limit

    rows, summary = [], {"slopes": {}, "residuals": {}, "pass": {}}
    for name, ns, fit, values, limit in _parallel_map(one, families, threads):
        for N, v in zip(ns, values):
            rows.append({"family": name, "N": N, "energy": v})
        summary["slopes"][name] = fit.slope
        summary["residuals"][name] = fit.residual
        ok = fit.slope <= limit and (name != "n^2" or fit.residual < 0.1)
        summary["pass"][name] = bool(ok)
    return rows, summary


def proposition_instances(cfg):
    """The doubling ladders used for the proposition harness."""
    window_len = int(cfg.get("window", 24))
    theta = float(cfg.get("power", 1.5))
    k = int(cfg.get("block", 5))
    eps = float(cfg.get("eps", DEFAULT_EPS))
    ladder = _ints(cfg.get("ns", "64,128,256"))
    weights = differences(generate(Power(1.0, theta), window_len))
    blocks = {b.k: b for b in dyadic_blocks(weights)}
    if k not in blocks:
        raise ValidationError(f"block k={k} is empty for a window of length {window_len}")
    block = blocks[k]
    K = float(cfg.get("K", 1.0))
    jobs = []
    for N in ladder:
        jobs.append(("linear", N, lambda N=N: max(
            (verify_linear(block, N, K, J) for J in (2, 4, 8)), key=lambda r: r.ratio)))
        jobs.append(("decreasing", N, lambda N=N: verify_decreasing(block, N, K, N / 4, eps=eps)))
        jobs.append(("increasing", N, lambda N=N: verify_increasing(block, N, K, 4)))
        jobs.append(("multiplicative", N, lambda N=N: verify_multiplicative(block, N, K, eps=eps)))
        jobs.append(("l2_monotonicity", N, lambda N=N: verify_l2_monotonicity(block, N, 4 * N)))
        jobs.append(("dyadic_partition", N, lambda N=N: verify_dyadic_partition(weights, N, K, eps=eps)))
        jobs.append(("main_bound", N, lambda N=N: verify_main_bound(weights, N, K, eps=eps)))
    return jobs


def _prop_harness(cfg, rng, threads):
    jobs = proposition_instances(cfg)
    reports = _parallel_map(lambda job: job[2](), jobs, threads)
    rows, sweeps = [], {}
    for (name, N, _), rep in zip(jobs, reports):
        sweeps.setdefault(name, []).append(rep)
        rows.append({"inequality": name, "scale": N, "lhs": rep.lhs, "rhs": rep.rhs,
                     "ratio": rep.ratio, "witness": rep.witness})
    summary = {"max_ratio": {}, "drift": {}, "pass": {}}
    for name, reps in sweeps.items():
        sweep = SweepResult(tuple(reps))
        summary["max_ratio"][name] = sweep.max_ratio
        summary["drift"][name] = sweep.drift_factor
        summary["pass"][name] = bool(sweep.finite and sweep.drift_factor < 2)
    return rows, summary


def _rt_slopes(cfg, rng, threads):
    spec = parse_spec(cfg.get("spec", "poly:1.4142135623730951,0,0"))
    eps = float(cfg.get("eps", 0.05))
    ladder = _ints(cfg.get("ns", "32,64,128"))
    window = generate(spec, max(ladder))
    results = _parallel_map(lambda N: rt_sums(window, N, eps), ladder, threads)
    rows = [{"N": N, "sum1": s1, "sum2": s2} for N, (s1, s2) in zip(ladder, results)]
    s1 = [r[0] for r in results]
    s2 = [r[1] for r in results]
    # sum1 vanishes identically for well-spaced sequences; log(1 + x) keeps the fit defined
    fit1 = fit_exponent(ladder, s1, offset=1.0)
    fit2 = fit_exponent(ladder, s2, offset=1.0 if min(s2) == 0 else 0.0)
    # informational: slopes at other eps values, pass/fail uses the primary eps only
    sweep = {}
    for e in _floats(cfg.get("eps_sweep", "0.02,0.05,0.1")):
        pairs = _parallel_map(lambda N, e=e: rt_sums(window, N, e), ladder, threads)
        a, b = [p[0] for p in pairs], [p[1] for p in pairs]
        sweep[repr(e)] = {
            "slope_sum1": fit_exponent(ladder, a, offset=1.0).slope,
            "slope_sum2": fit_exponent(ladder, b, offset=1.0 if min(b) == 0 else 0.0).slope,
        }
    summary = {
        "slope_sum1": fit1.slope, "slope_sum2": fit2.slope, "eps": eps, "eps_sweep": sweep,
        "pass": {"sum1": bool(fit1.slope <= 1.9), "sum2": bool(fit2.slope <= 3.95)},
    }
    return rows, summary


BATTERIES = {
    "geometry-sweep": _geometry_sweep,
    "ppc-convergence": _ppc_convergence,
    "energy-slopes": _energy_slopes,
    "prop-harness": _prop_harness,
    "rt-slopes": _rt_slopes,
}


def _format(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ";".join(_format(v) for v in value)
    return str(value)


def rows_to_csv(rows):
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields.extend(k for k in r if k not in fields)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([_format(r.get(f)) for f in fields])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run_experiment(config=None, *, battery=None, out_dir=None, seed=None, threads=None):
    """Run a named battery and write ``<battery>.csv`` plus ``summary.json``.

    ``config`` is a path to a ``key=value`` file or a dict; keyword
    arguments override it.  Returns ``(out_dir, summary)``.  The thread count
    only affects wall time: instances are generated up front from the seed
    and merged in instance order.
    """
    if config is None:
        cfg = {}
    elif isinstance(config, dict):
        cfg = {k: str(v) for k, v in config.items()}
    else:
        cfg = read_config(config)
    battery = battery or cfg.pop("battery", None)
    cfg.pop("battery", None)
    if battery not in BATTERIES:
        raise ValidationError(f"unknown battery {battery!r}; expected one of {sorted(BATTERIES)}")
    seed = int(seed if seed is not None else cfg.pop("seed", 0))
    cfg.pop("seed", None)
    n_threads = thread_count(threads if threads is not None else cfg.pop("threads", None))
    cfg.pop("threads", None)
    out = Path(out_dir or cfg.pop("out", f"results-{battery}"))
    cfg.pop("out", None)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    log.info("running battery %s with %d thread(s)", battery, n_threads)
    summary = {"battery": battery, "seed": seed, "version": __version__, "flags": dict(sorted(cfg.items()))}
    try:
        rows, result = BATTERIES[battery](cfg, rng, n_threads)
    except Exception as exc:
        summary["error"] = f"{type(exc).__name__}: {exc}"
        summary["passed"] = False
        (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
        raise
    summary.update(result)
    summary["passed"] = all(summary["pass"].values())
    (out / f"{battery}.csv").write_text(rows_to_csv(rows))
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    return out, summary
