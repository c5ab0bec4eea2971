import itertools
import math

import numpy as np
import pytest

from poissonpc._validation import CapacityError, ValidationError
from poissonpc.lattice import (DifferenceWeights, DyadicBlock, count_S, count_S_dyadic,
                               count_sum_below, differences, dyadic_blocks, l1_norm, l2_norm_sq,
                               norm_sums_hold)
from poissonpc.sequences import Polynomial, Power, generate

METHODS = ("brute", "interval", "productsort")


def literal_S(x, alpha, mults, K, beta=None, strict=False):
    beta = beta or {m: 1 for m in mults}
    total = 0
    for m1, m2 in itertools.product(mults, repeat=2):
        for (x1, a1), (x2, a2) in itertools.product(zip(x, alpha), repeat=2):
            d = abs(m1 * x1 - m2 * x2)
            if d < K or (not strict and d == K):
                total += a1 * a2 * beta[m1] * beta[m2]
    return total


def test_differences_examples():
    w = differences(generate(Polynomial((1, 0, 0)), 3))
    assert w.x.tolist() == [3, 5, 8] and w.alpha.tolist() == [1, 1, 1]
    w = differences(np.arange(1.0, 5.0))
    assert w.x.tolist() == [1, 2, 3] and w.alpha.tolist() == [3, 2, 1]
    w = differences(generate(Power(1, 1.5), 30))
    assert l1_norm(w) == 30 * 29 // 2


def test_differences_rejects_unsorted():
    with pytest.raises(ValidationError):
        differences(np.array([3.0, 1.0, 2.0]))


def test_norms():
    single = DifferenceWeights([2.5], [3])
    assert l1_norm(single) == 3 and l2_norm_sq(single, 10) == 9
    assert l2_norm_sq(DifferenceWeights([1.0, 2.0], [1, 1]), 1) == 4


def test_l2_norm_matches_double_loop():
    w = differences(generate(Power(1, 1.5), 20))
    for N in (1, 3, 20):
        want = sum(a1 * a2 for (x1, a1), (x2, a2) in itertools.product(zip(w.x, w.alpha), repeat=2)
                   if abs(x1 - x2) <= 1 / N)
        assert l2_norm_sq(w, N) == want


def test_dyadic_blocks():
    blocks = dyadic_blocks(DifferenceWeights([1.0, 1.5, 3.0], [1, 1, 1]))
    assert [(b.k, b.x.tolist()) for b in blocks] == [(0, [1.0, 1.5]), (1, [3.0])]
    assert dyadic_blocks(DifferenceWeights([], [])) == []
    w = differences(generate(Polynomial((1, 0, 0)), 10))
    for b in dyadic_blocks(w):
        sel = (w.x >= 2**b.k) & (w.x < 2 ** (b.k + 1))
        assert b.x.tolist() == w.x[sel].tolist()
    assert norm_sums_hold(w, dyadic_blocks(w), 4)
    with pytest.raises(ValidationError):
        DyadicBlock(np.array([1.0, 5.0]), np.array([1, 1]), k=0)


def test_count_S_examples():
    one = DifferenceWeights([1.0], [1])
    pair = DifferenceWeights([1.0, math.sqrt(2)], [1, 1])
    for method in METHODS:
        assert count_S(one, 2, 0.5, method) == 2
        assert count_S(pair, 3, 0.2, method) == 8
    w = differences(generate(Power(1, 1.5), 6))
    assert count_S(w, 4, 4 * w.x[-1]) == l1_norm(w) ** 2 * 16


def test_count_S_dyadic_examples():
    one = DyadicBlock(np.array([1.0]), np.array([1]), k=0)
    assert count_S_dyadic(one, 1, 0) == 1
    assert count_S_dyadic(one, 2, 0.5) == 2


@pytest.mark.parametrize("seed", range(5))
def test_count_S_dyadic_with_signs_matches_literal(seed):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(4, 8, size=5))
    block = DyadicBlock(x, rng.integers(1, 4, size=5), k=2)
    N = int(rng.integers(2, 7))
    mults = list(range(N + 1, 2 * N + 1))
    beta = rng.choice([-1, 1], size=len(mults))
    want = literal_S(x.tolist(), block.alpha.tolist(), mults, 1.3,
                     beta=dict(zip(mults, beta.tolist())))
    for method in METHODS:
        assert count_S_dyadic(block, N, 1.3, beta=beta, method=method) == want


def test_complex_beta():
    block = DyadicBlock(np.array([2.0, 2.5, 3.7]), np.array([1, 2, 1]), k=1)
    beta = np.exp(1j * np.arange(4))
    vals = [count_S_dyadic(block, 4, 2.0, beta=beta, method=m) for m in METHODS]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("strict", [False, True])
def test_methods_match_literal(seed, strict):
    rng = np.random.default_rng(100 + seed)
    x = np.unique(np.round(rng.uniform(1, 10, size=6), 2))
    alpha = rng.integers(1, 3, size=x.size)
    K = float(np.round(rng.uniform(0, 2), 2))
    M = int(rng.integers(1, 7))
    want = literal_S(x.tolist(), alpha.tolist(), list(range(1, M + 1)), K, strict=strict)
    w = DifferenceWeights(x, alpha)
    for method in METHODS:
        assert count_S(w, M, K, method, strict=strict) == want


def test_count_monotone():
    w = differences(generate(Power(1, 1.5), 12))
    assert count_S(w, 10, 1) <= count_S(w, 11, 1) <= count_S(w, 11, 1.5)


def test_sum_below_matches_literal():
    w = differences(generate(Power(1, 0.6), 8))
    M, K = 5, 2.0
    want = sum(a1 * a2 for m1, m2 in itertools.product(range(1, M + 1), repeat=2)
               for (x1, a1), (x2, a2) in itertools.product(zip(w.x, w.alpha), repeat=2)
               if m1 * x1 + m2 * x2 < K)
    assert count_sum_below(w, M, K) == want


def test_caps():
    w = DifferenceWeights(np.arange(1.0, 3001.0), np.ones(3000, dtype=int))
    with pytest.raises(CapacityError):
        count_S(w, 100, 1, method="brute")
