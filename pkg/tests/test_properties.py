"""Property-based checks of the stated invariants."""

import itertools
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from poissonpc.analytic import weyl_sum
from poissonpc.energy import additive_energy_int, approx_energy, union_energy_check
from poissonpc.lattice import (DifferenceWeights, LatticeBody, count_S, differences, gauge,
                               lattice_point_count, minkowski_check, successive_minima)
from poissonpc.paircorr import FRACTIONAL, NEAREST, PairCorrConfig, pair_correlation

FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

@st.composite
def windows(draw, min_size=2, max_size=30):
    vals = draw(st.lists(st.floats(0, 100, allow_nan=False), min_size=min_size, max_size=max_size,
                         unique=True))
    return np.sort(np.array(vals))


@st.composite
def bodies(draw):
    x1 = draw(st.floats(0.5, 50))
    x2 = draw(st.floats(0.5, 50))
    N = draw(st.floats(0.5, 20))
    K = draw(st.floats(0.1, 20))
    return LatticeBody(x1, x2, N, K)


@FAST
@given(windows(), st.sampled_from([NEAREST, FRACTIONAL]), st.floats(0.05, 1.0))
def test_sort_equals_brute(vals, convention, s):
    cfg = PairCorrConfig(s_grid=(s,), convention=convention)
    assert pair_correlation(vals, s, cfg) == pair_correlation(vals, s, cfg, method="brute")


@FAST
@given(windows(), st.floats(0.05, 0.5), st.floats(0.05, 0.5))
def test_ppc_monotone_in_s(vals, s1, s2):
    lo, hi = sorted((s1, s2))
    assert pair_correlation(vals, lo)[0] <= pair_correlation(vals, hi)[0]


@FAST
@given(windows(), st.integers(-5, 5))
def test_ppc_invariant_under_integer_shift(vals, shift):
    u = vals - np.floor(vals)
    moved = u.copy()
    moved[0] += shift
    assert pair_correlation(u, 0.7)[0] == pair_correlation(moved, 0.7)[0]


@FAST
@given(windows(max_size=12), st.sampled_from([0.1, 1.0, 10.0]))
def test_energy_two_pointer_equals_brute(vals, gamma):
    fast = approx_energy(vals, gamma=gamma).value
    assert fast == approx_energy(vals, gamma=gamma, method="brute").value
    N = vals.size
    assert 2 * N * N - N <= fast <= N**4


@FAST
@given(st.sets(st.integers(-30, 30), min_size=1, max_size=8), st.integers(-9, 9).filter(bool),
       st.integers(-20, 20))
def test_energy_affine_invariance(A, scale, shift):
    assert additive_energy_int({scale * a + shift for a in A}) == additive_energy_int(A)


@FAST
@given(st.lists(st.sets(st.integers(0, 60), min_size=1, max_size=6), min_size=1, max_size=4))
def test_union_energy_minkowski(family):
    seen, disjoint = set(), []
    for s in family:
        s = s - seen
        if s:
            disjoint.append(s)
            seen |= s
    lhs, rhs = union_energy_check(disjoint)
    assert lhs <= rhs * (1 + 1e-12)


@FAST
@given(st.lists(st.floats(1, 20), min_size=1, max_size=8, unique=True), st.integers(1, 8),
       st.floats(0, 3))
def test_count_S_methods_agree(xs, M, K):
    w = DifferenceWeights(np.sort(xs), np.ones(len(xs), dtype=int))
    got = {m: count_S(w, M, K, m) for m in ("brute", "interval", "productsort")}
    assert len(set(got.values())) == 1
    assert count_S(w, M, K) <= count_S(w, M + 1, K) <= count_S(w, M + 1, K + 0.5)


@FAST
@given(windows(max_size=15))
def test_difference_weights_total(vals):
    w = differences(vals)
    assert int(w.alpha.sum()) == vals.size * (vals.size - 1) // 2


@FAST
@given(bodies())
def test_minkowski_window(body):
    product, m, _ = minkowski_check(body)
    assert 2 - 1e-6 <= product <= 4 + 1e-6
    assert m.lambda1 <= m.lambda2
    assert math.isclose(gauge(body, m.v2), m.lambda2, rel_tol=1e-12)


@FAST
@given(bodies())
def test_lattice_count_is_odd(body):
    assert lattice_point_count(body) % 2 == 1


@FAST
@given(bodies(), st.sampled_from([0.5, 2.0, 3.0]))
def test_minima_scale(body, r):
    m, ms = successive_minima(body), successive_minima(body.scaled(r))
    assert math.isclose(ms.lambda1, m.lambda1 / r, rel_tol=1e-12)
    assert math.isclose(ms.lambda2, m.lambda2 / r, rel_tol=1e-12)


@FAST
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=4), st.integers(1, 40), st.floats(0, 1))
def test_weyl_sum_bounded(coeffs, N, x):
    assert abs(weyl_sum(coeffs, N, x)) <= N + 1e-9


def test_small_body_enumeration():
    for x1, x2 in itertools.product([1.0, 2.5], [1.0, 3.3]):
        assert lattice_point_count(LatticeBody(x1, x2, 1.0, 0.5)) % 2 == 1
