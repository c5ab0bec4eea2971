import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from poissonpc._numeric import fit_exponent
from poissonpc._validation import ValidationError
from poissonpc.analytic import (amplification_check, close_pair_count, dirichlet_characters,
                                dirichlet_poly, equal_sum_count, hua_moment, mean_value_closed_form,
                                mean_value_integral, quadruple_moment_check, sum_integral_sandwich,
                                vinogradov_count, weyl_sum)
from poissonpc.energy import approx_energy
from poissonpc.lattice import DyadicBlock, differences, dyadic_blocks
from poissonpc.sequences import Polynomial, Power, generate


def block_of(power, window, k):
    return {b.k: b for b in dyadic_blocks(differences(generate(Power(1, power), window)))}[k]


def test_dirichlet_poly():
    pts = [(2.0, 3), (5.5, 1), (7.0, 2)]
    assert dirichlet_poly(pts, 0) == 6
    assert dirichlet_poly([(math.e, 1)], math.pi) == pytest.approx(-1)
    assert dirichlet_poly(pts, -1.3) == pytest.approx(dirichlet_poly(pts, 1.3).conjugate())
    with pytest.raises(ValidationError):
        dirichlet_poly([(0.0, 1)], 1)


def test_mean_value_single_point():
    assert mean_value_integral([(3.0, 2.0)], 17.0).value == pytest.approx(8, rel=1e-12)


def test_mean_value_two_points_exact_period():
    T, gap = 10.0, 2 * math.pi / 10.0 * 3
    res = mean_value_integral([(1.0, 1.0), (math.exp(gap), 1.0)], T)
    assert res.value == pytest.approx(4, abs=1e-9)


@pytest.mark.parametrize("kind", ["dirichlet", "additive"])
def test_mean_value_matches_closed_form(kind):
    rng = np.random.default_rng(7)
    pts = list(zip(rng.uniform(1, 20, size=12), rng.normal(size=12)))
    res = mean_value_integral(pts, 30.0, kind=kind)
    assert res.value == pytest.approx(mean_value_closed_form(pts, 30.0, kind=kind), rel=1e-8)
    assert res.error_estimate < 1e-6 * res.value


def test_mean_value_sandwich_random():
    rng = np.random.default_rng(8)
    ratios = []
    for _ in range(10):
        pts = list(zip(np.sort(rng.uniform(0, 5, size=15)), np.ones(15)))
        T = 4.0
        ratios.append(mean_value_integral(pts, T, kind="additive").value / close_pair_count(pts, T))
    assert max(ratios) / min(ratios) <= 100


def test_sum_integral_sandwich():
    block = block_of(1.5, 24, 2)
    lo, hi = sum_integral_sandwich(block, 8, 16)
    lo2, hi2 = sum_integral_sandwich(block, 8, 32)
    for a, b in ((lo, lo2), (hi, hi2)):
        assert 0 < a.ratio < math.inf
        assert 1 / 4 < b.ratio / a.ratio < 4
    single = DyadicBlock(np.array([1.0]), np.array([1]), k=0)
    lo, hi = sum_integral_sandwich(single, 1, 5.0)
    assert lo.lhs == 1 and hi.lhs == pytest.approx(2)
    plain, _ = sum_integral_sandwich(block, 8, 16)
    ones, _ = sum_integral_sandwich(block, 8, 16, beta=np.ones(8))
    assert ones.lhs == plain.lhs and ones.rhs == pytest.approx(plain.rhs, rel=1e-12)


def test_characters_mod_3_and_5():
    t3 = dirichlet_characters(3)
    assert len(t3) == 2
    assert np.allclose(t3.values[1, 1:], [1, -1])
    t5 = dirichlet_characters(5)
    assert t5.primitive_root == 2
    assert sorted(np.round(t5.values[:, 2], 12).tolist(), key=lambda z: (z.real, z.imag)) == \
        sorted([1, 1j, -1, -1j], key=lambda z: (z.real, z.imag))
    with pytest.raises(ValidationError):
        dirichlet_characters(9)


@pytest.mark.parametrize("q, J", [(7, 3), (11, 5), (13, 4)])
def test_character_sum_identity(q, J):
    t = dirichlet_characters(q)
    js = np.arange(J + 1, 2 * J + 1)
    total = sum(abs(t.values[a, js % q].sum()) ** 2 for a in range(q - 1))
    assert total == pytest.approx((q - 1) * J)


def test_amplification_check():
    block = block_of(1.5, 16, 3)
    rep = amplification_check(block, 4, 1, 8.0)
    assert rep.params["q"] == 5
    assert rep.params["character_identity"] == pytest.approx(1, rel=1e-6)
    assert 0 < rep.ratio < 10
    single = DyadicBlock(np.array([1.5]), np.array([1]), k=0)
    r1, r2 = amplification_check(single, 4, 1, 8.0), amplification_check(single, 4, 1, 16.0)
    assert 0.5 < r2.ratio / r1.ratio < 2


def test_amplification_n_sweep():
    block = block_of(1.5, 16, 3)
    ratios = [amplification_check(block, N, 2, 8.0).ratio for N in (4, 8, 16)]
    assert all(b / a < 2 for a, b in zip(ratios, ratios[1:]))


def test_weyl_sum():
    assert weyl_sum((1, 0, 0), 10, 0) == pytest.approx(10)
    assert weyl_sum((1, 0), 2, 0.5) == pytest.approx(0, abs=1e-15)
    rng = np.random.default_rng(0)
    for x in rng.random(10):
        assert abs(weyl_sum((1, 2, 0, 1), 50, x)) <= 50 + 1e-9


def test_weyl_sum_rational_period():
    # integer polynomial at x = a/q: n -> n + q leaves e(p(n) a/q) unchanged
    q = 7
    x = Fraction(3, q)
    full = weyl_sum((1, 0, 1, 0), q, x)
    assert weyl_sum((1, 0, 1, 0), 5 * q, x) == pytest.approx(5 * full, abs=1e-9)
    direct = sum(cmath.exp(2j * math.pi * ((n**3 + n) * 3 % q) / q) for n in range(1, q + 1))
    assert full == pytest.approx(direct, abs=1e-12)


def test_hua_examples():
    assert hua_moment((1, 0, 0, 0), 1, 12).value == pytest.approx(1)
    res = hua_moment((1, 0, 0, 0), 2, 12)
    assert res.value == pytest.approx(924, abs=1e-6) and res.error_estimate <= 1e-6
    assert math.comb(12, 6) == 924
    quads = sum(a**3 + c**3 == b**3 + d**3 for a, b, c, d in itertools.product(range(1, 5), repeat=4))
    assert quads == 28
    assert hua_moment((1, 0, 0, 0), 4, 4).value == pytest.approx(28, rel=1e-12)


@pytest.mark.parametrize("N", range(1, 7))
@pytest.mark.parametrize("two_s", [4, 12])
def test_hua_matches_equal_sum_oracle(N, two_s):
    cubes = [n**3 for n in range(1, N + 1)]
    want = equal_sum_count(cubes, two_s // 2)
    assert hua_moment((1, 0, 0, 0), N, two_s).value == pytest.approx(want, rel=1e-6)


def test_hua_refined_real_poly():
    coeffs = (math.sqrt(2), 0, 1)
    res = hua_moment(coeffs, 5, 4)
    assert res.method == "Refined"
    # closed form: sum over pair sums u, v of int_0^1 e((u - v) x) dx
    f = [math.sqrt(2) * n * n + 1 for n in range(1, 6)]
    sums = [a + b for a in f for b in f]
    want = math.fsum((cmath.exp(2j * math.pi * (u - v)) - 1).imag / (2 * math.pi * (u - v))
                     if u != v else 1.0 for u in sums for v in sums)
    assert res.value == pytest.approx(want, rel=1e-8)


def test_hua_growth_slope():
    ns = [4, 6, 8, 12, 16]
    vals = [hua_moment((1, 0, 0, 0), n, 12).value for n in ns]
    assert fit_exponent(ns, vals).slope <= 9.5


def test_vinogradov():
    assert vinogradov_count(2, 1, 9) == 9
    assert vinogradov_count(1, 2, 2) == 6
    brute = sum(a + b == c + d and a * a + b * b == c * c + d * d
                for a, b, c, d in itertools.product(range(1, 6), repeat=4))
    assert vinogradov_count(2, 2, 5) == brute
    # every tuple pairs with each of its rearrangements
    for s, N in ((2, 6), (3, 5)):
        diag = 0
        for m in itertools.combinations_with_replacement(range(N), s):
            perms = math.factorial(s) // math.prod(math.factorial(m.count(v)) for v in set(m))
            diag += perms * perms
        assert vinogradov_count(3, s, N) >= diag


def test_quadruple_moment():
    rep = quadruple_moment_check((1, 0, 0, 0), 1)
    assert (rep.lhs, rep.rhs, rep.ratio) == (1, pytest.approx(1), pytest.approx(1))
    ratios = [quadruple_moment_check((1, 0, 0, 0), N).ratio for N in (8, 16, 32)]
    assert max(ratios) / min(ratios) < 2
    rep = quadruple_moment_check((1, 0, 0), 16)
    assert rep.lhs == approx_energy(generate(Polynomial((1, 0, 0)), 16)).value
