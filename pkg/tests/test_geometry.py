import itertools
import math

import numpy as np
import pytest

from poissonpc._validation import ValidationError
from poissonpc.lattice import (LatticeBody, body_area, count_vs_minima_check, gauge, gauss_reduce,
                               lattice_point_count, minkowski_check, successive_minima)

UNIT = LatticeBody(1.0, 1.0, 0.5, 1.0)


def random_bodies(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        x1, x2 = np.exp(rng.uniform(0, math.log(40), size=2))
        yield LatticeBody(float(x1), float(x2), float(np.exp(rng.uniform(0, 4))),
                          float(np.exp(rng.uniform(-3, 2))))


def exhaustive_minima(body, radius):
    """Minima by scanning every vector in a box that contains ``radius * B``."""
    w = math.ceil(radius * body.half_width)
    vals = []
    for v in itertools.product(range(-w, w + 1), repeat=2):
        if v != (0, 0):
            vals.append((gauge(body, v), v))
    vals.sort()
    lam1, v1 = vals[0]
    lam2 = next(g for g, v in vals if v1[0] * v[1] - v1[1] * v[0] != 0)
    return lam1, lam2


def test_gauge_examples():
    assert gauge(UNIT, (1, 0)) == 1
    assert gauge(UNIT, (1, 1)) == 1
    rng = np.random.default_rng(0)
    for body in random_bodies(10, 1):
        v = rng.integers(-9, 10, size=2)
        if v.any():
            assert gauge(body, 2 * v) == pytest.approx(2 * gauge(body, v), rel=1e-14)
    with pytest.raises(ValidationError):
        gauge(UNIT, (0, 0))


def test_unit_body_minima():
    m = successive_minima(UNIT)
    assert m.lambda1 == 1 and m.lambda2 == 1
    # (1, 0), (0, 1) and (1, 1) all have gauge 1; the (|v1|, |v2|, v1, v2) order picks these
    assert (m.v1, m.v2) == ((0, 1), (1, 0))


def test_gauss_reduce():
    b1, b2 = gauss_reduce(([1, 0], [0, 1]))
    assert {tuple(b1), tuple(b2)} == {(1, 0), (0, 1)}
    b1, b2 = gauss_reduce(([1, 0], [1, 1]))
    assert {tuple(np.abs(b1)), tuple(np.abs(b2))} == {(1, 0), (0, 1)}
    rng = np.random.default_rng(5)
    for _ in range(20):
        B = rng.integers(-50, 50, size=(2, 2))
        det = abs(round(np.linalg.det(B)))
        if det == 0:
            continue
        r1, r2 = gauss_reduce(B)
        assert abs(r1[0] * r2[1] - r1[1] * r2[0]) == det
        assert r1 @ r1 <= r2 @ r2 <= min((r2 + r1) @ (r2 + r1), (r2 - r1) @ (r2 - r1))


def test_minima_against_exhaustive_scan():
    for body in random_bodies(40, 2):
        if body.half_width > 60:
            body = LatticeBody(body.x1, body.x2, body.N % 30 + 0.5, body.K)
        m = successive_minima(body)
        lam1, lam2 = exhaustive_minima(body, 2 * m.lambda2)
        assert m.lambda1 == pytest.approx(lam1, rel=1e-12)
        assert m.lambda2 == pytest.approx(lam2, rel=1e-12)
        assert gauge(body, m.v1) == pytest.approx(m.lambda1, rel=1e-12)
        assert m.v1[0] * m.v2[1] - m.v1[1] * m.v2[0] != 0


@pytest.mark.parametrize("r", [0.5, 1 / 3, 2])
def test_scaling(r):
    for body in random_bodies(15, 3):
        m, ms = successive_minima(body), successive_minima(body.scaled(r))
        assert ms.lambda1 == pytest.approx(m.lambda1 / r, rel=1e-12)
        assert ms.lambda2 == pytest.approx(m.lambda2 / r, rel=1e-12)


def test_area():
    assert body_area(UNIT)[0] == pytest.approx(3)
    assert body_area(LatticeBody(1.0, 1.0, 2.0, 1e6))[0] == pytest.approx(16 * 4)


def test_area_monte_carlo():
    body = LatticeBody(3.0, 1.7, 5.0, 2.0)
    rng = np.random.default_rng(9)
    w = body.half_width
    pts = rng.uniform(-w, w, size=(10**6, 2))
    inside = np.abs(body.x1 * pts[:, 0] - body.x2 * pts[:, 1]) <= body.K
    p = inside.mean()
    est, sigma = p * (2 * w) ** 2, math.sqrt(p * (1 - p) / 10**6) * (2 * w) ** 2
    area, bound = body_area(body)
    assert abs(area - est) <= 3 * sigma
    assert area <= bound * (1 + 1e-12)


def test_lattice_count():
    assert lattice_point_count(UNIT) == 7
    assert lattice_point_count(LatticeBody(1.0, math.sqrt(2), 10.0, 1e-9)) == 1
    for body in random_bodies(20, 4):
        count = lattice_point_count(body)
        assert count % 2 == 1
        w = math.floor(body.half_width)
        y1, y2 = np.meshgrid(np.arange(-w, w + 1), np.arange(-w, w + 1))
        assert count == int(np.sum(np.abs(body.x1 * y1 - body.x2 * y2) <= body.K))


def test_minkowski_examples():
    product, _, area = minkowski_check(UNIT)
    assert product == pytest.approx(3) and area == pytest.approx(3)
    square = LatticeBody(1.0, 1.0, 0.5, 1e6)
    product, m, _ = minkowski_check(square)
    assert (m.lambda1, m.lambda2) == (1, 1) and product == pytest.approx(4)


def test_count_ratio_examples():
    assert count_vs_minima_check(UNIT)[0] == 7
    tiny = LatticeBody(1.0, math.sqrt(2), 0.2, 0.01)
    ratio, count, m = count_vs_minima_check(tiny)
    assert m.lambda1 > 1 and count == 1 and ratio == 1
