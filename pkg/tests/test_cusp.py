import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from orbvol.constants import CENSUS_NAMES
from orbvol.cusp import CuspPreconditionError, MaximalCusp, cusp_shape, maximal_cusp, slope_length
from orbvol.pipeline import fixture_cusp
from orbvol.solver import ShapeAssignment
from orbvol.triangulation import Slope, census


@pytest.mark.parametrize("name", CENSUS_NAMES)
def test_cusp_shape_matches_oracle(name, census_oracle, complete_shapes):
    tau = cusp_shape(census(name), complete_shapes[name]).modulus
    re, im = census_oracle[name]["cusp_shape"]
    assert tau.imag > 0
    assert tau == pytest.approx(complex(re, im), abs=1e-6)


def test_cusp_shape_rejects_incomplete(complete_shapes):
    sh = complete_shapes["m004"]
    bent = ShapeAssignment.principal([sh.shapes[0] * 1.01, sh.shapes[1]])
    with pytest.raises(CuspPreconditionError):
        cusp_shape(census("m004"), bent)


@pytest.mark.parametrize("name", CENSUS_NAMES)
def test_maximal_cusp_reproduces_fixture(name, census_oracle, complete_shapes):
    t = census(name)
    mc = maximal_cusp(t, complete_shapes[name])
    assert mc.verified and mc.status == "verified"
    fx = fixture_cusp(t)
    assert mc.area == pytest.approx(census_oracle[name]["maxcusp_area"], rel=1e-6)
    for ours, ref in zip(mc.translations, fx.translations):
        assert ours == pytest.approx(ref, rel=1e-6)
    assert mc.area >= math.sqrt(3) / 2


def test_cap_reports_unverified(complete_shapes):
    mc = maximal_cusp(census("m015"), complete_shapes["m015"], cap=2)
    assert not mc.verified and mc.status.startswith("unverified")


def test_m004_lengths(census_oracle):
    cusp = fixture_cusp(census("m004"))
    mer = census_oracle["m004"]["meridian_length"]
    assert slope_length(cusp, Slope(4, 0)) == pytest.approx(4 * mer, rel=1e-12)
    assert slope_length(cusp, (1, 0)) == pytest.approx(1.0, abs=1e-12)
    assert slope_length(cusp, (0, 1)) == pytest.approx(2 * math.sqrt(3), abs=1e-12)


def test_rescaling_quadruples_area():
    cusp = fixture_cusp(census("m006"))
    doubled = MaximalCusp.from_translations(*(2 * t for t in cusp.translations))
    assert doubled.area == pytest.approx(4 * cusp.area, rel=1e-14)
    assert cusp.scaled(2.0).area == pytest.approx(doubled.area, rel=1e-14)


def _unimodular(rng):
    m = [[1, 0], [0, 1]]
    for _ in range(rng.randint(1, 6)):
        k = rng.randint(-3, 3)
        m = [[m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]], m[1]] if rng.random() < 0.5 else \
            [m[0], [m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]]]
    return m


def test_basis_change_invariance():
    rng = random.Random(7)
    cusps = [fixture_cusp(t) for t in map(census, CENSUS_NAMES)]
    for _ in range(1000):
        cusp = rng.choice(cusps)
        (a, b), (c, d) = _unimodular(rng)
        assert a * d - b * c in (1, -1)
        tm, tl = cusp.translations
        # new basis mu' = a mu + b lambda, lambda' = c mu + d lambda
        new = MaximalCusp.from_translations(a * tm + b * tl, c * tm + d * tl)
        p, q = rng.randint(-20, 20), rng.randint(-20, 20)
        if p == q == 0:
            continue
        # coordinates of p mu + q lambda in the new basis
        det = a * d - b * c
        p2, q2 = (p * d - q * c) * det, (q * a - p * b) * det
        assert slope_length(new, (p2, q2)) == pytest.approx(slope_length(cusp, (p, q)), rel=1e-9)
        assert math.gcd(p2, q2) == math.gcd(p, q)
        assert new.area == pytest.approx(cusp.area, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_triangle_inequality_and_symmetry(p1, q1, p2, q2):
    cusp = fixture_cusp(census("m011"))
    if (p1, q1) == (0, 0) or (p2, q2) == (0, 0) or (p1 + p2, q1 + q2) == (0, 0):
        return
    l1, l2 = slope_length(cusp, (p1, q1)), slope_length(cusp, (p2, q2))
    assert slope_length(cusp, (p1 + p2, q1 + q2)) <= l1 + l2 + 1e-12
    assert slope_length(cusp, (-p1, -q1)) == l1
    assert slope_length(cusp, (3 * p1, 3 * q1)) == pytest.approx(3 * l1, rel=1e-14)
