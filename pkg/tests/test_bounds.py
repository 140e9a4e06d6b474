import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbvol import bounds
from orbvol.bounds import BoundChain, BoundDomainError, TurnoverTriple


def _drill_oracle(r):
    x = 2 * mpmath.mpf(r)
    return float(mpmath.coth(x) ** 3 * (1 + mpmath.mpf("0.91") / mpmath.cosh(x)))


@pytest.mark.parametrize("r", [0.05, 0.24486, 0.294, 0.4157, 0.54527, 1.0, 3.0])
def test_drill_factor_against_mpmath(r):
    assert bounds.drill_factor(r) == pytest.approx(_drill_oracle(r), rel=1e-13)


def test_drill_factor_decreasing_grid():
    rs = np.linspace(0.01, 5.0, 1000)
    vals = [bounds.drill_factor(float(r)) for r in rs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 1.0


@pytest.mark.parametrize("r", [0.0, -0.1, float("nan")])
def test_drill_factor_domain(r):
    with pytest.raises(BoundDomainError):
        bounds.drill_factor(r)


def test_fill_factor_domain_wall():
    with pytest.raises(BoundDomainError):
        bounds.fill_factor(2 * math.pi)
    assert bounds.fill_factor(math.nextafter(2 * math.pi, 10)) < 1e-6
    ls = np.linspace(2 * math.pi + 1e-6, 60, 1000)
    vals = [bounds.fill_factor(float(x)) for x in ls]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.5, 10.0))
def test_max_slope_length_inverts_fill(frac, vol):
    budget = frac * vol
    L = bounds.max_slope_length(budget, vol)
    assert bounds.fill_factor(L) * vol == pytest.approx(budget, rel=1e-10)


def test_collar_radii():
    # independent: cosh(2r) = 1/(2 sin^2(pi/7)) - 1
    r7 = float(mpmath.acosh(1 / (2 * mpmath.sin(mpmath.pi / 7) ** 2) - 1) / 2)
    assert bounds.collar_high_order(7) == pytest.approx(r7, abs=1e-14)
    assert bounds.collar_high_order(7) == pytest.approx(0.54527, abs=1e-5)
    assert bounds.collar_order4() == pytest.approx(0.4157, abs=1e-4)
    assert bounds.collar_high_order(11) > bounds.collar_high_order(7)
    with pytest.raises(BoundDomainError):
        bounds.collar_high_order(6)


def test_cusped_floor_is_half_v3():
    v3 = float(mpmath.clsin(2, mpmath.pi / 3))
    assert bounds.cusped_floor() == pytest.approx(v3 / 2, abs=1e-14)
    assert bounds.boroczky_density() < 1


def test_turnovers():
    triples = bounds.turnover_triples()
    assert len(triples) == 24
    assert TurnoverTriple(2, 4, 5) in triples and TurnoverTriple(3, 3, 4) in triples
    assert all(t.as_tuple() != (2, 3, 6) for t in triples)
    with pytest.raises(ValueError):
        TurnoverTriple(2, 3, 6)
    # brute force over unordered triples
    brute = {tuple(sorted((p, q, r))) for p in range(2, 7) for q in range(2, 7) for r in range(2, 7)
             if q * r + p * r + p * q < p * q * r}
    assert {t.as_tuple() for t in triples} == brute
    assert bounds.turnover_floor(2) == 0.28248 and bounds.turnover_floor(3) == 0.44089
    with pytest.raises(BoundDomainError):
        bounds.turnover_floor(4)


def test_chain_replay_and_tamper():
    chain = bounds.seven_torsion_chain()
    assert chain.passed and chain.replay()
    assert chain.final == pytest.approx(0.1658, abs=1e-4)
    step = chain.steps[1]
    chain.steps[1] = bounds.Step(step.name, step.operation, step.inputs, step.output + 1e-6, step.citation)
    assert not chain.replay()


def test_chain_records_inputs():
    c = BoundChain("t")
    c.apply("a", "multiply", a=2.0, b=3.5)
    assert c.final == 7.0 and c.steps[0].inputs == {"a": 2.0, "b": 3.5}
