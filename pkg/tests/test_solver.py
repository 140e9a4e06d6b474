import math

import mpmath
import numpy as np
import pytest

from orbvol import solver
from orbvol.constants import CENSUS_NAMES
from orbvol.solver import (EquationSystem, OutcomeClass, ShapeAssignment, SystemShapeError,
                           build_system, classify, complete_structure, fill_and_measure, solve)
from orbvol.triangulation import FillingSpec, Slope, census

from conftest import SNAPPY_KIND


@pytest.mark.parametrize("name", CENSUS_NAMES)
def test_complete_volume_matches_oracle(name, census_oracle):
    out = complete_structure(census(name))
    assert out.kind is OutcomeClass.GEOMETRIC
    assert out.shapes.residual <= solver.RESIDUAL_TOL
    assert out.volume == pytest.approx(float(census_oracle[name]["volume"]), abs=1e-9)


def test_m004_is_two_regular_tetrahedra():
    out = complete_structure(census("m004"))
    v3 = float(mpmath.clsin(2, mpmath.pi / 3))
    assert out.volume == pytest.approx(2 * v3, abs=1e-12)
    for z in out.shapes.shapes:
        assert z == pytest.approx(complex(0.5, math.sqrt(3) / 2), abs=1e-12)


@pytest.mark.parametrize("name", ["m006", "m011", "m017"])
def test_volume_invariant_under_relabeling(name):
    t = census(name)
    base = complete_structure(t).volume
    for order in ([2, 0, 1], [1, 2, 0], [2, 1, 0]):
        assert complete_structure(t.permuted(order)).volume == pytest.approx(base, abs=1e-12)


def test_fillings_match_oracle(filling_oracle):
    for row in filling_oracle:
        out = fill_and_measure(census(row["manifold"]), (row["p"], row["q"]))
        label = f"{row['manifold']}({row['p']},{row['q']})"
        assert str(out.kind) == SNAPPY_KIND[row["solution_type"]], label
        assert out.shapes.residual <= solver.RESIDUAL_TOL, label
        assert out.volume == pytest.approx(row["volume"], abs=1e-9), label


def test_m004_3_0_is_degenerate():
    out = fill_and_measure(census("m004"), (3, 0))
    assert out.kind is OutcomeClass.DEGENERATE
    assert "singular" in out.diagnostic
    assert abs(out.volume) < 1e-9


def test_fig8_order4_volume():
    out = fill_and_measure(census("m004"), Slope(4, 0))
    assert out.kind is OutcomeClass.NONGEOMETRIC
    v3 = float(mpmath.clsin(2, mpmath.pi / 3))
    assert out.volume == pytest.approx(v3 / 2, abs=1e-12)


def test_filled_row_holds_at_target():
    t = census("m009")
    system = build_system(t, FillingSpec.of((3, 0)))
    out = solve(system, complete_structure(t).shapes)
    assert solver.residual(system, out.shapes) <= 1e-12
    assert solver.residual(system, out.shapes, t=0.0) > 1.0


def test_classify_thresholds():
    mk = ShapeAssignment.principal
    assert classify(mk([0.5 + 0.8j, 0.2 + 1e-8j])) is OutcomeClass.GEOMETRIC
    assert classify(mk([0.5 + 0.8j, 0.2 + 1e-10j])) is OutcomeClass.DEGENERATE
    assert classify(mk([0.5 + 0.8j, 0.2 - 1e-10j])) is OutcomeClass.DEGENERATE
    assert classify(mk([0.5 + 0.8j, 0.2 - 1e-8j])) is OutcomeClass.NONGEOMETRIC


def test_conjugate_negates_volume():
    sh = complete_structure(census("m006")).shapes
    assert solver.volume(sh.conjugate()) == pytest.approx(-solver.volume(sh), abs=1e-12)


def test_seed_length_checked():
    t = census("m004")
    with pytest.raises(SystemShapeError):
        solve(build_system(t), ShapeAssignment.principal([0.5 + 0.5j]))
    with pytest.raises(SystemShapeError):
        ShapeAssignment.principal([1.0])


def test_unreachable_target_reports_no_solution():
    # one tetrahedron, z = target: log z = 2 pi i has no solution with z != 1
    from orbvol.triangulation import GluingEquation

    row = GluingEquation(((1, 0, 0),), 0)
    system = EquationSystem(1, (row,), (0.0,), (2.0,), ("row",))
    seed = ShapeAssignment.principal([0.5 + 0.5j])
    out = solve(system, seed, steps=2, max_steps=8)
    assert out.kind is OutcomeClass.NOSOLUTION and "did not converge" in out.diagnostic


def test_conditioning_separates_singular_root():
    t = census("m004")
    good = fill_and_measure(t, (4, 0))
    system = build_system(t, FillingSpec.of((4, 0)))
    assert solver.conditioning(system, good.shapes) > 1e-2
