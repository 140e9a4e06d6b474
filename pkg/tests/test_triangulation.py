import dataclasses

import pytest
from hypothesis import given, strategies as st

from orbvol.constants import CENSUS_NAMES
from orbvol.triangulation import (FixtureSyntaxError, GluingEquation, Slope, UnknownManifoldError,
                                  census, census_all, fixture_text, parse_triangulation, serialize,
                                  validate)

M004 = """name m004
tet 2 cusps 1
edge 0 : 2 1 0 ; 1 0 2
edge 1 : 0 1 2 ; 1 2 0
meridian : 1 0 0 ; 0 -1 0 target 0
longitude : 0 0 0 ; 0 -2 2 target 0
"""


def test_parse_m004():
    t = parse_triangulation(M004)
    assert (t.name, t.n_tet, t.n_cusps) == ("m004", 2, 1)
    assert t.edge_equations[0].coeffs == ((2, 1, 0), (1, 0, 2))
    assert t.cusp_equations[0][1].target_half_turns == 0
    assert t.maxcusp is None and t.gluings is None
    assert validate(t) == []


def test_shipped_m004_matches_inline_copy():
    shipped = census("m004")
    inline = parse_triangulation(M004)
    assert shipped.edge_equations == inline.edge_equations
    assert shipped.cusp_equations == inline.cusp_equations


@pytest.mark.parametrize("name", CENSUS_NAMES)
def test_fixture_round_trip(name):
    t = census(name)
    text = serialize(t)
    assert parse_triangulation(text) == t
    assert serialize(parse_triangulation(text)) == text


@pytest.mark.parametrize("name", CENSUS_NAMES)
def test_fixtures_valid_and_one_cusped(name):
    t = census(name)
    assert validate(t) == []
    assert t.n_cusps == 1
    assert t.maxcusp is not None and len(t.gluings) == t.n_tet


def test_fixture_text_has_comment():
    assert fixture_text("m003").startswith("#")


def _bump(t, k, i, slot, delta):
    eq = t.edge_equations[k]
    coeffs = [list(c) for c in eq.coeffs]
    coeffs[i][slot] += delta
    new = GluingEquation(tuple(tuple(c) for c in coeffs), eq.target_half_turns)
    edges = t.edge_equations[:k] + (new,) + t.edge_equations[k + 1:]
    return dataclasses.replace(t, edge_equations=edges)


@pytest.mark.parametrize("name", ["m004", "m009", "m017"])
def test_every_single_entry_perturbation_is_caught(name):
    t = census(name)
    for k in range(t.n_tet):
        for i in range(t.n_tet):
            for slot in range(3):
                for delta in (1, -1):
                    problems = validate(_bump(t, k, i, slot, delta))
                    assert len(problems) == 1 and problems[0].startswith("coefficient-sum")


def test_edge_target_violation():
    t = census("m004")
    bad = GluingEquation(t.edge_equations[0].coeffs, 3)
    problems = validate(dataclasses.replace(t, edge_equations=(bad,) + t.edge_equations[1:]))
    assert len(problems) == 1 and problems[0].startswith("edge target")


@pytest.mark.parametrize("text,fragment", [
    ("", "empty"),
    ("tet 1 cusps 1\n", "name"),
    ("name x\ntet 2 cusps 1\nedge 0 : 1 0 0\n", "triples"),
    ("name x\ntet 1 cusps 1\nedge 0 : 2 2 2\nmeridian : 1 0 0 target 0\n", "peripheral"),
    ("name x\ntet 1 cusps 1\nedge 0 : 2 2 x\n", "integer"),
    ("name x\ntet 1 cusps 1\nbogus : 1\n", "unknown"),
    ("name x\ntet 1 cusps 1\nedge 0 : 2 2 2\nmeridian : 0 0 0 target 0\n"
     "longitude : 0 0 0 target 0\nmaxcusp : 1 2 3\n", "four"),
    ("name x\ntet 1 cusps 1\nedge 0 : 2 2 2\nmeridian : 0 0 0 target 0\n"
     "longitude : 0 0 0 target 0\nglue 0 : 0 0 0 0 ; 0123 0123 0123 01\n", "permutations"),
])
def test_syntax_errors(text, fragment):
    with pytest.raises(FixtureSyntaxError) as err:
        parse_triangulation(text)
    assert fragment in str(err.value).lower()


def test_unknown_manifold_lists_available():
    with pytest.raises(UnknownManifoldError) as err:
        census("m999")
    assert "m004" in str(err.value)


def test_missing_fixture_dir(tmp_path):
    with pytest.raises(FileNotFoundError):
        census("m004", tmp_path)


def test_census_all_order():
    assert [t.name for t in census_all()] == list(CENSUS_NAMES)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_slope_normalization(p, q):
    if p == q == 0:
        with pytest.raises(ValueError):
            Slope(p, q)
        return
    s = Slope.normalized(p, q)
    assert s.p > 0 or (s.p == 0 and s.q > 0)
    assert Slope(p, q) == Slope(-p, -q) == s
    assert hash(Slope(p, q)) == hash(s)
    m = s.multiplicity
    assert (s.primitive[0] * m, s.primitive[1] * m) == (s.p, s.q)
