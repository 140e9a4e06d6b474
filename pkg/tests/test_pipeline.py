import json
import math

import pytest

from orbvol import bounds
from orbvol.constants import CENSUS_NAMES
from orbvol.pipeline import (SearchDomainError, candidate_slopes, classify_outcomes, cmd_appendix,
                             cmd_homology_demo, cmd_seven_torsion, enumerate_slopes, fixture_cusp,
                             in_filling_set, reduce_labels)
from orbvol.solver import OutcomeClass
from orbvol.triangulation import Slope, census

from conftest import SNAPPY_KIND


def _brute(cusp, L, m, box=60):
    tm, tl = cusp.translations
    out = set()
    for p in range(-box, box + 1):
        for q in range(-box, box + 1):
            if (p, q) != (0, 0) and math.gcd(p, q) == m and abs(p * tm + q * tl) <= L:
                out.add(Slope.normalized(p, q))
    return out


@pytest.mark.parametrize("name", CENSUS_NAMES)
@pytest.mark.parametrize("L,m", [(7.3, 3), (7.7, 4), (12.0, 2), (20.0, 5)])
def test_candidate_box_is_complete(name, L, m):
    cusp = fixture_cusp(census(name))
    inside, near = candidate_slopes(cusp, L, m)
    assert {s for s, _ in inside} == _brute(cusp, L, m)
    assert all(s.p > 0 or (s.p == 0 and s.q > 0) for s, _ in inside)
    assert all(L < ln <= 1.02 * L for _, ln in near)


def test_searches_match_oracle_sets(census_oracle, filling_oracle):
    for budget, m, names in ((0.32, 3, CENSUS_NAMES), (0.51, 4, CENSUS_NAMES[:6])):
        for name in names:
            res = enumerate_slopes(name, budget, m)
            vol = float(census_oracle[name]["volume"])
            L = bounds.max_slope_length(budget, vol)
            want = {(r["p"], r["q"]): r for r in filling_oracle
                    if r["search"] == f"{budget}/{m}" and r["manifold"] == name and r["length"] <= L}
            got = {(r.slope.p, r.slope.q): r for r in res.slopes}
            assert set(got) == set(want), name
            for key, r in got.items():
                assert str(r.outcome) == SNAPPY_KIND[want[key]["solution_type"]]
                assert r.length == pytest.approx(want[key]["length"], rel=1e-9)
                # each slope re-verifies its defining inequality
                assert in_filling_set(r.length, budget, res.complete_volume)
                assert r.margin >= 0


def test_filling_set_matches_cutoff():
    for vol in (2.03, 2.83):
        for budget in (0.32, 0.51):
            L = bounds.max_slope_length(budget, vol)
            assert in_filling_set(L * (1 - 1e-12), budget, vol)
            assert not in_filling_set(L * (1 + 1e-9), budget, vol)


def test_parallel_equals_serial():
    a = enumerate_slopes("m003", 0.32, 3, jobs=1)
    b = enumerate_slopes("m003", 0.32, 3, jobs=2)
    assert a.to_dict() == b.to_dict()


def test_search_domain_errors():
    with pytest.raises(SearchDomainError):
        enumerate_slopes("m004", 3.0, 3)
    with pytest.raises(SearchDomainError):
        enumerate_slopes("m004", 0.32, 1)


def test_tally():
    res = [enumerate_slopes(n, 0.51, 4, solve=True) for n in CENSUS_NAMES[:6]]
    tally = classify_outcomes(res)
    assert sorted(tally.exceptional) == ["m004(4,0)", "m006(4,0)", "m009(4,0)"]
    assert tally.count(OutcomeClass.NONGEOMETRIC) == 3


def test_unsolved_search_lists_slopes():
    res = enumerate_slopes("m004", 0.32, 3, solve=False)
    assert [str(r.slope) for r in res.slopes] == ["(3,0)"]
    assert res.slopes[0].volume is None


@pytest.mark.parametrize("labels,floor,want", [
    ([2, 5, 3, 7], 3, [2, 3, 3, 3]),
    ([2, 2], 3, [2, 2]),
    ([4, 9, 6], 4, [4, 4, 4]),
    ([5, 7], 5, [5, 5]),
])
def test_reduce_labels(labels, floor, want):
    assert reduce_labels(labels, floor) == want


@pytest.mark.parametrize("labels,floor", [([1, 3], 3), ([3, 5], 4), ([4], 2)])
def test_reduce_labels_errors(labels, floor):
    with pytest.raises(ValueError):
        reduce_labels(labels, floor)


def test_small_commands_pass():
    for cmd in (cmd_seven_torsion, cmd_appendix, cmd_homology_demo):
        rep = cmd()
        assert rep.passed and rep.exit_code == 0, [v.claim for v in rep.verdicts if not v.passed]


def test_reports_deterministic_modulo_timestamp():
    a = cmd_appendix().to_json(timestamp=False)
    b = cmd_appendix().to_json(timestamp=False)
    assert a == b
    assert "timestamp" not in json.loads(a)
    assert "timestamp" in cmd_appendix().to_dict()


def test_failed_verdict_sets_exit_code():
    rep = cmd_seven_torsion()
    rep.verdict("forced failure", False)
    assert not rep.passed and rep.exit_code == 1
    assert "FAIL  forced failure" in rep.to_text()
