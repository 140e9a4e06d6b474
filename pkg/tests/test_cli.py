import json
import shutil
from importlib import resources

import pytest

from orbvol.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bounds_drill_text(capsys):
    code, out, _ = run(capsys, "bounds", "drill", "0.294", "--no-timestamp")
    assert code == 0
    assert "drill_factor(r=0.294)" in out and "overall: PASS" in out


def test_bounds_json_schema(capsys):
    code, out, _ = run(capsys, "bounds", "collar", "7", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert set(doc) >= {"command", "constants", "chains", "searches", "verdicts"}
    assert doc["chains"][0]["final"] == pytest.approx(0.54527, abs=1e-5)
    assert all(set(v) >= {"claim", "pass"} for v in doc["verdicts"])


def test_bounds_fill_domain_is_usage_error(capsys):
    code, _, err = run(capsys, "bounds", "fill", "6.0")
    assert code == 2 and "2 pi" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["prove", "nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["search", "m004", "--gcd", "3"])
    assert exc.value.code == 2


def test_search_json(capsys):
    code, out, _ = run(capsys, "search", "m004", "--budget", "0.51", "--gcd", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    (s,) = doc["searches"]
    assert s["manifold"] == "m004"
    assert [(r["p"], r["q"], r["outcome"]) for r in s["slopes"]] == [(4, 0, "NonGeometric")]
    assert set(s["slopes"][0]) >= {"p", "q", "length", "outcome", "volume"}


def test_search_budget_above_volume_is_usage_error(capsys):
    code, _, _ = run(capsys, "search", "m004", "--budget", "5", "--gcd", "3")
    assert code == 2


def test_unknown_manifold_is_fixture_error(capsys):
    code, _, err = run(capsys, "search", "m999", "--budget", "0.3", "--gcd", "3")
    assert code == 3 and "m004" in err


def test_fixture_dir(capsys, tmp_path):
    code, _, _ = run(capsys, "search", "m004", "--budget", "0.5", "--gcd", "4", "--fixtures", str(tmp_path))
    assert code == 3
    src = resources.files("orbvol") / "data"
    for name in ("m004.tri", "h1.txt"):
        shutil.copy(src / name, tmp_path / name)
    code, _, _ = run(capsys, "search", "m004", "--budget", "0.5", "--gcd", "4", "--fixtures", str(tmp_path))
    assert code == 0
    (tmp_path / "m004.tri").write_text("name m004\ntet 2 cusps 1\nedge 0 : 1 x 0\n")
    code, _, err = run(capsys, "search", "m004", "--budget", "0.5", "--gcd", "4", "--fixtures", str(tmp_path))
    assert code == 3 and "fixture" in err


def test_prove_passing_commands(capsys):
    for cmd in ("seventorsion", "appendix", "homology"):
        code, out, _ = run(capsys, "prove", cmd)
        assert code == 0 and "overall: PASS" in out


def test_figures(capsys, tmp_path):
    code, _, err = run(capsys, "search", "m006", "--budget", "0.32", "--gcd", "3",
                       "--figures", str(tmp_path))
    assert code == 0
    pngs = sorted(p.name for p in tmp_path.glob("*.png"))
    assert len(pngs) == 2 and "figure:" in err
    assert all((tmp_path / p).stat().st_size > 1000 for p in pngs)
    code, _, _ = run(capsys, "prove", "seventorsion", "--figures", str(tmp_path))
    assert any("drill_factor" in p.name for p in tmp_path.glob("*.png"))
