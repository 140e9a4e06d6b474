import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# SnapPy's labels for the outcome of a filling
SNAPPY_KIND = {
    "all tetrahedra positively oriented": "Geometric",
    "contains negatively oriented tetrahedra": "NonGeometric",
    "unrecognized solution type": "Degenerate",
}


@pytest.fixture(scope="session")
def census_oracle():
    return json.loads((DATA / "census_oracle.json").read_text())


@pytest.fixture(scope="session")
def filling_oracle():
    return json.loads((DATA / "filling_oracle.json").read_text())


@pytest.fixture(scope="session")
def complete_shapes():
    from orbvol.solver import complete_structure
    from orbvol.triangulation import census_all

    return {t.name: complete_structure(t).shapes for t in census_all()}


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
