"""Regenerate the census fixtures and the frozen oracle tables from SnapPy.

SnapPy is only needed to run this script; the package never imports it.

    python3 tools/export_fixtures.py            # writes src/orbvol/data and tests/data
    python3 tools/export_fixtures.py --check    # compare against what is on disk
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

warnings.filterwarnings("ignore")
import snappy  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "orbvol" / "data"
ORACLE = ROOT / "tests" / "data"
NAMES = ["m003", "m004", "m006", "m007", "m009", "m010", "m011", "m015", "m016", "m017"]

# (budget, gcd, manifolds) for the two filling searches
SEARCHES = [(0.32, 3, NAMES), (0.51, 4, NAMES[:6])]


def triples(row, n):
    # SnapPy rows are grouped per tetrahedron: a_0 b_0 c_0 a_1 b_1 c_1 ...
    return " ; ".join(f"{row[3 * i]} {row[3 * i + 1]} {row[3 * i + 2]}" for i in range(n))


def maximal_translations(M):
    """Maximal cusp translations, rotated so that T_lambda / T_mu is the cusp shape (Im > 0)."""
    m, l = M.cusp_translations(method="maximal")[0]
    m, l = complex(m), complex(l)
    area = abs((m.conjugate() * l).imag)
    shape = complex(M.cusp_info(0)["shape"])
    if shape.imag < 0:
        shape = shape.conjugate()
    tm = math.sqrt(area / shape.imag)
    return complex(tm, 0.0), shape * tm, area


def tri_text(name):
    M = snappy.Manifold(name)
    n = M.num_tetrahedra()
    eqs = [list(map(int, r)) for r in M.gluing_equations()]
    lines = [f"# exported from the SnapPy census triangulation of {name}",
             f"name {name}", f"tet {n} cusps {M.num_cusps()}"]
    for k in range(n):
        lines.append(f"edge {k} : {triples(eqs[k], n)}")
    lines.append(f"meridian : {triples(eqs[n], n)} target 0")
    lines.append(f"longitude : {triples(eqs[n + 1], n)} target 0")
    tm, tl, _ = maximal_translations(M)
    lines.append("maxcusp : " + " ".join(f"{x:.15g}" for x in (tm.real, tm.imag, tl.real, tl.imag)))
    for k, line in enumerate(_gluing_lines(M)):
        lines.append(f"glue {k} : {line}")
    return "\n".join(lines) + "\n"


def _gluing_lines(M):
    """Neighbour and permutation block of each tetrahedron from the triangulation file."""
    body = M._to_string().splitlines()
    i = next(j for j, s in enumerate(body) if s.strip().isdigit() and j > 5)
    n = int(body[i])
    out, j = [], i + 1
    for _ in range(n):
        while not body[j].strip():
            j += 1
        nb, perms = body[j].split(), body[j + 1].split()
        out.append(" ".join(nb) + " ; " + " ".join(perms))
        j += 8
    return out


def _abelianize(word, gens):
    v = [0] * len(gens)
    for ch in word:
        k = gens.index(ch.lower())
        v[k] += 1 if ch.islower() else -1
    return v


def h1_line(name):
    G = snappy.Manifold(name).fundamental_group()
    gens = G.generators()
    rows = [_abelianize(r, gens) for r in G.relators()]
    mer, lon = G.peripheral_curves()[0]
    r, c = len(rows), len(gens)
    entries = " ".join(str(x) for row in rows for x in row)
    mv = " ".join(map(str, _abelianize(mer, gens)))
    lv = " ".join(map(str, _abelianize(lon, gens)))
    return f"h1 {name} : relations {r}x{c} ; {entries} ; meridian {mv} ; longitude {lv}"


def census_table():
    out = {}
    for name in NAMES:
        M = snappy.ManifoldHP(name)
        tm, tl, area = maximal_translations(snappy.Manifold(name))
        shape = complex(M.cusp_info(0)["shape"])
        out[name] = {
            "volume": str(M.volume()),
            "cusp_shape": [shape.real, abs(shape.imag)],
            "maxcusp_area": area,
            "meridian_length": abs(tm),
            "longitude_length": abs(tl),
            "homology": str(M.homology()),
        }
    return out


def filling_table(slack=1.05):
    """SnapPy's answer for every slope of the requested gcd inside a slightly enlarged cutoff."""
    out = []
    for budget, m, names in SEARCHES:
        for name in names:
            M = snappy.Manifold(name)
            vol = float(M.volume())
            L = 2 * math.pi / math.sqrt(1 - (budget / vol) ** (2 / 3)) * slack
            tm, tl, area = maximal_translations(M)
            pmax = int(L * abs(tl) / area) + 1
            qmax = int(L * abs(tm) / area) + 1
            for p in range(0, pmax + 1):
                for q in range(-qmax, qmax + 1):
                    if (p == 0 and q <= 0) or math.gcd(p, q) != m:
                        continue
                    length = abs(p * tm + q * tl)
                    if length > L:
                        continue
                    F = snappy.Manifold(name)
                    F.dehn_fill((p, q))
                    out.append({
                        "search": f"{budget}/{m}", "manifold": name, "p": p, "q": q,
                        "length": length, "solution_type": F.solution_type(),
                        "volume": float(F.volume()),
                    })
    return out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    files = {DATA / f"{n}.tri": tri_text(n) for n in NAMES}
    files[DATA / "h1.txt"] = "# abelianized fundamental groups of the census manifolds\n" + \
        "\n".join(h1_line(n) for n in NAMES) + "\n"
    files[ORACLE / "census_oracle.json"] = json.dumps(census_table(), indent=1) + "\n"
    files[ORACLE / "filling_oracle.json"] = json.dumps(filling_table(), indent=1) + "\n"
    bad = 0
    for path, text in files.items():
        if args.check:
            if not path.exists() or path.read_text() != text:
                print(f"differs: {path}")
                bad += 1
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            print(f"wrote {path.relative_to(ROOT)}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
