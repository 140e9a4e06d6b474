"""Ideal triangulations stored as gluing-equation coefficients.

Fixture files are line oriented::

    name m004
    tet 2 cusps 1
    edge 0 : 1 0 2 ; 1 0 2
    edge 1 : 1 2 0 ; 1 2 0
    meridian : 1 0 0 ; 0 0 -1 target 0
    longitude : 1 0 -1 ; 2 0 -2 target 0
    maxcusp : 0.5 0.866 2.0 0.0
    glue 0 : 1 1 1 1 ; 0132 1230 2310 2103

Each coefficient triple (a, b, c) gives the exponents of the three shape
parameters z, 1/(1 - z), 1 - 1/z of one tetrahedron.  ``maxcusp`` carries
the meridian and longitude translations of the maximal cusp and ``glue``
lines the face pairings (neighbour of face k and the vertex permutation),
which only the horoball search reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .constants import CENSUS_NAMES


class FixtureSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownManifoldError(KeyError):
    pass


Triple = tuple[int, int, int]


@dataclass(frozen=True)
class GluingEquation:
    coeffs: tuple[Triple, ...]
    target_half_turns: int

    def scaled(self, k: int) -> "GluingEquation":
        return GluingEquation(tuple((k * a, k * b, k * c) for a, b, c in self.coeffs),
                              k * self.target_half_turns)

    def __add__(self, other: "GluingEquation") -> "GluingEquation":
        coeffs = tuple((a + x, b + y, c + z)
                       for (a, b, c), (x, y, z) in zip(self.coeffs, other.coeffs))
        return GluingEquation(coeffs, self.target_half_turns + other.target_half_turns)


@dataclass(frozen=True)
class FaceGluing:
    """Neighbour tetrahedron across each face and the vertex permutation."""

    neighbors: tuple[int, int, int, int]
    perms: tuple[tuple[int, int, int, int], ...]


@dataclass(frozen=True)
class IdealTriangulation:
    name: str
    n_tet: int
    n_cusps: int
    edge_equations: tuple[GluingEquation, ...]
    cusp_equations: tuple[tuple[GluingEquation, GluingEquation], ...]
    maxcusp: tuple[complex, complex] | None = None
    gluings: tuple[FaceGluing, ...] | None = None

    def permuted(self, order: Sequence[int]) -> "IdealTriangulation":
        """Relabel tetrahedra: new tetrahedron k is old tetrahedron order[k]."""
        def perm(eq):
            return GluingEquation(tuple(eq.coeffs[i] for i in order), eq.target_half_turns)
        return IdealTriangulation(
            self.name, self.n_tet, self.n_cusps,
            tuple(perm(e) for e in self.edge_equations),
            tuple((perm(m), perm(l)) for m, l in self.cusp_equations),
            self.maxcusp, None)


@dataclass(frozen=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if self.p == 0 and self.q == 0:
            raise ValueError("(0, 0) is not a slope")

    @classmethod
    def normalized(cls, p: int, q: int) -> "Slope":
        """Representative of +-(p, q) with p > 0, or p == 0 and q > 0."""
        if p < 0 or (p == 0 and q < 0):
            p, q = -p, -q
        return cls(p, q)

    @property
    def multiplicity(self) -> int:
        return math.gcd(self.p, self.q)

    @property
    def primitive(self) -> tuple[int, int]:
        m = self.multiplicity
        return (self.p // m, self.q // m)

    def key(self) -> tuple[int, int]:
        s = Slope.normalized(self.p, self.q)
        return (s.p, s.q)

    def __eq__(self, other):
        return isinstance(other, Slope) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        return f"({self.p},{self.q})"


UNFILLED = None


@dataclass(frozen=True)
class FillingSpec:
    """One entry per cusp: None for unfilled, otherwise a Slope."""

    slopes: tuple[Slope | None, ...]

    @classmethod
    def complete(cls, n_cusps: int) -> "FillingSpec":
        return cls((None,) * n_cusps)

    @classmethod
    def of(cls, *slopes) -> "FillingSpec":
        out = []
        for s in slopes:
            if s is None or isinstance(s, Slope):
                out.append(s)
            else:
                out.append(Slope(*s))
        return cls(tuple(out))

    def __len__(self):
        return len(self.slopes)


# -- parsing ----------------------------------------------------------------

def _parse_coeffs(text: str, lineno: int) -> tuple[Triple, ...]:
    out = []
    for chunk in text.split(";"):
        parts = chunk.split()
        if len(parts) != 3:
            raise FixtureSyntaxError(f"expected a coefficient triple, got {chunk.strip()!r}", lineno)
        try:
            out.append(tuple(int(x) for x in parts))
        except ValueError:
            raise FixtureSyntaxError(f"non-integer coefficient in {chunk.strip()!r}", lineno) from None
    return tuple(out)


def parse_triangulation(text: str) -> IdealTriangulation:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise FixtureSyntaxError("empty fixture", 1)

    it = iter(lines)
    lineno, body = next(it)
    head = body.split()
    if len(head) != 2 or head[0] != "name":
        raise FixtureSyntaxError("expected 'name <id>'", lineno)
    name = head[1]

    try:
        lineno, body = next(it)
    except StopIteration:
        raise FixtureSyntaxError("missing 'tet' header", lineno) from None
    head = body.split()
    if len(head) != 4 or head[0] != "tet" or head[2] != "cusps":
        raise FixtureSyntaxError("expected 'tet <n> cusps <k>'", lineno)
    try:
        n_tet, n_cusps = int(head[1]), int(head[3])
    except ValueError:
        raise FixtureSyntaxError("non-integer tetrahedron or cusp count", lineno) from None
    if n_tet < 1 or n_cusps < 1:
        raise FixtureSyntaxError("counts must be positive", lineno)

    edges: list[GluingEquation] = []
    peripheral: list[GluingEquation] = []
    maxcusp = None
    gluings: dict[int, FaceGluing] = {}
    last = lineno
    for lineno, body in it:
        last = lineno
        key, sep, rest = body.partition(":")
        if not sep:
            raise FixtureSyntaxError(f"missing ':' in {body!r}", lineno)
        words = key.split()
        if not words:
            raise FixtureSyntaxError("missing keyword", lineno)
        kind = words[0]
        if kind == "edge":
            if len(words) != 2 or not words[1].lstrip("-").isdigit():
                raise FixtureSyntaxError("expected 'edge <k> :'", lineno)
            if int(words[1]) != len(edges):
                raise FixtureSyntaxError(f"edge {words[1]} out of order", lineno)
            if peripheral:
                raise FixtureSyntaxError("edge row after peripheral rows", lineno)
            coeffs = _parse_coeffs(rest, lineno)
            if len(coeffs) != n_tet:
                raise FixtureSyntaxError(
                    f"edge row has {len(coeffs)} triples but header says {n_tet} tetrahedra", lineno)
            edges.append(GluingEquation(coeffs, 2))
        elif kind in ("meridian", "longitude"):
            expected = "meridian" if len(peripheral) % 2 == 0 else "longitude"
            if kind != expected:
                raise FixtureSyntaxError(f"expected a {expected} row", lineno)
            body_, _, tgt = rest.rpartition("target")
            if not _:
                raise FixtureSyntaxError("peripheral row needs 'target <k>'", lineno)
            try:
                target = int(tgt)
            except ValueError:
                raise FixtureSyntaxError(f"bad target {tgt.strip()!r}", lineno) from None
            coeffs = _parse_coeffs(body_, lineno)
            if len(coeffs) != n_tet:
                raise FixtureSyntaxError(
                    f"{kind} row has {len(coeffs)} triples but header says {n_tet} tetrahedra", lineno)
            peripheral.append(GluingEquation(coeffs, target))
        elif kind == "maxcusp":
            try:
                vals = [float(x) for x in rest.split()]
            except ValueError:
                raise FixtureSyntaxError("non-numeric maxcusp entry", lineno) from None
            if len(vals) != 4:
                raise FixtureSyntaxError("maxcusp needs four reals", lineno)
            maxcusp = (complex(vals[0], vals[1]), complex(vals[2], vals[3]))
        elif kind == "glue":
            if len(words) != 2:
                raise FixtureSyntaxError("expected 'glue <tet> :'", lineno)
            tet = int(words[1])
            nb, _, perms = rest.partition(";")
            try:
                neighbors = tuple(int(x) for x in nb.split())
            except ValueError:
                raise FixtureSyntaxError("bad neighbour list", lineno) from None
            perm_words = perms.split()
            if len(neighbors) != 4 or len(perm_words) != 4 or any(
                    len(w) != 4 or sorted(w) != list("0123") for w in perm_words):
                raise FixtureSyntaxError("glue needs 4 neighbours and 4 permutations", lineno)
            gluings[tet] = FaceGluing(neighbors, tuple(tuple(int(c) for c in w) for w in perm_words))
        else:
            raise FixtureSyntaxError(f"unknown keyword {kind!r}", lineno)

    if len(edges) != n_tet:
        raise FixtureSyntaxError(f"found {len(edges)} edge rows for {n_tet} tetrahedra", last)
    if len(peripheral) != 2 * n_cusps:
        raise FixtureSyntaxError(
            f"found {len(peripheral)} peripheral rows for {n_cusps} cusps", last)
    glue_tuple = None
    if gluings:
        if sorted(gluings) != list(range(n_tet)):
            raise FixtureSyntaxError("glue lines must cover every tetrahedron", last)
        glue_tuple = tuple(gluings[i] for i in range(n_tet))
    cusps = tuple((peripheral[2 * i], peripheral[2 * i + 1]) for i in range(n_cusps))
    return IdealTriangulation(name, n_tet, n_cusps, tuple(edges), cusps, maxcusp, glue_tuple)


def _format_coeffs(eq: GluingEquation) -> str:
    return " ; ".join(f"{a} {b} {c}" for a, b, c in eq.coeffs)


def serialize(tri: IdealTriangulation) -> str:
    out = [f"name {tri.name}", f"tet {tri.n_tet} cusps {tri.n_cusps}"]
    for k, eq in enumerate(tri.edge_equations):
        out.append(f"edge {k} : {_format_coeffs(eq)}")
    for mer, lon in tri.cusp_equations:
        out.append(f"meridian : {_format_coeffs(mer)} target {mer.target_half_turns}")
        out.append(f"longitude : {_format_coeffs(lon)} target {lon.target_half_turns}")
    if tri.maxcusp is not None:
        tm, tl = tri.maxcusp
        out.append("maxcusp : " + " ".join(repr(float(x)) for x in (tm.real, tm.imag, tl.real, tl.imag)))
    if tri.gluings is not None:
        for k, g in enumerate(tri.gluings):
            nb = " ".join(str(x) for x in g.neighbors)
            perms = " ".join("".join(str(c) for c in p) for p in g.perms)
            out.append(f"glue {k} : {nb} ; {perms}")
    return "\n".join(out) + "\n"


# -- validation -------------------------------------------------------------

def validate(tri: IdealTriangulation) -> list[str]:
    """Names of violated invariants; empty when the triangulation is consistent."""
    problems = []
    if tri.n_tet < 1:
        problems.append("tet-count: n_tet must be positive")
    if len(tri.edge_equations) != tri.n_tet:
        problems.append(f"edge-count: {len(tri.edge_equations)} edge equations for {tri.n_tet} tetrahedra")
    if len(tri.cusp_equations) != tri.n_cusps:
        problems.append(f"cusp-count: {len(tri.cusp_equations)} peripheral pairs for {tri.n_cusps} cusps")
    for k, eq in enumerate(tri.edge_equations):
        if len(eq.coeffs) != tri.n_tet:
            problems.append(f"row-length: edge {k} has {len(eq.coeffs)} triples")
        if eq.target_half_turns != 2:
            problems.append(f"edge target: edge {k} has target {eq.target_half_turns}, expected 2")
    for c, pair in enumerate(tri.cusp_equations):
        for label, eq in zip(("meridian", "longitude"), pair):
            if len(eq.coeffs) != tri.n_tet:
                problems.append(f"row-length: cusp {c} {label} has {len(eq.coeffs)} triples")
            if eq.target_half_turns != 0:
                problems.append(f"cusp target: cusp {c} {label} has target {eq.target_half_turns}, expected 0")
    if problems:
        return problems
    for i in range(tri.n_tet):
        for slot, label in enumerate("abc"):
            total = sum(eq.coeffs[i][slot] for eq in tri.edge_equations)
            if total != 2:
                problems.append(f"coefficient-sum: tetrahedron {i} column {label} sums to {total}, expected 2")
    total_target = sum(eq.target_half_turns for eq in tri.edge_equations)
    if total_target != 2 * tri.n_tet:
        problems.append(f"target-sum: edge targets sum to {total_target}, expected {2 * tri.n_tet}")
    return problems


# -- census -----------------------------------------------------------------

def _data_dir():
    return resources.files("orbvol") / "data"


def census(name: str, fixtures: str | Path | None = None) -> IdealTriangulation:
    """One of the ten census manifolds of volume at most 2.848."""
    if name not in CENSUS_NAMES:
        raise UnknownManifoldError(
            f"unknown manifold {name!r}; available: {', '.join(CENSUS_NAMES)}")
    base = Path(fixtures) if fixtures is not None else _data_dir()
    text = (base / f"{name}.tri").read_text(encoding="utf-8")
    return parse_triangulation(text)


def census_all(fixtures=None) -> list[IdealTriangulation]:
    return [census(n, fixtures) for n in CENSUS_NAMES]


def fixture_text(name: str, fixtures=None) -> str:
    base = Path(fixtures) if fixtures is not None else _data_dir()
    return (base / f"{name}.tri").read_text(encoding="utf-8")


def iter_rows(tri: IdealTriangulation) -> Iterable[GluingEquation]:
    yield from tri.edge_equations
    for m, l in tri.cusp_equations:
        yield m
        yield l
