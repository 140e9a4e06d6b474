"""Integer Smith normal form, abelian group presentations, and the mod-n
branched-cover criterion.

Matrices are lists of lists of Python ints, so arithmetic is exact at any
size.  A presentation stores relations as *rows*: the group is
``Z^g / rowspan(relations)``.  Group elements are integer row vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Sequence

Matrix = list[list[int]]


class PresentationError(ValueError):
    pass


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(a))]


def determinant(a: Matrix) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with U, V unimodular and D diagonal."""

    D: Matrix
    U: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        rows = len(self.D)
        cols = len(self.D[0]) if rows else 0
        return [self.D[i][i] for i in range(min(rows, cols))]


def smith_normal_form(a: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Smith normal form of an integer matrix.

    ``cols`` is only needed for a matrix with zero rows.  The diagonal is
    nonnegative and each entry divides the next (zeros last).
    """
    A = [[int(x) for x in row] for row in a]
    m = len(A)
    n = len(A[0]) if m else (cols or 0)
    if any(len(row) != n for row in A):
        raise PresentationError("ragged matrix")
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row_dst += c * row_src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for M in (A, V):
            for row in M:
                row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        done = False
            if done:
                # pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % A[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # move a smaller remainder into the pivot position
            best = (t, t)
            for i in range(t, m):
                if A[i][t] and abs(A[i][t]) < abs(A[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, n):
                if A[t][j] and abs(A[t][j]) < abs(A[best[0]][best[1]]):
                    best = (t, j)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SmithForm(A, U, V)


@dataclass(frozen=True)
class AbelianGroupInvariants:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        for d1, d2 in zip(self.torsion, self.torsion[1:]):
            if d2 % d1:
                raise ValueError(f"invariant factors {self.torsion} break divisibility")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion factors must be >= 2")

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """``Z^generators`` modulo the row span of ``relations``, with named classes."""

    generators: int
    relations: tuple[tuple[int, ...], ...]
    marked: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for row in self.relations:
            if len(row) != self.generators:
                raise PresentationError(
                    f"relation of length {len(row)} in a group on {self.generators} generators")
        for name, vec in self.marked.items():
            if len(vec) != self.generators:
                raise PresentationError(f"marked class {name!r} has length {len(vec)}")

    @classmethod
    def from_rows(cls, relations, marked=None, generators=None):
        rels = tuple(tuple(int(x) for x in row) for row in relations)
        g = generators if generators is not None else (len(rels[0]) if rels else 0)
        classes = {k: tuple(int(x) for x in v) for k, v in (marked or {}).items()}
        return cls(g, rels, classes)

    def with_relations(self, extra: Sequence[Sequence[int]]) -> "AbelianGroupPresentation":
        return AbelianGroupPresentation.from_rows(
            list(self.relations) + [list(r) for r in extra], self.marked, self.generators)

    def smith(self) -> SmithForm:
        return smith_normal_form([list(r) for r in self.relations], cols=self.generators)

    def resolve(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a class in the presentation's own vector form."""
        if isinstance(vec, str):
            return self.marked[vec]
        if len(vec) != self.generators:
            raise PresentationError(f"vector of length {len(vec)} for {self.generators} generators")
        return tuple(int(x) for x in vec)


@dataclass(frozen=True)
class CyclicDecomposition:
    """A group written as a sum of cyclic factors of the given orders (0 = Z).

    ``coords(x)`` expresses a class in that basis; trivial factors dropped.
    """

    orders: tuple[int, ...]
    change: Matrix  # columns of V kept, generator coords -> factor coords

    def coords(self, vec: Sequence[int]) -> tuple[int, ...]:
        out = []
        for k, d in enumerate(self.orders):
            c = sum(int(x) * self.change[i][k] for i, x in enumerate(vec))
            out.append(c % d if d else c)
        return tuple(out)

    @property
    def invariants(self) -> AbelianGroupInvariants:
        return AbelianGroupInvariants(
            rank=sum(1 for d in self.orders if d == 0),
            torsion=tuple(d for d in self.orders if d > 1))


def decompose(pres: AbelianGroupPresentation) -> CyclicDecomposition:
    snf = pres.smith()
    diag = snf.diagonal
    g = pres.generators
    orders = [diag[i] if i < len(diag) else 0 for i in range(g)]
    keep = [i for i, d in enumerate(orders) if d != 1]
    change = [[snf.V[r][k] for k in keep] for r in range(g)]
    return CyclicDecomposition(tuple(orders[k] for k in keep), change)


def quotient_invariants(pres: AbelianGroupPresentation,
                        extra_relations: Sequence[Sequence[int]] = ()):
    """Invariants of the quotient by ``extra_relations`` and the images of all
    marked classes in the resulting cyclic basis."""
    for row in extra_relations:
        if len(row) != pres.generators:
            raise PresentationError("extra relation has the wrong length")
    q = pres.with_relations(extra_relations)
    dec = decompose(q)
    images = {name: dec.coords(vec) for name, vec in q.marked.items()}
    return dec.invariants, images


def generates_free_summand(pres: AbelianGroupPresentation, cls) -> bool:
    """True iff the class spans a Z direct summand: some map to Z sends it to 1."""
    dec = decompose(pres)
    c = dec.coords(pres.resolve(cls))
    free = [x for x, d in zip(c, dec.orders) if d == 0]
    g = 0
    for x in free:
        g = gcd(g, x)
    return g == 1


def homomorphisms_to_cyclic(pres: AbelianGroupPresentation, n: int):
    """Yield every homomorphism to Z_n as (decomposition, images of factor generators)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    dec = decompose(pres)
    choices = []
    for d in dec.orders:
        g = n if d == 0 else gcd(d, n)
        step = n // g
        choices.append([step * k for k in range(g)])
    for images in itertools.product(*choices):
        yield dec, images


def branched_cover_exists(pres: AbelianGroupPresentation, meridians, n: int) -> bool:
    """Is there a map H_1 -> Z_n sending every listed meridian to a unit?

    Exhaustive over the finite set of homomorphisms.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    vecs = [pres.resolve(m) for m in meridians]
    for dec, images in homomorphisms_to_cyclic(pres, n):
        ok = True
        for v in vecs:
            value = sum(c * h for c, h in zip(dec.coords(v), images)) % n
            if gcd(value, n) != 1:
                ok = False
                break
        if ok:
            return True
    return False


def _zero_mod_n(dec: CyclicDecomposition, vec, n: int) -> bool:
    for c, d in zip(dec.coords(vec), dec.orders):
        g = n if d == 0 else gcd(d, n)
        if c % g:
            return False
    return True


def units(n: int) -> list[int]:
    return [c for c in range(1, n) if gcd(c, n) == 1]


def null_homologous_unit_coeffs(ambient: AbelianGroupPresentation, components, n: int) -> bool:
    """Are there units c_i of Z_n with sum c_i [L_i] = 0 in H_1 (x) Z_n?"""
    if n < 2:
        raise ValueError("n must be at least 2")
    vecs = [ambient.resolve(c) for c in components]
    dec = decompose(ambient)
    g = ambient.generators
    for coeffs in itertools.product(units(n), repeat=len(vecs)):
        total = [sum(c * v[i] for c, v in zip(coeffs, vecs)) for i in range(g)]
        if _zero_mod_n(dec, total, n):
            return True
    return False


@dataclass(frozen=True)
class SurgeryInstance:
    """Integer surgery on some components of a framed link in S^3; the rest is L.

    ``linking`` is the symmetric linking matrix with framings on the
    diagonal.  Generators of H_1 are the meridians of all components.
    """

    linking: tuple[tuple[int, ...], ...]
    surgered: tuple[int, ...]

    @property
    def link(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.linking)) if i not in self.surgered)

    def _surgery_rows(self):
        return [list(self.linking[j]) for j in self.surgered]

    def _meridian(self, i):
        return tuple(int(k == i) for k in range(len(self.linking)))

    def _longitude(self, i):
        # Seifert longitude of K_i in S^3: sum over j != i of lk(K_i, K_j) mu_j
        return tuple(0 if j == i else self.linking[i][j] for j in range(len(self.linking)))

    def complement(self) -> AbelianGroupPresentation:
        """H_1(X - L) with meridians and longitudes of the L components marked."""
        marked = {}
        for i in self.link:
            marked[f"meridian{i}"] = self._meridian(i)
            marked[f"longitude{i}"] = self._longitude(i)
        return AbelianGroupPresentation.from_rows(
            self._surgery_rows(), marked, generators=len(self.linking))

    def ambient(self) -> AbelianGroupPresentation:
        """H_1(X) with the class of each component of L marked."""
        rows = self._surgery_rows() + [list(self._meridian(i)) for i in self.link]
        marked = {f"component{i}": self._longitude(i) for i in self.link}
        return AbelianGroupPresentation.from_rows(rows, marked, generators=len(self.linking))


# -- fixtures ---------------------------------------------------------------

def parse_presentation(line: str) -> tuple[str, AbelianGroupPresentation]:
    """Parse ``h1 <name> : relations <r>x<c> ; <entries> ; meridian <v> ; longitude <v>``."""
    head, sep, body = line.partition(":")
    words = head.split()
    if not sep or len(words) != 2 or words[0] != "h1":
        raise PresentationError(f"expected 'h1 <name> :' in {line!r}")
    name = words[1]
    parts = [p.strip() for p in body.split(";")]
    if len(parts) < 2 or not parts[0].startswith("relations"):
        raise PresentationError(f"{name}: expected 'relations <r>x<c>'")
    try:
        r, c = (int(x) for x in parts[0].split()[1].split("x"))
    except (IndexError, ValueError):
        raise PresentationError(f"{name}: bad relation dimensions") from None
    entries = [int(x) for x in parts[1].split()]
    if len(entries) != r * c:
        raise PresentationError(f"{name}: {len(entries)} entries for a {r}x{c} matrix")
    rows = [entries[i * c:(i + 1) * c] for i in range(r)]
    marked = {}
    for part in parts[2:]:
        if not part:
            continue
        label, *vec = part.split()
        if len(vec) != c:
            raise PresentationError(f"{name}: class {label!r} has length {len(vec)}, expected {c}")
        marked[label] = tuple(int(x) for x in vec)
    return name, AbelianGroupPresentation.from_rows(rows, marked, generators=c)


def format_presentation(name: str, pres: AbelianGroupPresentation) -> str:
    r, c = len(pres.relations), pres.generators
    entries = " ".join(str(x) for row in pres.relations for x in row)
    classes = " ; ".join(f"{k} " + " ".join(str(x) for x in v) for k, v in pres.marked.items())
    return f"h1 {name} : relations {r}x{c} ; {entries} ; {classes}"


def load_presentations(path=None) -> dict[str, AbelianGroupPresentation]:
    from importlib import resources
    from pathlib import Path

    if path is None:
        text = (resources.files("orbvol") / "data" / "h1.txt").read_text(encoding="utf-8")
    else:
        p = Path(path)
        text = (p / "h1.txt" if p.is_dir() else p).read_text(encoding="utf-8")
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            name, pres = parse_presentation(line)
            out[name] = pres
    return out


def census_presentation(name: str, path=None) -> AbelianGroupPresentation:
    table = load_presentations(path)
    if name not in table:
        raise KeyError(f"no H_1 fixture for {name!r}")
    return table[name]


def filled_ambient(pres: AbelianGroupPresentation) -> AbelianGroupPresentation:
    """H_1 of the (1,0) filling with the core class marked as ``component``.

    The core of the attached solid torus is isotopic to any curve on the
    boundary meeting the meridian once; the longitude is such a curve.
    """
    amb = pres.with_relations([pres.marked["meridian"]])
    return AbelianGroupPresentation.from_rows(
        amb.relations, {"component": pres.marked["longitude"]}, generators=pres.generators)
