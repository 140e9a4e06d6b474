"""Cusp shapes, maximal cusps, and slope lengths.

The maximal cusp is found by developing the triangulation into upper half
space with the cusp at infinity and its horosphere at height 1.  Every other
horoball is a lift of the same cusp; its Euclidean diameter follows from the
cusp-triangle side lengths (Penner's h-lengths).  If the largest diameter
found is D, expanding the cusp by a factor k scales every diameter by k**2,
so first tangency happens at k**2 = 1/D and the maximal area is area/D.

A horoball of diameter d has its top point inside some tetrahedron incident
to its centre, and that tetrahedron reaches height d.  So enumerating the
lifted tetrahedra that reach height >= h finds every horoball of diameter
>= h.  The enumeration crosses only faces whose hemisphere reaches height h;
the tetrahedra meeting {height > h} are connected through such faces.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .solver import ShapeAssignment, build_system, completeness_system, residual
from .triangulation import FillingSpec, IdealTriangulation, Slope

INF = None  # the point at infinity in CP^1

MAX_HOROBALL_TETS = 100_000


class CuspPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class CuspShape:
    modulus: complex
    # True when the raw holonomy ratio had Im < 0 and was replaced by its conjugate
    conjugated: bool = False


@dataclass(frozen=True)
class MaximalCusp:
    area: float
    translations: tuple[complex, complex]
    verified: bool = True
    tetrahedra_visited: int = 0
    status: str = "verified"

    @property
    def modulus(self) -> complex:
        return self.translations[1] / self.translations[0]

    def scaled(self, factor: float) -> "MaximalCusp":
        tm, tl = self.translations
        return MaximalCusp(self.area * factor ** 2, (tm * factor, tl * factor),
                           self.verified, self.tetrahedra_visited, self.status)

    @classmethod
    def from_translations(cls, tm: complex, tl: complex) -> "MaximalCusp":
        area = abs((tm.conjugate() * tl).imag)
        return cls(area, (complex(tm), complex(tl)))


# -- cusp shape -----------------------------------------------------------------

def _row_gradient(row, shapes: ShapeAssignment) -> np.ndarray:
    z = np.array(shapes.shapes)
    C = np.array(row.coeffs, dtype=float)
    return (C[:, 0] - C[:, 2]) / z + (C[:, 1] - C[:, 2]) / (1 - z)


def cusp_shape(tri: IdealTriangulation, shapes: ShapeAssignment, cusp: int = 0,
               tol: float = 1e-9) -> CuspShape:
    """Cusp modulus dv/du: derivative of longitude log-holonomy against meridian's.

    Evaluated on the one-dimensional tangent space of the edge equations at
    the complete structure.
    """
    if tri.n_cusps != 1:
        raise CuspPreconditionError("cusp_shape is implemented for one-cusped triangulations")
    res = residual(completeness_system(tri), shapes)
    if res > tol:
        raise CuspPreconditionError(f"shapes are not complete (residual {res:.3e})")
    J = np.array([_row_gradient(row, shapes) for row in tri.edge_equations])
    _, _, vh = np.linalg.svd(J)
    tangent = vh[-1].conj()
    mer, lon = tri.cusp_equations[cusp]
    du = _row_gradient(mer, shapes) @ tangent
    dv = _row_gradient(lon, shapes) @ tangent
    tau = complex(dv / du)
    # Conjugating (mirroring the cusp picture) keeps |p + q tau| and the basis;
    # negating lambda would relabel (p, q) as (p, -q).
    if tau.imag < 0:
        return CuspShape(tau.conjugate(), conjugated=True)
    return CuspShape(tau)


def slope_length(cusp: MaximalCusp, s) -> float:
    p, q = (s.p, s.q) if isinstance(s, Slope) else s
    tm, tl = cusp.translations
    return abs(p * tm + q * tl)


# -- developing --------------------------------------------------------------

_EDGE_PARAM = {frozenset((0, 1)): 0, frozenset((2, 3)): 0,
               frozenset((0, 2)): 1, frozenset((1, 3)): 1,
               frozenset((0, 3)): 2, frozenset((1, 2)): 2}

_EVEN = [p for p in __import__("itertools").permutations(range(4))
         if sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j]) % 2 == 0]


def _params(z: complex) -> tuple[complex, complex, complex]:
    return z, 1 / (1 - z), 1 - 1 / z


def _edge_shape(z: complex, a: int, b: int) -> complex:
    return _params(z)[_EDGE_PARAM[frozenset((a, b))]]


def _order_with(first=None, last=None):
    for p in _EVEN:
        if (first is None or p[0] == first) and (last is None or p[3] == last):
            return p
    raise AssertionError


def _fourth_point(a, b, c, z):
    """x with tetrahedron (a, b, c, x) of shape z on edge ab."""
    if a is INF:
        return b + z * (c - b)
    if b is INF:
        return a + (c - a) / z
    if c is INF:
        den = 1 - z
        return INF if den == 0 else (b - z * a) / den
    den = (c - a) - z * (c - b)
    if abs(den) < 1e-300:
        return INF
    return (b * (c - a) - z * a * (c - b)) / den


def _vertex_triangle(z: complex, v: int):
    """Positions of the other three vertices with v at infinity, in standard scale."""
    order = _order_with(first=v)
    w = _edge_shape(z, order[0], order[1])
    pos = {order[1]: 0j, order[2]: 1 + 0j, order[3]: w}
    return pos


def _cusp_scales(tri: IdealTriangulation, shapes: ShapeAssignment):
    """Relative sizes of the 4n cusp triangles making up the cusp torus."""
    glue = tri.gluings
    tri_pos = {(t, v): _vertex_triangle(shapes.shapes[t], v)
               for t in range(tri.n_tet) for v in range(4)}
    scale = {(0, 0): 1.0}
    queue = deque([(0, 0)])
    while queue:
        t, v = queue.popleft()
        for f in range(4):
            if f == v:
                continue
            x, y = [k for k in range(4) if k not in (f, v)]
            nb, perm = glue[t].neighbors[f], glue[t].perms[f]
            key = (nb, perm[v])
            mine = abs(tri_pos[t, v][x] - tri_pos[t, v][y])
            theirs = abs(tri_pos[key][perm[x]] - tri_pos[key][perm[y]])
            s = scale[t, v] * mine / theirs
            if key not in scale:
                scale[key] = s
                queue.append(key)
            elif abs(scale[key] - s) > 1e-8 * s:
                raise CuspPreconditionError("cusp triangles do not close up; shapes are not complete")
    if len(scale) != 4 * tri.n_tet:
        raise CuspPreconditionError("expected a single cusp")
    area = sum(scale[t, v] ** 2 * abs(tri_pos[t, v][_order_with(first=v)[3]].imag) / 2
               for (t, v) in scale)
    return scale, tri_pos, area


def _circumradius(a, b, c):
    ab, bc, ca = abs(a - b), abs(b - c), abs(c - a)
    cross = abs(((b - a).conjugate() * (c - a)).imag)
    if cross < 1e-300:
        return math.inf
    return ab * bc * ca / (2 * cross)


def _face_height(points):
    if any(p is INF for p in points):
        return math.inf
    return _circumradius(*points)


class _Lattice:
    def __init__(self, u: complex, v: complex):
        # Lagrange-Gauss reduction
        if abs(u) > abs(v):
            u, v = v, u
        while True:
            mu = round(((v * u.conjugate()).real) / abs(u) ** 2)
            v = v - mu * u
            if abs(v) >= abs(u) - 1e-12:
                break
            u, v = v, u
        self.u, self.v = u, v
        self.det = (u.conjugate() * v).imag

    def coords(self, w: complex):
        a = (w.conjugate() * self.v).imag / (self.u.conjugate() * self.v).imag
        b = (self.u.conjugate() * w).imag / self.det
        return a, b

    def reduce(self, w: complex) -> complex:
        a, b = self.coords(w)
        return w - math.floor(a) * self.u - math.floor(b) * self.v


def _place_neighbor(P, glue, t, f, shapes):
    nb, perm = glue[t].neighbors[f], glue[t].perms[f]
    Q = [None] * 4
    known = [k for k in range(4) if k != f]
    for k in known:
        Q[perm[k]] = P[k]
    missing = perm[f]
    order = _order_with(last=missing)
    a, b, c = (Q[order[0]], Q[order[1]], Q[order[2]])
    Q[missing] = _fourth_point(a, b, c, _edge_shape(shapes.shapes[nb], order[0], order[1]))
    return nb, Q


def _diameters(t, P, scale, tri_pos):
    out = {}
    for a in range(4):
        if P[a] is INF:
            continue
        others = [k for k in range(4) if k != a]
        finite = [k for k in others if P[k] is not INF]
        if len(finite) == 3:
            b, c = finite[0], finite[1]
            h = scale[t, a] * abs(tri_pos[t, a][b] - tri_pos[t, a][c])
            out[a] = h * abs(P[a] - P[b]) * abs(P[a] - P[c]) / abs(P[b] - P[c])
        else:
            b = next(k for k in others if P[k] is INF)
            c = finite[0]
            h = scale[t, a] * abs(tri_pos[t, a][b] - tri_pos[t, a][c])
            out[a] = h * abs(P[a] - P[c])
    return out


def _key(t, P, lattice):
    finite = [p for p in P if p is not INF]
    ref = sum(finite) / len(finite)
    shift = lattice.reduce(ref) - ref
    pts = tuple(None if p is INF else (round((p + shift).real, 7), round((p + shift).imag, 7))
                for p in P)
    return (t, pts)


def _cusp_lattice(tri, shapes, scale, tri_pos):
    """Translation lattice of the cusp at infinity, from developing cusp triangles."""
    glue = tri.gluings
    start = _start_placement(scale, tri_pos)
    seen = {(0, 0): start}
    queue = deque([(0, start)])
    diffs = []
    while queue and len(diffs) < 40:
        t, P = queue.popleft()
        v = P.index(INF)
        for f in range(4):
            if f == v:
                continue
            nb, Q = _place_neighbor(P, glue, t, f, shapes)
            w = Q.index(INF)
            ref_q = next(p for p in Q if p is not INF)
            if (nb, w) in seen:
                old = seen[nb, w]
                k = next(i for i in range(4) if Q[i] is not INF)
                d = Q[k] - old[k]
                if abs(d) > 1e-9:
                    diffs.append(d)
            else:
                seen[nb, w] = Q
                queue.append((nb, Q))
    if len(seen) != 4 * tri.n_tet:
        # need every cusp triangle once before differences make sense
        pass
    diffs.sort(key=abs)
    u = diffs[0]
    for d in diffs[1:]:
        if abs((u.conjugate() * d).imag) > 1e-8 * abs(u) * abs(d):
            lat = _Lattice(u, d)
            break
    else:
        raise CuspPreconditionError("could not find two independent cusp translations")
    # refine: any difference not in the lattice shrinks it
    for d in diffs:
        a, b = lat.coords(d)
        if abs(a - round(a)) > 1e-6 or abs(b - round(b)) > 1e-6:
            lat = _refine(lat, d)
    return lat


def _refine(lat, d):
    vecs = [lat.u, lat.v, d]
    vecs.sort(key=abs)
    best = None
    for i in range(3):
        for j in range(3):
            if i != j and abs((vecs[i].conjugate() * vecs[j]).imag) > 1e-9:
                cand = _Lattice(vecs[i], vecs[j])
                if best is None or abs(cand.det) < abs(best.det):
                    best = cand
    return best


def _start_placement(scale, tri_pos):
    order = _order_with(first=0)
    P = [None] * 4
    P[0] = INF
    s = scale[0, 0]
    for k in order[1:]:
        P[k] = s * tri_pos[0, 0][k]
    return P


def maximal_cusp(tri: IdealTriangulation, shapes: ShapeAssignment,
                 cap: int = MAX_HOROBALL_TETS) -> MaximalCusp:
    """Area and translations of the maximal embedded cusp of a one-cusped manifold."""
    if tri.n_cusps != 1:
        raise CuspPreconditionError("maximal_cusp expects one cusp")
    if tri.gluings is None:
        raise CuspPreconditionError(f"{tri.name} fixture has no face pairings")
    res = residual(completeness_system(tri), shapes)
    if res > 1e-9:
        raise CuspPreconditionError(f"shapes are not complete (residual {res:.3e})")
    scale, tri_pos, area = _cusp_scales(tri, shapes)
    lattice = _cusp_lattice(tri, shapes, scale, tri_pos)
    # normalise the cross-section so the lattice covolume is the cusp area
    glue = tri.gluings

    start = _start_placement(scale, tri_pos)
    best = max(_diameters(0, start, scale, tri_pos).values())
    seen = {_key(0, start, lattice)}
    queue = deque([(0, start)])
    visited = 0
    verified = True
    while queue:
        t, P = queue.popleft()
        visited += 1
        if visited > cap:
            verified = False
            break
        for a, d in _diameters(t, P, scale, tri_pos).items():
            if d > best:
                best = d
        cutoff = best * (1 - 1e-9)
        for f in range(4):
            face = [P[k] for k in range(4) if k != f]
            if _face_height(face) < cutoff:
                continue
            nb, Q = _place_neighbor(P, glue, t, f, shapes)
            key = _key(nb, Q, lattice)
            if key in seen:
                continue
            seen.add(key)
            queue.append((nb, Q))

    max_area = area / best
    tau = cusp_shape(tri, shapes).modulus
    tm = math.sqrt(max_area / tau.imag)
    status = "verified" if verified else f"unverified: horoball search exceeded {cap} tetrahedra"
    return MaximalCusp(max_area, (complex(tm, 0.0), tau * tm), verified, visited, status)
