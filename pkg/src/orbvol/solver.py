"""Newton continuation for gluing and orbifold Dehn filling equations.

Each tetrahedron carries three log-parameters

    L1 = log z,  L2 = log 1/(1 - z),  L3 = pi i - L1 - L2,

so their sum is pi i by construction.  L1 and L2 are tracked on explicit
branches (principal log plus an integer winding) chosen by continuity, so
equations with 2 pi i targets stay consistent along the continuation path.
A row with coefficients (a, b, c) and target k reads

    sum_i a_i L1_i + b_i L2_i + c_i L3_i = k pi i.
"""

from __future__ import annotations

import cmath
import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .triangulation import FillingSpec, GluingEquation, IdealTriangulation, Slope
from .volume import VolumeDomainError, bloch_wigner

log = logging.getLogger(__name__)

EPS_ORIENT = 1e-9
RESIDUAL_TOL = 1e-12
DEFAULT_STAGES = 32
MAX_STAGES = 256
NEWTON_CAP = 60
SINGULAR_TOL = 1e-6  # relative smallest singular value of the Jacobian at a root
TWO_PI_I = 2j * math.pi


class SystemShapeError(ValueError):
    pass


class OutcomeClass(str, enum.Enum):
    GEOMETRIC = "Geometric"
    NONGEOMETRIC = "NonGeometric"
    DEGENERATE = "Degenerate"
    NOSOLUTION = "NoSolution"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EquationSystem:
    """Rows of a gluing system and the targets at both ends of the continuation.

    ``start`` is the target vector (in units of pi i) satisfied by the complete
    structure; ``target`` the one to reach.  Filled rows start at 0.
    """

    n_tet: int
    rows: tuple[GluingEquation, ...]
    start: tuple[float, ...]
    target: tuple[float, ...]
    labels: tuple[str, ...]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([[t for t in row.coeffs] for row in self.rows], dtype=float)

    def arrays(self):
        C = self.coefficients  # rows x n x 3
        P = C[:, :, 0] - C[:, :, 2]
        Q = C[:, :, 1] - C[:, :, 2]
        csum = C[:, :, 2].sum(axis=1)
        return P, Q, csum


@dataclass(frozen=True)
class ShapeAssignment:
    shapes: tuple[complex, ...]
    log_z: tuple[complex, ...]
    log_zp: tuple[complex, ...]
    residual: float = math.inf

    @classmethod
    def principal(cls, shapes) -> "ShapeAssignment":
        zs = tuple(complex(z) for z in shapes)
        for z in zs:
            if z in (0, 1):
                raise SystemShapeError(f"degenerate shape {z}")
        return cls(zs, tuple(cmath.log(z) for z in zs), tuple(-cmath.log(1 - z) for z in zs))

    def log_params(self, i: int) -> tuple[complex, complex, complex]:
        l1, l2 = self.log_z[i], self.log_zp[i]
        return l1, l2, 1j * math.pi - l1 - l2

    def conjugate(self) -> "ShapeAssignment":
        return ShapeAssignment.principal([z.conjugate() for z in self.shapes])

    def __len__(self):
        return len(self.shapes)


@dataclass(frozen=True)
class SolveOutcome:
    kind: OutcomeClass
    shapes: ShapeAssignment | None = None
    volume: float | None = None
    stages: int = 0
    diagnostic: str = ""

    @property
    def converged(self) -> bool:
        return self.shapes is not None


# -- system assembly ----------------------------------------------------------

def build_system(tri: IdealTriangulation, filling: FillingSpec | None = None) -> EquationSystem:
    """Edge rows plus one row per cusp: completeness or the filling slope."""
    if filling is None:
        filling = FillingSpec.complete(tri.n_cusps)
    if len(filling) != tri.n_cusps:
        raise SystemShapeError(f"filling has {len(filling)} entries for {tri.n_cusps} cusps")
    rows = list(tri.edge_equations)
    start = [2.0] * len(rows)
    target = [2.0] * len(rows)
    labels = [f"edge {k}" for k in range(len(rows))]
    for c, ((mer, lon), slope) in enumerate(zip(tri.cusp_equations, filling.slopes)):
        if slope is None:
            rows.append(mer)
            start.append(0.0)
            target.append(0.0)
            labels.append(f"cusp {c} meridian")
        else:
            row = mer.scaled(slope.p) + lon.scaled(slope.q)
            rows.append(GluingEquation(row.coeffs, 2))
            start.append(0.0)
            target.append(2.0)
            labels.append(f"cusp {c} filling {slope}")
    return EquationSystem(tri.n_tet, tuple(rows), tuple(start), tuple(target), tuple(labels))


def completeness_system(tri: IdealTriangulation) -> EquationSystem:
    """Edge rows plus both peripheral rows of every cusp, all at the complete targets."""
    rows = list(tri.edge_equations)
    labels = [f"edge {k}" for k in range(len(rows))]
    for c, (mer, lon) in enumerate(tri.cusp_equations):
        rows += [mer, lon]
        labels += [f"cusp {c} meridian", f"cusp {c} longitude"]
    vals = tuple(2.0 if k < tri.n_tet else 0.0 for k in range(len(rows)))
    return EquationSystem(tri.n_tet, tuple(rows), vals, vals, tuple(labels))


# -- evaluation ---------------------------------------------------------------

def _evaluate(P, Q, csum, targets, L1, L2):
    return P @ L1 + Q @ L2 + 1j * math.pi * (csum - targets)


def residual(system: EquationSystem, shapes: ShapeAssignment, t: float = 1.0) -> float:
    P, Q, csum = system.arrays()
    targets = (1 - t) * np.array(system.start) + t * np.array(system.target)
    F = _evaluate(P, Q, csum, targets, np.array(shapes.log_z), np.array(shapes.log_zp))
    return float(np.max(np.abs(F))) if F.size else 0.0


def _rebranch(z, old_l1, old_l2, track=True):
    l1 = np.log(z)
    l2 = -np.log(1 - z)
    if not track:
        return l1, l2
    l1 = l1 + TWO_PI_I * np.round((old_l1 - l1) / TWO_PI_I)
    l2 = l2 + TWO_PI_I * np.round((old_l2 - l2) / TWO_PI_I)
    return l1, l2


def _newton(P, Q, csum, targets, z, L1, L2, tol=RESIDUAL_TOL, cap=NEWTON_CAP, track=True):
    """Damped least-squares Newton; returns (z, L1, L2, residual) or None.

    With ``track`` off the logs stay principal, which is what the complete
    structure needs (a wandering branch satisfies shifted equations).
    """
    F = _evaluate(P, Q, csum, targets, L1, L2)
    res = np.max(np.abs(F))
    for _ in range(cap):
        if not np.isfinite(res):
            return None
        if res <= tol:
            return z, L1, L2, res
        J = P / z + Q / (1 - z)
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        lam = 1.0
        # keep every shape away from 0 and 1 within a single step
        guard = np.min(np.minimum(np.abs(z), np.abs(1 - z)) / np.maximum(np.abs(step), 1e-300))
        if guard < 2.0:
            lam = min(lam, guard / 2.0)
        best = None
        for _ in range(30):
            zn = z + lam * step
            if np.all(np.isfinite(zn)) and np.all(zn != 0) and np.all(zn != 1):
                l1, l2 = _rebranch(zn, L1, L2, track)
                Fn = _evaluate(P, Q, csum, targets, l1, l2)
                rn = np.max(np.abs(Fn))
                if rn < res or rn <= tol:
                    best = (zn, l1, l2, Fn, rn)
                    break
            lam *= 0.5
        if best is None:
            return (z, L1, L2, res) if res <= 1e3 * tol else None
        z, L1, L2, F, new_res = best
        if new_res >= res and new_res > tol:
            return None
        res = new_res
    return (z, L1, L2, res) if res <= tol else None


def classify(shapes: ShapeAssignment, eps: float = EPS_ORIENT) -> OutcomeClass:
    ims = [z.imag for z in shapes.shapes]
    if any(y < -eps for y in ims):
        return OutcomeClass.NONGEOMETRIC
    if any(abs(y) <= eps for y in ims):
        return OutcomeClass.DEGENERATE
    return OutcomeClass.GEOMETRIC


def conditioning(system: EquationSystem, shapes: ShapeAssignment) -> float:
    """sigma_min / sigma_max of the shape Jacobian; near 0 at a singular root."""
    P, Q, _ = system.arrays()
    z = np.array(shapes.shapes)
    s = np.linalg.svd(P / z + Q / (1 - z), compute_uv=False)
    return float(s[-1] / s[0]) if s.size and s[0] > 0 else 0.0


def _run(system, seed, stages, tol):
    P, Q, csum = system.arrays()
    start = np.array(system.start)
    target = np.array(system.target)
    z = np.array(seed.shapes, dtype=complex)
    L1 = np.array(seed.log_z, dtype=complex)
    L2 = np.array(seed.log_zp, dtype=complex)
    res = math.inf
    for k in range(stages + 1):
        t = k / stages
        out = _newton(P, Q, csum, (1 - t) * start + t * target, z, L1, L2, tol)
        if out is None:
            return None, f"stage {k}/{stages} (t = {t:.4f}) did not converge"
        z, L1, L2, res = out
    return (z, L1, L2, res), ""


def solve(system: EquationSystem, seed: ShapeAssignment, steps: int = DEFAULT_STAGES,
          max_steps: int = MAX_STAGES, tol: float = RESIDUAL_TOL) -> SolveOutcome:
    """Continue from ``seed`` (a solution of the start targets) to the final targets.

    The stage count doubles after a failure, up to ``max_steps``.
    """
    if len(seed) != system.n_tet:
        raise SystemShapeError(f"seed has {len(seed)} shapes for {system.n_tet} tetrahedra")
    if steps < 1:
        raise ValueError("steps must be positive")
    stages = steps
    diagnostic = ""
    while True:
        with np.errstate(all="ignore"):
            out, diagnostic = _run(system, seed, stages, tol)
        if out is not None:
            break
        if stages * 2 > max_steps:
            return SolveOutcome(OutcomeClass.NOSOLUTION, stages=stages, diagnostic=diagnostic)
        stages *= 2
    z, L1, L2, _ = out
    shapes = ShapeAssignment(tuple(complex(x) for x in z), tuple(complex(x) for x in L1),
                             tuple(complex(x) for x in L2))
    shapes = replace(shapes, residual=residual(system, shapes))
    kind = classify(shapes)
    diagnostic = ""
    # a singular root is not a locally rigid structure (m004(3,0) lands on one)
    cond = conditioning(system, shapes)
    if cond < SINGULAR_TOL:
        kind = OutcomeClass.DEGENERATE
        diagnostic = f"singular Jacobian at the root (relative sigma_min {cond:.1e})"
    try:
        vol = volume(shapes)
    except VolumeDomainError:
        vol = None
    return SolveOutcome(kind, shapes, vol, stages, diagnostic)


def volume(shapes: ShapeAssignment) -> float:
    total = 0.0
    for z in shapes.shapes:
        if z == 0 or z == 1 or not cmath.isfinite(z):
            raise VolumeDomainError(f"shape {z} has no volume")
        total += bloch_wigner(z)
    return total


_SEEDS = (complex(0.5, math.sqrt(3) / 2), 1j, complex(0.5, 1.5), complex(0.8, 0.4), complex(-0.3, 0.9))


def complete_structure(tri: IdealTriangulation, seed=None) -> SolveOutcome:
    """Solve the edge and completeness equations on principal logs.

    Tries a handful of constant seeds, then seeded random starts, and keeps the
    first positively oriented solution (unique when it exists).
    """
    system = completeness_system(tri)
    P, Q, csum = system.arrays()
    targets = np.array(system.target)
    if seed is not None:
        starts = [np.array(seed.shapes, dtype=complex)]
    else:
        rng = np.random.default_rng(0)
        starts = [np.full(tri.n_tet, z) for z in _SEEDS]
        starts += [rng.uniform(-0.5, 1.5, tri.n_tet) + 1j * rng.uniform(0.2, 1.5, tri.n_tet)
                   for _ in range(40)]
    fallback = None
    for z0 in starts:
        with np.errstate(all="ignore"):
            out = _newton(P, Q, csum, targets, z0, np.log(z0), -np.log(1 - z0),
                          cap=200, track=False)
        if out is None:
            continue
        z, L1, L2, _ = out
        shapes = ShapeAssignment(tuple(complex(x) for x in z), tuple(complex(x) for x in L1),
                                 tuple(complex(x) for x in L2))
        shapes = replace(shapes, residual=residual(system, shapes))
        kind = classify(shapes)
        result = SolveOutcome(kind, shapes, volume(shapes), 0)
        if kind is OutcomeClass.GEOMETRIC:
            return result
        fallback = fallback or result
    return fallback or SolveOutcome(OutcomeClass.NOSOLUTION, diagnostic="no start converged")


def fill_and_measure(tri: IdealTriangulation, slope: Slope | tuple[int, int],
                     steps: int = DEFAULT_STAGES) -> SolveOutcome:
    if tri.n_cusps != 1:
        raise SystemShapeError("fill_and_measure expects a one-cusped triangulation")
    if not isinstance(slope, Slope):
        slope = Slope(*slope)
    complete = complete_structure(tri)
    if complete.shapes is None:
        return replace(complete, diagnostic="complete structure not found: " + complete.diagnostic)
    system = build_system(tri, FillingSpec.of(slope))
    return solve(system, complete.shapes, steps=steps)
