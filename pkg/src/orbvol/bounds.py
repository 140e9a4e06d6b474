"""Closed-form volume inequalities and auditable bound chains."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import constants as C
from .volume import bloch_wigner


class BoundDomainError(ValueError):
    """An inequality was evaluated outside its hypotheses."""


def drill_factor(r: float) -> float:
    """Upper bound on vol(drilled)/vol(filled) for a geodesic link with collar radius >= r.

    coth^3(2r) * (1 + 0.91 / cosh(2r)); strictly decreasing in r, tends to 1.
    """
    if not r > 0:
        raise BoundDomainError(f"collar radius must be positive, got {r}")
    x = 2.0 * r
    return (1.0 / math.tanh(x)) ** 3 * (1.0 + C.value("przeworski_tube") / math.cosh(x))


def fill_factor(l_min: float) -> float:
    """(1 - (2 pi / l_min)^2)^(3/2): volume retained by filling along slopes of length >= l_min."""
    if not l_min > 2 * math.pi:
        raise BoundDomainError(f"slope length {l_min} is not greater than 2 pi")
    return (1.0 - (2 * math.pi / l_min) ** 2) ** 1.5


def max_slope_length(budget: float, volume: float) -> float:
    """Longest slope whose filling could have volume <= budget.

    Inverse of fill_factor: fill_factor(result) * volume == budget.
    """
    if not 0 < budget < volume:
        raise BoundDomainError(f"budget {budget} must lie in (0, {volume})")
    return 2 * math.pi / math.sqrt(1.0 - (budget / volume) ** (2.0 / 3.0))


def collar_high_order(p: int) -> float:
    """Collar radius lower bound for a simple axis of order p >= 7.

    From cosh(2r) >= csc^2(pi/p)/2 - 1.
    """
    if p < 7:
        raise BoundDomainError(f"order {p} is below 7")
    return 0.5 * math.acosh(1.0 / (2.0 * math.sin(math.pi / p) ** 2) - 1.0)


def collar_order4() -> float:
    return 0.5 * math.acosh((1.0 + math.sqrt(3.0)) / 2.0)


def regular_ideal_volume() -> float:
    """v3, the volume of the regular ideal tetrahedron."""
    return bloch_wigner(complex(0.5, math.sqrt(3.0) / 2.0))


def meyerhoff_cusp_volume() -> float:
    return math.sqrt(3.0) / 4.0


def boroczky_density() -> float:
    """Largest fraction of volume a cusp neighborhood can occupy: sqrt(3)/(2 v3)."""
    return math.sqrt(3.0) / (2.0 * regular_ideal_volume())


def cusped_floor() -> float:
    """Volume floor for a link orbifold with a torus cusp: cusp volume / density."""
    return meyerhoff_cusp_volume() / boroczky_density()


@dataclass(frozen=True, order=True)
class TurnoverTriple:
    p: int
    q: int
    r: int

    def __post_init__(self):
        if not 2 <= self.p <= self.q <= self.r <= 6:
            raise ValueError(f"labels {self.as_tuple()} out of range")
        if Fraction(1, self.p) + Fraction(1, self.q) + Fraction(1, self.r) >= 1:
            raise ValueError(f"{self.as_tuple()} is not a hyperbolic turnover")

    def as_tuple(self):
        return (self.p, self.q, self.r)


def turnover_triples() -> list[TurnoverTriple]:
    out = []
    for p, q, r in itertools.combinations_with_replacement(range(2, 7), 3):
        if Fraction(1, p) + Fraction(1, q) + Fraction(1, r) < 1:
            out.append(TurnoverTriple(p, q, r))
    return sorted(out)


def turnover_floor(min_label: int) -> float:
    if min_label == 2:
        return C.value("turnover_floor_2")
    if min_label == 3:
        return C.value("turnover_floor_3")
    raise BoundDomainError(f"no turnover floor recorded for minimum label {min_label}")


TURNOVER_MINIMIZERS = {2: TurnoverTriple(2, 4, 5), 3: TurnoverTriple(3, 3, 4)}


# -- chains -----------------------------------------------------------------

def _div(a, b):
    return a / b


def _mul(a, b):
    return a * b


def _less(a, b):
    return float(a < b)


def _identity(x):
    return x


OPERATIONS: dict[str, Callable[..., float]] = {
    "drill_factor": drill_factor,
    "fill_factor": fill_factor,
    "max_slope_length": max_slope_length,
    "collar_high_order": collar_high_order,
    "collar_order4": collar_order4,
    "regular_ideal_volume": regular_ideal_volume,
    "meyerhoff_cusp_volume": meyerhoff_cusp_volume,
    "boroczky_density": boroczky_density,
    "cusped_floor": cusped_floor,
    "divide": _div,
    "multiply": _mul,
    "constant": _identity,
}


@dataclass(frozen=True)
class Step:
    name: str
    operation: str
    inputs: dict[str, float]
    output: float
    citation: str


@dataclass
class BoundChain:
    """Ordered record of applied inequalities; ``final`` is the last output."""

    title: str
    steps: list[Step] = field(default_factory=list)
    checks: list[tuple[str, bool]] = field(default_factory=list)

    def apply(self, name: str, operation: str, citation: str = "", **inputs: Any) -> float:
        out = float(OPERATIONS[operation](**inputs))
        self.steps.append(Step(name, operation, dict(inputs), out, citation))
        return out

    def constant(self, name: str, constant_name: str) -> float:
        return self.apply(name, "constant", C.citation(constant_name), x=C.value(constant_name))

    def check(self, claim: str, ok: bool) -> bool:
        self.checks.append((claim, bool(ok)))
        return bool(ok)

    @property
    def final(self) -> float:
        return self.steps[-1].output

    def replay(self, tol: float = 1e-12) -> bool:
        """Recompute each step from its recorded inputs."""
        for step in self.steps:
            again = OPERATIONS[step.operation](**step.inputs)
            if abs(again - step.output) > tol * max(1.0, abs(step.output)):
                return False
        return True

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def seven_torsion_chain() -> BoundChain:
    chain = BoundChain("p-torsion with p >= 7")
    r = chain.apply("collar radius", "collar_high_order",
                    "Gehring-Marshall-Martin collar bound, evaluated at p = 7", p=7)
    factor = chain.apply("drill factor", "drill_factor", "Agol-Dunfield drilling with Przeworski's tube bound", r=r)
    floor = chain.apply("cusped floor", "cusped_floor",
                        "Meyerhoff cusp volume sqrt(3)/4 over Boroczky density sqrt(3)/(2 v3)")
    chain.apply("volume floor", "divide", C.citation("seven_floor"), a=floor, b=factor)
    chain.check("drill factor <= 3.06", factor <= C.value("seven_drill_bound"))
    chain.check("floor rounds to 0.1658", abs(chain.final - C.value("seven_floor")) < 1e-4)
    return chain


def cusped_floor_chain() -> BoundChain:
    chain = BoundChain("cusped link orbifold floor")
    vc = chain.apply("cusp volume", "meyerhoff_cusp_volume", "Meyerhoff: vol(C) >= sqrt(3)/4")
    dens = chain.apply("cusp density", "boroczky_density", "Boroczky: cusp holds at most sqrt(3)/(2 v3) of volume")
    chain.apply("volume floor", "divide", "vol(O) >= v3/2", a=vc, b=dens)
    chain.check("density < 1", dens < 1)
    return chain
