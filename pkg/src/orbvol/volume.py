"""Bloch-Wigner dilogarithm and ideal-tetrahedron volumes."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache


class VolumeDomainError(ValueError):
    pass


@lru_cache(maxsize=None)
def _bernoulli(count: int) -> tuple[float, ...]:
    # B_0..B_{count-1}, convention B_1 = -1/2
    B = [Fraction(0)] * count
    B[0] = Fraction(1)
    for m in range(1, count):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * B[k]
            binom = binom * (m + 1 - k) // (k + 1)
        B[m] = -acc / (m + 1)
    return tuple(float(b) for b in B)


_TERMS = 40


def _li2_reduced(w: complex) -> complex:
    # valid for |w| <= 1, Re w <= 1/2 (|u| < 2 < 2 pi)
    u = -cmath.log(1 - w)
    B = _bernoulli(_TERMS)
    total = 0j
    power = u
    fact = 1.0
    for n in range(_TERMS):
        fact *= n + 1
        if n < 2 or n % 2 == 0:
            total += B[n] * power / fact
        power *= u
    return total


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|.

    Equals the volume of the ideal tetrahedron with shape z when Im z > 0,
    minus that volume when Im z < 0, and zero on the real line.
    """
    z = complex(z)
    if z == 0 or z == 1:
        return 0.0
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise VolumeDomainError(f"non-finite shape {z}")
    # D(z) = -D(1/z) = -D(1-z); the orbit has a point in |w| <= 1, Re w <= 1/2
    candidates = (
        (z, 1.0),
        (1 / z, -1.0),
        (1 - z, -1.0),
        (1 / (1 - z), 1.0),
        (1 - 1 / z, 1.0),
        (z / (z - 1), -1.0),
    )
    best = min(candidates, key=lambda c: (max(abs(c[0]) - 1, c[0].real - 0.5, 0.0), abs(c[0])))
    w, sign = best
    if w == 0:
        return 0.0
    d = _li2_reduced(w).imag + cmath.phase(1 - w) * math.log(abs(w))
    return sign * d


def tetrahedron_volume(z: complex) -> float:
    return bloch_wigner(z)


def total_volume(shapes) -> float:
    """Sum of D(z_i); raises on degenerate shapes 0 or 1."""
    total = 0.0
    for z in shapes:
        z = complex(z)
        if z == 0 or z == 1:
            raise VolumeDomainError(f"degenerate shape {z}")
        total += bloch_wigner(z)
    return total
