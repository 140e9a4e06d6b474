"""Cited numeric constants used by the proof replays.

Every constant that enters a report lives here together with the citation
string that is echoed next to it.  Computed quantities (v3, collar radii,
drilling factors) are not stored; they are evaluated by :mod:`orbvol.bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Constant:
    name: str
    value: float
    citation: str


_TABLE = [
    Constant("weeks_volume", 0.9427,
             "Gabai-Meyerhoff-Milley: vol(M_W) = 0.9427..."),
    Constant("census_cutoff", 2.848,
             "Gabai-Meyerhoff-Milley: cusped N with vol <= 2.848 is one of ten census manifolds"),
    Constant("przeworski_tube", 0.91,
             "Przeworski: vol(T) <= 0.91 vol(M) for a maximal tube T"),
    Constant("small_tube_radius", 0.294,
             "Gehring-Maclachlan-Martin-Reid: collar radius <= 0.294 forces G_{3,i}"),
    Constant("no2_drill_bound", 12.011,
             "drill factor at collar radius 0.294 is below 12.011"),
    Constant("no2_floor", 0.2371,
             "link orbifolds without 2-torsion have vol >= 0.2371"),
    Constant("order3_budget", 0.32,
             "slope budget B = 0.32 for 3-torsion fillings (rounded for round-off)"),
    Constant("order4_budget", 0.51,
             "slope budget B = 0.51 for 4-torsion fillings"),
    Constant("order4_cutoff", 2.7,
             "drilled volume split at 2.7 for all-torsion >= 4"),
    Constant("order4_excluded_floor", 2.78,
             "the four remaining census manifolds have volume larger than 2.78"),
    Constant("order4_drill_bound", 5.271,
             "drill factor at the order-4 collar radius is below 5.271"),
    Constant("order4_floor", 0.5122,
             "2.7 / 5.271 = 0.5122..."),
    Constant("seven_drill_bound", 3.06,
             "drill factor at the order-7 collar radius is at most 3.06"),
    Constant("seven_floor", 0.1658,
             "p-torsion with p >= 7 forces vol >= 0.1658..."),
    Constant("turnover_floor_2", 0.28248,
             "Atkinson-Rafalski estimate, minimized by the (2,4,5) turnover"),
    Constant("turnover_floor_3", 0.44089,
             "Atkinson-Rafalski estimate with labels >= 3, minimized by (3,3,4)"),
    Constant("gmm_link_floor", 0.041,
             "Gehring-Marshall-Martin: a link orbifold has volume at least 0.041"),
    Constant("fig8_cover_volume", 2.02988,
             "4-fold cyclic branched cover of the figure-8 knot has vol 2 v3 = 2.02988..."),
    Constant("fig8_order4_volume", 0.5074,
             "figure-8 knot labeled 4 has vol v3/2 = 0.5074..."),
    Constant("ok_volume", 0.31423,
             "vol(O_K) = vol(M_W)/3 = 0.31423..."),
    Constant("ol_volume", 0.15711,
             "vol(O_L) = vol(M_W)/6 = 0.15711..."),
    Constant("appendix_bound_k", 2.029,
             "19.365 * 0.1048 = 2.029..."),
    Constant("appendix_bound_w", 2.462,
             "14.00 * 0.1760 = 2.462..."),
]

CONSTANTS: dict[str, Constant] = {c.name: c for c in _TABLE}


@dataclass(frozen=True)
class ArithmeticGroup:
    """One row of the G_{3,i} table: collar radius and twice the co-volume."""

    index: int
    collar_radius: float
    double_covolume: float


GMMR_TABLE = (
    ArithmeticGroup(6, 0.24486, 0.31423),
    ArithmeticGroup(7, 0.24809, 0.31423),
    ArithmeticGroup(10, 0.27702, 0.52772),
)
GMMR_CITATION = "Table of arithmetic Kleinian groups G_{3,i} (collar radii computed with Tube)"

CENSUS_NAMES = ("m003", "m004", "m006", "m007", "m009",
                "m010", "m011", "m015", "m016", "m017")
CENSUS_CITATION = ("cusped manifolds of volume <= 2.848: m003, m004, m006, m007, m009, "
                   "m010, m011, m015, m016, m017")


def value(name: str) -> float:
    return CONSTANTS[name].value


def citation(name: str) -> str:
    return CONSTANTS[name].citation
