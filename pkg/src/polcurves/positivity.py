"""Positivity of balanced line bundles from numerical data.

Nef and ample are decided exactly from component degrees.  The remaining
properties come from sufficient degree thresholds and from subcurve degree
checks, so each flag records why it holds, fails, or stays undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Optional

import numpy as np

from .curve_model import CurveGraph, classify_curve, require_curve
from .errors import NotBalanced, Unsupported
from .multidegree import Multidegree, check_vertices, is_balanced

FLAGS = ("nef", "ample", "nonspecial", "globally_generated", "very_ample", "normally_generated")


@dataclass(frozen=True)
class Flag:
    value: Optional[bool]
    basis: str

    def to_document(self) -> dict[str, Any]:
        return {"value": self.value, "basis": self.basis}


@dataclass(frozen=True)
class PositivityReport:
    nef: Flag
    ample: Flag
    nonspecial: Flag
    globally_generated: Flag
    very_ample: Flag
    normally_generated: Flag
    k_very_ample_up_to: Optional[int] = None
    k_basis: str = "undetermined"

    def flags(self) -> dict[str, Flag]:
        return {name: getattr(self, name) for name in FLAGS}

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {name: f.to_document() for name, f in self.flags().items()}
        doc["k_very_ample_up_to"] = {"value": self.k_very_ample_up_to, "basis": self.k_basis}
        return doc


UNDETERMINED = Flag(None, "undetermined")

# Per-flag outcome tables; the batch and single-pair routes both index into them.
_CASES: dict[str, tuple[tuple[Optional[bool], str], ...]] = {
    "nef": ((False, "negative degree on {neg}"), (True, "all component degrees >= 0")),
    "ample": ((False, "degree <= 0 on {nonpos}"), (True, "all component degrees > 0")),
    "nonspecial": (
        (True, "G-semistable and d > 2g-2"),
        (True, "deg_Z > 2g_Z - 2 on every connected subcurve"),
        (None, "undetermined"),
    ),
    "globally_generated": (
        (True, "nef and d > 3(g-1)"),
        (True, "deg_Z > 2g_Z - 1 on every connected subcurve"),
        (False, "not nef"),
        (None, "undetermined"),
    ),
    "very_ample": (
        (True, "ample and d > 5(g-1)"),
        (True, "ample, no elliptic tails, d > max(3(g-1), 2g)"),
        (True, "deg_Z > 2g_Z on every connected subcurve"),
        (False, "not ample"),
        (None, "undetermined"),
    ),
    "normally_generated": (
        (True, "ample and d > 5(g-1)"),
        (True, "ample, no elliptic tails, d > max(3(g-1), 2g)"),
        (True, "deg_Z > 2g_Z on every connected subcurve"),
        (None, "undetermined"),
    ),
}


def _subcurve_excess(X: CurveGraph, rows: np.ndarray) -> np.ndarray:
    """Per row, min over connected Z of deg_Z - 2 g_Z; the subcurve criteria compare it to -1, 0, 1."""
    inc, genus = X.connected_table
    return (rows @ inc.T - 2 * genus).min(axis=1)


def _case_indices(X: CurveGraph, rows: np.ndarray, d: int) -> dict[str, np.ndarray]:
    g = X.genus
    cls = classify_curve(X)
    no_tails = not cls.elliptic_tails
    nef = np.all(rows >= 0, axis=1)
    ample = np.all(rows > 0, axis=1)
    excess = _subcurve_excess(X, rows)
    high = d > 5 * (g - 1)
    mid = d > max(3 * (g - 1), 2 * g) and no_tails
    sel = np.select
    return {
        "nef": nef.astype(np.int64),
        "ample": ample.astype(np.int64),
        "nonspecial": sel([np.full(len(rows), cls.g_semistable and d > 2 * g - 2), excess > -2], [0, 1], 2),
        "globally_generated": sel([nef & (d > 3 * (g - 1)), excess > -1, ~nef], [0, 1, 2], 3),
        "very_ample": sel([ample & high, ample & mid, excess > 0, ~ample], [0, 1, 2, 3], 4),
        "normally_generated": sel([ample & high, ample & mid, excess > 0], [0, 1, 2], 3),
    }


def positivity_values(X: CurveGraph, rows: np.ndarray, d: int) -> dict[str, np.ndarray]:
    """Flag values for a batch of balanced rows: 1 true, 0 false, -1 undetermined."""
    require_curve(X)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, X.n)
    out = {}
    for name, idx in _case_indices(X, rows, d).items():
        codes = np.array([-1 if v is None else int(v) for v, _ in _CASES[name]], dtype=np.int8)
        out[name] = codes[idx]
    return out


def _k_very_ample(X: CurveGraph, d: int) -> tuple[Optional[int], str]:
    cls = classify_curve(X)
    if not cls.g_stable:
        return None, "undetermined: curve is not G-stable"
    g = X.genus
    best = None
    k = 2
    while d > (2 * k + 1) * (g - 1):
        if d > (2 * k + 3) * (g - 1):
            best = (k, "d > (2k+3)(g-1)")
        elif not cls.elliptic_tails:
            best = (k, "no elliptic tails and d > (2k+1)(g-1)")
        k += 1
    return best if best else (None, "below every threshold")


def positivity_report(X: CurveGraph, dvec: Multidegree, d: int | None = None) -> PositivityReport:
    require_curve(X)
    check_vertices(X, dvec)
    d = dvec.total if d is None else d
    if d != dvec.total:
        raise Unsupported(f"total degree {dvec.total} does not match d={d}")
    if not is_balanced(X, dvec):
        raise NotBalanced(f"{dvec} is not balanced")
    vals = dvec.values
    names = {
        "neg": next((v for v, x in vals.items() if x < 0), ""),
        "nonpos": next((v for v, x in vals.items() if x <= 0), ""),
    }
    cases = _case_indices(X, dvec.vector(X)[None, :], d)
    flags = {}
    for name in FLAGS:
        value, basis = _CASES[name][int(cases[name][0])]
        flags[name] = Flag(value, basis.format(**names))
    k_up, k_basis = _k_very_ample(X, d)
    return PositivityReport(**flags, k_very_ample_up_to=k_up, k_basis=k_basis)


def canonical_power_report(X: CurveGraph, i: int) -> PositivityReport:
    """Positivity of the i-th power of the dualizing sheaf."""
    if i < 2:
        raise Unsupported("canonical powers start at i = 2")
    require_curve(X)
    dvec = Multidegree.on(X, [i * X.mask_deg_omega(1 << v) for v in range(X.n)])
    rep = positivity_report(X, dvec, i * (2 * X.genus - 2))
    cls = classify_curve(X)
    changes: dict[str, Flag] = {}
    if cls.g_semistable:
        if rep.nonspecial.value is not True:
            changes["nonspecial"] = Flag(True, "power of the dualizing sheaf on a G-semistable curve, i >= 2")
        if rep.globally_generated.value is not True:
            changes["globally_generated"] = Flag(True, "power of the dualizing sheaf on a G-semistable curve, i >= 2")
    if cls.g_stable and i >= 3 and rep.very_ample.value is not True:
        changes["very_ample"] = Flag(True, "power of the dualizing sheaf on a G-stable curve, i >= 3")
    if cls.g_quasistable and i >= 3 and rep.normally_generated.value is not True:
        changes["normally_generated"] = Flag(True, "power of the dualizing sheaf on a G-quasistable curve, i >= 3")
    return replace(rep, **changes) if changes else rep
