"""Hilbert-Mumford weights and destabilizing one-parameter subgroups.

Polynomials in ``m`` are stored as exact rational coefficient triples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal, Optional

import numpy as np

from .curve_model import CurveGraph, classify_curve
from .errors import NotProperlyBalanced, Unsupported, WrongInputClass
from .multidegree import Multidegree, classify_multidegree

CUBIC_MONOMIALS = ((3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 0, 2), (1, 1, 1), (0, 3, 0), (0, 2, 1))
LEADING = (0, 2, 1)


@dataclass(frozen=True)
class WeightPolynomial:
    a2: Fraction
    a1: Fraction
    a0: Fraction

    @property
    def e(self) -> Fraction:
        """Normalized leading coefficient."""
        return 2 * self.a2

    def __call__(self, m: int) -> Fraction:
        return self.a2 * m * m + self.a1 * m + self.a0


def basis_weight_sum(w1: int, w2: int, w3: int, m: int) -> int:
    """Total weight of the degree-m monomials not divisible by x2^2 x3, summed family by family."""
    s = sum(w1 * (m - k) + w3 * k for k in range(m + 1))
    s += sum(w2 + w1 * (m - 1 - h) + w3 * h for h in range(m))
    s += sum(w2 * (j + 2) + w1 * (m - 2 - j) for j in range(m - 1))
    return s


def cubic_weight_polynomial(w1: int, w2: int, w3: int) -> WeightPolynomial:
    """Closed form of ``basis_weight_sum`` as a quadratic in m.

    Valid when x2^2 x3 is the heaviest monomial of the plane cubic, so that the
    monomials outside the ideal it generates form a minimal-weight basis.
    """
    F = Fraction
    return WeightPolynomial(
        a2=F(3 * w1 + w2 + 2 * w3, 2),
        a1=F(3 * (w2 - w1), 2),
        a0=F(w1 - w2),
    )


def leading_is_x2sq_x3(w1: int, w2: int, w3: int, support=CUBIC_MONOMIALS) -> bool:
    """Whether x2^2 x3 has maximal weight among the given cubic monomials."""
    wt = lambda a: a[0] * w1 + a[1] * w2 + a[2] * w3
    return all(wt(mon) <= wt(LEADING) for mon in support)


@dataclass(frozen=True)
class DestabCheck:
    g: int
    d: int
    r: int
    w_rho: int
    e_rho: Fraction
    rhs: Fraction
    verdict: Literal["chow_unstable", "boundary", "inconclusive"]
    note: str = ""

    def to_document(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "d": self.d,
            "r": self.r,
            "w_rho": self.w_rho,
            "e_rho": str(self.e_rho),
            "rhs": str(self.rhs),
            "verdict": self.verdict,
            "note": self.note,
        }


def elliptic_tail_verdict(g: int, d: int) -> DestabCheck:
    """Chow criterion for the one-parameter subgroup acting on an elliptic tail."""
    r = d - g
    e = cubic_weight_polynomial(1, 2, 3).e + 6 * (d - 3)
    w = 1 + 2 + 3 * (r + 1 - 2)
    rhs = Fraction(2 * d * w, r + 1) if r + 1 > 0 else Fraction(0)
    D = 2 * g - 2
    if not (g >= 2 and 2 * D < d and 2 * d < 7 * D):
        return DestabCheck(g, d, r, w, e, rhs, "inconclusive", "outside 2(2g-2) < d < 7/2(2g-2)")
    verdict = "chow_unstable" if e > rhs else ("boundary" if e == rhs else "inconclusive")
    return DestabCheck(g, d, r, w, e, rhs, verdict)


@dataclass(frozen=True)
class Quadratic:
    a2: Fraction
    a1: Fraction
    a0: Fraction = Fraction(0)

    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.a2, self.a1, self.a0)


@dataclass(frozen=True)
class Certificate:
    """A subcurve whose sections span a destabilizing weight filtration.

    The one-parameter subgroup has weight 0 on sections vanishing on Y and
    weight 1 on a complement of dimension h0_Y.
    """

    subcurve: frozenset[str]
    d_Y: int
    g_Y: int
    k_Y: int
    h0_total: int  # r + 1
    h0_Y: int  # sections restricted to Y
    dim_vanishing: int  # dim U = h0_total - h0_Y
    w_rho: int
    lower_bound: Quadratic
    rhs: Quadratic
    identity_holds: bool
    verdict: str = "not Hilbert stable"

    def to_document(self) -> dict[str, Any]:
        return {
            "subcurve": sorted(self.subcurve),
            "d_Y": self.d_Y,
            "g_Y": self.g_Y,
            "k_Y": self.k_Y,
            "h0_total": self.h0_total,
            "h0_Y": self.h0_Y,
            "dim_vanishing": self.dim_vanishing,
            "w_rho": self.w_rho,
            "lower_bound": [str(c) for c in self.lower_bound.coefficients()],
            "rhs": [str(c) for c in self.rhs.coefficients()],
            "identity_holds": self.identity_holds,
            "verdict": self.verdict,
        }


def certificate_rows(X: CurveGraph, rows: np.ndarray, d: int) -> np.ndarray:
    """Per row, the first cut-table index of a subcurve Y with d_Y = m_Y whose
    complement leaves the exceptional locus, or -1."""
    t = X.cut_table
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, X.n)
    if not len(t.masks):
        return np.full(len(rows), -1, dtype=np.int64)
    D = 2 * X.genus - 2
    comp_ok = np.array([(X.full_mask ^ m) & ~X.exceptional_mask != 0 for m in t.masks], dtype=bool)
    lower = 2 * d * t.deg_omega - D * t.k
    hit = (2 * D * (rows @ t.incidence.T) == lower) & comp_ok
    return np.where(hit.any(axis=1), hit.argmax(axis=1), -1)


def destabilizer_certificate(X: CurveGraph, dvec: Multidegree, g: int, d: int) -> Optional[Certificate]:
    """Certificate of non-stability when some M-attaining subcurve leaves the exceptional locus."""
    if X.genus != g or dvec.total != d or not d > 2 * (2 * g - 2):
        raise Unsupported("certificates need d > 2(2g-2) and consistent (g, d)")
    if not classify_curve(X).quasi_wp_stable:
        raise WrongInputClass("curve must be quasi-wp-stable")
    if not classify_multidegree(X, dvec).properly_balanced:
        raise NotProperlyBalanced(f"{dvec} is not properly balanced")
    r = int(certificate_rows(X, dvec.vector(X)[None, :], d)[0])
    if r < 0:
        return None
    t = X.cut_table
    vec = dvec.vector(X)
    m = t.masks[r]
    d_Y = int(t.incidence[r] @ vec)
    g_Y = X.mask_genus(m)
    k_Y = int(t.k[r])
    h0_Y = d_Y + 1 - g_Y
    h0 = d - g + 1
    lower = Quadratic(Fraction(d_Y) + Fraction(k_Y, 2), Fraction(1 - g_Y) - Fraction(k_Y, 2))
    scale = Fraction(h0_Y, h0)
    rhs = Quadratic(scale * d, scale * (1 - g))
    return Certificate(
        subcurve=X.ids_of(m),
        d_Y=d_Y,
        g_Y=g_Y,
        k_Y=k_Y,
        h0_total=h0,
        h0_Y=h0_Y,
        dim_vanishing=h0 - h0_Y,
        w_rho=h0_Y,
        lower_bound=lower,
        rhs=rhs,
        identity_holds=lower == rhs,
    )
