"""GIT verdicts by degree regime, the gcd criterion, stabilizers and torsion-free sheaves.

Verdicts are tri-state: ``True``, ``False`` or ``None`` for undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Any, Iterator, Literal, Optional

import numpy as np

from .curve_model import CurveGraph, classify_curve, non_exceptional_components, require_curve
from .errors import GenusTooSmall, NotProperlyBalanced, Unsupported, WrongInputClass
from .multidegree import Multidegree, _level_masks, check_vertices, classify_multidegree
from .reductions import BlowupSite, blow_up_many, wps_reduce

Regime = Literal["theoremA", "theoremB", "open_band", "necessary_only", "out_of_range"]
Verdict = Optional[bool]


@dataclass(frozen=True)
class DegreeRegime:
    g: int
    d: int
    v: Fraction
    regime: Regime

    @property
    def r(self) -> int:
        """Projective dimension: r + 1 = d - g + 1."""
        return self.d - self.g


def classify_regime(g: int, d: int) -> DegreeRegime:
    if g < 2:
        raise GenusTooSmall(f"genus {g} < 2")
    D = 2 * g - 2
    v = Fraction(d, D)
    if d > 4 * D:
        regime: Regime = "theoremA"
    elif 2 * D < d and 2 * d < 7 * D:
        regime = "theoremB" if g >= 3 else "necessary_only"
    elif 7 * D <= 2 * d and d <= 4 * D:
        regime = "open_band"
    else:
        regime = "out_of_range"
    return DegreeRegime(g, d, v, regime)


@dataclass(frozen=True)
class GITReport:
    regime: DegreeRegime
    semistable: Verdict
    polystable: Verdict
    stable: Verdict
    reasons: tuple[str, ...] = field(default=())
    witnesses: tuple[frozenset[str], ...] = field(default=())
    stabilizer_dim: int | None = None

    def to_document(self) -> dict[str, Any]:
        return {
            "regime": self.regime.regime,
            "g": self.regime.g,
            "d": self.regime.d,
            "verdicts": {"semistable": self.semistable, "polystable": self.polystable, "stable": self.stable},
            "reasons": list(self.reasons),
            "witnesses": [sorted(w) for w in self.witnesses],
            "stabilizer_dim": self.stabilizer_dim,
        }


def _verdict_arrays(regime: str, g: int, d: int, cls, flags: dict[str, np.ndarray]) -> tuple[np.ndarray, ...]:
    """(semistable, polystable, stable) per row, coded 1 yes, 0 no, -1 undetermined."""
    proper = flags["properly"]
    if regime in ("theoremA", "theoremB"):
        curve_ok = cls.quasi_stable if regime == "theoremA" else cls.quasi_p_stable
        semi = proper & curve_ok
        return (
            semi.astype(np.int8),
            (semi & flags["strictly"]).astype(np.int8),
            (semi & flags["stably"]).astype(np.int8),
        )
    necessary = proper & cls.quasi_wp_stable
    in_band_b = 2 * (2 * g - 2) < d and 2 * d < 7 * (2 * g - 2)
    if in_band_b and cls.elliptic_tails:
        necessary = np.zeros_like(necessary)
    code = np.where(necessary, -1, 0).astype(np.int8)
    return code, code.copy(), code.copy()


def git_verdicts(X: CurveGraph, rows: np.ndarray, g: int, d: int) -> dict[str, np.ndarray]:
    """Batch verdicts over multidegree rows of total d (1 yes, 0 no, -1 undetermined)."""
    require_curve(X)
    regime = classify_regime(g, d)
    if regime.regime == "out_of_range":
        raise Unsupported(f"no stability statement for d={d} at genus {g}")
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, X.n)
    semi, poly, stab = _verdict_arrays(regime.regime, g, d, classify_curve(X), _level_masks(X, rows, d))
    return {"semistable": semi, "polystable": poly, "stable": stab}


def _decode(code: int) -> Verdict:
    return None if code < 0 else bool(code)


def git_classify(X: CurveGraph, dvec: Multidegree, g: int, d: int) -> GITReport:
    require_curve(X)
    check_vertices(X, dvec)
    if X.genus != g or dvec.total != d:
        raise Unsupported(f"curve has genus {X.genus} and multidegree total {dvec.total}, expected {g}, {d}")
    regime = classify_regime(g, d)
    verdicts = git_verdicts(X, dvec.vector(X)[None, :], g, d)
    semi, poly, stab = (_decode(int(verdicts[k][0])) for k in ("semistable", "polystable", "stable"))
    cls = classify_curve(X)
    bal = classify_multidegree(X, dvec)
    reasons: list[str] = []
    witnesses = [v.subcurve for v in bal.violations]

    if regime.regime in ("theoremA", "theoremB"):
        curve_ok = cls.quasi_stable if regime.regime == "theoremA" else cls.quasi_p_stable
        if not curve_ok:
            reasons.append(f"curve is not {'quasi-stable' if regime.regime == 'theoremA' else 'quasi-p-stable'}")
            witnesses.extend(cls.elliptic_tails)
        if not bal.properly_balanced:
            reasons.append("multidegree is not properly balanced")
        if semi and not poly:
            reasons.append("balanced but not strictly balanced")
        if poly and not stab:
            reasons.append("strictly but not stably balanced")
            witnesses.extend(s for s in bal.extremal_subcurves if not s <= set(cls.exceptional_vertices))
        dim = cls.non_exceptional_components if semi else None
        return GITReport(regime, semi, poly, stab, tuple(reasons), tuple(witnesses), dim)

    # necessary conditions only: quasi-wp-stable curve with a properly balanced multidegree
    if not cls.quasi_wp_stable:
        reasons.append("curve is not quasi-wp-stable")
    if not bal.properly_balanced:
        reasons.append("multidegree is not properly balanced")
    if semi is False and cls.quasi_wp_stable and bal.properly_balanced:
        reasons.append("elliptic tail in the low-degree band")
        witnesses.extend(cls.elliptic_tails)
    if semi is None:
        reasons.append("necessary conditions hold; stability is not characterized in this range")
    return GITReport(regime, semi, poly, stab, tuple(reasons), tuple(witnesses))


def is_geometric_quotient(g: int, d: int) -> bool:
    if g < 3:
        raise GenusTooSmall("the criterion is stated for genus >= 3")
    return gcd(d + 1 - g, 2 * g - 2) == 1


def stabilizer_dim(X: CurveGraph) -> int:
    cls = classify_curve(X)
    if not (cls.quasi_stable or (cls.quasi_p_stable and X.genus >= 3)):
        raise WrongInputClass("stabilizer dimension needs a quasi-stable or quasi-p-stable curve")
    return cls.non_exceptional_components


# torsion-free sheaves on p-stable curves ------------------------------------


@dataclass(frozen=True)
class SheafData:
    """A rank-1 torsion-free sheaf on a p-stable base, recorded combinatorially.

    ``degrees`` are the degrees on the irreducible components (restriction
    modulo torsion).  ``non_free_sites`` are the nodes and cusps where the
    sheaf is not locally free.
    """

    base: CurveGraph
    degrees: Multidegree
    non_free_sites: tuple[BlowupSite, ...]

    def __post_init__(self) -> None:
        # parallel edges with equal ends and length are interchangeable: use the lowest indices
        groups: dict[tuple, list[int]] = {}
        for idx, e in enumerate(self.base.edges):
            groups.setdefault((e.u, e.w, e.length), []).append(idx)
        used: dict[tuple, int] = {}
        sites = []
        for s in self.non_free_sites:
            if s.kind == "cusp":
                sites.append(s)
                continue
            e = self.base.edges[s.edge]
            key = (e.u, e.w, e.length)
            k = used.get(key, 0)
            used[key] = k + 1
            sites.append(BlowupSite(s.kind, groups[key][k], s.vertex))
        object.__setattr__(self, "non_free_sites", tuple(sorted(sites)))

    def _external_sites(self) -> list[tuple[int, int]]:
        out = []
        for s in self.non_free_sites:
            if s.kind == "external_node":
                e = self.base.edges[s.edge]
                out.append((self.base.index[e.u], self.base.index[e.w]))
        return out

    def degree_on(self, mask: int) -> int:
        """deg of the restriction to a subcurve: component degrees plus non-free
        nodes joining two components of the subcurve."""
        vec = [v for _, v in self.degrees.items]
        total = sum(vec[i] for i in range(self.base.n) if mask >> i & 1)
        joins = sum(1 for i, j in self._external_sites() if mask >> i & 1 and mask >> j & 1)
        return total + joins

    @property
    def total(self) -> int:
        return self.degree_on(self.base.full_mask)


def simpson_pushforward(X: CurveGraph, dvec: Multidegree) -> SheafData:
    """The sheaf obtained by pushing a line bundle on a quasi-p-stable model down to its p-stable base."""
    if not classify_curve(X).quasi_p_stable:
        raise WrongInputClass("pushforward needs a quasi-p-stable curve")
    if not classify_multidegree(X, dvec).properly_balanced:
        raise NotProperlyBalanced(f"{dvec} is not properly balanced")
    base, cmap = wps_reduce(X)
    vals = {vid: dvec[vid] for vid in base.ids}
    sites: list[BlowupSite] = []
    used_edges: set[int] = set()
    for c in cmap.contracted:
        kind, where = c.target
        if kind == "cusp":
            sites.append(BlowupSite.cusp(where[0]))
            vals[where[0]] += 1
            continue
        u, w = where
        idx = next(
            i for i, e in enumerate(base.edges) if i not in used_edges and e.ends() == (u, w) and e.length == 1
        )
        used_edges.add(idx)
        site = BlowupSite.node(base, idx)
        sites.append(site)
        if site.kind == "internal_node":
            vals[u] += 1
    return SheafData(base, Multidegree(vals), tuple(sites))


def simpson_semistable(s: SheafData, d: int) -> bool:
    """One-sided basic inequality on every proper subcurve of the base."""
    X = s.base
    require_curve(X)
    D = 2 * X.genus - 2
    for mask in range(1, X.full_mask):
        lhs = 2 * D * s.degree_on(mask)
        rhs = 2 * d * X.mask_deg_omega(mask) - D * X.mask_k(mask)
        if lhs < rhs:
            return False
    return True


def sheaf_lift(s: SheafData) -> tuple[CurveGraph, Multidegree]:
    """Inverse of the pushforward: blow up the non-free sites, degree 1 on each new component."""
    res = blow_up_many(s.base, s.non_free_sites)
    vals = dict(s.degrees.values)
    for site, eid in res.new_vertex:
        vals[eid] = 1
        if site.kind == "cusp":
            vals[site.vertex] -= 1
        elif site.kind == "internal_node":
            vals[s.base.edges[site.edge].u] -= 1
    return res.curve, Multidegree(vals)


def candidate_sheaves(base: CurveGraph, d: int, slack: int = 2) -> Iterator[SheafData]:
    """All sheaf data of total degree d on the base, over every set of non-free
    sites, with component degrees in a widened single-component box."""
    from .reductions import cusp_sites, node_sites

    sites = node_sites(base, avoid_exceptional=False) + cusp_sites(base)
    D = 2 * base.genus - 2
    seen = set()
    for choice in product((False, True), repeat=len(sites)):
        picked = tuple(sorted(s for s, c in zip(sites, choice) if c))
        if picked in seen:
            continue
        seen.add(picked)
        boxes = []
        for i in range(base.n):
            mid = Fraction(d * base.mask_deg_omega(1 << i), D)
            half = Fraction(base.mask_k(1 << i), 2)
            lo = int((mid - half).__floor__()) - slack
            hi = int((mid + half).__ceil__()) + slack
            boxes.append(range(lo, hi + 1))
        probe = SheafData(base, Multidegree.on(base, [0] * base.n), picked)
        joins = probe.total
        for vec in product(*boxes):
            if sum(vec) + joins != d:
                continue
            yield SheafData(base, Multidegree.on(base, list(vec)), picked)
