"""The refinement order on pairs (curve, multidegree), lifting, and isotrivial specialization."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator

import networkx as nx

from .curve_model import CurveGraph, canonical_form, canonical_labeling, classify_curve
from .errors import NonTermination, NotComparable, NotProperlyBalanced, TooLarge, WrongInputClass
from .multidegree import Multidegree, classify_multidegree, enumerate_balanced, is_balanced
from .reductions import (
    BlowupSite,
    ModelKind,
    blow_up_many,
    cusp_sites,
    enumerate_models,
    node_sites,
    wps_reduce,
)


@dataclass(frozen=True)
class StratumPair:
    curve: CurveGraph
    multidegree: Multidegree

    def validate(self) -> "StratumPair":
        if not classify_curve(self.curve).quasi_wp_stable:
            raise WrongInputClass("stratum curve must be quasi-wp-stable")
        if not classify_multidegree(self.curve, self.multidegree).properly_balanced:
            raise NotProperlyBalanced(f"{self.multidegree} is not properly balanced")
        return self

    @property
    def total(self) -> int:
        return self.multidegree.total

    def key(self) -> tuple:
        """Isomorphism-invariant key of the labeled pair."""
        return canonical_form(self.curve, self.multidegree.values)

    def label(self) -> str:
        digest = hashlib.sha1(repr(canonical_form(self.curve)).encode()).hexdigest()[:8]
        return f"{digest} / {self.multidegree}"


@dataclass(frozen=True)
class SpecializationStep:
    subcurve: frozenset[str]
    blown_up_nodes: tuple[tuple[str, str], ...]
    result: StratumPair


def _pushed_down(res, upper: Multidegree, sides: dict[BlowupSite, str]) -> Multidegree:
    """Apply the figure rules: each new component gets 1, a chosen branch loses 1."""
    vals = dict(upper.values)
    for site, eid in res.new_vertex:
        vals[eid] = 1
        vals[sides[site]] -= 1
    return Multidegree(vals)


def _blowup_candidates(upper: StratumPair, count: int) -> Iterator[tuple]:
    """Every way of blowing up ``count`` sites of the upper curve, with branch choices."""
    X = upper.curve
    sites = node_sites(X) + cusp_sites(X)
    seen_sets = set()
    for chosen in combinations(range(len(sites)), count):
        key = tuple(sorted(sites[i] for i in chosen))
        if key in seen_sets:
            continue
        seen_sets.add(key)
        picked = list(key)
        res = blow_up_many(X, picked)
        options = []
        for s in picked:
            if s.kind == "external_node":
                e = X.edges[s.edge]
                options.append((e.u, e.w))
            elif s.kind == "internal_node":
                options.append((X.edges[s.edge].u,))
            else:
                options.append((s.vertex,))
        for branch in product(*options):
            yield picked, res, dict(zip(picked, branch))


def preceq(lower: StratumPair, upper: StratumPair) -> bool:
    """True when ``lower`` arises from ``upper`` by blow-ups following the degree rules."""
    if lower.curve.genus != upper.curve.genus or lower.total != upper.total:
        raise NotComparable("pairs differ in genus or total degree")
    count = lower.curve.n - upper.curve.n
    if count < 0:
        return False
    if canonical_form(wps_reduce(lower.curve)[0]) != canonical_form(wps_reduce(upper.curve)[0]):
        return False
    target = lower.key()
    for _, res, sides in _blowup_candidates(upper, count):
        if res.curve.n != lower.curve.n:
            continue
        cand = _pushed_down(res, upper.multidegree, sides)
        if canonical_form(res.curve, cand.values) == target:
            return True
    return False


def lift_multidegree(lower_curve: CurveGraph, d_lower: Multidegree, upper_curve: CurveGraph) -> Multidegree:
    """A multidegree on the upper curve lying above ``d_lower``.

    Each contracted component gives its degree back to one branch (the first
    endpoint in sorted order for an external node).
    """
    if not is_balanced(lower_curve, d_lower):
        raise NotComparable("lower multidegree is not balanced")
    count = lower_curve.n - upper_curve.n
    if count < 0 or lower_curve.genus != upper_curve.genus:
        raise NotComparable("lower curve is not a blow-up of the upper curve")
    target_form, target_order = canonical_labeling(lower_curve)
    sites = node_sites(upper_curve) + cusp_sites(upper_curve)
    tried = set()
    for chosen in combinations(range(len(sites)), count):
        picked = tuple(sorted(sites[i] for i in chosen))
        if picked in tried:
            continue
        tried.add(picked)
        res = blow_up_many(upper_curve, picked)
        form, order = canonical_labeling(res.curve)
        if form != target_form:
            continue
        # the lower curve may admit several identifications; any one with a
        # balanced pullback is fine, so try relabelings through automorphisms
        for iso in _isomorphisms(lower_curve, res.curve, target_order, order):
            vals = {iso[k]: v for k, v in d_lower.values.items()}
            new = set(eid for _, eid in res.new_vertex)
            if any(vals[eid] != 1 for eid in new):
                continue
            up = {vid: vals[vid] for vid in upper_curve.ids}
            for site, eid in res.new_vertex:
                if site.kind == "cusp":
                    branch = site.vertex
                else:
                    e = upper_curve.edges[site.edge]
                    branch = e.u
                up[branch] += vals[eid]
            out = Multidegree(up)
            if is_balanced(upper_curve, out):
                return out
    raise NotComparable("lower pair is not obtained from the upper curve by blow-ups")


def _isomorphisms(A: CurveGraph, B: CurveGraph, order_a, order_b) -> Iterator[dict[str, str]]:
    """The canonical isomorphism first, then all others found by networkx."""
    yield dict(zip(order_a, order_b))

    def as_nx(X: CurveGraph) -> nx.MultiGraph:
        G = nx.MultiGraph()
        for v in X.vertices:
            G.add_node(v.id, genus=v.genus, cusps=v.cusps)
        for e in X.edges:
            G.add_edge(e.u, e.w, length=e.length)
        return G

    matcher = nx.algorithms.isomorphism.MultiGraphMatcher(
        as_nx(A),
        as_nx(B),
        node_match=lambda x, y: x == y,
        edge_match=lambda x, y: sorted(d["length"] for d in x.values()) == sorted(d["length"] for d in y.values()),
    )
    yield from matcher.isomorphisms_iter()


def _strict_witness(X: CurveGraph, dvec: Multidegree) -> tuple[int, list[int]] | None:
    """The lexicographically smallest Y with d_Y = M_Y crossed by a non-exceptional node."""
    t = X.cut_table
    vec = dvec.vector(X)
    d = int(vec.sum())
    D = 2 * X.genus - 2
    best = None
    for r, m in enumerate(t.masks):
        if t.crossing_exceptional[r]:
            continue
        if 2 * D * int(t.incidence[r] @ vec) != 2 * d * int(t.deg_omega[r]) + D * int(t.k[r]):
            continue
        key = X.sorted_ids_of(m)
        if best is None or key < best[0]:
            best = (key, m)
    if best is None:
        return None
    m = best[1]
    exc = X.exceptional_mask
    edges = [
        idx
        for idx, (i, j, _) in enumerate(X._edge_triples)
        if (m >> i & 1) != (m >> j & 1) and not (exc >> i & 1 or exc >> j & 1)
    ]
    return m, edges


def specialize_strictly(pair: StratumPair, max_steps: int | None = None) -> tuple[StratumPair, list[SpecializationStep]]:
    """Blow up non-exceptional nodes crossing M-attaining subcurves until strictly balanced."""
    pair.validate()
    if max_steps is None:
        max_steps = 4 * len(pair.curve.edges) + 4
    steps: list[SpecializationStep] = []
    cur = pair
    for _ in range(max_steps + 1):
        if classify_multidegree(cur.curve, cur.multidegree).strictly_balanced:
            return cur, steps
        wit = _strict_witness(cur.curve, cur.multidegree)
        if wit is None:
            raise NonTermination("properly balanced pair with no strictness witness")
        mask, edge_idx = wit
        X = cur.curve
        sites = [BlowupSite.node(X, i) for i in edge_idx]
        res = blow_up_many(X, sites)
        vals = dict(cur.multidegree.values)
        for site, eid in res.new_vertex:
            e = X.edges[site.edge]
            inside = e.u if mask >> X.index[e.u] & 1 else e.w
            vals[inside] -= 1
            vals[eid] = 1
        nxt = StratumPair(res.curve, Multidegree(vals))
        steps.append(
            SpecializationStep(
                subcurve=X.ids_of(mask),
                blown_up_nodes=tuple(X.edges[s.edge].ends() for s in sites),
                result=nxt,
            )
        )
        cur = nxt
    raise NonTermination(f"not strictly balanced after {max_steps} steps")


@dataclass
class StrataPoset:
    nodes: list[StratumPair] = field(default_factory=list)
    covers: list[tuple[int, int]] = field(default_factory=list)  # (upper, lower)
    order: set[tuple[int, int]] = field(default_factory=set)  # strict relation (upper, lower)

    def maximal(self) -> list[int]:
        below = {lo for _, lo in self.order}
        return [i for i in range(len(self.nodes)) if i not in below]

    def to_dot(self) -> str:
        lines = ["digraph strata {", "  rankdir=TB;"]
        for i, p in enumerate(self.nodes):
            lines.append(f'  n{i} [label="{p.label()}"];')
        for hi, lo in sorted(self.covers):
            lines.append(f"  n{hi} -> n{lo};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def strata_poset(Y: CurveGraph, d: int, kind: ModelKind, max_nodes: int = 400) -> StrataPoset:
    """All properly balanced pairs on quasi-models of Y with their covering relations."""
    nodes: list[StratumPair] = []
    for X in enumerate_models(Y, kind):
        for dvec in enumerate_balanced(X, d, "properly"):
            nodes.append(StratumPair(X, dvec))
            if len(nodes) > max_nodes:
                raise TooLarge(f"more than {max_nodes} strata")
    poset = StrataPoset(nodes=nodes)
    for a, up in enumerate(nodes):
        for b, lo in enumerate(nodes):
            if lo.curve.n > up.curve.n and preceq(lo, up):
                poset.order.add((a, b))
    for a, b in poset.order:
        if not any((a, c) in poset.order and (c, b) in poset.order for c in range(len(nodes))):
            poset.covers.append((a, b))
    poset.covers.sort()
    return poset
