"""Blow-ups of nodes and cusps, their contractions, and quasi-models."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Iterable, Literal

from .curve_model import (
    CurveGraph,
    Edge,
    Vertex,
    _mk_edge,
    canonical_form,
    classify_curve,
    elliptic_tail_masks,
    require_curve,
)
from .errors import GenusTooSmall, InvalidCurve, NoCusp, NotQuasiWpStable, WrongInputClass

SiteKind = Literal["external_node", "internal_node", "cusp"]
ModelKind = Literal["quasi_stable", "quasi_p_stable", "quasi_wp_stable"]


@dataclass(frozen=True, order=True)
class BlowupSite:
    """A node (edge index in the curve's canonical edge order) or a cusp (vertex id)."""

    kind: SiteKind
    edge: int = -1
    vertex: str = ""

    @classmethod
    def node(cls, X: CurveGraph, edge: int) -> "BlowupSite":
        e = X.edges[edge]
        if e.length != 1:
            raise InvalidCurve(f"edge {edge} is not a node")
        return cls("internal_node" if e.is_loop else "external_node", edge=edge)

    @classmethod
    def cusp(cls, vertex: str) -> "BlowupSite":
        return cls("cusp", vertex=vertex)


@dataclass(frozen=True)
class Contraction:
    vertex: str
    target: tuple[str, tuple[str, ...]]  # ("node", (u, w)) or ("cusp", (v,))

    def to_document(self) -> dict[str, Any]:
        kind, where = self.target
        return {"vertex": self.vertex, "target": {kind: list(where) if kind == "node" else where[0]}}


@dataclass(frozen=True)
class ContractionMap:
    """Vertex map from a source curve onto a target curve.

    ``contracted`` lists source vertices collapsed to a node or a cusp of the
    target; every other source vertex keeps its id.
    """

    contracted: tuple[Contraction, ...] = field(default=())

    def to_document(self) -> dict[str, Any]:
        return {"contracted": [c.to_document() for c in self.contracted]}

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "ContractionMap":
        out = []
        for c in doc.get("contracted", []):
            tgt = c["target"]
            if "node" in tgt:
                out.append(Contraction(str(c["vertex"]), ("node", tuple(str(x) for x in tgt["node"]))))
            else:
                out.append(Contraction(str(c["vertex"]), ("cusp", (str(tgt["cusp"]),))))
        return cls(tuple(out))

    @property
    def contracted_ids(self) -> frozenset[str]:
        return frozenset(c.vertex for c in self.contracted)


def fresh_ids(X: CurveGraph, count: int, prefix: str = "E") -> list[str]:
    used = set(X.ids)
    out = []
    k = 1
    while len(out) < count:
        cand = f"{prefix}{k}"
        if cand not in used:
            out.append(cand)
            used.add(cand)
        k += 1
    return out


@dataclass(frozen=True)
class BlowupResult:
    curve: CurveGraph
    inverse: ContractionMap
    new_vertex: tuple[tuple[BlowupSite, str], ...]  # site -> its exceptional vertex


def blow_up_many(X: CurveGraph, sites: Iterable[BlowupSite]) -> BlowupResult:
    """Blow up several distinct nodes and cusps at once."""
    sites = sorted(sites)
    edge_sites = [s for s in sites if s.kind != "cusp"]
    if len({s.edge for s in edge_sites}) != len(edge_sites):
        raise InvalidCurve("a node can be blown up only once")
    cusp_count = Counter(s.vertex for s in sites if s.kind == "cusp")
    for vid, c in cusp_count.items():
        if vid not in X.index:
            raise InvalidCurve(f"unknown vertex {vid!r}")
        if X.vertex(vid).cusps < c:
            raise NoCusp(f"vertex {vid} has {X.vertex(vid).cusps} cusps, {c} requested")
    for s in edge_sites:
        if not 0 <= s.edge < len(X.edges) or X.edges[s.edge].length != 1:
            raise InvalidCurve(f"site {s} is not a node of the curve")
    new_ids = fresh_ids(X, len(sites))
    verts = {v.id: v for v in X.vertices}
    edges = list(X.edges)
    removed = set()
    added: list[Edge] = []
    contracted = []
    mapping = []
    for s, eid in zip(sites, new_ids):
        verts[eid] = Vertex(eid, 0, 0)
        if s.kind == "cusp":
            v = verts[s.vertex]
            verts[s.vertex] = Vertex(v.id, v.genus - 1, v.cusps - 1)
            added.append(_mk_edge(s.vertex, eid, 2))
            contracted.append(Contraction(eid, ("cusp", (s.vertex,))))
        else:
            e = edges[s.edge]
            removed.add(s.edge)
            added.append(_mk_edge(e.u, eid, 1))
            added.append(_mk_edge(eid, e.w, 1))
            contracted.append(Contraction(eid, ("node", (e.u, e.w))))
        mapping.append((s, eid))
    kept = [e for i, e in enumerate(edges) if i not in removed]
    Y = CurveGraph(tuple(verts.values()), tuple(kept + added))
    return BlowupResult(Y, ContractionMap(tuple(contracted)), tuple(mapping))


def blow_up(X: CurveGraph, site: BlowupSite) -> tuple[CurveGraph, ContractionMap]:
    res = blow_up_many(X, [site])
    return res.curve, res.inverse


def node_sites(X: CurveGraph, avoid_exceptional: bool = True) -> list[BlowupSite]:
    exc = set(X.exceptional) if avoid_exceptional else set()
    return [
        BlowupSite.node(X, i)
        for i, e in enumerate(X.edges)
        if e.length == 1 and e.u not in exc and e.w not in exc
    ]


def cusp_sites(X: CurveGraph) -> list[BlowupSite]:
    return [BlowupSite.cusp(v.id) for v in X.vertices for _ in range(v.cusps)]


def wps_reduce(X: CurveGraph) -> tuple[CurveGraph, ContractionMap]:
    """Contract every exceptional component to the node or cusp it came from."""
    if not classify_curve(X).quasi_wp_stable:
        raise NotQuasiWpStable("curve is not quasi-wp-stable")
    exc = set(X.exceptional)
    verts = {v.id: v for v in X.vertices if v.id not in exc}
    edges = [e for e in X.edges if e.u not in exc and e.w not in exc]
    contracted = []
    for eid in sorted(exc):
        inc = X.incident_edges(eid)
        if len(inc) == 1:
            (e,) = inc
            v = e.w if e.u == eid else e.u
            old = verts[v]
            verts[v] = Vertex(v, old.genus + 1, old.cusps + 1)
            contracted.append(Contraction(eid, ("cusp", (v,))))
        else:
            ends = [e.w if e.u == eid else e.u for e in inc]
            u, w = sorted(ends)
            edges.append(_mk_edge(u, w, 1))
            contracted.append(Contraction(eid, ("node", (u, w))))
    return CurveGraph(tuple(verts.values()), tuple(edges)), ContractionMap(tuple(contracted))


def contract_elliptic_tail(X: CurveGraph, tail: Iterable[str]) -> tuple[CurveGraph, list[Contraction]]:
    """Replace a tail (connected, genus 1, meeting the rest once) by a cusp on its attaching vertex."""
    mask = X.mask_of(tail)
    if not (X.mask_connected(mask) and X.mask_genus(mask) == 1 and X.mask_k(mask) == 1):
        raise WrongInputClass("not an elliptic tail")
    tail_ids = X.ids_of(mask)
    (bridge,) = [e for e in X.edges if (e.u in tail_ids) != (e.w in tail_ids)]
    v = bridge.w if bridge.u in tail_ids else bridge.u
    verts = {x.id: x for x in X.vertices if x.id not in tail_ids}
    old = verts[v]
    verts[v] = Vertex(v, old.genus + 1, old.cusps + 1)
    edges = [e for e in X.edges if e.u not in tail_ids and e.w not in tail_ids]
    return CurveGraph(tuple(verts.values()), tuple(edges)), [
        Contraction(t, ("cusp", (v,))) for t in sorted(tail_ids)
    ]


def ps_reduce(X: CurveGraph, reverse: bool = False) -> tuple[CurveGraph, ContractionMap]:
    """wp-stable reduction followed by contraction of elliptic tails.

    Maximal tails are contracted one at a time; ``reverse`` picks the last one
    in sorted order instead of the first, which tests use to check that the
    result does not depend on the order.
    """
    require_curve(X)
    if X.genus < 3:
        raise GenusTooSmall("p-stable reduction is only defined for genus >= 3")
    Y, cmap = wps_reduce(X)
    contracted = list(cmap.contracted)
    while True:
        tails = elliptic_tail_masks(Y)
        maximal = [m for m in tails if not any(m != o and m & ~o == 0 for o in tails)]
        if not maximal:
            break
        pick = sorted(maximal, key=lambda m: Y.sorted_ids_of(m))[-1 if reverse else 0]
        Y, extra = contract_elliptic_tail(Y, Y.ids_of(pick))
        contracted.extend(extra)
    return Y, ContractionMap(tuple(contracted))


_REQUIRED = {
    "quasi_stable": "stable",
    "quasi_p_stable": "p_stable",
    "quasi_wp_stable": "wp_stable",
}


def model_site_sets(Y: CurveGraph, kind: ModelKind) -> list[tuple[BlowupSite, ...]]:
    """All subsets of nodes (and, except for quasi-stable models, cusps) of Y."""
    nodes = node_sites(Y, avoid_exceptional=False)
    per_vertex = [(v.id, v.cusps) for v in Y.vertices if v.cusps] if kind != "quasi_stable" else []
    out = []
    for r in range(len(nodes) + 1):
        for chosen in combinations(nodes, r):
            for counts in product(*[range(c + 1) for _, c in per_vertex]):
                cusps = [BlowupSite.cusp(vid) for (vid, _), c in zip(per_vertex, counts) for _ in range(c)]
                out.append(tuple(chosen) + tuple(cusps))
    return out


def enumerate_models(Y: CurveGraph, kind: ModelKind) -> list[CurveGraph]:
    """Quasi-models of Y up to isomorphism, ordered by size then canonical form."""
    if kind not in _REQUIRED:
        raise ValueError(f"unknown model kind {kind!r}")
    cls = classify_curve(Y)
    if not getattr(cls, _REQUIRED[kind]):
        raise WrongInputClass(f"{kind} models need a {_REQUIRED[kind].replace('_', '-')} curve")
    seen: dict[tuple, CurveGraph] = {}
    for sites in model_site_sets(Y, kind):
        X = blow_up_many(Y, sites).curve
        key = canonical_form(X)
        seen.setdefault(key, X)
    return [seen[k] for k in sorted(seen, key=lambda k: (len(k[0]), k))]
