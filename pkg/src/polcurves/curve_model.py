"""Weighted dual graphs of curves and the subcurve calculus.

A curve is stored as its dual graph.  Each vertex is an irreducible component
carrying its arithmetic genus (cusps included) and the number of cusps on it.
Each edge is a node (length 1) or a tacnode with a line (length 2).

Subcurves are vertex subsets.  Internally they are bitmasks over the vertices
in sorted-id order; the public API speaks in frozensets of vertex ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    GenusTooSmall,
    InvalidCurve,
    InvalidSubcurve,
    NotConnected,
    TooLarge,
)

MAX_SCAN_VERTICES = 22


@dataclass(frozen=True, order=True)
class Vertex:
    id: str
    genus: int
    cusps: int = 0


@dataclass(frozen=True, order=True)
class Edge:
    """An unordered edge; endpoints are stored with ``u <= w``."""

    u: str
    w: str
    length: int = 1

    @property
    def is_loop(self) -> bool:
        return self.u == self.w

    def ends(self) -> tuple[str, str]:
        return (self.u, self.w)


def _mk_edge(u: str, w: str, length: int = 1) -> Edge:
    u, w = str(u), str(w)
    return Edge(u, w, length) if u <= w else Edge(w, u, length)


@dataclass(frozen=True)
class CurveGraph:
    """Immutable dual graph.  Vertices and edges are kept in canonical order."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        verts = tuple(sorted(self.vertices, key=lambda v: v.id))
        ids = [v.id for v in verts]
        if not verts:
            raise InvalidCurve("curve has no vertices")
        if len(set(ids)) != len(ids):
            raise InvalidCurve("duplicate vertex ids")
        for v in verts:
            if not isinstance(v.id, str):
                raise InvalidCurve(f"vertex id {v.id!r} is not a string")
            if v.genus < 0 or v.cusps < 0:
                raise InvalidCurve(f"vertex {v.id}: negative genus or cusp count")
            if v.cusps > v.genus:
                raise InvalidCurve(f"vertex {v.id}: each cusp contributes 1 to the genus")
        known = set(ids)
        edges = []
        for e in self.edges:
            e = _mk_edge(e.u, e.w, e.length)
            if e.u not in known or e.w not in known:
                raise InvalidCurve(f"edge {e.u}-{e.w} references an unknown vertex")
            if e.length not in (1, 2):
                raise InvalidCurve(f"edge {e.u}-{e.w}: length must be 1 or 2")
            if e.is_loop and e.length == 2:
                raise InvalidCurve(f"edge {e.u}-{e.w}: a length-2 edge cannot be a loop")
            edges.append(e)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    # construction helpers -------------------------------------------------

    @classmethod
    def build(
        cls,
        vertices: Mapping[str, int | tuple[int, int]],
        edges: Iterable[tuple] = (),
    ) -> "CurveGraph":
        """``vertices`` maps id to genus or to ``(genus, cusps)``;
        ``edges`` are ``(u, w)`` or ``(u, w, length)`` tuples."""
        vs = []
        for vid, spec in vertices.items():
            genus, cusps = (spec, 0) if isinstance(spec, int) else spec
            vs.append(Vertex(str(vid), genus, cusps))
        es = [_mk_edge(*e) for e in edges]
        return cls(tuple(vs), tuple(es))

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "CurveGraph":
        if not isinstance(doc, Mapping):
            raise InvalidCurve("curve document must be an object")
        try:
            raw_vertices = doc["vertices"]
            raw_edges = doc.get("edges", [])
        except KeyError as exc:
            raise InvalidCurve(f"curve document is missing field {exc}") from None
        vs = []
        for i, rv in enumerate(raw_vertices):
            try:
                vs.append(Vertex(str(rv["id"]), int(rv.get("genus", 0)), int(rv.get("cusps", 0))))
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidCurve(f"vertices[{i}]: {exc}") from None
        es = []
        for i, re in enumerate(raw_edges):
            try:
                u, w = re["ends"]
                es.append(_mk_edge(u, w, int(re.get("length", 1))))
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidCurve(f"edges[{i}]: {exc}") from None
        return cls(tuple(vs), tuple(es))

    def to_document(self) -> dict[str, Any]:
        return {
            "vertices": [{"id": v.id, "genus": v.genus, "cusps": v.cusps} for v in self.vertices],
            "edges": [{"ends": [e.u, e.w], "length": e.length} for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True)

    # basic accessors ------------------------------------------------------

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @cached_property
    def index(self) -> dict[str, int]:
        return {vid: i for i, vid in enumerate(self.ids)}

    def vertex(self, vid: str) -> Vertex:
        return self.vertices[self.index[vid]]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def genus(self) -> int:
        return self.mask_genus(self.full_mask)

    @cached_property
    def _edge_triples(self) -> tuple[tuple[int, int, int], ...]:
        ix = self.index
        return tuple((ix[e.u], ix[e.w], e.length) for e in self.edges)

    @cached_property
    def _neighbors(self) -> tuple[int, ...]:
        nb = [0] * self.n
        for i, j, _ in self._edge_triples:
            if i != j:
                nb[i] |= 1 << j
                nb[j] |= 1 << i
        return tuple(nb)

    @cached_property
    def _has_loop(self) -> tuple[bool, ...]:
        loops = [False] * self.n
        for i, j, _ in self._edge_triples:
            if i == j:
                loops[i] = True
        return tuple(loops)

    @cached_property
    def _genus_vec(self) -> tuple[int, ...]:
        return tuple(v.genus for v in self.vertices)

    def incident_edges(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if vid in (e.u, e.w)]

    # mask helpers ---------------------------------------------------------

    def mask_of(self, Z: Iterable[str]) -> int:
        mask = 0
        for vid in Z:
            try:
                mask |= 1 << self.index[vid]
            except KeyError:
                raise InvalidSubcurve(f"unknown vertex {vid!r}") from None
        return mask

    def ids_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.ids[i] for i in range(self.n) if mask >> i & 1)

    def sorted_ids_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.ids[i] for i in range(self.n) if mask >> i & 1)

    def mask_genus(self, mask: int) -> int:
        size = bin(mask).count("1")
        total = sum(self._genus_vec[i] for i in range(self.n) if mask >> i & 1)
        inside = sum(length for i, j, length in self._edge_triples if mask >> i & 1 and mask >> j & 1)
        return total + inside - size + 1

    def mask_k(self, mask: int) -> int:
        return sum(length for i, j, length in self._edge_triples if (mask >> i & 1) != (mask >> j & 1))

    def mask_deg_omega(self, mask: int) -> int:
        return 2 * self.mask_genus(mask) - 2 + self.mask_k(mask)

    def mask_connected(self, mask: int) -> bool:
        if mask == 0:
            return False
        seen = mask & -mask
        frontier = seen
        while frontier:
            grow = 0
            rest = frontier
            while rest:
                low = rest & -rest
                grow |= self._neighbors[low.bit_length() - 1]
                rest ^= low
            frontier = grow & mask & ~seen
            seen |= frontier
        return seen == mask

    def mask_components(self, mask: int) -> list[int]:
        comps = []
        rest = mask
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                grow = 0
                r = frontier
                while r:
                    low = r & -r
                    grow |= self._neighbors[low.bit_length() - 1]
                    r ^= low
                frontier = grow & rest & ~comp
                comp |= frontier
            comps.append(comp)
            rest &= ~comp
        return comps

    @property
    def is_connected(self) -> bool:
        return self.mask_connected(self.full_mask)

    # subcurve scans -------------------------------------------------------

    def _check_cap(self, cap: int | None = None) -> None:
        cap = MAX_SCAN_VERTICES if cap is None else cap
        if self.n > cap:
            raise TooLarge(f"{self.n} vertices exceeds the scan cap of {cap}")

    @cached_property
    def connected_masks(self) -> tuple[int, ...]:
        """All nonempty connected vertex subsets, grown from their lowest vertex."""
        self._check_cap()
        out: list[int] = []
        nb = self._neighbors

        def grow(S: int, ext: int, banned: int) -> None:
            out.append(S)
            while ext:
                u = ext & -ext
                ext ^= u
                T = S | u
                grow(T, (ext | nb[u.bit_length() - 1]) & ~T & ~banned, banned)
                banned |= u

        for v in range(self.n):
            below = (1 << (v + 1)) - 1
            grow(1 << v, nb[v] & ~below, below)
        return tuple(sorted(out))

    @cached_property
    def connected_table(self) -> tuple[np.ndarray, np.ndarray]:
        """(incidence matrix, genus vector) over ``connected_masks``."""
        masks = self.connected_masks
        inc = np.array([[m >> i & 1 for i in range(self.n)] for m in masks], dtype=np.int64)
        return inc, np.array([self.mask_genus(m) for m in masks], dtype=np.int64)

    @cached_property
    def cut_masks(self) -> tuple[int, ...]:
        """Proper subsets Z with both Z and its complement connected."""
        conn = set(self.connected_masks)
        full = self.full_mask
        return tuple(m for m in self.connected_masks if m != full and (full ^ m) in conn)

    @cached_property
    def exceptional_mask(self) -> int:
        mask = 0
        for i, v in enumerate(self.vertices):
            if v.genus != 0 or v.cusps != 0 or self._has_loop[i]:
                continue
            if self.mask_k(1 << i) == 2:
                mask |= 1 << i
        return mask

    @cached_property
    def exceptional(self) -> tuple[str, ...]:
        return self.sorted_ids_of(self.exceptional_mask)

    @cached_property
    def cut_table(self) -> "CutTable":
        return CutTable.of(self)


@dataclass(frozen=True)
class CutTable:
    """Vectorized data for the subsets used by balance checks."""

    masks: tuple[int, ...]
    incidence: np.ndarray  # (cuts, vertices) 0/1 matrix
    deg_omega: np.ndarray
    k: np.ndarray
    crossing_exceptional: np.ndarray  # every crossing edge has an exceptional endpoint
    inside_exceptional: np.ndarray  # Z is contained in the exceptional locus

    @classmethod
    def of(cls, X: CurveGraph) -> "CutTable":
        masks = X.cut_masks
        inc = np.zeros((len(masks), X.n), dtype=np.int64)
        for r, m in enumerate(masks):
            for i in range(X.n):
                if m >> i & 1:
                    inc[r, i] = 1
        exc = X.exceptional_mask
        cross_exc = []
        for m in masks:
            ok = True
            for i, j, _ in X._edge_triples:
                if (m >> i & 1) != (m >> j & 1) and not (exc >> i & 1 or exc >> j & 1):
                    ok = False
                    break
            cross_exc.append(ok)
        return cls(
            masks=masks,
            incidence=inc,
            deg_omega=np.array([X.mask_deg_omega(m) for m in masks], dtype=np.int64),
            k=np.array([X.mask_k(m) for m in masks], dtype=np.int64),
            crossing_exceptional=np.array(cross_exc, dtype=bool),
            inside_exceptional=np.array([m & ~exc == 0 for m in masks], dtype=bool),
        )


@dataclass(frozen=True)
class Subcurve:
    vertices: frozenset[str]
    g: int
    k: int
    deg_omega: int


def _as_mask(X: CurveGraph, Z: Iterable[str] | Subcurve | int) -> int:
    if isinstance(Z, int):
        mask = Z
    elif isinstance(Z, Subcurve):
        mask = X.mask_of(Z.vertices)
    else:
        mask = X.mask_of([Z] if isinstance(Z, str) else Z)
    if mask == 0:
        raise InvalidSubcurve("subcurve must be nonempty")
    if mask & ~X.full_mask:
        raise InvalidSubcurve("subcurve mask has bits outside the curve")
    return mask


def subcurve_stats(X: CurveGraph, Z: Iterable[str] | Subcurve | int) -> Subcurve:
    """Genus, intersection length with the complement and degree of the dualizing sheaf."""
    mask = _as_mask(X, Z)
    g = X.mask_genus(mask)
    k = X.mask_k(mask)
    return Subcurve(X.ids_of(mask), g, k, 2 * g - 2 + k)


# classification -------------------------------------------------------------


@dataclass(frozen=True)
class CurveClass:
    pre_stable: bool
    pre_p_stable: bool
    pre_wp_stable: bool
    quasi_stable: bool
    quasi_p_stable: bool
    quasi_wp_stable: bool
    stable: bool
    p_stable: bool
    wp_stable: bool
    g_semistable: bool
    g_quasistable: bool
    g_stable: bool
    exceptional_vertices: tuple[str, ...]
    non_exceptional_components: int
    elliptic_tails: tuple[frozenset[str], ...] = field(default=())


def require_curve(X: CurveGraph, min_genus: int = 2) -> None:
    if not X.is_connected:
        raise NotConnected("curve is not connected")
    if X.genus < min_genus:
        raise GenusTooSmall(f"genus {X.genus} < {min_genus}")


def elliptic_tail_masks(X: CurveGraph) -> list[int]:
    full = X.full_mask
    return [m for m in X.connected_masks if m != full and X.mask_genus(m) == 1 and X.mask_k(m) == 1]


def non_exceptional_components(X: CurveGraph) -> int:
    return len(X.mask_components(X.full_mask & ~X.exceptional_mask))


def classify_curve(X: CurveGraph) -> CurveClass:
    require_curve(X)
    return _classify_curve(X)


@lru_cache(maxsize=4096)
def _classify_curve(X: CurveGraph) -> CurveClass:
    exc = X.exceptional_mask
    full = X.full_mask
    conn = X.connected_masks

    has_cusps = any(v.cusps for v in X.vertices)
    long_edges = [(i, j) for i, j, length in X._edge_triples if length == 2]
    pre_wp = all(exc >> i & 1 or exc >> j & 1 for i, j in long_edges)
    pre_stable = not has_cusps and not long_edges
    tails = elliptic_tail_masks(X)

    g_semi = g_quasi = g_stab = True
    omega_ample = True
    rational_bridges_ok = True
    for m in conn:
        gz = X.mask_genus(m)
        kz = X.mask_k(m)
        deg = 2 * gz - 2 + kz
        single = m & (m - 1) == 0
        if deg < 0:
            g_semi = False
        if deg <= 0:
            g_stab = False
            if deg == 0:
                i = m.bit_length() - 1
                if not (single and X._genus_vec[i] == 0 and not X._has_loop[i]):
                    g_quasi = False
        if gz == 0 and kz <= 2:
            omega_ample = False
            if not (single and exc & m):
                rational_bridges_ok = False
    g_quasi = g_quasi and g_semi
    adjacent_exc = any(
        i != j and exc >> i & 1 and exc >> j & 1 for i, j, _ in X._edge_triples
    )
    quasi_wp = pre_wp and rational_bridges_ok and not adjacent_exc
    wp = pre_wp and omega_ample
    pre_p = pre_wp and not tails
    return CurveClass(
        pre_stable=pre_stable,
        pre_p_stable=pre_p,
        pre_wp_stable=pre_wp,
        quasi_stable=quasi_wp and pre_stable,
        quasi_p_stable=quasi_wp and not tails,
        quasi_wp_stable=quasi_wp,
        stable=wp and pre_stable,
        p_stable=wp and not tails,
        wp_stable=wp,
        g_semistable=g_semi,
        g_quasistable=g_quasi,
        g_stable=g_stab,
        exceptional_vertices=X.sorted_ids_of(exc),
        non_exceptional_components=len(X.mask_components(full & ~exc)),
        elliptic_tails=tuple(X.ids_of(m) for m in tails),
    )


# isomorphism ----------------------------------------------------------------


def _rank(keys: Sequence[Hashable]) -> list[int]:
    table = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


def canonical_labeling(
    X: CurveGraph, labels: Mapping[str, int] | None = None
) -> tuple[tuple, tuple[str, ...]]:
    """Canonical form of a labeled dual graph and a vertex order realizing it.

    Color refinement followed by individualization of the first non-singleton
    cell; the minimum encoding over all leaves is the canonical form.
    """
    n = X.n
    lab = [0 if labels is None else int(labels[vid]) for vid in X.ids]
    base = [(v.genus, v.cusps, lab[i]) for i, v in enumerate(X.vertices)]
    incident: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, j, length in X._edge_triples:
        incident[i].append((length, j))
        if i != j:
            incident[j].append((length, i))

    def refine(colors: list[int]) -> list[int]:
        count = len(set(colors))
        while True:
            sigs = [
                (colors[v], tuple(sorted((ln, colors[w], w == v) for ln, w in incident[v])))
                for v in range(n)
            ]
            new = _rank(sigs)
            new_count = len(set(new))
            if new_count == count:
                return new
            colors, count = new, new_count

    def encode(order: list[int]) -> tuple:
        pos = {v: p for p, v in enumerate(order)}
        verts = tuple(base[v] for v in order)
        edges = tuple(sorted((min(pos[i], pos[j]), max(pos[i], pos[j]), ln) for i, j, ln in X._edge_triples))
        return (verts, edges)

    best: list[Any] = [None, None]

    def search(colors: list[int]) -> None:
        colors = refine(colors)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            order = sorted(range(n), key=lambda v: colors[v])
            enc = encode(order)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        for v in target:
            search(_rank([(colors[u], 0 if u == v else 1) for u in range(n)]))

    search(_rank(base))
    return best[0], tuple(X.ids[v] for v in best[1])


def canonical_form(X: CurveGraph, labels: Mapping[str, int] | None = None) -> tuple:
    return canonical_labeling(X, labels)[0]


def isomorphism(
    X: CurveGraph,
    Y: CurveGraph,
    labels_x: Mapping[str, int] | None = None,
    labels_y: Mapping[str, int] | None = None,
) -> dict[str, str] | None:
    """A label-preserving isomorphism X -> Y as a vertex map, or None."""
    if X.n != Y.n or len(X.edges) != len(Y.edges):
        return None
    fx, ox = canonical_labeling(X, labels_x)
    fy, oy = canonical_labeling(Y, labels_y)
    if fx != fy:
        return None
    return dict(zip(ox, oy))


def are_isomorphic(X: CurveGraph, Y: CurveGraph) -> bool:
    return isomorphism(X, Y) is not None


def relabel(X: CurveGraph, mapping: Mapping[str, str]) -> CurveGraph:
    vs = tuple(Vertex(mapping.get(v.id, v.id), v.genus, v.cusps) for v in X.vertices)
    es = tuple(_mk_edge(mapping.get(e.u, e.u), mapping.get(e.w, e.w), e.length) for e in X.edges)
    return CurveGraph(vs, es)


def iter_subsets(X: CurveGraph, proper: bool = True) -> Iterator[int]:
    """All nonempty vertex subsets as masks (proper ones by default)."""
    X._check_cap()
    stop = X.full_mask if proper else X.full_mask + 1
    return iter(range(1, stop))
