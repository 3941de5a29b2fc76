"""The twister lattice, the degree class group and balanced representatives."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import prod
from typing import Iterator

import numpy as np

from .curve_model import CurveGraph, require_curve
from .errors import NotConnected, SearchExhausted
from .multidegree import (
    Multidegree,
    _level_masks,
    _scaled_bounds,
    check_vertices,
    enumerate_balanced_array,
)

Matrix = list[list[int]]


@dataclass(frozen=True)
class TwisterLattice:
    vertex_ids: tuple[str, ...]
    generator_matrix: tuple[tuple[int, ...], ...]

    def row(self, vid: str) -> tuple[int, ...]:
        return self.generator_matrix[self.vertex_ids.index(vid)]

    def subcurve_twister(self, Z) -> tuple[int, ...]:
        """Sum of the rows over the vertices of Z."""
        n = len(self.vertex_ids)
        out = [0] * n
        for vid in Z:
            for j, x in enumerate(self.row(vid)):
                out[j] += x
        return tuple(out)


def twister_lattice(X: CurveGraph) -> TwisterLattice:
    if not X.is_connected:
        raise NotConnected("curve is not connected")
    n = X.n
    M = [[0] * n for _ in range(n)]
    for i, j, length in X._edge_triples:
        if i != j:
            M[i][j] += length
            M[j][i] += length
    for i in range(n):
        M[i][i] = -sum(M[i])
    return TwisterLattice(X.ids, tuple(tuple(r) for r in M))


def smith_normal_form(A: Matrix) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    """Return (U, S, V, Vinv) with U @ A @ V = S diagonal, U and V unimodular,
    and each diagonal entry dividing the next (zeros last)."""
    m, n = len(A), len(A[0]) if A else 0
    S = [list(r) for r in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(a: int, b: int) -> None:
        S[a], S[b] = S[b], S[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a: int, b: int) -> None:
        for r in S:
            r[a], r[b] = r[b], r[a]
        for r in V:
            r[a], r[b] = r[b], r[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    def add_row(dst: int, src: int, q: int) -> None:  # row dst += q * row src
        S[dst] = [x + q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, q: int) -> None:  # col dst += q * col src
        for r in S:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
            if not nz:
                break
            _, pi, pj = min(nz)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = S[t][t]
            done = True
            for i in range(t + 1, m):
                q = S[i][t] // p
                if q:
                    add_row(i, t, -q)
                if S[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = S[t][j] // p
                if q:
                    add_col(j, t, -q)
                if S[t][j]:
                    done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return U, S, V, Vi


@dataclass(frozen=True)
class DegreeClassGroup:
    vertex_ids: tuple[str, ...]
    invariant_factors: tuple[int, ...]
    order: int
    diagonal: tuple[int, ...]
    transform: tuple[tuple[int, ...], ...]  # V with U A V = diag
    inverse_transform: tuple[tuple[int, ...], ...]

    @cached_property
    def _V(self) -> np.ndarray:
        return np.array(self.transform, dtype=object)

    def class_key(self, vec) -> tuple[int, ...]:
        """Invariant of the class of an integer vector modulo the lattice."""
        y = [sum(int(vec[i]) * self.transform[i][j] for i in range(len(vec))) for j in range(len(vec))]
        return tuple(yj % f if f else yj for yj, f in zip(y, self.diagonal) if f != 1)

    def class_keys(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized ``class_key`` over rows; columns with factor 1 are dropped."""
        Y = rows.astype(np.int64) @ np.array(self.transform, dtype=np.int64)
        cols = []
        for j, f in enumerate(self.diagonal):
            if f == 1:
                continue
            cols.append(np.mod(Y[:, j], f) if f else Y[:, j])
        if not cols:
            return np.zeros((rows.shape[0], 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def degree_zero_elements(self) -> Iterator[tuple[int, ...]]:
        """One degree-zero integer vector per class of the group."""
        n = len(self.vertex_ids)
        torsion = [(j, f) for j, f in enumerate(self.diagonal) if f > 1]
        for coeffs in product(*[range(f) for _, f in torsion]):
            vec = [0] * n
            for (j, _), a in zip(torsion, coeffs):
                for i in range(n):
                    vec[i] += a * self.inverse_transform[j][i]
            yield tuple(vec)


def degree_class_group(X: CurveGraph) -> DegreeClassGroup:
    lat = twister_lattice(X)
    A = [list(r) for r in lat.generator_matrix]
    _, S, V, Vi = smith_normal_form(A)
    diag = tuple(S[i][i] for i in range(X.n))
    factors = tuple(f for f in diag if f > 1)
    return DegreeClassGroup(
        vertex_ids=X.ids,
        invariant_factors=factors,
        order=prod(factors),
        diagonal=diag,
        transform=tuple(tuple(r) for r in V),
        inverse_transform=tuple(tuple(r) for r in Vi),
    )


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    chain: tuple[frozenset[str], ...] | None = None
    chain_found: bool = False
    chain_normalized: bool = False


def are_equivalent(
    X: CurveGraph,
    d1: Multidegree,
    d2: Multidegree,
    group: DegreeClassGroup | None = None,
    want_chain: bool = True,
) -> Equivalence:
    check_vertices(X, d1)
    check_vertices(X, d2)
    if d1.total != d2.total:
        return Equivalence(False)
    group = group or degree_class_group(X)
    v1, v2 = d1.vector(X), d2.vector(X)
    if group.class_key(v1) != group.class_key(v2):
        return Equivalence(False)
    if not want_chain:
        return Equivalence(True)
    if d1 == d2:
        return Equivalence(True, (), True, True)
    from .multidegree import is_balanced

    if not (is_balanced(X, d1) and is_balanced(X, d2)):
        return Equivalence(True)
    chain = find_chain(X, v1, v2)
    if chain is None:
        return Equivalence(True, None, False, False)
    masks = [X.mask_of(z) for z in chain]
    return Equivalence(True, tuple(chain), True, chain_is_normalized(X, masks))


def _twister(X: CurveGraph, mask: int) -> np.ndarray:
    out = np.zeros(X.n, dtype=np.int64)
    for i, j, length in X._edge_triples:
        if i == j:
            continue
        a, b = mask >> i & 1, mask >> j & 1
        if a and not b:
            out[i] -= length
            out[j] += length
        elif b and not a:
            out[j] -= length
            out[i] += length
    return out


def find_chain(X: CurveGraph, v1: np.ndarray, v2: np.ndarray) -> list[frozenset[str]] | None:
    """Nested connected subcurves Z_1 ⊆ ... ⊆ Z_m, each attaining the upper bound
    for v1, whose twisters sum to v2 - v1.  Chains have length at most the
    number of components."""
    d = int(v1.sum())
    b = _scaled_bounds(X, d)
    t = X.cut_table
    S = b.den * (t.incidence @ v1)
    cands = [m for r, m in enumerate(t.masks) if S[r] == b.hi[r]]
    target = v2 - v1
    tw = {m: _twister(X, m) for m in cands}

    def dfs(start: int, prev: int, acc: np.ndarray, chain: list[int]) -> list[int] | None:
        if np.array_equal(acc, target):
            return list(chain)
        if len(chain) >= X.n:
            return None
        for idx in range(start, len(cands)):
            m = cands[idx]
            if prev & ~m:
                continue
            chain.append(m)
            found = dfs(idx, m, acc + tw[m], chain)
            chain.pop()
            if found is not None:
                return found
        return None

    cands.sort(key=lambda m: (bin(m).count("1"), m))
    found = dfs(0, 0, np.zeros(X.n, dtype=np.int64), [])
    if found is None:
        return None
    return [X.ids_of(m) for m in found]


def chain_is_normalized(X: CurveGraph, masks: list[int]) -> bool:
    """For i > j no point of Z_j lies on the complement of Z_i."""
    for a in range(len(masks)):
        for b in range(a):
            inner, outer = masks[b], masks[a]
            if inner & ~outer:
                return False
            for i, j, _ in X._edge_triples:
                if (inner >> i & 1 and not outer >> j & 1) or (inner >> j & 1 and not outer >> i & 1):
                    return False
    return True


def balanced_representative(
    X: CurveGraph,
    dvec: Multidegree,
    max_iterations: int | None = None,
    stats: dict | None = None,
) -> Multidegree:
    """Greedy descent on upper-bound violations with an exhaustive fallback."""
    require_curve(X)
    check_vertices(X, dvec)
    vec = dvec.vector(X)
    d = int(vec.sum())
    t = X.cut_table
    b = _scaled_bounds(X, d)
    if max_iterations is None:
        max_iterations = 10 * X.n * (int(np.abs(vec).max()) + abs(d))
    twisters = [_twister(X, m) for m in t.masks]
    cur = vec.copy()
    for _ in range(max_iterations + 1):
        if not len(t.masks):
            break
        excess = b.den * (t.incidence @ cur) - b.hi
        r = int(np.argmax(excess))
        if excess[r] <= 0:
            if stats is not None:
                stats["greedy"] = stats.get("greedy", 0) + 1
            return Multidegree.on(X, cur.tolist())
        cur = cur + twisters[r]
    else:
        pass
    if not len(t.masks):
        return Multidegree.on(X, cur.tolist())
    # fallback: scan the balanced box for a member of the same class
    group = degree_class_group(X)
    key = group.class_key(vec)
    rows = enumerate_balanced_array(X, d, "balanced")
    if len(rows):
        keys = group.class_keys(rows)
        want = np.array(key, dtype=np.int64)
        hit = np.nonzero(np.all(keys == want, axis=1))[0] if keys.shape[1] else np.arange(len(rows))
        if len(hit):
            if stats is not None:
                stats["fallback"] = stats.get("fallback", 0) + 1
            return Multidegree.on(X, rows[hit[0]].tolist())
    raise SearchExhausted(f"no balanced representative found for {dvec}")


def balanced_class_coverage(X: CurveGraph, d: int, group: DegreeClassGroup | None = None) -> tuple[int, int]:
    """(number of classes of total degree d hit by balanced multidegrees, group order)."""
    group = group or degree_class_group(X)
    rows = enumerate_balanced_array(X, d, "balanced")
    if not len(rows):
        return 0, group.order
    keys = group.class_keys(rows)
    return len({tuple(r) for r in keys.tolist()}), group.order
