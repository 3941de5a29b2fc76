"""Desk-scale curve families: all wp-stable dual graphs of small genus and their quasi-models."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement, product

from .curve_model import CurveGraph, Vertex, _mk_edge, canonical_form, classify_curve
from .reductions import ModelKind, enumerate_models


def _genus_splits(total: int, n: int) -> set[tuple[int, ...]]:
    out = set()
    for combo in product(range(total + 1), repeat=n):
        if sum(combo) <= total:
            out.add(tuple(sorted(combo, reverse=True)))
    return out


@lru_cache(maxsize=None)
def wp_stable_graphs(g: int) -> tuple[CurveGraph, ...]:
    """Every wp-stable dual graph of genus g, up to isomorphism."""
    found: dict[tuple, CurveGraph] = {}
    for n in range(1, 2 * g - 1):
        ids = [chr(ord("a") + i) for i in range(n)]
        slots = [(i, j) for i in range(n) for j in range(i, n)]
        for genera in _genus_splits(g, n):
            n_edges = g - 1 + n - sum(genera)
            if n_edges < n - 1:
                continue
            for chosen in combinations_with_replacement(slots, n_edges):
                val = [0] * n
                for i, j in chosen:
                    val[i] += 1
                    val[j] += 1
                if any(2 * gv - 2 + val[i] <= 0 for i, gv in enumerate(genera)):
                    continue
                for cusps in product(*[range(gv + 1) for gv in genera]):
                    X = CurveGraph(
                        tuple(Vertex(ids[i], genera[i], cusps[i]) for i in range(n)),
                        tuple(_mk_edge(ids[i], ids[j]) for i, j in chosen),
                    )
                    if not X.is_connected:
                        break
                    found.setdefault(canonical_form(X), X)
    graphs = [X for X in found.values() if classify_curve(X).wp_stable]
    return tuple(sorted(graphs, key=lambda X: (X.n, canonical_form(X))))


def stable_graphs(g: int) -> tuple[CurveGraph, ...]:
    return tuple(X for X in wp_stable_graphs(g) if not any(v.cusps for v in X.vertices))


def p_stable_graphs(g: int) -> tuple[CurveGraph, ...]:
    return tuple(X for X in wp_stable_graphs(g) if classify_curve(X).p_stable)


@lru_cache(maxsize=None)
def quasi_models(g: int, kind: ModelKind = "quasi_wp_stable") -> tuple[CurveGraph, ...]:
    """All quasi-models of the matching stable-type graphs of genus g."""
    base = {"quasi_stable": stable_graphs, "quasi_p_stable": p_stable_graphs, "quasi_wp_stable": wp_stable_graphs}[kind]
    out: dict[tuple, CurveGraph] = {}
    for Y in base(g):
        for X in enumerate_models(Y, kind):
            out.setdefault(canonical_form(X), X)
    return tuple(sorted(out.values(), key=lambda X: (X.n, canonical_form(X))))


def named_curves() -> dict[str, CurveGraph]:
    """Small curves used throughout the examples and tests."""
    B = CurveGraph.build
    return {
        "banana": B({"a": 1, "b": 1}, [("a", "b"), ("a", "b")]),
        "banana_one_blown": B({"a": 1, "b": 1, "E": 0}, [("a", "E"), ("E", "b"), ("a", "b")]),
        "square": B({"a": 1, "b": 1, "E1": 0, "E2": 0}, [("a", "E1"), ("E1", "b"), ("a", "E2"), ("E2", "b")]),
        "cuspidal": B({"v": (3, 1)}),
        "cusp_model": B({"v": 2, "E": 0}, [("v", "E", 2)]),
        "tail": B({"a": 1, "b": 2}, [("a", "b")]),
        "smooth3": B({"v": 3}),
        "triangle": B({"a": 1, "b": 0, "c": 0}, [("a", "b"), ("b", "c"), ("c", "a"), ("b", "b"), ("c", "c")]),
        "nodal_rational": B({"v": 0}, [("v", "v"), ("v", "v"), ("v", "v")]),
        "k4": B(
            {"a": 0, "b": 0, "c": 0, "d": 0},
            [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")],
        ),
    }
