"""Multidegrees, the basic inequality and balanced classification.

For a subcurve Z of a genus-g curve and total degree d the basic inequality
reads ``m_Z <= d_Z <= M_Z`` with

    m_Z = d * deg_Z(omega) / (2g - 2) - k_Z / 2,    M_Z = m_Z + k_Z.

All comparisons are done in integers after scaling by ``2(2g - 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Iterator, Literal, Mapping, Sequence

import numpy as np

from .curve_model import CurveGraph, Subcurve, _as_mask, require_curve
from .errors import InvalidCurve, VertexMismatch

Level = Literal["balanced", "properly", "strictly", "stably"]
LEVELS: tuple[Level, ...] = ("balanced", "properly", "strictly", "stably")


@dataclass(frozen=True)
class Multidegree:
    """Integer degrees indexed by vertex id, stored sorted by id."""

    items: tuple[tuple[str, int], ...]

    def __init__(self, values: Mapping[str, int] | Iterable[tuple[str, int]]):
        pairs = values.items() if isinstance(values, Mapping) else values
        object.__setattr__(self, "items", tuple(sorted((str(k), int(v)) for k, v in pairs)))

    @classmethod
    def on(cls, X: CurveGraph, seq: Sequence[int]) -> "Multidegree":
        """Build from a sequence given in the curve's sorted-id order."""
        if len(seq) != X.n:
            raise VertexMismatch(f"expected {X.n} degrees, got {len(seq)}")
        return cls(zip(X.ids, (int(x) for x in seq)))

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "Multidegree":
        try:
            values = {str(k): int(v) for k, v in doc["values"].items()}
        except (KeyError, AttributeError, TypeError, ValueError) as exc:
            raise InvalidCurve(f"multidegree document: {exc}") from None
        md = cls(values)
        if "total" in doc and int(doc["total"]) != md.total:
            raise InvalidCurve(f"multidegree document: total {doc['total']} != sum {md.total}")
        return md

    def to_document(self) -> dict[str, Any]:
        return {"total": self.total, "values": dict(self.items)}

    @property
    def values(self) -> dict[str, int]:
        return dict(self.items)

    @property
    def total(self) -> int:
        return sum(v for _, v in self.items)

    def __getitem__(self, vid: str) -> int:
        for k, v in self.items:
            if k == vid:
                return v
        raise KeyError(vid)

    def vector(self, X: CurveGraph) -> np.ndarray:
        check_vertices(X, self)
        return np.array([v for _, v in self.items], dtype=np.int64)

    def degree_on(self, Z: Iterable[str]) -> int:
        vals = self.values
        return sum(vals[z] for z in Z)

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for _, v in self.items) + ")"


def check_vertices(X: CurveGraph, dvec: Multidegree) -> None:
    if tuple(k for k, _ in dvec.items) != X.ids:
        raise VertexMismatch(f"multidegree keys {[k for k, _ in dvec.items]} do not match vertices {list(X.ids)}")


def basic_bounds(X: CurveGraph, d: int, Z: Iterable[str] | Subcurve | int) -> tuple[Fraction, Fraction]:
    require_curve(X)
    mask = _as_mask(X, Z)
    mid = Fraction(d * X.mask_deg_omega(mask), 2 * X.genus - 2)
    half = Fraction(X.mask_k(mask), 2)
    return mid - half, mid + half


@dataclass(frozen=True)
class Violation:
    subcurve: frozenset[str]
    side: Literal["upper", "lower"]
    slack: Fraction  # distance past the bound, always positive


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    properly_balanced: bool
    strictly_balanced: bool
    stably_balanced: bool
    violations: tuple[Violation, ...] = field(default=())
    extremal_subcurves: tuple[frozenset[str], ...] = field(default=())

    def at(self, level: Level) -> bool:
        return {
            "balanced": self.balanced,
            "properly": self.properly_balanced,
            "strictly": self.strictly_balanced,
            "stably": self.stably_balanced,
        }[level]


@dataclass(frozen=True)
class _Bounds:
    """Scaled bounds over the cut table: ``den * d_Z`` must lie in [lo, hi]."""

    den: int
    lo: np.ndarray
    hi: np.ndarray


def _scaled_bounds(X: CurveGraph, d: int) -> _Bounds:
    t = X.cut_table
    D = 2 * X.genus - 2
    mid = 2 * d * t.deg_omega
    return _Bounds(2 * D, mid - D * t.k, mid + D * t.k)


def _level_masks(X: CurveGraph, D: np.ndarray, d: int) -> dict[str, np.ndarray]:
    """Per-row verdicts for a batch of multidegree rows ``D`` (shape (N, n))."""
    t = X.cut_table
    b = _scaled_bounds(X, d)
    N = D.shape[0]
    if len(t.masks):
        S = b.den * (D @ t.incidence.T)
        balanced = np.all((S >= b.lo) & (S <= b.hi), axis=1)
        at_top = S == b.hi
        strict_ok = ~np.any(at_top & ~t.crossing_exceptional, axis=1)
        stable_ok = ~np.any(at_top & ~t.inside_exceptional, axis=1)
    else:
        balanced = strict_ok = stable_ok = np.ones(N, dtype=bool)
    exc = [i for i in range(X.n) if X.exceptional_mask >> i & 1]
    exc_one = np.all(D[:, exc] == 1, axis=1) if exc else np.ones(N, dtype=bool)
    properly = balanced & exc_one
    strictly = properly & strict_ok
    return {"balanced": balanced, "properly": properly, "strictly": strictly, "stably": strictly & stable_ok}


def classify_multidegree(X: CurveGraph, dvec: Multidegree) -> BalanceReport:
    require_curve(X)
    check_vertices(X, dvec)
    vec = dvec.vector(X)
    d = int(vec.sum())
    flags = _level_masks(X, vec[None, :], d)
    t = X.cut_table
    b = _scaled_bounds(X, d)
    violations = []
    extremal = []
    if len(t.masks):
        S = b.den * (t.incidence @ vec)
        for r, m in enumerate(t.masks):
            if S[r] > b.hi[r]:
                violations.append(Violation(X.ids_of(m), "upper", Fraction(int(S[r] - b.hi[r]), b.den)))
            elif S[r] < b.lo[r]:
                violations.append(Violation(X.ids_of(m), "lower", Fraction(int(b.lo[r] - S[r]), b.den)))
            if S[r] == b.hi[r]:
                extremal.append(X.ids_of(m))
    return BalanceReport(
        balanced=bool(flags["balanced"][0]),
        properly_balanced=bool(flags["properly"][0]),
        strictly_balanced=bool(flags["strictly"][0]),
        stably_balanced=bool(flags["stably"][0]),
        violations=tuple(violations),
        extremal_subcurves=tuple(extremal),
    )


def is_balanced(X: CurveGraph, dvec: Multidegree, level: Level = "balanced") -> bool:
    vec = dvec.vector(X)
    return bool(_level_masks(X, vec[None, :], int(vec.sum()))[level][0])


def vertex_box(X: CurveGraph, d: int, level: Level = "balanced") -> list[range]:
    """Per-vertex integer ranges ceil(m_v)..floor(M_v) that contain every balanced vector."""
    require_curve(X)
    D = 2 * X.genus - 2
    boxes = []
    for i in range(X.n):
        mask = 1 << i
        mid = 2 * d * X.mask_deg_omega(mask)
        k = X.mask_k(mask)
        den = 2 * D
        lo = -((-(mid - D * k)) // den)
        hi = (mid + D * k) // den
        if level != "balanced" and X.exceptional_mask >> i & 1:
            lo, hi = max(lo, 1), min(hi, 1)
        boxes.append(range(lo, hi + 1))
    return boxes


def _box_rows(boxes: list[range], d: int, chunk: int = 200_000) -> Iterator[np.ndarray]:
    """Integer vectors in the box with coordinate sum d, lexicographic, in chunks."""
    n = len(boxes)
    if any(len(b) == 0 for b in boxes):
        return
    if n == 1:
        if d in boxes[0]:
            yield np.array([[d]], dtype=np.int64)
        return
    last = boxes[-1]
    head = boxes[:-1]
    # split on a prefix so each block stays below the chunk size
    split = 0
    size = 1
    for b in reversed(head):
        if size * len(b) > chunk:
            break
        size *= len(b)
        split += 1
    prefix_boxes = head[: len(head) - split]
    tail_boxes = head[len(head) - split :]
    tail_min = sum(b.start for b in tail_boxes) + last.start
    tail_max = sum(b.stop - 1 for b in tail_boxes) + last.stop - 1
    if tail_boxes:
        grids = np.meshgrid(*[np.arange(b.start, b.stop, dtype=np.int64) for b in tail_boxes], indexing="ij")
        tail = np.stack([g.ravel() for g in grids], axis=1)
    else:
        tail = np.zeros((1, 0), dtype=np.int64)
    tail_sum = tail.sum(axis=1)
    for prefix in product(*prefix_boxes):
        rest = d - sum(prefix)
        if rest < tail_min or rest > tail_max:
            continue
        lastv = rest - tail_sum
        keep = (lastv >= last.start) & (lastv < last.stop)
        if not keep.any():
            continue
        rows = np.empty((int(keep.sum()), n), dtype=np.int64)
        rows[:, : len(prefix)] = prefix
        rows[:, len(prefix) : n - 1] = tail[keep]
        rows[:, n - 1] = lastv[keep]
        yield rows


def enumerate_balanced_array(X: CurveGraph, d: int, level: Level = "balanced") -> np.ndarray:
    """Rows (in sorted-id order) of all multidegrees of total d at the given level."""
    require_curve(X)
    X._check_cap()
    out = []
    for rows in _box_rows(vertex_box(X, d, level), d):
        out.append(rows[_level_masks(X, rows, d)[level]])
    if not out:
        return np.zeros((0, X.n), dtype=np.int64)
    return np.concatenate(out, axis=0)


def enumerate_balanced(X: CurveGraph, d: int, level: Level = "balanced") -> list[Multidegree]:
    return [Multidegree.on(X, row.tolist()) for row in enumerate_balanced_array(X, d, level)]
