"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line with its measured runtime against
the time budget; the lines are printed in the terminal summary and when the
file is run as a script.
"""

from __future__ import annotations

import random
import sys
import time
from itertools import combinations
from math import gcd
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import minimal_basis_weight, random_connected_curve, reduced_laplacian_det  # noqa: E402
from polcurves.catalog import named_curves, p_stable_graphs, quasi_models, stable_graphs, wp_stable_graphs  # noqa: E402
from polcurves.class_group import _twister, balanced_class_coverage, balanced_representative, degree_class_group  # noqa: E402
from polcurves.curve_model import are_isomorphic, classify_curve  # noqa: E402
from polcurves.errors import SearchExhausted  # noqa: E402
from polcurves.git_classifier import (  # noqa: E402
    candidate_sheaves,
    classify_regime,
    git_classify,
    git_verdicts,
    sheaf_lift,
    simpson_pushforward,
    simpson_semistable,
)
from polcurves.hm_certificates import (  # noqa: E402
    CUBIC_MONOMIALS,
    LEADING,
    cubic_weight_polynomial,
    certificate_rows,
    destabilizer_certificate,
    elliptic_tail_verdict,
)
from polcurves.multidegree import (  # noqa: E402
    Multidegree,
    _level_masks,
    classify_multidegree,
    enumerate_balanced,
    enumerate_balanced_array,
)
from polcurves.positivity import canonical_power_report, positivity_report, positivity_values  # noqa: E402
from polcurves.reductions import enumerate_models, ps_reduce, wps_reduce  # noqa: E402
from polcurves.strata import StratumPair, preceq, specialize_strictly, strata_poset  # noqa: E402

RESULTS: list[str] = []


def record(num: int, title: str, ok: bool, detail: str, elapsed: float, budget: float) -> bool:
    in_time = elapsed < budget
    passed = ok and in_time
    line = f"[{'PASS' if passed else 'FAIL'}] {num:>2}. {title}: {detail} ({elapsed:.1f}s / budget {budget:g}s)"
    RESULTS.append(line)
    print(line)
    return passed


def family(g: int) -> list:
    """Quasi-wp-stable curves of genus g with at most 4 non-exceptional components."""
    return [X for X in quasi_models(g, "quasi_wp_stable") if X.n - len(X.exceptional) <= 4]


def degree_range(g: int) -> range:
    return range(2 * g - 1, 4 * (2 * g - 2) + 3)


def test_01_elliptic_tail_numbers():
    t0 = time.perf_counter()
    problems = []
    if cubic_weight_polynomial(1, 2, 3).e != 11:
        problems.append("e(1,2,3) != 11")
    checked = 0
    for g in range(3, 9):
        D = 2 * g - 2
        for d in range(2 * D + 1, (7 * D + 1) // 2):
            if not 2 * d < 7 * D:
                continue
            v = elliptic_tail_verdict(g, d)
            checked += 1
            if v.e_rho != 6 * d - 7 or v.w_rho != 3 * (d - g) or v.verdict != "chow_unstable":
                problems.append(f"(g,d)=({g},{d}): e={v.e_rho} w={v.w_rho} {v.verdict}")
    ok = not problems
    detail = f"e=11, e=6d-7, w=3r and chow_unstable on {checked} (g,d) pairs" if ok else "; ".join(problems[:3])
    assert record(1, "elliptic tail numbers", ok, detail, time.perf_counter() - t0, 1)


def test_02_weight_oracle():
    t0 = time.perf_counter()
    problems = []
    for w in [(1, 2, 3), (1, 1, 1), (2, 3, 5)]:
        wt = lambda a: a[0] * w[0] + a[1] * w[1] + a[2] * w[2]  # noqa: E731
        support = [mon for mon in CUBIC_MONOMIALS if wt(mon) <= wt(LEADING)]
        poly = cubic_weight_polynomial(*w)
        for m in range(3, 31):
            got = minimal_basis_weight(w, m, support)
            if got != poly(m):
                problems.append(f"w={w} m={m}: basis {got} != closed form {poly(m)}")
    ok = not problems
    detail = "84 (weights, m) cases exact" if ok else "; ".join(problems[:3])
    assert record(2, "minimal-weight basis vs closed form", ok, detail, time.perf_counter() - t0, 5)


def test_03_class_group_matrix_tree():
    t0 = time.perf_counter()
    rng = random.Random(20240603)
    problems = []
    for _ in range(200):
        X = random_connected_curve(rng, 5, 6)
        order = degree_class_group(X).order
        det = reduced_laplacian_det(X)
        if order != det:
            problems.append(f"{X.to_json()}: {order} != {det}")
    ok = not problems
    detail = "200 random graphs exact" if ok else "; ".join(problems[:2])
    assert record(3, "class group order vs spanning-tree determinant", ok, detail, time.perf_counter() - t0, 10)


def test_04_balanced_representatives():
    t0 = time.perf_counter()
    rng = random.Random(4)
    problems = []
    cases = calls = 0
    for g in (2, 3):
        for X in family(g):
            grp = degree_class_group(X)
            zero = [np.array(z, dtype=np.int64) for z in grp.degree_zero_elements()]
            cuts = [m for m in X.cut_masks]
            for d in degree_range(g):
                cases += 1
                hit, order = balanced_class_coverage(X, d, grp)
                if hit != order:
                    problems.append(f"{X.to_json()} d={d}: {hit}/{order} classes balanced")
                for z in zero:
                    v = z.copy()
                    v[0] += d
                    for m in rng.sample(cuts, min(3, len(cuts))):
                        v = v + rng.randint(-3, 3) * _twister(X, m)
                    src = Multidegree.on(X, v.tolist())
                    calls += 1
                    try:
                        out = balanced_representative(X, src)
                    except SearchExhausted:
                        problems.append(f"SearchExhausted on {src}")
                        continue
                    rep = classify_multidegree(X, out)
                    if not rep.balanced or grp.class_key(out.vector(X)) != grp.class_key(v):
                        problems.append(f"bad representative {out} for {src}")
    ok = not problems
    detail = f"{cases} (curve, d) cases fully covered, {calls} representatives found" if ok else "; ".join(problems[:2])
    assert record(4, "every class has a balanced representative", ok, detail, time.perf_counter() - t0, 120)


def test_05_strict_uniqueness_and_stability():
    t0 = time.perf_counter()
    problems = []
    cases = 0
    for g in (2, 3):
        for X in family(g):
            grp = degree_class_group(X)
            gamma = classify_curve(X).non_exceptional_components
            for d in degree_range(g):
                cases += 1
                strict = enumerate_balanced_array(X, d, "strictly")
                stable = enumerate_balanced_array(X, d, "stably")
                keys = [tuple(k) for k in grp.class_keys(strict).tolist()]
                if len(keys) != len(set(keys)):
                    problems.append(f"{X.to_json()} d={d}: two strictly balanced in one class")
                strict_set = {tuple(r) for r in strict.tolist()}
                stable_set = {tuple(r) for r in stable.tolist()}
                want = strict_set if gamma == 1 else set()
                if stable_set != want:
                    problems.append(f"{X.to_json()} d={d}: stably != strictly and gamma=1")
    ok = not problems
    detail = f"{cases} (curve, d) cases" if ok else "; ".join(problems[:2])
    assert record(5, "strictly balanced unique per class; stably iff strictly and gamma=1", ok, detail, time.perf_counter() - t0, 120)


def test_06_gcd_criterion():
    t0 = time.perf_counter()
    g = 3
    problems = []
    notes = []
    sq = named_curves()["square"]
    square_rep = classify_multidegree(sq, Multidegree({"a": 5, "b": 5, "E1": 1, "E2": 1}))
    if not (square_rep.strictly_balanced and not square_rep.stably_balanced):
        problems.append("square (5,5,1,1) is not a strictly-not-stably witness")
    fam = family(g)
    for d in range(9, 14):
        witnesses = 0
        for X in fam:
            strict = enumerate_balanced_array(X, d, "strictly")
            stable = enumerate_balanced_array(X, d, "stably")
            witnesses += len(strict) - len(stable)
        coprime = gcd(d + 1 - g, 2 * g - 2) == 1
        notes.append(f"d={d}:{witnesses}")
        if coprime and witnesses:
            problems.append(f"d={d}: gcd 1 but {witnesses} witnesses")
        if not coprime and not witnesses:
            problems.append(f"d={d}: gcd > 1 but no witness")
    ok = not problems
    detail = "witness counts " + ", ".join(notes) if ok else "; ".join(problems)
    assert record(6, "gcd criterion for strictly-not-stably witnesses", ok, detail, time.perf_counter() - t0, 60)


def seed_curves() -> list:
    named = named_curves()
    seeds = [named[k] for k in ("banana", "cuspidal", "tail", "k4", "nodal_rational", "smooth3", "triangle")]
    extra = [Y for Y in wp_stable_graphs(3) if not any(are_isomorphic(Y, s) for s in seeds)]
    return seeds + extra[:3]


def test_07_reduction_round_trips():
    t0 = time.perf_counter()
    problems = []
    count = 0
    seeds = seed_curves()
    for Y in seeds:
        for X in enumerate_models(Y, "quasi_wp_stable"):
            count += 1
            if not are_isomorphic(wps_reduce(X)[0], Y):
                problems.append(f"wps_reduce of {X.to_json()} is not the seed")
            if X.genus >= 3:
                P, _ = ps_reduce(X)
                if not classify_curve(P).p_stable or P.genus != X.genus:
                    problems.append(f"ps_reduce of {X.to_json()} is not p-stable of genus {X.genus}")
    ok = not problems and len(seeds) == 10
    detail = f"{count} models over {len(seeds)} seeds" if ok else "; ".join(problems[:2])
    assert record(7, "reduction round trips", ok, detail, time.perf_counter() - t0, 30)


def test_08_strata_poset():
    t0 = time.perf_counter()
    named = named_curves()
    problems = []
    cases = [
        (named["banana"], 9, "quasi_stable"),
        (named["banana"], 12, "quasi_stable"),
        (named["cuspidal"], 9, "quasi_p_stable"),
        (named["cuspidal"], 12, "quasi_wp_stable"),
        (named["nodal_rational"], 10, "quasi_stable"),
    ]
    cases += [(Y, 10, "quasi_wp_stable") for Y in wp_stable_graphs(3) if Y.n <= 2]
    cases += [(Y, 10, "quasi_wp_stable") for Y in wp_stable_graphs(3) if Y.n == 3][:8]
    total = 0
    for Y, d, kind in cases:
        P = strata_poset(Y, d, kind)
        nodes = P.nodes
        total += len(nodes)
        rel = [[preceq(a, b) for b in nodes] for a in nodes]
        for i in range(len(nodes)):
            if not rel[i][i]:
                problems.append(f"not reflexive at {nodes[i].label()}")
            for j in range(len(nodes)):
                if i != j and rel[i][j] and rel[j][i] and nodes[i].key() != nodes[j].key():
                    problems.append("not antisymmetric")
                for k in range(len(nodes)):
                    if rel[i][j] and rel[j][k] and not rel[i][k]:
                        problems.append("not transitive")
        for p in nodes:
            out, steps = specialize_strictly(p)
            strict_in = classify_multidegree(p.curve, p.multidegree).strictly_balanced
            if not classify_multidegree(out.curve, out.multidegree).strictly_balanced:
                problems.append(f"specialization of {p.label()} not strictly balanced")
            if not preceq(out, p):
                problems.append(f"specialization of {p.label()} not below input")
            if (not steps) != strict_in:
                problems.append(f"trace of {p.label()} inconsistent with strictness")
    ok = not problems
    detail = f"{len(cases)} posets, {total} strata" if ok else "; ".join(problems[:2])
    assert record(8, "strata poset order and strict specialization", ok, detail, time.perf_counter() - t0, 60)


def test_09_simpson_correspondence():
    t0 = time.perf_counter()
    problems = []
    pushed = 0
    for X in quasi_models(3, "quasi_p_stable"):
        for d in (9, 10, 12):
            for dvec in enumerate_balanced(X, d, "properly"):
                pushed += 1
                if not simpson_semistable(simpson_pushforward(X, dvec), d):
                    problems.append(f"pushforward of {dvec} on {X.to_json()} not semistable")
    lifted = 0
    for base in p_stable_graphs(3):
        for d in (9, 10):
            for s in candidate_sheaves(base, d):
                if not simpson_semistable(s, d):
                    continue
                lifted += 1
                Xl, dl = sheaf_lift(s)
                if not classify_multidegree(Xl, dl).properly_balanced or simpson_pushforward(Xl, dl) != s:
                    problems.append(f"sheaf {s.degrees} on {base.to_json()} does not lift")
    ok = not problems and pushed and lifted
    detail = f"{pushed} pushforwards semistable, {lifted} semistable sheaves lift" if ok else "; ".join(problems[:2])
    assert record(9, "sheaf correspondence", ok, detail, time.perf_counter() - t0, 60)


def _sample(n: int, rng: random.Random, k: int = 2) -> list[int]:
    return rng.sample(range(n), min(k, n))


def test_10_classifier_coherence():
    t0 = time.perf_counter()
    g = 3
    rng = random.Random(10)
    problems = []
    counts = {"theoremA": 0, "theoremB": 0, "open_band": 0, "certificates": 0, "scalar checks": 0}
    decode = {1: True, 0: False, -1: None}
    for d in [9, 10, 11, 12, 13, 14, 15, 16, 17, 18]:
        regime = classify_regime(g, d).regime
        level = "properly" if regime == "open_band" else "balanced"
        for X in family(g):
            rows = enumerate_balanced_array(X, d, level)
            if not len(rows):
                continue
            counts[regime] += len(rows)
            v = git_verdicts(X, rows, g, d)
            semi, poly, stab = v["semistable"], v["polystable"], v["stable"]
            if regime == "open_band":
                if np.any(semi != -1) or np.any(poly != -1) or np.any(stab != -1):
                    problems.append(f"determined open-band verdict on {X.to_json()}")
            elif np.any((stab == 1) & (poly != 1)) or np.any((poly == 1) & (semi != 1)):
                problems.append(f"verdicts not nested on {X.to_json()} d={d}")
            flags = _level_masks(X, rows, d)
            proper = flags["properly"]
            cert = certificate_rows(X, rows, d) >= 0
            if regime != "open_band":
                counts["certificates"] += int(cert[proper].sum())
                if np.any(cert[proper] == flags["stably"][proper]):
                    problems.append(f"certificate presence differs from not-stably on {X.to_json()} d={d}")
            for i in _sample(len(rows), rng):
                dvec = Multidegree.on(X, rows[i].tolist())
                rep = git_classify(X, dvec, g, d)
                counts["scalar checks"] += 1
                if (rep.semistable, rep.polystable, rep.stable) != (decode[semi[i]], decode[poly[i]], decode[stab[i]]):
                    problems.append(f"scalar and batch verdicts differ for {dvec}")
                if proper[i] and regime != "open_band":
                    c = destabilizer_certificate(X, dvec, g, d)
                    if (c is not None) != cert[i] or (c is not None and not c.identity_holds):
                        problems.append(f"certificate mismatch for {dvec} on {X.to_json()}")
    ok = not problems
    detail = ", ".join(f"{k} {v}" for k, v in counts.items()) if ok else "; ".join(problems[:2])
    assert record(10, "classifier coherence", ok, detail, time.perf_counter() - t0, 60)


def test_11_positivity():
    t0 = time.perf_counter()
    rng = random.Random(11)
    problems = []
    checked = sampled = 0
    for g in (2, 3):
        for X in family(g):
            cls = classify_curve(X)
            exc = [X.index[e] for e in cls.exceptional_vertices]
            for d in range(3 * (g - 1) + 1, 4 * (2 * g - 2) + 3):
                rows = enumerate_balanced_array(X, d)
                if not len(rows):
                    continue
                checked += len(rows)
                ample = positivity_values(X, rows, d)["ample"] == 1
                want = cls.g_quasistable & np.all(rows[:, exc] == 1, axis=1)
                if np.any(ample != want):
                    problems.append(f"ample flag differs from the criterion on {X.to_json()} d={d}")
                for i in _sample(len(rows), rng, 1):
                    sampled += 1
                    rep = positivity_report(X, Multidegree.on(X, rows[i].tolist()), d)
                    if rep.ample.value is not bool(want[i]):
                        problems.append(f"positivity_report ample={rep.ample.value} for {rows[i].tolist()}")
    powers = 0
    for g in (2, 3):
        for X in stable_graphs(g):
            powers += 1
            rep = canonical_power_report(X, 3)
            if not (rep.very_ample.value and rep.normally_generated.value):
                problems.append(f"third canonical power on {X.to_json()} not very ample and normally generated")
    ok = not problems
    detail = f"{checked} balanced pairs ({sampled} via the full report), {powers} stable curves" if ok else "; ".join(problems[:2])
    assert record(11, "ampleness criterion and canonical powers", ok, detail, time.perf_counter() - t0, 30)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    print(f"{11 - failed}/11 criteria passed")
    sys.exit(1 if failed else 0)
