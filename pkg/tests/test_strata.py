import pytest

from polcurves.curve_model import CurveGraph
from polcurves.errors import NotComparable, NotProperlyBalanced
from polcurves.multidegree import Multidegree, classify_multidegree
from polcurves.strata import StratumPair, lift_multidegree, preceq, specialize_strictly, strata_poset


def pair(X, **kw):
    return StratumPair(X, Multidegree(kw))


def test_preceq_examples(curves):
    up = pair(curves["banana"], a=5, b=4)
    lo = pair(curves["banana_one_blown"], a=4, b=4, E=1)
    assert preceq(lo, up)
    assert preceq(up, up)
    assert not preceq(up, lo)
    with pytest.raises(NotComparable):
        preceq(pair(curves["square"], a=5, b=5, E1=1, E2=1), up)


def test_lift_examples(curves):
    got = lift_multidegree(curves["banana_one_blown"], Multidegree({"a": 4, "b": 4, "E": 1}), curves["banana"])
    assert got == Multidegree({"a": 5, "b": 4})
    got = lift_multidegree(curves["cusp_model"], Multidegree({"v": 8, "E": 1}), curves["cuspidal"])
    assert got == Multidegree({"v": 9})
    same = Multidegree({"a": 4, "b": 5})
    assert lift_multidegree(curves["banana"], same, curves["banana"]) == same


def test_specialize_examples(curves):
    p = pair(curves["banana"], a=6, b=6)
    out, steps = specialize_strictly(p)
    assert out == p and steps == []
    p = pair(curves["banana"], a=5, b=7)
    out, steps = specialize_strictly(p)
    assert len(steps) == 1 and steps[0].subcurve == frozenset({"b"})
    assert classify_multidegree(out.curve, out.multidegree).strictly_balanced
    assert out.curve.n == 4 and preceq(out, p)


def test_specialize_requires_properly_balanced(curves):
    with pytest.raises(NotProperlyBalanced):
        specialize_strictly(pair(curves["banana"], a=2, b=10))


def test_poset_examples(curves):
    P = strata_poset(curves["banana"], 9, "quasi_stable")
    tops = {str(P.nodes[i].multidegree) for i in P.maximal()}
    assert tops == {"(4,5)", "(5,4)"}
    assert all(P.nodes[i].curve == curves["banana"] for i in P.maximal())
    assert len(strata_poset(curves["smooth3"], 9, "quasi_stable").nodes) == 1
    P = strata_poset(curves["cuspidal"], 9, "quasi_p_stable")
    assert len(P.nodes) == 2 and len(P.covers) == 1
    hi, lo = P.covers[0]
    assert str(P.nodes[hi].multidegree) == "(9)" and str(P.nodes[lo].multidegree) == "(1,8)"


def test_poset_is_transitive_and_dot(curves):
    P = strata_poset(curves["banana"], 12, "quasi_stable")
    for a, b in P.order:
        for c, e in P.order:
            if b == c:
                assert (a, e) in P.order
    dot = P.to_dot()
    assert dot.startswith("digraph strata {") and dot.count("->") == len(P.covers)
