import pytest

from polcurves.catalog import quasi_models
from polcurves.curve_model import CurveGraph
from polcurves.errors import GenusTooSmall, NotProperlyBalanced, WrongInputClass
from polcurves.git_classifier import (
    SheafData,
    classify_regime,
    git_classify,
    is_geometric_quotient,
    sheaf_lift,
    simpson_pushforward,
    simpson_semistable,
    stabilizer_dim,
)
from polcurves.multidegree import Multidegree
from polcurves.reductions import BlowupSite


def test_regimes():
    assert classify_regime(3, 17).regime == "theoremA"
    assert classify_regime(3, 9).regime == "theoremB"
    assert classify_regime(3, 15).regime == "open_band"
    assert classify_regime(3, 14).regime == "open_band"
    assert classify_regime(3, 8).regime == "out_of_range"
    assert classify_regime(2, 5).regime == "necessary_only"


def test_git_examples(curves):
    rep = git_classify(curves["square"], Multidegree({"a": 5, "b": 5, "E1": 1, "E2": 1}), 3, 12)
    assert (rep.semistable, rep.polystable, rep.stable) == (True, True, False)
    assert rep.stabilizer_dim == 2
    rep = git_classify(curves["tail"], Multidegree({"a": 3, "b": 6}), 3, 9)
    assert rep.semistable is False
    rep = git_classify(curves["cusp_model"], Multidegree({"v": 8, "E": 1}), 3, 9)
    assert rep.stable is True and rep.stabilizer_dim == 1


def test_open_band_is_undetermined(curves):
    rep = git_classify(curves["banana"], Multidegree({"a": 7, "b": 8}), 3, 15)
    assert (rep.semistable, rep.polystable, rep.stable) == (None, None, None)


def test_geometric_quotient():
    assert is_geometric_quotient(3, 9) and is_geometric_quotient(3, 11)
    assert not is_geometric_quotient(3, 12)
    with pytest.raises(GenusTooSmall):
        is_geometric_quotient(2, 7)


def test_stabilizer_dim(curves):
    assert stabilizer_dim(curves["square"]) == 2
    assert stabilizer_dim(curves["banana"]) == 1
    assert stabilizer_dim(curves["cusp_model"]) == 1


def test_pushforward_examples(curves):
    s = simpson_pushforward(curves["square"], Multidegree({"a": 5, "b": 5, "E1": 1, "E2": 1}))
    assert s.base == curves["banana"] and len(s.non_free_sites) == 2
    assert s.degrees == Multidegree({"a": 5, "b": 5}) and s.total == 12
    assert simpson_semistable(s, 12)
    s = simpson_pushforward(curves["cusp_model"], Multidegree({"v": 8, "E": 1}))
    assert s.base == curves["cuspidal"] and s.total == 9 and s.non_free_sites == (BlowupSite.cusp("v"),)
    s = simpson_pushforward(curves["banana"], Multidegree({"a": 4, "b": 5}))
    assert s.non_free_sites == () and s.degrees == Multidegree({"a": 4, "b": 5})


def test_pushforward_preconditions(curves):
    with pytest.raises(WrongInputClass):
        simpson_pushforward(curves["tail"], Multidegree({"a": 3, "b": 6}))
    with pytest.raises(NotProperlyBalanced):
        simpson_pushforward(curves["square"], Multidegree({"a": 6, "b": 6, "E1": 0, "E2": 0}))


def test_semistable_examples(curves):
    s = SheafData(curves["banana"], Multidegree({"a": 2, "b": 8}), ())
    assert not simpson_semistable(s, 10)
    s = SheafData(curves["smooth3"], Multidegree({"v": 9}), ())
    assert simpson_semistable(s, 9)


def test_lift_inverts_pushforward():
    for X in quasi_models(3, "quasi_p_stable")[:120]:
        from polcurves.multidegree import enumerate_balanced

        for dvec in enumerate_balanced(X, 10, "properly"):
            s = simpson_pushforward(X, dvec)
            Y, lifted = sheaf_lift(s)
            assert s.total == 10 and Y.genus == 3
            assert simpson_pushforward(Y, lifted) == s


def test_sheaf_degree_counts_internal_joins():
    X = CurveGraph.build({"a": 1, "b": 1}, [("a", "b"), ("a", "b")])
    s = SheafData(X, Multidegree({"a": 3, "b": 4}), (BlowupSite.node(X, 0),))
    assert s.degree_on(X.mask_of({"a"})) == 3 and s.total == 8
