import pytest

from polcurves.curve_model import CurveGraph
from polcurves.errors import NotBalanced, Unsupported
from polcurves.multidegree import Multidegree
from polcurves.positivity import FLAGS, canonical_power_report, positivity_report


def test_stable_high_degree(curves):
    rep = positivity_report(curves["banana"], Multidegree({"a": 6, "b": 6}), 12)
    assert rep.ample.value and rep.very_ample.value and rep.normally_generated.value


def test_square_is_ample(curves):
    rep = positivity_report(curves["square"], Multidegree({"a": 5, "b": 5, "E1": 1, "E2": 1}), 12)
    assert rep.ample.value is True and rep.nef.value is True


def test_zero_on_exceptional_not_ample(curves):
    rep = positivity_report(curves["square"], Multidegree({"a": 6, "b": 6, "E1": 0, "E2": 0}), 12)
    assert rep.ample.value is False and rep.very_ample.value is False
    assert rep.nef.value is True


def test_preconditions(curves):
    with pytest.raises(NotBalanced):
        positivity_report(curves["banana"], Multidegree({"a": 1, "b": 8}))
    with pytest.raises(Unsupported):
        canonical_power_report(curves["banana"], 1)


def test_canonical_powers(curves):
    rep = canonical_power_report(curves["banana"], 3)
    assert rep.very_ample.value and rep.normally_generated.value
    rep = canonical_power_report(curves["square"], 2)
    assert rep.nonspecial.value and rep.globally_generated.value
    assert rep.very_ample.value is not True
    assert rep.ample.value is False


def test_document_keys(curves):
    doc = positivity_report(curves["banana"], Multidegree({"a": 4, "b": 5})).to_document()
    assert set(doc) == set(FLAGS) | {"k_very_ample_up_to"}


def test_k_very_ample_only_on_g_stable(curves):
    rep = positivity_report(curves["square"], Multidegree({"a": 5, "b": 5, "E1": 1, "E2": 1}))
    assert rep.k_very_ample_up_to is None
    X = CurveGraph.build({"v": 3})
    rep = positivity_report(X, Multidegree({"v": 30}))
    assert rep.k_very_ample_up_to == 6
