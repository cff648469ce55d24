import math

import pytest

import conjgrowth as cg

F2 = cg.GroupModel.free(2)
Z23 = cg.GroupModel.free_product([2, 3])


def test_model_surface():
    assert F2.spec == "free:2"
    assert Z23.spec == "product:2,3"
    assert F2.letters == ["a", "a'", "b", "b'"]
    assert Z23.letters == ["s", "t", "t^2"]
    assert not F2.elementary
    assert cg.GroupModel.free(1).elementary
    assert cg.GroupModel.from_spec("product:2,3").spec == Z23.spec


def test_element_arithmetic():
    assert cg.reduce(F2, "a b b' a") == "a a"
    assert cg.multiply(F2, "a b", "b' a'") == "e"
    assert cg.invert(F2, "a b") == "b' a'"
    assert cg.power(F2, "a b", 3) == "a b a b a b"
    assert cg.conjugate(F2, "a", "b") == "a b a'"
    assert cg.distance(F2, "a", "b") == 2
    assert cg.length(Z23, "s t^2 s") == 3
    assert cg.is_torsion(Z23, "s")
    assert not cg.is_torsion(F2, "a")
    assert cg.stable_length(F2, "a b a'") == 1


def test_conjugacy_class_record():
    rec = cg.conjugacy_class(F2, "a b a'")
    assert rec["canonical"] == "b"
    assert rec["tau"] == 1
    assert rec["pointed_length"] == 1
    assert rec["primitive"]
    assert rec["exponent"] == 1


def test_ball_census_counts_and_fit():
    census = cg.ball_census(F2, 8)
    assert census["sphere"] == [1, 4, 12, 36, 108, 324, 972, 2916, 8748]
    assert census["ball"][6] == 1457
    assert census["fit"]["delta_hat"] == pytest.approx(math.log(3.0), abs=0.01)
    assert cg.ball_census(F2, 8) == census


def test_conjugacy_census_counts():
    census = cg.conjugacy_census(F2, 8)
    assert census["classes_at_length"] == [1, 4, 8, 12, 26, 52, 132, 316, 836]
    assert census["pointed"][-1] == sum(census["classes_at_length"])
    assert cg.conjugacy_census(F2, 8, shards=4) == census


def test_class_annulus_multiplicity():
    result = cg.class_annulus_multiplicity(F2, 2, 0, ["a b"])
    assert result["member_counts"] == [2]
    assert result["max_over_n"] == 1.0


def test_contraction_audit():
    audit = cg.contraction_audit(F2, "a b")
    assert audit["c_emp"] == 2
    assert audit["samples"] > 0


def test_barrier_censuses():
    census = cg.barrier_census(F2, "a b", 0, 0, 6)
    assert census["totals"] == [1, 4, 12, 36, 108, 324, 972]
    assert census["barrier_free"][2] == 11
    fractional = cg.fractional_barrier_census(F2, "a b", 0, 0, 1.0, 1, 6)
    assert fractional["satisfied"] == census["barrier_free"]
    drift = cg.linear_drift_census(F2, "a b", 2, 0.5, 0.25, 0, 5)
    assert drift["totals"] == [1, 4, 12, 36, 108, 324]
    assert all(c <= t for c, t in zip(drift["conjunction"], drift["totals"]))


def test_admissible_check():
    report = cg.admissible_check(F2, "a", "a b", 3, "b'")
    assert report["pass"]
    assert report["length_defect"] == 0
    assert list(report["conditions"]) == [True, True, True]
    assert all(passed is False for passed in report["mutations_pass"])


def test_projection_complex():
    complex_ = cg.build_complex(F2, "a b", 3, 3)
    assert complex_["vertex_count"] == 36
    assert complex_["edge_count"] == 230
    probe = cg.loxodromic_test(F2, "a", 1, 4, "b a", 2, 1)
    assert probe["separations"] == [0, 2, 4]
    assert probe["verdict"]
    kernel = cg.kernel_bound(F2, ["a", "b", "a b"], 8)
    assert kernel["max_kernel"] == 1
    assert kernel["samples"] == 3


def test_series_and_rationality():
    spheres = cg.series(F2, "sphere", 10)
    assert spheres == [1, 4, 12, 36, 108, 324, 972, 2916, 8748, 26244, 78732]
    found = cg.rationality_probe(spheres, 2)
    assert found["order"] == 2
    assert found["coefficients"] == ["3", "0"]
    assert found["holds"]
    pointed = cg.series(F2, "conjugacy-pointed", 19)
    none = cg.rationality_probe(pointed, 6)
    assert none["order"] is None
    assert none["verdict"] == "no linear recurrence of order ≤ 6 on 20 terms"


def test_budget_error():
    with pytest.raises(cg.BudgetError):
        cg.ball_census(F2, 12, budget=100)
