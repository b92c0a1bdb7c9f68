"""Hilbert-scheme integrals: quotient counts and determinant chi."""

import random
from fractions import Fraction

import pytest

from hilbloc.errors import ComputationError, UsageError
from hilbloc.integrals import (
    ChernExpr,
    IntegralRequest,
    c2_for_expected_dim_zero,
    chi_theta,
    expected_dim_pairs,
    integrate,
    quot_count,
    validate_construction,
    verify_conjecture,
)
from hilbloc.symbolic import Weight
from hilbloc.toric import (
    ChernData,
    SplitBundle,
    line_bundle,
    make_surface,
    split_bundle,
)

from oracles import c2_by_surface_localization

P2 = make_surface("P2")
QUADRIC = make_surface("P1xP1")
F1 = make_surface("Hirzebruch", 1)


# ---------------------------------------------------------------------------
# request validation and the generic integral


def test_request_rejects_inhomogeneous_expressions():
    v = split_bundle(P2, [1, 2])
    with pytest.raises(UsageError):
        IntegralRequest(P2, 1, {"A": v}, ChernExpr.chern(1, "A"))


def test_request_rejects_undeclared_ids():
    v = split_bundle(P2, [1, 2])
    with pytest.raises(UsageError):
        IntegralRequest(P2, 1, {"A": v}, ChernExpr.chern(2, "B"))


def test_integrate_on_a_point():
    req = IntegralRequest(P2, 0, {}, ChernExpr.constant(Fraction(5, 3)))
    assert integrate(req) == Fraction(5, 3)


def test_integrate_composite_expression():
    # c1(A)^2 - c2(A) with A = O(1) + O(2): weights give an exact integer
    v = split_bundle(P2, [1, 2])
    expr = (
        ChernExpr.chern(1, "A") * ChernExpr.chern(1, "A")
        + ChernExpr.chern(2, "A", -1)
    )
    req = IntegralRequest(P2, 1, {"A": v}, expr)
    direct = integrate(req)
    c1sq = ChernExpr.chern(1, "A") * ChernExpr.chern(1, "A")
    parts = (
        integrate(IntegralRequest(P2, 1, {"A": v}, c1sq)),
        integrate(IntegralRequest(P2, 1, {"A": v}, ChernExpr.chern(2, "A"))),
    )
    assert direct == parts[0] - parts[1]


# ---------------------------------------------------------------------------
# quotient counts


def test_quot_count_module_example():
    v = split_bundle(P2, [-2, -3])  # V* = O(2) + O(3)
    assert quot_count(P2, v, 1) == 6


def test_quot_count_k1_is_surface_c2():
    rng = random.Random(20260815)
    surfaces = (P2, QUADRIC, F1)
    for _ in range(10):
        surface = surfaces[rng.randrange(3)]
        rank = rng.choice((2, 3))
        degs = [
            tuple(rng.randint(-2, 3) for _ in range(surface.divisor_rank))
            for _ in range(rank)
        ]
        vstar = split_bundle(surface, degs)
        expected = c2_by_surface_localization(surface, vstar)
        assert expected == vstar.chern_data().c2
        assert quot_count(surface, vstar.dual(), 1) == expected


def test_quot_count_rank_one_vanishes():
    v = split_bundle(P2, [-2])
    for k in range(1, 6):
        assert quot_count(P2, v, k) == 0


def test_quot_count_trivial_cases():
    assert quot_count(P2, split_bundle(P2, [-1, -1]), 0) == 1
    with pytest.raises(UsageError):
        quot_count(P2, SplitBundle(P2), 1)


def test_quot_count_seed_invariance():
    v = split_bundle(P2, [-2, -3])
    values = {quot_count(P2, v, 2, seed=s) for s in range(1, 6)}
    assert len(values) == 1


def test_quot_count_shift_invariance():
    v = split_bundle(P2, [-2, -3])
    shifted = v.shifted(Weight(4, -7))
    for k in (1, 2):
        assert quot_count(P2, v, k) == quot_count(P2, shifted, k)


def test_quot_count_parallel_matches_serial():
    v = split_bundle(P2, [-2, -3])
    assert quot_count(P2, v, 4, threads=2) == quot_count(P2, v, 4)


def test_quot_count_uses_cache(tmp_path):
    from hilbloc.cache import ResultCache

    cache = ResultCache(tmp_path / "c.jsonl")
    v = split_bundle(P2, [-2, -3])
    first = quot_count(P2, v, 2, cache=cache)
    assert (tmp_path / "c.jsonl").exists()
    assert quot_count(P2, v, 2, cache=cache) == first


# ---------------------------------------------------------------------------
# determinant line bundle chi


def test_chi_theta_structure_sheaf():
    for surface in (P2, QUADRIC):
        for k in range(6):
            assert chi_theta(surface, SplitBundle(surface), k) == 1


def test_chi_theta_warns_when_not_orthogonal():
    with pytest.warns(UserWarning):
        chi_theta(P2, line_bundle(P2, (1,)), 1)


def test_chi_theta_order_control():
    k = 2
    with pytest.raises(UsageError):
        chi_theta(P2, SplitBundle(P2), k, order=2 * k - 1)
    base = chi_theta(P2, SplitBundle(P2), k, order=2 * k)
    assert base == chi_theta(P2, SplitBundle(P2), k, order=2 * k + 4) == 1


def test_chi_theta_shift_invariance():
    e = split_bundle(P2, [4, 5])
    shifted = e.shifted(Weight(-3, 2))
    with pytest.warns(UserWarning):
        base = chi_theta(P2, e, 2)
    assert chi_theta(P2, shifted, 2) == base


# ---------------------------------------------------------------------------
# the expected-dimension-zero family


def test_expected_dim_pairs():
    vstar = split_bundle(P2, [2, 3])
    assert expected_dim_pairs(P2, vstar.dual(), 1) == 15
    v3 = ChernData(3, (-4,), c2_for_expected_dim_zero(3, 4, 2))
    assert expected_dim_pairs(P2, v3, 2) == 0


def test_c2_for_expected_dim_zero_values():
    assert c2_for_expected_dim_zero(3, 7, 1) == 36
    assert c2_for_expected_dim_zero(3, 7, 2) == 35
    assert c2_for_expected_dim_zero(2, 5, 9) == 21
    with pytest.raises(UsageError):
        c2_for_expected_dim_zero(1, 3, 1)
    with pytest.raises(UsageError):
        c2_for_expected_dim_zero(3, 3, 0)


def test_validate_construction_fixtures():
    assert validate_construction(2, 1, 1).ok
    rep = validate_construction(2, 3, 5)
    assert not rep.ok
    assert any("lower" in v for v in rep.violations)
    assert validate_construction(2, 3, 7).ok
    assert not validate_construction(1, 1, 1).ok
    assert not validate_construction(2, 0, 0).ok
    upper = validate_construction(2, 2, 5)
    assert not upper.ok and any("upper" in v for v in upper.violations)


def test_verify_conjecture_small():
    rows = verify_conjecture(P2, 3, 5, 2)
    assert [(r.quot, r.chi, r.equal) for r in rows] == [
        (21, 21, True),
        (165, 165, True),
    ]
    data = rows[0].to_json()
    assert data["quot_count"] == "21" and data["equal"] is True


def test_verify_conjecture_input_validation():
    with pytest.raises(UsageError):
        verify_conjecture(QUADRIC, 3, 5, 1)
    with pytest.raises(UsageError):
        verify_conjecture(P2, 2, 5, 1)
    with pytest.raises(UsageError):
        verify_conjecture(P2, 3, 0, 1)
