"""Surface models, bundles and surface-level Riemann-Roch."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hilbloc.errors import RealizationError, UsageError
from hilbloc.symbolic import Weight, ZERO_WEIGHT
from hilbloc.toric import (
    ChernData,
    SplitBundle,
    bundle_from_json,
    bundle_to_json,
    chi_from_chern,
    chi_pair,
    chi_surface,
    e_from_v,
    line_bundle,
    make_surface,
    realize_split_model,
    split_bundle,
    surface_from_json,
    surface_to_json,
    validate_compatibility,
)

P2 = make_surface("P2")
QUADRIC = make_surface("P1xP1")
F1 = make_surface("Hirzebruch", 1)
F3 = make_surface("Hirzebruch", 3)
ALL_SURFACES = (P2, QUADRIC, F1, F3)


# ---------------------------------------------------------------------------
# fixed-point data of the models, checked by independent localization oracles


def _k_squared_oracle(surface, z=(7, 3)):
    # K = -(v1 + v2) at each fixed point, so K^2 localizes to
    # sum over points of (v1 + v2)^2 / (v1 v2).
    total = Fraction(0)
    for v1, v2 in surface.points:
        a, b = v1.spec_int(*z), v2.spec_int(*z)
        total += Fraction((a + b) ** 2, a * b)
    assert total.denominator == 1
    return int(total)


@pytest.mark.parametrize("surface", ALL_SURFACES, ids=lambda s: s.name)
def test_canonical_self_intersection_matches_localization(surface):
    assert _k_squared_oracle(surface) == surface.k_squared
    assert _k_squared_oracle(surface, (11, 5)) == surface.k_squared


@pytest.mark.parametrize("surface", ALL_SURFACES, ids=lambda s: s.name)
def test_euler_number_is_fixed_point_count(surface):
    assert surface.chi_top == len(surface.points)


@pytest.mark.parametrize("surface", ALL_SURFACES, ids=lambda s: s.name)
def test_noether_relation(surface):
    # rational surfaces: chi(O) = (K^2 + chi_top)/12 = 1
    assert surface.k_squared + surface.chi_top == 12


def test_canonical_degrees():
    assert P2.canonical_degrees == (-3,)
    assert QUADRIC.canonical_degrees == (-2, -2)
    assert F1.canonical_degrees == (-1, -2)
    assert F3.canonical_degrees == (1, -2)


def test_intersection_pairing():
    assert P2.intersect((2,), (3,)) == 6
    assert QUADRIC.intersect((1, 0), (0, 1)) == 1
    assert QUADRIC.intersect((1, 0), (1, 0)) == 0
    assert QUADRIC.intersect((2, 3), (4, 5)) == 2 * 5 + 4 * 3
    # fiber f and section s on Hirzebruch(n): f^2 = 0, s.f = 1, s^2 = n
    assert F3.intersect((1, 0), (1, 0)) == 0
    assert F3.intersect((1, 0), (0, 1)) == 1
    assert F3.intersect((0, 1), (0, 1)) == 3


def test_make_surface_validation():
    with pytest.raises(UsageError):
        make_surface("P3")
    with pytest.raises(UsageError):
        make_surface("Hirzebruch")  # missing parameter
    with pytest.raises(UsageError):
        make_surface("Hirzebruch", -1)
    assert make_surface("P2") is make_surface("P2")  # cached


# ---------------------------------------------------------------------------
# line bundle weights and edge compatibility


def test_line_weight_fixtures():
    o_d = line_bundle(P2, (2,))
    assert [str(w) for w in o_d.weights] == ["0", "2*t1", "2*t2"]
    o_ab = line_bundle(QUADRIC, (1, 2))
    assert [str(w) for w in o_ab.weights] == ["0", "2*t2", "t1", "t1+2*t2"]


def test_edge_compatibility_accepts_model_weights():
    for surface in ALL_SURFACES:
        degrees = (2,) if surface.divisor_rank == 1 else (2, 1)
        line = line_bundle(surface, degrees)
        assert validate_compatibility(surface, line.weights) == []


def test_edge_compatibility_flags_bad_weights():
    bad = (ZERO_WEIGHT, Weight(1, 0), ZERO_WEIGHT)
    problems = validate_compatibility(P2, bad)
    assert problems
    assert any("(1,2)" in msg for msg in problems)


def test_line_bundle_shift_changes_weights_not_chi():
    line = line_bundle(P2, (2,))
    shifted = line.shifted(Weight(5, -4))
    assert shifted.degrees is None
    assert chi_surface(P2, shifted) == chi_surface(P2, line) == 6


# ---------------------------------------------------------------------------
# surface Riemann-Roch against closed forms


def test_chi_p2_closed_form():
    for d in range(-5, 11):
        assert chi_surface(P2, line_bundle(P2, (d,))) == (d + 1) * (d + 2) // 2


def test_chi_quadric_closed_form():
    for a in range(-3, 4):
        for b in range(-3, 4):
            expected = (a + 1) * (b + 1)
            assert chi_surface(QUADRIC, line_bundle(QUADRIC, (a, b))) == expected


@pytest.mark.parametrize("surface", ALL_SURFACES, ids=lambda s: s.name)
def test_chi_matches_riemann_roch_formula(surface):
    span = range(-2, 3)
    degree_menu = (
        [(d,) for d in span]
        if surface.divisor_rank == 1
        else [(a, b) for a in span for b in span]
    )
    for degs in degree_menu:
        line = line_bundle(surface, degs)
        assert chi_surface(surface, line) == chi_from_chern(
            surface, SplitBundle(surface, (line,)).chern_data()
        )


def test_chi_split_additivity_with_minus_lines():
    v = split_bundle(P2, [1, 3], [2])
    assert chi_surface(P2, v) == 3 + 10 - 6
    w = split_bundle(QUADRIC, [(1, 1)], [(0, 1), (1, 0)])
    assert chi_surface(QUADRIC, w) == 4 - 2 - 2


def test_whitney_chern_data():
    v = split_bundle(P2, [1, 3], [2])
    assert v.chern_data() == ChernData(1, (2,), -1)
    assert v.dual().chern_data() == ChernData(1, (-2,), -1)
    honest = split_bundle(P2, [2, 3])
    assert honest.chern_data() == ChernData(2, (5,), 6)


def test_chern_data_requires_degrees():
    shifted = split_bundle(P2, [2]).shifted(Weight(1, 1))
    with pytest.raises(UsageError):
        shifted.chern_data()


def test_chi_pair_and_e_from_v():
    v = ChernData(3, (-5,), 21)
    e = e_from_v(v, 1)
    assert e == ChernData(2, (5,), 20)
    assert chi_pair(P2, e, 1) == 0
    with pytest.raises(UsageError):
        e_from_v(ChernData(1, (2,), 0), 1)


@given(st.integers(3, 5), st.integers(1, 7), st.integers(1, 6))
def test_orthogonality_on_the_expected_dim_zero_family(r, d, k):
    from math import comb

    c2s = comb(d + 2, 2) - (k - 1) * (r - 2)
    v = ChernData(r, (-d,), c2s)
    assert chi_pair(P2, e_from_v(v, k), k) == 0


# ---------------------------------------------------------------------------
# split realization


def test_realize_fixtures():
    m = realize_split_model(P2, ChernData(2, (5,), 6))
    assert sorted(l.degrees for l in m.plus) == [(2,), (3,)]
    assert not m.minus
    m2 = realize_split_model(P2, ChernData(2, (5,), 4))
    assert sorted(l.degrees for l in m2.plus) == [(1,), (4,)]


def test_realize_needs_minus_lines_sometimes():
    # rank 2, c1 = 3, c2 = 1 has no honest splitting into integers
    m = realize_split_model(P2, ChernData(2, (3,), 1))
    assert m.minus
    assert m.chern_data() == ChernData(2, (3,), 1)


def test_realize_is_deterministic_and_exact():
    targets = [
        (P2, ChernData(3, (7,), 36)),
        (P2, ChernData(2, (0,), 1)),
        (QUADRIC, ChernData(2, (0, 0), 1)),
        (F1, ChernData(2, (1, 1), 0)),
    ]
    for surface, target in targets:
        a = realize_split_model(surface, target)
        b = realize_split_model(surface, target)
        assert a == b
        assert a.chern_data() == target


def test_realize_failure_reports():
    with pytest.raises(RealizationError):
        realize_split_model(P2, ChernData(1, (0,), 50), box=2, max_minus=1)
    with pytest.raises(UsageError):
        realize_split_model(P2, ChernData(0, (0,), 0))


# ---------------------------------------------------------------------------
# serialization


@pytest.mark.parametrize("surface", ALL_SURFACES, ids=lambda s: s.name)
def test_surface_json_roundtrip(surface):
    data = surface_to_json(surface)
    back = surface_from_json(data)
    assert back is surface  # models are canonical singletons


def test_bundle_json_roundtrip():
    v = split_bundle(QUADRIC, [(1, 2), (0, 1)], [(1, 0)])
    back = bundle_from_json(bundle_to_json(v))
    assert back == v
    shifted = v.shifted(Weight(2, -1))
    back2 = bundle_from_json(bundle_to_json(shifted))
    assert back2 == shifted
    assert back2.plus[0].degrees is None


def test_bundle_json_rejects_incompatible_weights():
    data = bundle_to_json(split_bundle(P2, [2]))
    data["plus"][0]["weights"][1] = [1, 1]  # breaks an edge relation
    with pytest.raises(UsageError):
        bundle_from_json(data)
