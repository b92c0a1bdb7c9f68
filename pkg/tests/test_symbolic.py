"""Series and specialization primitives, checked against closed forms."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hilbloc.errors import ComputationError, PoleError
from hilbloc.symbolic import (
    DEFAULT_SEED,
    PRIME_POOL,
    ULaurent,
    USeries,
    Weight,
    ZERO_WEIGHT,
    bernoulli_numbers,
    dual_specialized,
    elementary_symmetric,
    exp_series,
    series_exp,
    signed_chern_coefficients,
    todd_log_coefficients,
    todd_series,
)

F = Fraction

# B_0 .. B_12 with the B_1 = -1/2 convention
KNOWN_BERNOULLI = [
    F(1), F(-1, 2), F(1, 6), F(0), F(-1, 30), F(0), F(1, 42), F(0),
    F(-1, 30), F(0), F(5, 66), F(0), F(-691, 2730),
]

weights = st.builds(Weight, st.integers(-9, 9), st.integers(-9, 9))


def test_bernoulli_known_values():
    assert bernoulli_numbers(12) == KNOWN_BERNOULLI


def test_todd_series_defining_identity():
    # todd(a) * (1 - exp(-a u)) == a*u as truncated series
    order = 12
    for a in (1, 2, -3, F(5, 2)):
        lhs = todd_series(a, order) * (USeries.one(order) - exp_series(-a, order))
        expected = [F(0)] * (order + 1)
        expected[1] = F(a)
        assert lhs == USeries(expected)


def test_todd_series_at_zero_is_one():
    assert todd_series(0, 6) == USeries.one(6)


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_exp_series_multiplicative(a, b):
    order = 8
    assert exp_series(a, order) * exp_series(b, order) == exp_series(a + b, order)


def test_series_exp_matches_exp_series():
    order = 9
    for c in (1, -2, F(3, 4)):
        coeffs = [F(0)] * (order + 1)
        coeffs[1] = F(c)
        assert series_exp(coeffs) == list(exp_series(c, order).coeffs)


def test_todd_log_coefficients_exponentiate_to_todd():
    order = 10
    logs = todd_log_coefficients(order)
    for a in (1, 2, -3):
        coeffs = [logs[n] * a**n for n in range(order + 1)]
        assert series_exp(coeffs) == list(todd_series(a, order).coeffs)


def test_ulaurent_pole_bookkeeping():
    s = USeries([F(3), F(0), F(5), F(7)])
    lau = ULaurent.from_series(s, 2)
    assert lau.negative_part() == {-2: F(3)}
    assert lau.u0() == F(5)
    cancel = lau + ULaurent(-2, [F(-3)])
    assert cancel.negative_part() == {}


def test_elementary_symmetric_fixture():
    vals = [2, 3, 5]
    assert elementary_symmetric(vals, 0) == 1
    assert elementary_symmetric(vals, 1) == 10
    assert elementary_symmetric(vals, 2) == 31
    assert elementary_symmetric(vals, 3) == 30
    assert elementary_symmetric(vals, 4) == 0


@given(st.lists(st.integers(-7, 7), min_size=0, max_size=5))
def test_signed_chern_reduces_to_elementary_when_honest(plus):
    out = signed_chern_coefficients(plus, [], len(plus) + 2)
    for j, c in enumerate(out):
        assert c == elementary_symmetric(plus, j)


@given(
    st.lists(st.integers(-5, 5), min_size=0, max_size=4),
    st.lists(st.integers(-5, 5), min_size=0, max_size=3),
)
def test_signed_chern_whitney_product(plus, minus):
    # c(plus - minus) * c(minus) == c(plus), coefficient by coefficient
    maxdeg = len(plus) + len(minus) + 1
    signed = signed_chern_coefficients(plus, minus, maxdeg)
    for n in range(maxdeg + 1):
        conv = sum(
            signed[i] * elementary_symmetric(minus, n - i) for i in range(n + 1)
        )
        assert conv == elementary_symmetric(plus, n)


@given(weights, weights)
def test_weight_algebra(w1, w2):
    assert (w1 + w2) - w2 == w1
    assert -(-w1) == w1
    assert 3 * w1 == w1 + w1 + w1
    assert (w1 - w1).is_zero()


@given(weights, weights, st.integers(1, 50), st.integers(1, 50))
def test_specialization_is_linear(w1, w2, z1, z2):
    assert (w1 + w2).spec_int(z1, z2) == w1.spec_int(z1, z2) + w2.spec_int(z1, z2)


@given(weights)
def test_weight_json_roundtrip(w):
    assert Weight.from_json(w.to_json()) == w


def test_weight_str_forms():
    assert str(Weight(1, -2)) == "t1-2*t2"
    assert str(ZERO_WEIGHT) == "0"
    assert str(Weight(0, 1)) == "t2"
    assert str(Weight(-1, 1)) == "-t1+t2"


def test_prime_pool_is_prime_and_bounded():
    assert PRIME_POOL[0] >= 53 and PRIME_POOL[-1] <= 499
    for p in PRIME_POOL:
        assert all(p % q for q in range(2, int(p**0.5) + 1)), p
    assert len(set(PRIME_POOL)) == len(PRIME_POOL)


def test_dual_specialized_agreement_and_retry():
    calls = []

    def flaky(z):
        calls.append(z)
        if len(calls) == 1:
            raise PoleError("synthetic pole")
        return F(7)

    assert dual_specialized(flaky, DEFAULT_SEED) == F(7)
    assert len(calls) >= 3  # one failed draw plus two successful ones

    def disagreeing(z):
        return F(sum(z))

    with pytest.raises(ComputationError):
        dual_specialized(disagreeing, DEFAULT_SEED)


def test_dual_specialized_exhausts_retries():
    def always_pole(z):
        raise PoleError("synthetic pole")

    with pytest.raises(PoleError):
        dual_specialized(always_pole, DEFAULT_SEED)
