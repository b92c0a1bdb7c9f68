"""Exact weight and series arithmetic for torus localization.

Conventions used throughout the engine:

* The two-dimensional torus has character lattice with basis (t1, t2); a
  ``Weight`` is the integer linear form a*t1 + b*t2.
* Mixed-degree bookkeeping happens in a single grading variable u.  A weight
  w enters series formulas as the rational multiple ``specialize(w, z) * u``.
* All coefficients are ``fractions.Fraction``; no floats appear anywhere in
  the numeric core.  ``Rational`` is an alias for ``Fraction``: the stdlib
  type already guarantees lowest terms and a positive denominator.
* Bernoulli numbers follow the convention B1 = -1/2, so the Todd series of a
  weight a is 1 + (a/2)u + (a^2/12)u^2 + 0*u^3 - (a^4/720)u^4 + ...
* Specialization points are pairs of distinct primes drawn from a fixed pool
  by a seeded RNG.  The pool starts at 53 so that every tangent weight met in
  practice (integer coefficients well below 53) specializes to a nonzero
  integer; the retry path exists for exotic user input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Sequence

from .errors import ComputationError, PoleError

__all__ = [
    "Rational",
    "Weight",
    "USeries",
    "ULaurent",
    "bernoulli_numbers",
    "exp_series",
    "todd_series",
    "todd_log_coefficients",
    "series_exp",
    "elementary_symmetric",
    "signed_chern_coefficients",
    "specialize",
    "PRIME_POOL",
    "DEFAULT_SEED",
    "SpecializationDraw",
    "dual_specialized",
]

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class Weight:
    """Integer character a*t1 + b*t2 of the two-torus."""

    a: int
    b: int

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Weight":
        return Weight(-self.a, -self.b)

    def __rmul__(self, n: int) -> "Weight":
        return Weight(n * self.a, n * self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def spec_int(self, z1: int, z2: int) -> int:
        """Fast integer specialization used in inner loops."""
        return self.a * z1 + self.b * z2

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for coeff, name in ((self.a, "t1"), (self.b, "t2")):
            if coeff == 0:
                continue
            sign = "-" if coeff < 0 else ("+" if parts else "")
            mag = abs(coeff)
            parts.append(f"{sign}{'' if mag == 1 else str(mag) + '*'}{name}")
        return "".join(parts)

    def to_json(self) -> list[int]:
        return [self.a, self.b]

    @staticmethod
    def from_json(data: Sequence[int]) -> "Weight":
        return Weight(int(data[0]), int(data[1]))


ZERO_WEIGHT = Weight(0, 0)


def specialize(w: Weight, z: tuple[Rational, Rational]) -> Rational:
    """Evaluate the character at a numeric point (z1, z2)."""
    return w.a * Fraction(z[0]) + w.b * Fraction(z[1])


# ---------------------------------------------------------------------------
# Bernoulli numbers and the two generating series


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n with B1 = -1/2, via sum_{j<=m} C(m+1,j) B_j = 0."""
    out = [_ONE]
    for m in range(1, n + 1):
        acc = _ZERO
        for j in range(m):
            acc += comb(m + 1, j) * out[j]
        out.append(-acc / (m + 1))
    return out


class USeries:
    """Truncated power series in u: coefficients for u^0..u^order, exact."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Fraction]):
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def one(order: int) -> "USeries":
        return USeries([_ONE] + [_ZERO] * order)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, USeries) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "USeries") -> "USeries":
        if self.order != other.order:
            raise ComputationError("series addition needs equal truncation orders")
        return USeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "USeries") -> "USeries":
        if self.order != other.order:
            raise ComputationError("series subtraction needs equal truncation orders")
        return USeries([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other: "USeries") -> "USeries":
        order = min(self.order, other.order)
        out = [_ZERO] * (order + 1)
        for i, ai in enumerate(self.coeffs[: order + 1]):
            if ai == 0:
                continue
            for j in range(0, order - i + 1):
                bj = other.coeffs[j]
                if bj != 0:
                    out[i + j] += ai * bj
        return USeries(out)

    def scale(self, c: Rational) -> "USeries":
        c = Fraction(c)
        return USeries([c * a for a in self.coeffs])

    def __repr__(self) -> str:
        return f"USeries({list(self.coeffs)!r})"


def exp_series(a: Rational, order: int) -> USeries:
    """exp(a*u) truncated: the equivariant Chern character of a weight-a line."""
    a = Fraction(a)
    coeffs = [_ONE]
    for n in range(1, order + 1):
        coeffs.append(coeffs[-1] * a / n)
    return USeries(coeffs)


def todd_series(a: Rational, order: int) -> USeries:
    """(a*u) / (1 - exp(-a*u)) truncated; coefficient of u^n is (-1)^n B_n a^n / n!."""
    a = Fraction(a)
    bern = bernoulli_numbers(order)
    coeffs = []
    fact = 1
    power = _ONE
    for n in range(order + 1):
        if n > 0:
            fact *= n
            power *= a
        coeffs.append((-1) ** n * bern[n] * power / fact)
    return USeries(coeffs)


def todd_log_coefficients(order: int) -> tuple[Fraction, ...]:
    """Coefficients L_n of log todd(u), so log todd(a*u) = sum L_n a^n u^n.

    Lets a product of many Todd factors be assembled from power sums of the
    weights (one series exponential per fixed point) instead of repeated
    series multiplication.
    """
    td = todd_series(1, order).coeffs
    # series log: L' = td' / td, integrated termwise
    log = [_ZERO] * (order + 1)
    for n in range(1, order + 1):
        acc = n * td[n]
        for j in range(1, n):
            acc -= j * log[j] * td[n - j]
        log[n] = acc / n
    return tuple(log)


def series_exp(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """exp of a truncated series with zero constant term (plain list form)."""
    if coeffs[0] != 0:
        raise ComputationError("series_exp expects zero constant term")
    order = len(coeffs) - 1
    out = [_ONE] + [_ZERO] * order
    for n in range(1, order + 1):
        acc = _ZERO
        for j in range(1, n + 1):
            if coeffs[j] != 0:
                acc += j * coeffs[j] * out[n - j]
        out[n] = acc / n
    return out


class ULaurent:
    """Finite Laurent tail in u: coefficients for u^low .. u^(low+len-1)."""

    __slots__ = ("low", "coeffs")

    def __init__(self, low: int, coeffs: Sequence[Fraction]):
        self.low = low
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @staticmethod
    def from_series(s: USeries, pole_order: int = 0) -> "ULaurent":
        """View a truncated series divided by u^pole_order as a Laurent tail."""
        return ULaurent(-pole_order, s.coeffs)

    def coefficient(self, n: int) -> Fraction:
        i = n - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _ZERO

    def __add__(self, other: "ULaurent") -> "ULaurent":
        low = min(self.low, other.low)
        high = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        out = [_ZERO] * (high - low)
        for src in (self, other):
            off = src.low - low
            for i, c in enumerate(src.coeffs):
                out[off + i] += c
        return ULaurent(low, out)

    def scale(self, c: Rational) -> "ULaurent":
        c = Fraction(c)
        return ULaurent(self.low, [c * a for a in self.coeffs])

    def negative_part(self) -> dict[int, Fraction]:
        """Nonzero coefficients at strictly negative exponents."""
        return {
            self.low + i: c
            for i, c in enumerate(self.coeffs)
            if self.low + i < 0 and c != 0
        }

    def u0(self) -> Fraction:
        return self.coefficient(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ULaurent):
            return NotImplemented
        lo = min(self.low, other.low)
        hi = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        return all(self.coefficient(n) == other.coefficient(n) for n in range(lo, hi))

    def __repr__(self) -> str:
        return f"ULaurent(low={self.low}, coeffs={list(self.coeffs)!r})"


# ---------------------------------------------------------------------------
# symmetric functions


def elementary_symmetric(values: Sequence, j: int):
    """e_j of a multiset, exact, by the triangular recurrence."""
    if j < 0:
        raise ComputationError("negative symmetric degree")
    row = [1] + [0] * j
    for v in values:
        for n in range(min(j, len(row) - 1), 0, -1):
            row[n] = row[n] + row[n - 1] * v
    return row[j]


def signed_chern_coefficients(plus: Sequence, minus: Sequence, maxdeg: int) -> list:
    """c_0..c_maxdeg of prod(1 + w t) over plus divided by the same over minus.

    Works over ints or Fractions.  This is the total Chern class of a virtual
    sum of lines with the given (specialized) first Chern classes.
    """
    c = [1] + [0] * maxdeg
    for w in plus:
        for n in range(maxdeg, 0, -1):
            c[n] = c[n] + c[n - 1] * w
    for w in minus:
        out = [c[0]] + [0] * maxdeg
        for n in range(1, maxdeg + 1):
            out[n] = c[n] - w * out[n - 1]
        c = out
    return c


# ---------------------------------------------------------------------------
# specialization machinery


def _prime_pool(lo: int = 53, hi: int = 499) -> tuple[int, ...]:
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(hi**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(p for p in range(lo, hi + 1) if sieve[p])


PRIME_POOL: tuple[int, ...] = _prime_pool()

DEFAULT_SEED = 20717


class SpecializationDraw:
    """Deterministic stream of distinct-prime pairs for a given seed."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        self._rng = random.Random(seed)

    def pair(self) -> tuple[int, int]:
        p, q = self._rng.sample(PRIME_POOL, 2)
        return (p, q)


def dual_specialized(
    compute: Callable[[tuple[int, int]], Fraction],
    seed: int = DEFAULT_SEED,
    retries: int = 8,
) -> Fraction:
    """Run ``compute`` under two independent specializations and cross-check.

    ``compute`` receives a pair of distinct primes and may raise PoleError if
    a denominator vanishes; each pole burns one retry.  The two results must
    agree exactly, otherwise the computation itself is unsound.
    """
    draw = SpecializationDraw(seed)
    seen: list[tuple[int, int]] = []
    values: list[Fraction] = []
    budget = retries
    while len(values) < 2:
        z = draw.pair()
        if z in seen:
            continue
        try:
            values.append(compute(z))
            seen.append(z)
        except PoleError:
            budget -= 1
            if budget < 0:
                raise PoleError(
                    f"denominator vanished under {retries + 1} specializations"
                )
    if values[0] != values[1]:
        raise ComputationError(
            f"specializations disagree: {values[0]} vs {values[1]} "
            f"(pairs {seen[0]} and {seen[1]})"
        )
    return values[0]


def iter_pairs(seed: int, n: int) -> Iterable[tuple[int, int]]:
    """First n pairs of the seeded stream (diagnostics and tests)."""
    draw = SpecializationDraw(seed)
    return [draw.pair() for _ in range(n)]
