"""Localization integrals over the Hilbert scheme X^[k].

Everything here reduces to sums over the fixed points of X^[k]: Chern-class
integrals of tautological bundles (integrate, quot_count), holomorphic Euler
characteristics of determinant line bundles (chi_theta), and the bookkeeping
that ties the two together for the count-matching verification loop
(verify_conjecture).

All sums are evaluated twice under independent integer specializations of
(t1, t2) and the results asserted equal, so a silently bad specialization
cannot leak into output.  Values are exact rationals throughout.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .cache import ResultCache
from .errors import ComputationError, RealizationError, UsageError
from .hilb import (
    enumerate_fixed_points,
    tangent_weights,
    taut_weights,
    theta_weight,
)
from .symbolic import (
    DEFAULT_SEED,
    dual_specialized,
    series_exp,
    signed_chern_coefficients,
    todd_log_coefficients,
)
from .toric import (
    ChernData,
    EquivariantLineBundle,
    SplitBundle,
    ToricSurfaceModel,
    as_split,
    chi_from_chern,
    chi_pair,
    e_from_v,
    realize_split_model,
)

__all__ = [
    "Term",
    "ChernExpr",
    "IntegralRequest",
    "integrate",
    "quot_count",
    "chi_theta",
    "expected_dim_pairs",
    "c2_for_expected_dim_zero",
    "validate_construction",
    "ConstructionReport",
    "verify_conjecture",
    "ConjectureRow",
]


# ---------------------------------------------------------------------------
# Chern-class expressions


@dataclass(frozen=True)
class Term:
    """coefficient * product of c_index(bundle_id) factors."""

    coefficient: Fraction
    factors: tuple[tuple[str, int], ...]

    @property
    def degree(self) -> int:
        return sum(idx for _, idx in self.factors)

    def __str__(self) -> str:
        parts = [f"c{idx}({bid})" for bid, idx in self.factors]
        if not parts:
            return str(self.coefficient)
        if self.coefficient == 1:
            return "*".join(parts)
        return "*".join([str(self.coefficient)] + parts)


@dataclass(frozen=True)
class ChernExpr:
    """A formal sum of Chern monomials in declared bundle identifiers."""

    terms: tuple[Term, ...]

    @classmethod
    def constant(cls, value) -> "ChernExpr":
        return cls((Term(Fraction(value), ()),))

    @classmethod
    def chern(cls, index: int, bundle_id: str, coefficient=1) -> "ChernExpr":
        if index < 0:
            raise UsageError("Chern index must be non-negative")
        if index == 0:
            return cls.constant(coefficient)
        return cls((Term(Fraction(coefficient), ((bundle_id, index),)),))

    def __add__(self, other: "ChernExpr") -> "ChernExpr":
        return ChernExpr(self.terms + other.terms).collect()

    def __mul__(self, other: "ChernExpr") -> "ChernExpr":
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(
                    Term(
                        a.coefficient * b.coefficient,
                        tuple(sorted(a.factors + b.factors)),
                    )
                )
        return ChernExpr(tuple(out)).collect()

    def scale(self, q) -> "ChernExpr":
        return ChernExpr(
            tuple(Term(t.coefficient * Fraction(q), t.factors) for t in self.terms)
        )

    def collect(self) -> "ChernExpr":
        """Merge duplicate monomials and drop zero terms; canonical order."""
        merged: dict[tuple, Fraction] = {}
        for t in self.terms:
            key = tuple(sorted(t.factors))
            merged[key] = merged.get(key, Fraction(0)) + t.coefficient
        terms = tuple(
            Term(c, f) for f, c in sorted(merged.items()) if c != 0
        )
        return ChernExpr(terms)

    def bundle_ids(self) -> set[str]:
        return {bid for t in self.terms for bid, _ in t.factors}

    def degrees(self) -> set[int]:
        if not self.terms:
            return {0}
        return {t.degree for t in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)


@dataclass
class IntegralRequest:
    """One integral over X^[k]: declared bundles and a degree-2k expression."""

    surface: ToricSurfaceModel
    k: int
    bundles: dict[str, SplitBundle]
    expr: ChernExpr

    def __post_init__(self) -> None:
        if self.k < 0:
            raise UsageError("negative k")
        self.bundles = {
            bid: as_split(b) for bid, b in self.bundles.items()
        }
        for bid, b in self.bundles.items():
            if b.surface.name != self.surface.name:
                raise UsageError(f"bundle {bid!r} lives on {b.surface.name}")
        missing = self.expr.bundle_ids() - set(self.bundles)
        if missing:
            raise UsageError(f"undeclared bundle ids in expression: {sorted(missing)}")
        degs = self.expr.degrees()
        if degs != {2 * self.k} and self.expr.terms:
            raise UsageError(
                f"expression degrees {sorted(degs)} != 2k = {2 * self.k}; "
                "integrals over X^[k] need homogeneous degree 2k"
            )


# ---------------------------------------------------------------------------
# fixed-point evaluation


def _spec_taut(surface, bundles, fp, z):
    """Specialized (plus, minus) taut weight integers per bundle id."""
    out = {}
    for bid, b in bundles.items():
        plus, minus = taut_weights(surface, fp, b)
        out[bid] = (
            [w.spec_int(*z) for w in plus],
            [w.spec_int(*z) for w in minus],
        )
    return out

def _integrate_chunk(args) -> Fraction:
    surface, bundles, terms, z, fps = args
    need: dict[str, int] = {}
    for t in terms:
        for bid, idx in t.factors:
            need[bid] = max(need.get(bid, 0), idx)
    total = Fraction(0)
    for fp in fps:
        cvals = {}
        for bid, (plus, minus) in _spec_taut(surface, bundles, fp, z).items():
            cvals[bid] = signed_chern_coefficients(plus, minus, need.get(bid, 0))
        num = Fraction(0)
        for t in terms:
            val = t.coefficient
            for bid, idx in t.factors:
                val *= cvals[bid][idx]
            num += val
        den = 1
        for w in tangent_weights(surface, fp):
            den *= w.spec_int(*z)
        total += num / den
    return total


def _theta_chunk(args) -> list[Fraction]:
    surface, bundle, z, order, fps = args
    logtodd = todd_log_coefficients(order)
    total = [Fraction(0)] * (order + 1)
    for fp in fps:
        tspec = [w.spec_int(*z) for w in tangent_weights(surface, fp)]
        theta = theta_weight(surface, fp, bundle).spec_int(*z)
        # exp(-theta u) * prod_i todd(v_i u) = exp(-theta u + sum log todd)
        log_coeffs = [Fraction(0)] * (order + 1)
        if order >= 1:
            log_coeffs[1] = Fraction(-theta)
        pows = list(tspec)
        for n in range(1, order + 1):
            if n > 1:
                pows = [p * v for p, v in zip(pows, tspec)]
            log_coeffs[n] += logtodd[n] * sum(pows)
        series = series_exp(log_coeffs)
        den = 1
        for v in tspec:
            den *= v
        for n in range(order + 1):
            total[n] += series[n] / den
    return total


def _chunked(items: Sequence, nchunks: int):
    size = max(1, (len(items) + nchunks - 1) // nchunks)
    for i in range(0, len(items), size):
        yield items[i : i + size]


def _parallel_sum(worker, make_args, fps, threads, zero, add):
    """Map worker over fixed-point chunks, reducing in submission order."""
    if threads <= 1 or len(fps) < 2 * threads:
        return worker(make_args(fps))
    chunks = list(_chunked(fps, 4 * threads))
    total = zero
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(worker, [make_args(c) for c in chunks]):
            total = add(total, part)
    return total


def integrate(
    req: IntegralRequest,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    cache: ResultCache | None = None,
) -> Fraction:
    """Atiyah-Bott evaluation of a Chern-class integral over X^[k]."""
    if req.k == 0:
        # X^[0] is a point; the expression is a constant by homogeneity
        return sum((t.coefficient for t in req.expr.terms), Fraction(0))

    def compute() -> Fraction:
        fps = list(enumerate_fixed_points(req.surface, req.k))

        def at(z: tuple[int, int]) -> Fraction:
            return _parallel_sum(
                _integrate_chunk,
                lambda c: (req.surface, req.bundles, req.expr.terms, z, tuple(c)),
                fps,
                threads,
                Fraction(0),
                lambda a, b: a + b,
            )

        return dual_specialized(at, seed)

    if cache is None:
        return compute()
    return cache.fetch(_integrate_request_json(req), compute)


def _bundle_key(bundle: SplitBundle) -> dict:
    return {
        "plus": [[w.to_json() for w in l.weights] for l in bundle.plus],
        "minus": [[w.to_json() for w in l.weights] for l in bundle.minus],
    }


def _integrate_request_json(req: IntegralRequest) -> dict:
    return {
        "op": "integrate",
        "surface": req.surface.name,
        "k": req.k,
        "bundles": {bid: _bundle_key(b) for bid, b in sorted(req.bundles.items())},
        "expr": str(req.expr),
    }


def quot_count(
    surface: ToricSurfaceModel,
    v: SplitBundle | EquivariantLineBundle,
    k: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    cache: ResultCache | None = None,
) -> Fraction:
    """The quotient count: integral of c_{2k} of the taut bundle of V*.

    The argument is V itself; the dual is taken here.  For honest V the
    count is asserted to be an integer (it is a signed count of points).
    """
    v = as_split(v)
    if v.rank < 1:
        raise UsageError("quot_count needs rank V >= 1")
    if k == 0:
        return Fraction(1)
    vd = v.dual()
    req = IntegralRequest(
        surface, k, {"Vdual_k": vd}, ChernExpr.chern(2 * k, "Vdual_k")
    )
    value = integrate(req, seed=seed, threads=threads, cache=cache)
    if v.is_honest() and value.denominator != 1:
        raise ComputationError(f"honest quot count came out non-integral: {value}")
    return value


THETA_ORDER_MARGIN = 2  # u-coefficients kept beyond the u^0 extraction


def chi_theta(
    surface: ToricSurfaceModel,
    e: SplitBundle | EquivariantLineBundle,
    k: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    cache: ResultCache | None = None,
    order: int | None = None,
) -> int:
    """chi of the determinant line bundle induced by e on X^[k].

    Localization sum of exp(-theta u) * prod todd(v u) / (u^2k * prod v);
    the strictly negative u-powers must cancel across fixed points and the
    u^0 coefficient is the (integer) answer.  A non-orthogonal e (chi_pair
    nonzero) only warns: the line bundle exists, it is just not the
    canonical pairing class.
    """
    e = as_split(e)
    if k < 0:
        raise UsageError("negative k")
    if e.has_degrees() and chi_pair(surface, e.chern_data(), k) != 0:
        warnings.warn(
            f"chi_pair(e, k={k}) != 0: theta class is not orthogonal",
            stacklevel=2,
        )
    if k == 0:
        return 1
    if order is None:
        order = 2 * k + THETA_ORDER_MARGIN
    if order < 2 * k:
        raise UsageError(f"order {order} cannot resolve u^0 at k={k}")

    def compute() -> Fraction:
        fps = list(enumerate_fixed_points(surface, k))

        def at(z: tuple[int, int]) -> Fraction:
            total = _parallel_sum(
                _theta_chunk,
                lambda c: (surface, e, z, order, tuple(c)),
                fps,
                threads,
                [Fraction(0)] * (order + 1),
                lambda a, b: [x + y for x, y in zip(a, b)],
            )
            bad = {n - 2 * k: c for n, c in enumerate(total[: 2 * k]) if c != 0}
            if bad:
                raise ComputationError(
                    f"negative u-powers survive the theta sum: {bad}"
                )
            return total[2 * k]

        return dual_specialized(at, seed)

    request = {
        "op": "chi_theta",
        "surface": surface.name,
        "k": k,
        "bundle": _bundle_key(e),
        "order": order,
    }
    value = compute() if cache is None else cache.fetch(request, compute)
    if value.denominator != 1:
        raise ComputationError(f"chi_theta came out non-integral: {value}")
    return int(value)


# ---------------------------------------------------------------------------
# expected dimensions and the count-matching loop


def expected_dim_pairs(
    surface: ToricSurfaceModel,
    v: ChernData | SplitBundle,
    k: int,
) -> int:
    """chi(V*) - 1 - (rank V - 2) k, the expected dimension of the pair space."""
    if isinstance(v, SplitBundle):
        v = v.chern_data()
    return chi_from_chern(surface, v.dual()) - 1 - (v.rank - 2) * k


def c2_for_expected_dim_zero(r: int, d: int, k: int) -> int:
    """c2(V*) forcing expected dimension zero for degree-(-d) rank-r V on P2."""
    if r < 2:
        raise UsageError("need rank r >= 2")
    if k < 1:
        raise UsageError("need k >= 1")
    return comb(d + 2, 2) - (k - 1) * (r - 2)


@dataclass(frozen=True)
class ConstructionReport:
    ok: bool
    r: int
    d: int
    w: int
    lower: int
    upper: int
    violations: tuple[str, ...]


def validate_construction(r: int, d: int, w: int) -> ConstructionReport:
    """Check the (r, d, w) bounds under which good split constructions exist.

    Requires r >= 2, d >= 1 and C(d+1,2) <= w <= C(d+2,2) - 3 + eps with
    eps = 1 for d in {1, 2} and 0 otherwise.
    """
    eps = 1 if d in (1, 2) else 0
    lower = comb(d + 1, 2)
    upper = comb(d + 2, 2) - 3 + eps
    violations = []
    if r < 2:
        violations.append(f"rank bound violated: r = {r} < 2")
    if d < 1:
        violations.append(f"degree bound violated: d = {d} < 1")
    else:
        if w < lower:
            violations.append(f"lower bound violated: w = {w} < C(d+1,2) = {lower}")
        if w > upper:
            violations.append(
                f"upper bound violated: w = {w} > C(d+2,2) - 3 + eps = {upper}"
            )
    return ConstructionReport(not violations, r, d, w, lower, upper, tuple(violations))


@dataclass(frozen=True)
class ConjectureRow:
    k: int
    c2_vstar: int
    quot: int | None
    chi: int | None
    equal: bool | None
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "c2_vstar": self.c2_vstar,
            "quot_count": None if self.quot is None else str(self.quot),
            "chi_theta": None if self.chi is None else str(self.chi),
            "equal": self.equal,
            "error": self.error,
        }


def verify_conjecture(
    surface: ToricSurfaceModel,
    r: int,
    d: int,
    k_max: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    cache: ResultCache | None = None,
) -> list[ConjectureRow]:
    """Check quot_count = chi_theta for the expected-dimension-zero family.

    For each k <= k_max: pick c2(V*) so the expected dimension vanishes,
    realize split stand-ins for V* and for e = e_from_v(V, k) (the integrals
    depend only on Chern data), assert the orthogonality chi_pair(e, k) = 0,
    and compare the two sides.  A failed split-model search is recorded in
    that row instead of aborting the sweep.

    The count interpretation assumes Quot(V, k) finite and reduced and the
    vanishing of higher cohomology of the determinant line bundle, which
    hold for large d; the integrals themselves are unconditional.
    """
    if surface.family != "P2":
        raise UsageError("the expected-dimension-zero family is built on P2")
    if r < 3:
        raise UsageError("need rank r >= 3")
    if d < 1:
        raise UsageError("need degree d >= 1")
    rows: list[ConjectureRow] = []
    for k in range(1, k_max + 1):
        c2s = c2_for_expected_dim_zero(r, d, k)
        v = ChernData(r, (-d,), c2s)
        e = e_from_v(v, k)
        if chi_pair(surface, e, k) != 0:
            raise ComputationError(
                f"orthogonality broke at k={k}: chi_pair = {chi_pair(surface, e, k)}"
            )
        try:
            v_model = realize_split_model(surface, v.dual()).dual()
            e_model = realize_split_model(surface, e)
        except RealizationError as exc:
            rows.append(ConjectureRow(k, c2s, None, None, None, str(exc)))
            continue
        quot = quot_count(surface, v_model, k, seed=seed, threads=threads, cache=cache)
        chi = chi_theta(surface, e_model, k, seed=seed, threads=threads, cache=cache)
        rows.append(ConjectureRow(k, c2s, int(quot), chi, quot == chi))
    return rows
