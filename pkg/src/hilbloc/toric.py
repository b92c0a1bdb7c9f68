"""Toric surface models with explicit torus fixed-point data.

Three families are supported, each with its fixed points, tangent weights,
invariant-curve (edge) data and intersection theory hard-coded from the fan:

* ``P2``: three fixed points, tangent weights (t1, t2), (-t1, t2-t1),
  (t1-t2, -t2); divisor basis (H) with H.H = 1, K = -3H.
* ``P1xP1``: four fixed points ordered (0,0), (0,1), (1,0), (1,1); divisor
  basis (f1, f2) of the two rulings, K = (-2, -2).
* ``Hirzebruch(a)``, a >= 0: four fixed points; divisor basis (fiber f,
  positive section s) with f.f = 0, f.s = 1, s.s = a, K = (a-2, -2).
  Hirzebruch(0) is P1xP1 in a different basis.

Line bundles carry one weight per fixed point, normalized so the first fixed
point has weight zero.  The weight data follows the section convention: on P2
the bundle O(d) gets weights (0, d*t1, d*t2).  Euler characteristics pair
these weights with exp(-w*u) against Todd factors of the stored tangent
weights; that pairing is fixed once here and reused by every Riemann-Roch
style sum in the package.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Sequence

from .errors import ComputationError, PoleError, RealizationError, UsageError
from .symbolic import (
    DEFAULT_SEED,
    ULaurent,
    USeries,
    Weight,
    dual_specialized,
    exp_series,
    todd_series,
)

__all__ = [
    "ChernData",
    "ToricSurfaceModel",
    "EquivariantLineBundle",
    "SplitBundle",
    "make_surface",
    "line_bundle",
    "split_bundle",
    "validate_compatibility",
    "chi_from_chern",
    "as_split",
    "chi_surface",
    "chi_pair",
    "e_from_v",
    "realize_split_model",
    "surface_to_json",
    "bundle_to_json",
    "bundle_from_json",
]

SURFACE_NAMES = ("P2", "P1xP1", "Hirzebruch")


@dataclass(frozen=True)
class ChernData:
    """(rank, c1 in the divisor basis, integral c2) of a coherent class."""

    rank: int
    c1: tuple[int, ...]
    c2: int

    def dual(self) -> "ChernData":
        return ChernData(self.rank, tuple(-d for d in self.c1), self.c2)


@dataclass(frozen=True)
class ToricSurfaceModel:
    name: str
    family: str
    a: int
    points: tuple[tuple[Weight, Weight], ...]
    edges: tuple[tuple[int, int, Weight], ...]
    chi_top: int
    k_squared: int
    canonical_degrees: tuple[int, ...]
    divisor_rank: int

    def intersect(self, d1: Sequence[int], d2: Sequence[int]) -> int:
        """Intersection number of two divisor classes in this basis."""
        if self.family == "P2":
            return d1[0] * d2[0]
        if self.family == "P1xP1":
            return d1[0] * d2[1] + d1[1] * d2[0]
        return d1[0] * d2[1] + d1[1] * d2[0] + self.a * d1[1] * d2[1]

    def is_nef(self, degrees: Sequence[int]) -> bool:
        return all(d >= 0 for d in degrees)

    def line_weights(self, degrees: Sequence[int]) -> tuple[Weight, ...]:
        """Fixed-point weights of O(degrees), zero at the first point."""
        if len(degrees) != self.divisor_rank:
            raise UsageError(
                f"{self.name} wants {self.divisor_rank} divisor degree(s), "
                f"got {len(degrees)}"
            )
        if self.family == "P2":
            d = degrees[0]
            return (Weight(0, 0), Weight(d, 0), Weight(0, d))
        if self.family == "P1xP1":
            a, b = degrees
            return (Weight(0, 0), Weight(0, b), Weight(a, 0), Weight(a, b))
        a, b = degrees
        n = self.a
        return (
            Weight(0, 0),
            Weight(a, 0),
            Weight(a + n * b, b),
            Weight(0, b),
        )


def _p2_model() -> ToricSurfaceModel:
    t1, t2 = Weight(1, 0), Weight(0, 1)
    points = ((t1, t2), (-1 * t1, t2 - t1), (t1 - t2, -1 * t2))
    edges = ((0, 1, t1), (0, 2, t2), (1, 2, t2 - t1))
    return ToricSurfaceModel("P2", "P2", 0, points, edges, 3, 9, (-3,), 1)


def _p1xp1_model() -> ToricSurfaceModel:
    t1, t2 = Weight(1, 0), Weight(0, 1)
    points = (
        (t1, t2),
        (t1, -1 * t2),
        (-1 * t1, t2),
        (-1 * t1, -1 * t2),
    )
    edges = ((0, 2, t1), (1, 3, t1), (0, 1, t2), (2, 3, t2))
    return ToricSurfaceModel("P1xP1", "P1xP1", 0, points, edges, 4, 8, (-2, -2), 2)


def _hirzebruch_model(a: int) -> ToricSurfaceModel:
    t1, t2 = Weight(1, 0), Weight(0, 1)
    s = Weight(a, 1)  # a*t1 + t2, the weight along the negative section
    points = (
        (t1, t2),
        (s, -1 * t1),
        (-1 * t1, -1 * s),
        (-1 * t2, t1),
    )
    edges = ((0, 1, t1), (1, 2, s), (2, 3, -1 * t1), (3, 0, -1 * t2))
    return ToricSurfaceModel(
        f"Hirzebruch({a})", "Hirzebruch", a, points, edges, 4, 8, (a - 2, -2), 2
    )


def _check_model(m: ToricSurfaceModel) -> ToricSurfaceModel:
    for i, (v1, v2) in enumerate(m.points):
        if v1.a * v2.b - v1.b * v2.a == 0:
            raise ComputationError(f"{m.name}: dependent tangent weights at point {i}")
    for p, q, w in m.edges:
        if w not in m.points[p] or (-1 * w) not in m.points[q]:
            raise ComputationError(f"{m.name}: edge ({p},{q},{w}) mismatches tangents")
    return m


@functools.lru_cache(maxsize=None)
def make_surface(name: str, a: int | None = None) -> ToricSurfaceModel:
    """Build one of the supported surface models.

    ``name`` is one of P2, P1xP1, Hirzebruch; Hirzebruch takes the
    non-negative twist ``a`` (Hirzebruch(0) has the same intersection numbers
    as P1xP1 but a different divisor basis).
    """
    if name == "P2":
        if a not in (None, 0):
            raise UsageError("P2 takes no twist parameter")
        return _check_model(_p2_model())
    if name == "P1xP1":
        if a not in (None, 0):
            raise UsageError("P1xP1 takes no twist parameter")
        return _check_model(_p1xp1_model())
    if name == "Hirzebruch":
        if a is None or a < 0:
            raise UsageError("Hirzebruch needs a twist a >= 0")
        return _check_model(_hirzebruch_model(a))
    raise UsageError(f"unknown surface {name!r}; expected one of {SURFACE_NAMES}")


# ---------------------------------------------------------------------------
# equivariant line bundles and split bundles


@dataclass(frozen=True)
class EquivariantLineBundle:
    """A line bundle given by one weight per fixed point.

    ``degrees`` records the divisor class when known; weight-only bundles
    (for instance after a linearization shift) carry ``degrees=None`` and
    stay usable by every purely localized computation.
    """

    surface: ToricSurfaceModel
    weights: tuple[Weight, ...]
    degrees: tuple[int, ...] | None = None

    def dual(self) -> "EquivariantLineBundle":
        degs = None if self.degrees is None else tuple(-d for d in self.degrees)
        return EquivariantLineBundle(
            self.surface, tuple(-1 * w for w in self.weights), degs
        )

    def shifted(self, s: Weight) -> "EquivariantLineBundle":
        """Shift the linearization; the underlying bundle does not change."""
        return EquivariantLineBundle(
            self.surface, tuple(w + s for w in self.weights), None
        )

    def tensor(self, other: "EquivariantLineBundle") -> "EquivariantLineBundle":
        if self.surface.name != other.surface.name:
            raise UsageError("tensor product across different surfaces")
        degs = None
        if self.degrees is not None and other.degrees is not None:
            degs = tuple(x + y for x, y in zip(self.degrees, other.degrees))
        return EquivariantLineBundle(
            self.surface,
            tuple(x + y for x, y in zip(self.weights, other.weights)),
            degs,
        )


def line_bundle(surface: ToricSurfaceModel, degrees: Sequence[int]) -> EquivariantLineBundle:
    """O(degrees) with its canonical linearization (weight zero first)."""
    degrees = tuple(int(d) for d in degrees)
    weights = surface.line_weights(degrees)
    bad = validate_compatibility(surface, weights)
    if bad:
        raise ComputationError(f"internal weight table broken: {bad}")
    return EquivariantLineBundle(surface, weights, degrees)


def validate_compatibility(
    surface: ToricSurfaceModel, weights: Sequence[Weight]
) -> list[str]:
    """Check edge compatibility of a per-point weight assignment.

    For each invariant curve joining p to q with tangent weight w at p, the
    difference weights[p] - weights[q] must be an integer multiple of w.
    Returns a list of human-readable violations, empty when consistent.
    """
    if len(weights) != len(surface.points):
        return [
            f"expected {len(surface.points)} weights, got {len(weights)}"
        ]
    out = []
    for p, q, w in surface.edges:
        diff = weights[p] - weights[q]
        if diff.a * w.b - diff.b * w.a != 0:
            out.append(f"edge ({p},{q}) with weight {w}: {diff} not proportional")
            continue
        num, den = (diff.a, w.a) if w.a != 0 else (diff.b, w.b)
        if num % den != 0:
            out.append(f"edge ({p},{q}) with weight {w}: {diff} not an integer multiple")
    return out


@dataclass(frozen=True)
class SplitBundle:
    """Formal sum of line bundles, minus-lines allowed (virtual splits)."""

    surface: ToricSurfaceModel
    plus: tuple[EquivariantLineBundle, ...] = ()
    minus: tuple[EquivariantLineBundle, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.plus) - len(self.minus)

    def is_honest(self) -> bool:
        return not self.minus

    def has_degrees(self) -> bool:
        return all(l.degrees is not None for l in self.plus + self.minus)

    def dual(self) -> "SplitBundle":
        return SplitBundle(
            self.surface,
            tuple(l.dual() for l in self.plus),
            tuple(l.dual() for l in self.minus),
        )

    def shifted(self, s: Weight) -> "SplitBundle":
        return SplitBundle(
            self.surface,
            tuple(l.shifted(s) for l in self.plus),
            tuple(l.shifted(s) for l in self.minus),
        )

    def tensor(self, other: "SplitBundle") -> "SplitBundle":
        plus = [a.tensor(b) for a in self.plus for b in other.plus]
        plus += [a.tensor(b) for a in self.minus for b in other.minus]
        minus = [a.tensor(b) for a in self.plus for b in other.minus]
        minus += [a.tensor(b) for a in self.minus for b in other.plus]
        return SplitBundle(self.surface, tuple(plus), tuple(minus))

    def chern_data(self) -> ChernData:
        """Rank, c1 and c2 by the Whitney formula; needs known degrees."""
        if not self.has_degrees():
            raise UsageError("Chern data undefined for weight-only bundles")
        zero = (0,) * self.surface.divisor_rank
        e1p, e1m = list(zero), list(zero)
        for l in self.plus:
            e1p = [x + y for x, y in zip(e1p, l.degrees)]
        for l in self.minus:
            e1m = [x + y for x, y in zip(e1m, l.degrees)]
        inter = self.surface.intersect
        e2p = sum(
            inter(self.plus[i].degrees, self.plus[j].degrees)
            for i in range(len(self.plus))
            for j in range(i + 1, len(self.plus))
        )
        e2m = sum(
            inter(self.minus[i].degrees, self.minus[j].degrees)
            for i in range(len(self.minus))
            for j in range(i + 1, len(self.minus))
        )
        c1 = tuple(x - y for x, y in zip(e1p, e1m))
        c2 = e2p - inter(e1p, e1m) + inter(e1m, e1m) - e2m
        return ChernData(self.rank, c1, c2)


def split_bundle(
    surface: ToricSurfaceModel,
    plus_degrees: Iterable[Sequence[int] | int],
    minus_degrees: Iterable[Sequence[int] | int] = (),
) -> SplitBundle:
    """Convenience constructor from degree lists (ints on P2, pairs elsewhere)."""

    def norm(d):
        if isinstance(d, int):
            return (d,)
        return tuple(int(x) for x in d)

    return SplitBundle(
        surface,
        tuple(line_bundle(surface, norm(d)) for d in plus_degrees),
        tuple(line_bundle(surface, norm(d)) for d in minus_degrees),
    )


# ---------------------------------------------------------------------------
# Euler characteristics


def chi_from_chern(surface: ToricSurfaceModel, cd: ChernData) -> int:
    """chi(E) = rank + c1.(c1 - K)/2 - c2 on a rational surface (chi(O) = 1)."""
    k = surface.canonical_degrees
    c1_c1 = surface.intersect(cd.c1, cd.c1)
    c1_k = surface.intersect(cd.c1, k)
    twice = c1_c1 - c1_k
    if twice % 2 != 0:
        raise ComputationError("odd Riemann-Roch combination; degrees corrupt")
    return cd.rank + twice // 2 - cd.c2


def as_split(bundle: SplitBundle | EquivariantLineBundle) -> SplitBundle:
    if isinstance(bundle, EquivariantLineBundle):
        return SplitBundle(bundle.surface, (bundle,))
    return bundle


SURFACE_HRR_ORDER = 4  # u^2 pole plus a two-step guard


def _chi_surface_at(
    surface: ToricSurfaceModel,
    bundle: SplitBundle,
    z: tuple[int, int],
    order: int = SURFACE_HRR_ORDER,
) -> Fraction:
    """One specialization of the fixed-point Euler characteristic sum.

    Each point contributes (sum of +-exp(-w u)) * todd(v1 u) * todd(v2 u)
    divided by (v1 v2 u^2); the poles must cancel in the total and the u^0
    coefficient is chi.
    """
    total = ULaurent(0, [])
    for p, (v1, v2) in enumerate(surface.points):
        s1, s2 = v1.spec_int(*z), v2.spec_int(*z)
        if s1 == 0 or s2 == 0:
            raise PoleError(f"tangent weight vanished at point {p} under z={z}")
        ch = USeries([Fraction(0)] * (order + 1))
        for line in bundle.plus:
            ch = ch + exp_series(-line.weights[p].spec_int(*z), order)
        for line in bundle.minus:
            ch = ch - exp_series(-line.weights[p].spec_int(*z), order)
        num = ch * todd_series(s1, order) * todd_series(s2, order)
        total = total + ULaurent.from_series(num, 2).scale(Fraction(1, s1 * s2))
    leftover = total.negative_part()
    if leftover:
        raise ComputationError(f"surface HRR poles fail to cancel: {leftover}")
    return total.u0()


def chi_surface(
    surface: ToricSurfaceModel,
    bundle: SplitBundle | EquivariantLineBundle,
    seed: int = DEFAULT_SEED,
) -> int:
    """Equivariant Hirzebruch-Riemann-Roch over the surface, exact integer."""
    bundle = as_split(bundle)
    value = dual_specialized(lambda z: _chi_surface_at(surface, bundle, z), seed)
    if value.denominator != 1:
        raise ComputationError(f"chi came out non-integral: {value}")
    return int(value)


def chi_pair(
    surface: ToricSurfaceModel,
    e: ChernData | SplitBundle,
    k: int,
) -> int:
    """chi(E tensor I_Z) for any length-k Z: chi(E) - rank(E) * k."""
    if isinstance(e, SplitBundle):
        e = e.chern_data()
    return chi_from_chern(surface, e) - e.rank * k


def e_from_v(v: ChernData, k: int) -> ChernData:
    """Chern data of the dualized kernel class for the pairing construction.

    ch(E) = (rank V - 1, -c1(V), ch2(V) + k); c2 follows from
    c2 = (c1^2 - 2 ch2)/2, and the c1^2 terms cancel, leaving
    c2(E) = c2(V) - k on any surface.
    """
    if v.rank < 2:
        raise UsageError("pairing construction needs rank V >= 2")
    return ChernData(v.rank - 1, tuple(-d for d in v.c1), v.c2 - k)


# ---------------------------------------------------------------------------
# split models with prescribed Chern data


def _nondecreasing_tuples(atoms: Sequence, length: int):
    """All non-decreasing sequences of the given atoms, lexicographic."""
    if length == 0:
        yield ()
        return
    for i in range(len(atoms)):
        for rest in _nondecreasing_tuples(atoms[i:], length - 1):
            yield (atoms[i],) + rest


def _sum_tuples(atoms: Sequence[tuple[int, ...]], length: int,
                want: tuple[int, ...], bound: int):
    """Non-decreasing atom tuples with a prescribed component-wise sum."""

    def rec(start: int, length: int, want: tuple[int, ...]):
        if length == 0:
            if not any(want):
                yield ()
            return
        for i in range(start, len(atoms)):
            a = atoms[i]
            rem = tuple(w - x for w, x in zip(want, a))
            if any(abs(r) > (length - 1) * bound for r in rem):
                continue
            for rest in rec(i, length - 1, rem):
                yield (a,) + rest

    yield from rec(0, length, want)


@functools.lru_cache(maxsize=None)
def _realize_cached(
    surface_name: str, a: int, rank: int, c1: tuple[int, ...], c2: int,
    box: int, max_minus: int,
) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    surface = make_surface(surface_name, a if surface_name == "Hirzebruch" else None)
    target = ChernData(rank, c1, c2)

    def matches(plus_degs, minus_degs) -> bool:
        zero = (0,) * surface.divisor_rank
        e1p = tuple(sum(d[i] for d in plus_degs) for i in range(len(zero)))
        e1m = tuple(sum(d[i] for d in minus_degs) for i in range(len(zero)))
        if tuple(x - y for x, y in zip(e1p, e1m)) != target.c1:
            return False
        inter = surface.intersect
        e2p = sum(
            inter(plus_degs[i], plus_degs[j])
            for i in range(len(plus_degs))
            for j in range(i + 1, len(plus_degs))
        )
        e2m = sum(
            inter(minus_degs[i], minus_degs[j])
            for i in range(len(minus_degs))
            for j in range(i + 1, len(minus_degs))
        )
        got = e2p - inter(e1p, e1m) + inter(e1m, e1m) - e2m
        return got == target.c2

    def max_abs(tuples) -> int:
        return max((abs(x) for t in tuples for x in t), default=0)

    for m in range(0, max_minus + 1):
        p = rank + m
        for bound in range(0, box + 1):
            if surface.divisor_rank == 1:
                atoms = [(x,) for x in range(-bound, bound + 1)]
            else:
                atoms = sorted(iproduct(range(-bound, bound + 1), repeat=2))
            for minus in _nondecreasing_tuples(atoms, m):
                want = tuple(
                    c + sum(d[i] for d in minus) for i, c in enumerate(target.c1)
                )
                for plus in _sum_tuples(atoms, p, want, bound):
                    # solutions hugging a smaller box were found in an
                    # earlier bound pass; skip them to keep the order stable
                    if max(max_abs(plus), max_abs(minus)) != bound:
                        continue
                    if matches(plus, minus):
                        return plus, minus
    raise RealizationError(
        f"no split model for rank={rank}, c1={c1}, c2={c2} on {surface.name} "
        f"within box {box} and up to {max_minus} minus lines"
    )


def realize_split_model(
    surface: ToricSurfaceModel,
    target: ChernData,
    box: int | None = None,
    max_minus: int = 2,
) -> SplitBundle:
    """Find a split bundle with the requested Chern data.

    The search is deterministic: fewest minus lines first, then smallest
    bounding box (max coordinate magnitude), then lexicographically first
    degree tuples, both lists kept non-decreasing.  Minus lines make every
    integral Chern datum reachable; the tradeoff is that the model is only a
    K-theory stand-in, which is all the localized integrals depend on.
    """
    if target.rank < 1:
        raise UsageError("realize_split_model needs rank >= 1")
    if box is None:
        box = 16 if surface.divisor_rank == 1 else 4
    plus, minus = _realize_cached(
        surface.family, surface.a, target.rank, tuple(target.c1), target.c2,
        box, max_minus,
    )
    return split_bundle(surface, plus, minus)


# ---------------------------------------------------------------------------
# serialization


def surface_to_json(surface: ToricSurfaceModel) -> dict:
    return {
        "name": surface.name,
        "family": surface.family,
        "a": surface.a,
        "points": [[v1.to_json(), v2.to_json()] for v1, v2 in surface.points],
        "edges": [[p, q, w.to_json()] for p, q, w in surface.edges],
        "chi_top": surface.chi_top,
        "K2": surface.k_squared,
        "canonical_degrees": list(surface.canonical_degrees),
    }


def surface_from_json(data: dict) -> ToricSurfaceModel:
    return make_surface(data["family"], data.get("a") or None) \
        if data["family"] == "Hirzebruch" else make_surface(data["family"])


def bundle_to_json(bundle: SplitBundle | EquivariantLineBundle) -> dict:
    bundle = as_split(bundle)

    def line(l: EquivariantLineBundle) -> dict:
        return {
            "degrees": None if l.degrees is None else list(l.degrees),
            "weights": [w.to_json() for w in l.weights],
        }

    return {
        "surface": surface_to_json(bundle.surface),
        "plus": [line(l) for l in bundle.plus],
        "minus": [line(l) for l in bundle.minus],
    }


def bundle_from_json(data: dict) -> SplitBundle:
    surface = surface_from_json(data["surface"])

    def line(entry: dict) -> EquivariantLineBundle:
        weights = tuple(Weight.from_json(w) for w in entry["weights"])
        bad = validate_compatibility(surface, weights)
        if bad:
            raise UsageError(f"incompatible weights in serialized bundle: {bad}")
        degs = entry.get("degrees")
        return EquivariantLineBundle(
            surface, weights, None if degs is None else tuple(degs)
        )

    return SplitBundle(
        surface,
        tuple(line(e) for e in data["plus"]),
        tuple(line(e) for e in data["minus"]),
    )
