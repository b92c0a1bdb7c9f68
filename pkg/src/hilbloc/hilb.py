"""Fixed-point combinatorics on Hilbert schemes of points.

A torus fixed point of X^[k] is a tuple of partitions, one per surface fixed
point, with total size k (each partition is the staircase of a monomial
ideal in the local chart).  This module enumerates those tuples and computes
the localized weight data attached to them:

* tangent weights of X^[k], two per cell, via the arm/leg formula in the
  chart coordinates (v1, v2);
* weights of the fiber of a tautological bundle V^[k], one per cell per line
  summand, cell (i, j) twisting the line weight by i*v1 + j*v2;
* the determinant weight of such a fiber.

Cells are indexed (i, j) with i the row (index into the partition) and j the
column (0 <= j < lambda_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .errors import ComputationError, UsageError
from .symbolic import Weight, ZERO_WEIGHT
from .toric import EquivariantLineBundle, SplitBundle, ToricSurfaceModel, as_split

__all__ = [
    "Partition",
    "HilbFixedPoint",
    "partitions",
    "compositions",
    "enumerate_fixed_points",
    "fixed_point_list",
    "count_fixed_points",
    "tangent_weights",
    "cell_tangent_weights",
    "taut_weights",
    "theta_weight",
]


@dataclass(frozen=True)
class Partition:
    """A partition as a non-increasing tuple of positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(p <= 0 for p in self.parts):
            raise UsageError(f"partition parts must be positive: {self.parts}")
        if any(self.parts[i] < self.parts[i + 1] for i in range(len(self.parts) - 1)):
            raise UsageError(f"partition parts must be non-increasing: {self.parts}")

    @property
    def size(self) -> int:
        return sum(self.parts)

    @cached_property
    def conjugate(self) -> tuple[int, ...]:
        if not self.parts:
            return ()
        return tuple(
            sum(1 for p in self.parts if p > j) for j in range(self.parts[0])
        )

    def transpose(self) -> "Partition":
        return Partition(self.conjugate)

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, p in enumerate(self.parts):
            for j in range(p):
                yield (i, j)

    def arm(self, i: int, j: int) -> int:
        return self.parts[i] - 1 - j

    def leg(self, i: int, j: int) -> int:
        return self.conjugate[j] - 1 - i

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class HilbFixedPoint:
    """One fixed point of X^[k]: a partition per surface fixed point."""

    parts: tuple[Partition, ...]

    @property
    def size(self) -> int:
        return sum(p.size for p in self.parts)

    def to_json(self) -> list[list[int]]:
        return [list(p.parts) for p in self.parts]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "HilbFixedPoint":
        return cls(tuple(Partition(tuple(p)) for p in data))

    def __str__(self) -> str:
        return "[" + ", ".join(str(p) for p in self.parts) + "]"


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n, largest-first lexicographic order."""
    if n < 0:
        raise UsageError("partitions of a negative integer")

    def rec(n: int, cap: int):
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in rec(n - first, first):
                yield (first,) + rest

    cap = n if max_part is None else min(n, max_part)
    for parts in rec(n, cap):
        yield Partition(parts)


def compositions(n: int, slots: int) -> Iterator[tuple[int, ...]]:
    """Ordered splits of n into the given number of non-negative slots."""
    if slots <= 0:
        raise UsageError("compositions need at least one slot")
    if slots == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, slots - 1):
            yield (first,) + rest


def enumerate_fixed_points(
    surface: ToricSurfaceModel, k: int
) -> Iterator[HilbFixedPoint]:
    """Stream the fixed points of X^[k], grouped by size composition."""
    if k < 0:
        raise UsageError("negative number of points")
    npts = len(surface.points)

    def rec(slot: int, sizes: tuple[int, ...]):
        if slot == npts:
            yield ()
            return
        for head in partitions(sizes[slot]):
            for tail in rec(slot + 1, sizes):
                yield (head,) + tail

    for sizes in compositions(k, npts):
        for tup in rec(0, sizes):
            yield HilbFixedPoint(tup)


def fixed_point_list(surface: ToricSurfaceModel, k: int) -> list[HilbFixedPoint]:
    """Materialized enumeration; fine for small k, prefer the iterator in sums."""
    return list(enumerate_fixed_points(surface, k))


def count_fixed_points(surface: ToricSurfaceModel, k: int) -> int:
    """Number of fixed points: [q^k] of prod_m (1 - q^m)^(-chi_top)."""
    if k < 0:
        raise UsageError("negative number of points")
    series = [0] * (k + 1)
    series[0] = 1
    for m in range(1, k + 1):
        # multiply by (1 - q^m)^(-1), chi_top times
        for _ in range(surface.chi_top):
            for d in range(m, k + 1):
                series[d] += series[d - m]
    return series[k]


def cell_tangent_weights(
    v1: Weight, v2: Weight, part: Partition
) -> list[Weight]:
    """Tangent weights of the punctual stratum for one chart.

    Cell (i, j) with arm a and leg l contributes (l+1)v1 - a*v2 and
    -l*v1 + (a+1)*v2.
    """
    out = []
    for i, j in part.cells():
        a = part.arm(i, j)
        l = part.leg(i, j)
        out.append((l + 1) * v1 + (-a) * v2)
        out.append((-l) * v1 + (a + 1) * v2)
    return out


def tangent_weights(
    surface: ToricSurfaceModel, fp: HilbFixedPoint
) -> tuple[Weight, ...]:
    """The 2k tangent weights of X^[k] at a fixed point, none zero."""
    if len(fp.parts) != len(surface.points):
        raise UsageError("fixed point does not match the surface model")
    out: list[Weight] = []
    for (v1, v2), part in zip(surface.points, fp.parts):
        out.extend(cell_tangent_weights(v1, v2, part))
    for w in out:
        if w.is_zero():
            raise ComputationError(f"zero tangent weight at {fp}")
    return tuple(out)


def taut_weights(
    surface: ToricSurfaceModel,
    fp: HilbFixedPoint,
    bundle: SplitBundle | EquivariantLineBundle,
) -> tuple[tuple[Weight, ...], tuple[Weight, ...]]:
    """Weights of the tautological fiber of bundle^[k] at a fixed point.

    Returns (plus, minus) weight lists: a line with weight w at the surface
    point contributes w + i*v1 + j*v2 for every cell (i, j) of the partition
    sitting there.  Minus lines of a virtual split land in the minus list.
    """
    bundle = as_split(bundle)
    if len(fp.parts) != len(surface.points):
        raise UsageError("fixed point does not match the surface model")
    plus: list[Weight] = []
    minus: list[Weight] = []
    for p, ((v1, v2), part) in enumerate(zip(surface.points, fp.parts)):
        cells = list(part.cells())
        for line in bundle.plus:
            w = line.weights[p]
            plus.extend(w + i * v1 + j * v2 for i, j in cells)
        for line in bundle.minus:
            w = line.weights[p]
            minus.extend(w + i * v1 + j * v2 for i, j in cells)
    return tuple(plus), tuple(minus)


def theta_weight(
    surface: ToricSurfaceModel,
    fp: HilbFixedPoint,
    bundle: SplitBundle | EquivariantLineBundle,
) -> Weight:
    """Determinant weight of the tautological fiber (minus lines signed)."""
    plus, minus = taut_weights(surface, fp, bundle)
    total = ZERO_WEIGHT
    for w in plus:
        total = total + w
    for w in minus:
        total = total - w
    return total
