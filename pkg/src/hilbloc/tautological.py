"""Virtual integrals over the ambient space P x X^[k].

The pair moduli space embeds in P x X^[k] (P the projective space of
cosections of V, of dimension Dp = chi(V*) - 1) and its virtual class is the
Euler class of the twisted tautological bundle of V*.  Integrals against the
virtual class therefore localize on P x X^[k]: per Hilbert-scheme fixed
point, classes become polynomials in the hyperplane symbol h and the weight
grading u; integrating over P extracts the h^Dp coefficient, and integrating
over X^[k] divides by the tangent weights and extracts u^0.

Chern classes enter through their total-Chern forms (1 + h + u*w), which
keeps every factor invertible, so virtual (minus-line) splits work
throughout.  The pieces of wrong cohomological degree that the total form
drags along either cancel across fixed points (strictly negative u powers,
asserted) or sit at strictly positive u powers that the u^0 extraction
ignores.

The module also extracts universal polynomials: the value of a fixed
integral shape as a polynomial in intersection numbers of (X, V, Lambda),
interpolated exactly from sampled configurations.  Ranks and the expected
dimension are fixed per extraction: the ambient dimension Dp enters the
integral structurally (as the extracted h-power), so polynomiality in the
intersection numbers holds on each fixed-expected-dimension family, and the
held-out verification hard-fails if a sampled family ever falls outside
that regime.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .cache import ResultCache
from .errors import ComputationError, UsageError
from .hilb import enumerate_fixed_points, tangent_weights, taut_weights
from .integrals import ChernExpr
from .symbolic import DEFAULT_SEED, dual_specialized
from .toric import (
    ChernData,
    EquivariantLineBundle,
    SplitBundle,
    ToricSurfaceModel,
    as_split,
    chi_surface,
    make_surface,
    realize_split_model,
)

__all__ = [
    "AmbientClass",
    "ITClass",
    "it_class",
    "virtual_integral",
    "UniversalPolynomial",
    "universal_poly",
    "SYMBOL_NAMES",
]


# ---------------------------------------------------------------------------
# bigraded truncated polynomials in (h, u)


def _gen_binomial(m: int, t: int) -> Fraction:
    """Generalized binomial C(m, t) for any integer m."""
    num = 1
    for s in range(t):
        num *= m - s
    return Fraction(num, factorial(t))


@dataclass
class AmbientClass:
    """Polynomial in h (degree <= hmax) and u (degree <= umax), truncated."""

    hmax: int
    umax: int
    coeffs: dict[tuple[int, int], Fraction]

    @classmethod
    def one(cls, hmax: int, umax: int) -> "AmbientClass":
        return cls(hmax, umax, {(0, 0): Fraction(1)})

    @classmethod
    def zero(cls, hmax: int, umax: int) -> "AmbientClass":
        return cls(hmax, umax, {})

    def _like(self, coeffs) -> "AmbientClass":
        return AmbientClass(self.hmax, self.umax, coeffs)

    def __add__(self, other: "AmbientClass") -> "AmbientClass":
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, 0) + val
        return self._like(out)

    def scale(self, q) -> "AmbientClass":
        if q == 0:
            return self._like({})
        return self._like({k: v * q for k, v in self.coeffs.items()})

    def __mul__(self, other: "AmbientClass") -> "AmbientClass":
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), v1 in self.coeffs.items():
            for (i2, j2), v2 in other.coeffs.items():
                i, j = i1 + i2, j1 + j2
                if i <= self.hmax and j <= self.umax:
                    out[(i, j)] = out.get((i, j), 0) + v1 * v2
        return self._like(out)

    def mul_trinomial(self, w) -> "AmbientClass":
        """Multiply by (1 + h + u*w)."""
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in self.coeffs.items():
            out[(i, j)] = out.get((i, j), 0) + v
            if i + 1 <= self.hmax:
                out[(i + 1, j)] = out.get((i + 1, j), 0) + v
            if w != 0 and j + 1 <= self.umax:
                out[(i, j + 1)] = out.get((i, j + 1), 0) + v * w
        return self._like(out)

    def div_trinomial(self, w) -> "AmbientClass":
        """Divide by (1 + h + u*w); well-defined by the unit constant term."""
        out: dict[tuple[int, int], Fraction] = {}
        for i in range(self.hmax + 1):
            for j in range(self.umax + 1):
                val = self.coeffs.get((i, j), Fraction(0))
                if i > 0:
                    val -= out.get((i - 1, j), 0)
                if j > 0 and w != 0:
                    val -= w * out.get((i, j - 1), 0)
                if val != 0:
                    out[(i, j)] = val
        return self._like(out)

    def mul_h_binomial(self, m: int) -> "AmbientClass":
        """Multiply by (1 + h)^m for any integer m."""
        if m == 0:
            return self
        out: dict[tuple[int, int], Fraction] = {}
        row = [_gen_binomial(m, t) for t in range(self.hmax + 1)]
        for (i, j), v in self.coeffs.items():
            for t in range(self.hmax - i + 1):
                if row[t] != 0:
                    out[(i + t, j)] = out.get((i + t, j), 0) + v * row[t]
        return self._like(out)

    def component(self, degree: int) -> "AmbientClass":
        """The part of total (h, u) degree equal to the given value."""
        return self._like(
            {k: v for k, v in self.coeffs.items() if k[0] + k[1] == degree}
        )

    def h_slice(self, i: int) -> list[Fraction]:
        return [self.coeffs.get((i, j), Fraction(0)) for j in range(self.umax + 1)]


# ---------------------------------------------------------------------------
# the integral transform class


@dataclass(frozen=True)
class ITClass:
    """K-group shape of the integral transform of Lambda over the pair space.

    In K-theory it is chi(Lambda (x) V) trivial summands, minus chi(Lambda)
    copies of O(1), plus O(1) (x) Lambda^[k]; everything is pulled back from
    P x X^[k].
    """

    trivial_rank: int
    hyperplane_multiplicity: int
    taut_part: SplitBundle
    k: int

    @property
    def virtual_rank(self) -> int:
        return (
            self.trivial_rank
            + self.hyperplane_multiplicity
            + self.taut_part.rank * self.k
        )


def _require_ambient(surface: ToricSurfaceModel, v: SplitBundle) -> None:
    if not v.is_honest():
        raise UsageError("ambient space needs an honest (minus-free) V")
    if not v.has_degrees():
        raise UsageError("ambient space needs divisor degrees to certify V")
    for line in v.plus:
        if not surface.is_nef(tuple(-d for d in line.degrees)):
            raise UsageError(
                "ambient space needs nef dual summands so that "
                "dim P = chi(V*) - 1 is an honest section count"
            )


def it_class(
    surface: ToricSurfaceModel,
    v: SplitBundle | EquivariantLineBundle,
    lam: SplitBundle | EquivariantLineBundle | None,
    k: int,
) -> ITClass:
    """The integral transform of Lambda as a K-class on P x X^[k]."""
    v = as_split(v)
    lam = SplitBundle(surface) if lam is None else as_split(lam)
    _require_ambient(surface, v)
    chi_lam = chi_surface(surface, lam) if lam.plus or lam.minus else 0
    tensor = lam.tensor(v)
    chi_lam_v = chi_surface(surface, tensor) if tensor.plus or tensor.minus else 0
    return ITClass(chi_lam_v, -chi_lam, lam, k)


# ---------------------------------------------------------------------------
# the ambient localization integral


def _ambient_chunk(args) -> list[Fraction]:
    (surface, vdual, lam, terms, z, dp, hmax, umax, chi_lam, fps) = args
    total = [Fraction(0)] * (umax + 1)
    reached = False
    for fp in fps:
        cit = AmbientClass.one(hmax, umax).mul_h_binomial(-chi_lam)
        lplus, lminus = taut_weights(surface, fp, lam)
        for w in lplus:
            cit = cit.mul_trinomial(w.spec_int(*z))
        for w in lminus:
            cit = cit.div_trinomial(w.spec_int(*z))
        pclass = AmbientClass.zero(hmax, umax)
        for t in terms:
            part = AmbientClass.one(hmax, umax).scale(t.coefficient)
            for _, idx in t.factors:
                part = part * cit.component(idx)
            pclass = pclass + part
        vplus, vminus = taut_weights(surface, fp, vdual)
        for w in vplus:
            pclass = pclass.mul_trinomial(w.spec_int(*z))
        for w in vminus:
            pclass = pclass.div_trinomial(w.spec_int(*z))
        ulist = pclass.h_slice(dp)
        if any(c != 0 for c in ulist):
            reached = True
        den = 1
        for w in tangent_weights(surface, fp):
            den *= w.spec_int(*z)
        for n in range(umax + 1):
            total[n] += ulist[n] / den
    total.append(Fraction(1 if reached else 0))  # piggyback the reach flag
    return total


def virtual_integral(
    surface: ToricSurfaceModel,
    v: SplitBundle | EquivariantLineBundle,
    lam: SplitBundle | EquivariantLineBundle | None,
    k: int,
    p_expr: ChernExpr | None = None,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    cache: ResultCache | None = None,
    hdeg_extra: int = 0,
) -> Fraction:
    """Integral of P (in Chern classes of the transform) against the
    virtual class of the pair space, evaluated on P x X^[k].

    P defaults to 1, which integrates the pushed-forward virtual class
    itself (the count shape).  The expression may mix degrees.  Minus lines
    in V or Lambda are accepted: the Euler factor is formed from invertible
    total-Chern factors, with a warning that the ambient dimension is then
    read off Chern data rather than certified by section counts.
    """
    v = as_split(v)
    lam = SplitBundle(surface) if lam is None else as_split(lam)
    if p_expr is None:
        p_expr = ChernExpr.constant(1)
    bad_ids = p_expr.bundle_ids() - {"IT"}
    if bad_ids:
        raise UsageError(f"expression may only reference c_j(IT): {sorted(bad_ids)}")
    if k < 0:
        raise UsageError("negative k")
    try:
        _require_ambient(surface, v)
    except UsageError as exc:
        warnings.warn(f"{exc}; continuing with Dp = chi(V*) - 1 formally",
                      stacklevel=2)
    chi_vdual = chi_surface(surface, v.dual())
    dp = chi_vdual - 1
    if dp < 0:
        raise UsageError(f"ambient projective space is empty: chi(V*) = {chi_vdual}")
    chi_lam = chi_surface(surface, lam) if (lam.plus or lam.minus) else 0
    vdim = dp + 2 * k - v.rank * k
    degs = p_expr.degrees()
    if vdim not in degs:
        warnings.warn(
            f"virtual dimension {vdim} not among expression degrees "
            f"{sorted(degs)}; the integral vanishes by degree",
            stacklevel=2,
        )
    hmax = dp + hdeg_extra
    umax = 2 * k

    def compute() -> Fraction:
        fps = list(enumerate_fixed_points(surface, k))
        reach_seen = []

        def at(z: tuple[int, int]) -> Fraction:
            if threads <= 1 or len(fps) < 2 * threads:
                rows = [
                    _ambient_chunk(
                        (surface, v.dual(), lam, p_expr.terms, z, dp, hmax,
                         umax, chi_lam, tuple(fps))
                    )
                ]
            else:
                from concurrent.futures import ProcessPoolExecutor

                size = max(1, (len(fps) + 4 * threads - 1) // (4 * threads))
                chunks = [
                    tuple(fps[i : i + size]) for i in range(0, len(fps), size)
                ]
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    rows = list(
                        pool.map(
                            _ambient_chunk,
                            [
                                (surface, v.dual(), lam, p_expr.terms, z, dp,
                                 hmax, umax, chi_lam, c)
                                for c in chunks
                            ],
                        )
                    )
            total = [Fraction(0)] * (umax + 1)
            reached = False
            for row in rows:
                if row[-1] != 0:
                    reached = True
                for n in range(umax + 1):
                    total[n] += row[n]
            reach_seen.append(reached)
            bad = {n - umax: c for n, c in enumerate(total[:umax]) if c != 0}
            if bad:
                raise ComputationError(
                    f"negative u-powers survive the ambient sum: {bad}"
                )
            return total[umax]

        value = dual_specialized(at, seed)
        if reach_seen and not any(reach_seen):
            warnings.warn(
                f"h^{dp} is never reached by the integrand; "
                "the ambient dimension exceeds the class degree",
                stacklevel=3,
            )
        return value

    if cache is None:
        return compute()
    request = {
        "op": "virtual_integral",
        "surface": surface.name,
        "k": k,
        "V": _split_key(v),
        "Lambda": _split_key(lam),
        "expr": str(p_expr),
        "hmax": hmax,
    }
    return cache.fetch(request, compute)


def _split_key(bundle: SplitBundle) -> dict:
    return {
        "plus": [[w.to_json() for w in l.weights] for l in bundle.plus],
        "minus": [[w.to_json() for w in l.weights] for l in bundle.minus],
    }


# ---------------------------------------------------------------------------
# universal polynomials in intersection numbers

SYMBOL_NAMES = (
    "c2(V)",
    "c2(L)",
    "c1(V)^2",
    "c1(L)^2",
    "c1(V).c1(L)",
    "c1(X).c1(V)",
    "c1(X).c1(L)",
    "c1(X)^2",
)
# c2(X) is omitted: on the supported (rational toric) surfaces Noether's
# formula ties it to c1(X)^2 through chi(O) = 1, so including it only adds a
# permanently undetermined direction to every fit.


def _symbol_values(
    surface: ToricSurfaceModel, v: ChernData, lam: ChernData
) -> dict[str, int]:
    mk = tuple(-c for c in surface.canonical_degrees)  # c1(X) = -K
    inter = surface.intersect
    return {
        "c2(V)": v.c2,
        "c2(L)": lam.c2,
        "c1(V)^2": inter(v.c1, v.c1),
        "c1(L)^2": inter(lam.c1, lam.c1),
        "c1(V).c1(L)": inter(v.c1, lam.c1),
        "c1(X).c1(V)": inter(mk, v.c1),
        "c1(X).c1(L)": inter(mk, lam.c1),
        "c1(X)^2": inter(mk, mk),
    }


def _monomials(max_degree: int) -> list[tuple[str, ...]]:
    """Multisets of symbols of size <= max_degree, higher degree first."""
    out: list[tuple[str, ...]] = []

    def rec(start: int, length: int, prefix: tuple[str, ...]):
        if length == 0:
            out.append(prefix)
            return
        for i in range(start, len(SYMBOL_NAMES)):
            rec(i, length - 1, prefix + (SYMBOL_NAMES[i],))

    for deg in range(max_degree, -1, -1):
        rec(0, deg, ())
    return out


@dataclass(frozen=True)
class UniversalPolynomial:
    shape_id: str
    k: int
    rank_v: int
    rank_lam: int
    monomials: tuple[tuple[str, ...], ...]
    coefficients: tuple[Fraction, ...]
    undetermined: tuple[str, ...]

    def evaluate(self, symbols: dict[str, int]) -> Fraction:
        total = Fraction(0)
        for mono, coeff in zip(self.monomials, self.coefficients):
            if coeff == 0:
                continue
            val = coeff
            for name in mono:
                val *= symbols[name]
            total += val
        return total

    def nonzero_terms(self) -> list[tuple[str, Fraction]]:
        return [
            ("*".join(m) if m else "1", c)
            for m, c in zip(self.monomials, self.coefficients)
            if c != 0
        ]

    def to_json(self) -> dict:
        return {
            "shape_id": self.shape_id,
            "k": self.k,
            "ranks": {"V": self.rank_v, "Lambda": self.rank_lam},
            "monomials": ["*".join(m) if m else "1" for m in self.monomials],
            "coefficients": [str(c) for c in self.coefficients],
            "undetermined": list(self.undetermined),
        }


def _config_menu(
    surface: ToricSurfaceModel, rank_v: int, rank_lam: int, k: int,
    expected_dim: int,
) -> list[tuple[ChernData, ChernData]]:
    """Chern-data pairs (V, Lambda) on the fixed-expected-dimension family."""
    if surface.divisor_rank == 1:
        c1v_menu = [(t,) for t in (0, -1, 1, -2, 2, 3)]
        c1l_menu = [(t,) for t in (0, 1, -1, 2)]
    else:
        c1v_menu = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 1), (2, 1)]
        c1l_menu = [(0, 0), (1, 0), (0, 1), (1, 1)]
    c2l_menu = (0, 1, 2)
    chi_target = 1 + (rank_v - 2) * k + expected_dim
    out = []
    for idx, c1v in enumerate(c1v_menu):
        # chi(V*) = r + (c1(V)^2 - c1(X).c1(V))/2 - c2(V), solved for c2(V)
        mk = tuple(-c for c in surface.canonical_degrees)
        num = surface.intersect(c1v, c1v) - surface.intersect(mk, c1v)
        if num % 2 != 0:
            raise ComputationError("odd adjunction combination in config menu")
        c2v = rank_v + num // 2 - chi_target
        v = ChernData(rank_v, c1v, c2v)
        if rank_lam == 0:
            zero = (0,) * surface.divisor_rank
            out.append((v, ChernData(0, zero, 0)))
            continue
        c1l = c1l_menu[idx % len(c1l_menu)]
        c2l = c2l_menu[idx % len(c2l_menu)]
        out.append((v, ChernData(rank_lam, c1l, c2l)))
        alt = c1l_menu[(idx + 1) % len(c1l_menu)]
        out.append((v, ChernData(rank_lam, alt, c2l_menu[(idx + 1) % 3])))
    return out


def _solve_exact(
    rows: list[list[Fraction]], rhs: list[Fraction]
) -> tuple[list[Fraction], list[int]]:
    """Gauss-Jordan solve; free columns get 0 and are reported.

    Raises ComputationError if the system is inconsistent.
    """
    m, n = len(rows), len(rows[0]) if rows else 0
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        pv = aug[r][col]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            raise ComputationError(
                "sampled integrals are inconsistent with the monomial basis; "
                "the universality degree bound is insufficient here"
            )
    solution = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        solution[col] = aug[i][n]
    free = [c for c in range(n) if c not in pivots]
    return solution, free


def universal_poly(
    shape: str | ChernExpr = "count",
    k: int = 1,
    rank_v: int = 2,
    rank_lam: int = 0,
    expected_dim: int = 0,
    seed: int = DEFAULT_SEED,
    cache: ResultCache | None = None,
    threads: int = 1,
) -> UniversalPolynomial:
    """Interpolate the integral shape as a polynomial in intersection numbers.

    Ranks of V and Lambda and the expected dimension are fixed; sampled
    configurations run over P2, P1xP1 and Hirzebruch(1) with varying split
    degrees on the fixed-expected-dimension family.  The exact linear system
    over monomials of degree <= k in the intersection symbols is solved by
    Gauss-Jordan elimination; directions the family cannot distinguish get
    coefficient zero and are reported, and at least five held-out
    configurations (always including a Hirzebruch one) are checked against
    the direct integral, failing hard on mismatch.
    """
    if k < 0:
        raise UsageError("negative k")
    if k > 3:
        raise UsageError("universal_poly is budgeted for k <= 3")
    if rank_v < 1:
        raise UsageError("rank V >= 1 required")
    if isinstance(shape, str):
        if shape != "count":
            raise UsageError(f"unknown shape {shape!r}; use 'count' or a ChernExpr")
        p_expr = ChernExpr.constant(1)
        shape_id = "count"
    else:
        p_expr = shape
        shape_id = str(shape)

    surfaces = [make_surface("P2"), make_surface("P1xP1"), make_surface("Hirzebruch", 1)]
    configs: list[tuple[ToricSurfaceModel, ChernData, ChernData]] = []
    for surf in surfaces:
        for v, lam in _config_menu(surf, rank_v, rank_lam, k, expected_dim):
            configs.append((surf, v, lam))

    monomials = tuple(_monomials(k))
    n_heldout = max(5, len(configs) // 4)
    if len(configs) < n_heldout + 6:
        raise ComputationError("config menu too small to train and hold out")

    def data_point(surf, v, lam) -> tuple[list[Fraction], Fraction]:
        v_model = realize_split_model(surf, v)
        lam_model = (
            SplitBundle(surf) if lam.rank == 0 else realize_split_model(surf, lam)
        )
        syms = _symbol_values(surf, v, lam)
        row = []
        for mono in monomials:
            val = Fraction(1)
            for name in mono:
                val *= syms[name]
            row.append(val)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            value = virtual_integral(
                surf, v_model, lam_model, k, p_expr,
                seed=seed, threads=threads, cache=cache,
            )
        return row, value

    # hold out every fourth configuration; the tail guarantees a Hirzebruch one
    heldout_idx = set(range(3, len(configs), 4))
    while len(heldout_idx) < n_heldout:
        heldout_idx.add(len(configs) - 1 - len(heldout_idx))
    if not any(configs[i][0].family == "Hirzebruch" for i in heldout_idx):
        heldout_idx.add(len(configs) - 1)

    rows, rhs = [], []
    for i, (surf, v, lam) in enumerate(configs):
        if i in heldout_idx:
            continue
        row, value = data_point(surf, v, lam)
        rows.append(row)
        rhs.append(value)

    solution, free = _solve_exact(rows, rhs)
    undetermined = tuple(
        "*".join(monomials[c]) if monomials[c] else "1" for c in free
    )
    poly = UniversalPolynomial(
        shape_id, k, rank_v, rank_lam, monomials, tuple(solution), undetermined
    )

    # zero residual on training data (exact arithmetic, so exact equality)
    for row, value in zip(rows, rhs):
        got = sum((c * r for c, r in zip(solution, row)), Fraction(0))
        if got != value:
            raise ComputationError("training residual nonzero; solver bug")

    for i in sorted(heldout_idx):
        surf, v, lam = configs[i]
        row, value = data_point(surf, v, lam)
        got = sum((c * r for c, r in zip(solution, row)), Fraction(0))
        if got != value:
            raise ComputationError(
                f"held-out mismatch on {surf.name}, V={v}, Lambda={lam}: "
                f"polynomial gives {got}, direct integral gives {value}"
            )
    return poly
