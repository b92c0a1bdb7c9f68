"""Command-line interface.

One command per process.  Every report echoes the engine version, the
resolved seed and the raw inputs, so that a stored report identifies its
computation completely; for a fixed (command, seed, engine version) the
output is byte-identical across runs.  Values are printed as exact rational
strings.

Exit codes: 0 success, 1 computation failure (including a failed
validation or a conjecture mismatch), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from .cache import ENGINE_VERSION, default_cache
from .errors import ComputationError, EngineError, ParseError, UsageError
from .hilb import count_fixed_points, enumerate_fixed_points
from .integrals import (
    ChernExpr,
    Term,
    c2_for_expected_dim_zero,
    chi_theta,
    expected_dim_pairs,
    quot_count,
    validate_construction,
    verify_conjecture,
)
from .tautological import universal_poly, virtual_integral
from .toric import (
    ChernData,
    SplitBundle,
    chi_surface,
    make_surface,
    split_bundle,
    surface_to_json,
)
from .symbolic import DEFAULT_SEED

__all__ = ["main", "parse_chern_expr"]


# ---------------------------------------------------------------------------
# Chern-expression grammar: sum of terms, term = factors joined by "*",
# factor = rational number or c<j>(<identifier>); whitespace-insensitive.


def parse_chern_expr(text: str) -> ChernExpr:
    """Parse an expression like "3*c1(IT)*c1(IT) - 1/2*c2(IT)".

    Errors carry a 1-based column number.
    """
    pos = 0
    n = len(text)

    def skip() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_number() -> Fraction:
        nonlocal pos
        start = pos
        while pos < n and text[pos].isdigit():
            pos += 1
        value = int(text[start:pos])
        if pos < n and text[pos] == "/":
            pos += 1
            dstart = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            if dstart == pos:
                raise ParseError("expected digits after '/'", pos + 1)
            den = int(text[dstart:pos])
            if den == 0:
                raise ParseError("zero denominator", dstart + 1)
            return Fraction(value, den)
        return Fraction(value)

    def parse_factor():
        nonlocal pos
        skip()
        if pos >= n:
            raise ParseError("expected a factor", pos + 1)
        ch = text[pos]
        if ch.isdigit():
            return parse_number()
        if ch == "c":
            pos += 1
            istart = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            if istart == pos:
                raise ParseError("expected a Chern index after 'c'", istart + 1)
            index = int(text[istart:pos])
            if pos >= n or text[pos] != "(":
                raise ParseError("expected '(' after the Chern index", pos + 1)
            paren = pos
            pos += 1
            idstart = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            if idstart == pos or pos >= n or text[pos] != ")":
                raise ParseError("unclosed Chern factor", paren + 1)
            bundle_id = text[idstart:pos]
            pos += 1
            return (bundle_id, index)
        raise ParseError(f"unexpected character {ch!r}", pos + 1)

    def parse_term(sign: int) -> Term:
        nonlocal pos
        coeff = Fraction(sign)
        factors: list[tuple[str, int]] = []
        while True:
            f = parse_factor()
            if isinstance(f, Fraction):
                coeff *= f
            else:
                bid, index = f
                if index > 0:
                    factors.append((bid, index))
            skip()
            if pos < n and text[pos] == "*":
                pos += 1
                continue
            return Term(coeff, tuple(sorted(factors)))

    terms: list[Term] = []
    skip()
    sign = 1
    if pos < n and text[pos] in "+-":
        sign = -1 if text[pos] == "-" else 1
        pos += 1
    while True:
        terms.append(parse_term(sign))
        skip()
        if pos >= n:
            break
        if text[pos] == "+":
            sign = 1
        elif text[pos] == "-":
            sign = -1
        else:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        pos += 1
    return ChernExpr(tuple(terms)).collect()


# ---------------------------------------------------------------------------
# argument helpers


def _surface_from_args(args) -> "ToricSurfaceModel":
    return make_surface(args.surface, getattr(args, "a", None))


def _parse_degrees(text: str, surface) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    if not text or not text.strip():
        return out
    for token in text.split(","):
        token = token.strip()
        try:
            if ":" in token:
                deg = tuple(int(x) for x in token.split(":"))
            else:
                deg = (int(token),)
        except ValueError:
            raise UsageError(f"bad degree token {token!r}") from None
        if len(deg) != surface.divisor_rank:
            raise UsageError(
                f"degree {token!r} has {len(deg)} components; "
                f"{surface.name} needs {surface.divisor_rank}"
            )
        out.append(deg)
    return out


def _split_from_args(surface, plus_text: str, minus_text: str) -> SplitBundle:
    plus = _parse_degrees(plus_text, surface)
    minus = _parse_degrees(minus_text or "", surface)
    if not plus and not minus:
        return SplitBundle(surface)
    return split_bundle(surface, plus, minus)


def _resolve_seed(raw: str) -> int:
    if raw == "random":
        return random.SystemRandom().randrange(1, 2**31)
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"--seed wants an integer or 'random', got {raw!r}") from None


def _c1_from_text(text: str, surface) -> tuple[int, ...]:
    degs = _parse_degrees(text, surface)
    if len(degs) != 1:
        raise UsageError(f"--c1 wants a single degree, got {text!r}")
    return degs[0]


def _report(args, seed: int | None, payload: dict) -> dict:
    skip = {"func", "format", "command"}
    inputs = {k: v for k, v in vars(args).items() if k not in skip}
    out = {
        "command": args.command,
        "engine_version": ENGINE_VERSION,
        "seed": seed,
        "inputs": inputs,
    }
    out.update(payload)
    return out


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (report dict, exit code)


def _cmd_surface_info(args):
    surface = _surface_from_args(args)
    return _report(args, None, {"surface": surface_to_json(surface)}), 0


def _cmd_fixed_points(args):
    surface = _surface_from_args(args)
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    payload = {"count": count_fixed_points(surface, args.k)}
    if args.list:
        payload["points"] = [
            fp.to_json() for fp in enumerate_fixed_points(surface, args.k)
        ]
    return _report(args, None, payload), 0


def _cmd_chi(args):
    surface = _surface_from_args(args)
    seed = _resolve_seed(args.seed)
    bundle = _split_from_args(surface, args.bundle, args.minus)
    value = chi_surface(surface, bundle, seed=seed)
    return _report(args, seed, {"value": str(value)}), 0


def _cmd_expected_dim(args):
    surface = _surface_from_args(args)
    if args.vstar is not None:
        v = _split_from_args(surface, args.vstar, args.vstar_minus).dual()
        cd = v.chern_data()
    elif args.r is not None and args.c1 is not None and args.c2 is not None:
        cd = ChernData(args.r, _c1_from_text(args.c1, surface), args.c2)
    else:
        raise UsageError("give either --vstar or all of --r, --c1, --c2 (for V)")
    value = expected_dim_pairs(surface, cd, args.k)
    return _report(args, None, {"value": str(value)}), 0


def _cmd_c2_for_zero(args):
    value = c2_for_expected_dim_zero(args.r, args.d, args.k)
    return _report(args, None, {"value": str(value)}), 0


def _cmd_validate_construction(args):
    rep = validate_construction(args.r, args.d, args.w)
    payload = {
        "ok": rep.ok,
        "lower": rep.lower,
        "upper": rep.upper,
        "violations": list(rep.violations),
    }
    return _report(args, None, payload), 0 if rep.ok else 1


def _cmd_quot_count(args):
    surface = _surface_from_args(args)
    seed = _resolve_seed(args.seed)
    vstar = _split_from_args(surface, args.vstar, args.vstar_minus)
    if vstar.rank < 1:
        raise UsageError("--vstar must describe a bundle of rank >= 1")
    value = quot_count(
        surface,
        vstar.dual(),
        args.k,
        seed=seed,
        threads=args.threads,
        cache=default_cache(enabled=not args.no_cache),
    )
    return _report(args, seed, {"value": str(value)}), 0


def _cmd_chi_theta(args):
    surface = _surface_from_args(args)
    seed = _resolve_seed(args.seed)
    e = _split_from_args(surface, args.e, args.e_minus)
    value = chi_theta(
        surface,
        e,
        args.k,
        seed=seed,
        threads=args.threads,
        cache=default_cache(enabled=not args.no_cache),
        order=args.order,
    )
    return _report(args, seed, {"value": str(value)}), 0


def _cmd_verify_conjecture(args):
    surface = _surface_from_args(args)
    seed = _resolve_seed(args.seed)
    rows = verify_conjecture(
        surface,
        args.r,
        args.d,
        args.kmax,
        seed=seed,
        threads=args.threads,
        cache=default_cache(enabled=not args.no_cache),
    )
    ok = all(row.equal is True for row in rows)
    payload = {"rows": [row.to_json() for row in rows], "all_equal": ok}
    return _report(args, seed, payload), 0 if ok else 1


def _cmd_taut_integral(args):
    surface = _surface_from_args(args)
    seed = _resolve_seed(args.seed)
    vstar = _split_from_args(surface, args.vstar, args.vstar_minus)
    if vstar.rank < 1:
        raise UsageError("--vstar must describe a bundle of rank >= 1")
    lam = _split_from_args(surface, args.lam or "", args.lam_minus)
    expr = parse_chern_expr(args.expr) if args.expr else None
    value = virtual_integral(
        surface,
        vstar.dual(),
        lam,
        args.k,
        expr,
        seed=seed,
        threads=args.threads,
        cache=default_cache(enabled=not args.no_cache),
        hdeg_extra=args.hdeg_extra,
    )
    return _report(args, seed, {"value": str(value)}), 0


def _cmd_universal_poly(args):
    seed = _resolve_seed(args.seed)
    if args.expr:
        shape = parse_chern_expr(args.expr)
    else:
        shape = args.shape
    poly = universal_poly(
        shape,
        k=args.k,
        rank_v=args.rank_v,
        rank_lam=args.rank_lam,
        expected_dim=args.expected_dim,
        seed=seed,
        cache=default_cache(enabled=not args.no_cache),
        threads=args.threads,
    )
    return _report(args, seed, {"polynomial": poly.to_json()}), 0


# ---------------------------------------------------------------------------
# parser assembly


def _add_surface(p, default=None):
    p.add_argument(
        "--surface",
        required=default is None,
        default=default,
        choices=("P2", "P1xP1", "Hirzebruch"),
    )
    p.add_argument("--a", type=int, default=None,
                   help="Hirzebruch parameter (required for that family)")


def _add_compute(p):
    p.add_argument("--seed", default=str(DEFAULT_SEED),
                   help="integer, or 'random' for a fresh draw")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-cache", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbloc",
        description="Exact equivariant integrals on Hilbert schemes of "
        "points on toric surfaces.",
    )
    parser.add_argument("--version", action="version", version=ENGINE_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=handler)
        p.add_argument("--format", choices=("json", "csv", "plain"),
                       default="json")
        return p

    p = cmd("surface-info", _cmd_surface_info, "describe a surface model")
    _add_surface(p)

    p = cmd("fixed-points", _cmd_fixed_points,
            "count (and optionally list) torus-fixed points of X^[k]")
    _add_surface(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--list", action="store_true")

    p = cmd("chi", _cmd_chi, "chi of a split bundle on the surface")
    _add_surface(p)
    p.add_argument("--bundle", required=True,
                   help="comma-separated degrees; a:b pairs on 2D lattices")
    p.add_argument("--minus", default="",
                   help="minus-line degrees for virtual splits")
    _add_compute(p)

    p = cmd("expected-dim", _cmd_expected_dim,
            "expected dimension of the pair space")
    _add_surface(p)
    p.add_argument("--vstar", default=None, help="degrees of V*")
    p.add_argument("--vstar-minus", default="")
    p.add_argument("--r", type=int, default=None, help="rank of V")
    p.add_argument("--c1", default=None, help="c1 of V")
    p.add_argument("--c2", type=int, default=None, help="c2 of V")
    p.add_argument("--k", type=int, required=True)

    p = cmd("c2-for-zero", _cmd_c2_for_zero,
            "c2(V*) forcing expected dimension zero on P2")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = cmd("validate-construction", _cmd_validate_construction,
            "check the (r, d, w) bounds for good split constructions")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--w", type=int, required=True)

    p = cmd("quot-count", _cmd_quot_count,
            "integral of c_2k of the tautological bundle of V*")
    _add_surface(p)
    p.add_argument("--vstar", required=True, help="degrees of V*")
    p.add_argument("--vstar-minus", default="")
    p.add_argument("--k", type=int, required=True)
    _add_compute(p)

    p = cmd("chi-theta", _cmd_chi_theta,
            "chi of the determinant line bundle on X^[k]")
    _add_surface(p)
    p.add_argument("--e", default="", help="degrees of e (empty for O)")
    p.add_argument("--e-minus", default="")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--order", type=int, default=None,
                   help="truncation override (>= 2k)")
    _add_compute(p)

    p = cmd("verify-conjecture", _cmd_verify_conjecture,
            "quot vs chi on the expected-dimension-zero family")
    _add_surface(p, default="P2")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    _add_compute(p)

    p = cmd("taut-integral", _cmd_taut_integral,
            "virtual integral over the ambient P x X^[k]")
    _add_surface(p)
    p.add_argument("--vstar", required=True, help="degrees of V*")
    p.add_argument("--vstar-minus", default="")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="degrees of the twist Lambda")
    p.add_argument("--lambda-minus", dest="lam_minus", default="")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--expr", default=None,
                   help="P in c_j(IT); defaults to 1 (the count shape)")
    p.add_argument("--hdeg-extra", type=int, default=0,
                   help="extra h-truncation beyond Dp (results must agree)")
    _add_compute(p)

    p = cmd("universal-poly", _cmd_universal_poly,
            "interpolate an integral shape in intersection numbers")
    p.add_argument("--shape", default="count")
    p.add_argument("--expr", default=None,
                   help="explicit P in c_j(IT), overriding --shape")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--rank-v", type=int, default=2)
    p.add_argument("--rank-lam", type=int, default=0)
    p.add_argument("--expected-dim", type=int, default=0)
    _add_compute(p)

    return parser


# ---------------------------------------------------------------------------
# output


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2))
        return
    envelope = ("command", "engine_version", "seed", "inputs")
    payload = {k: v for k, v in report.items() if k not in envelope}
    if fmt == "csv":
        writer = csv.writer(sys.stdout)
        rows = payload.get("rows")
        if isinstance(rows, list) and rows and isinstance(rows[0], dict):
            header = list(rows[0].keys())
            writer.writerow(header)
            for row in rows:
                writer.writerow([row.get(h) for h in header])
        else:
            keys = list(payload.keys())
            writer.writerow(keys)
            writer.writerow([json.dumps(payload[k]) if isinstance(payload[k], (dict, list)) else payload[k] for k in keys])
        return
    for key, value in payload.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            for row in value:
                print(f"{key}: " + ", ".join(f"{k}={v}" for k, v in row.items()))
        elif isinstance(value, (dict, list)):
            print(f"{key} = {json.dumps(value)}")
        else:
            print(f"{key} = {value}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ComputationError, EngineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(report, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
