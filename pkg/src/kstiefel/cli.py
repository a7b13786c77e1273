"""``kstiefel`` command line: JSON in on stdin, JSON out on stdout.

Exit codes: 0 success, 1 a verification came out false, 2 malformed input
(bad JSON, wrong shapes or fields, violated preconditions).  Output is
serialized with sorted keys so identical argv and stdin give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

import numpy as np

from . import algebra, matk, series, spectral, splitting, stiefel, verify
from .algebra import Field, galois_from_json, galois_to_json, scalar_from_json, scalar_to_json
from .matk import KMatrix, ToleranceConfig

__all__ = ["run", "main", "OPERATION_ROUTES", "SUBCOMMANDS"]


class InputError(ValueError):
    """Raised for anything that should exit with code 2."""


# -- payload helpers ------------------------------------------------------------


def _need(payload, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise InputError(f"payload lacks key {key!r}")
    return payload[key]


def _matrix(obj) -> KMatrix:
    return KMatrix.from_json(obj)


def _field_check(args, *fields: Field) -> None:
    if args.field is None:
        return
    want = Field.parse(args.field)
    for f in fields:
        if f is not want:
            raise InputError(f"payload is over {f.value} but --field {want.value} was given")


def _dim_check(args, name: str, value: int) -> None:
    given = getattr(args, name)
    if given is not None and given != value:
        raise InputError(f"--{name} {given} does not match the payload ({name} = {value})")


def _required(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise InputError(f"--{name} is required for this subcommand")
    return value


def _field(args) -> Field:
    return Field.parse(_required(args, "field"))


def _point(args, payload) -> stiefel.StiefelPoint:
    p = stiefel.StiefelPoint.from_json(payload)
    _field_check(args, p.field)
    _dim_check(args, "n", p.n)
    _dim_check(args, "m", p.m)
    return p


def _coords(args, payload) -> stiefel.CayleyCoords:
    c = stiefel.CayleyCoords.from_json(payload)
    _field_check(args, c.field)
    _dim_check(args, "k", c.k)
    _dim_check(args, "m", c.m)
    return c


def _hom(args, payload) -> splitting.HomDecomposition:
    d = splitting.HomDecomposition.from_json(payload)
    _field_check(args, d.Y.field, d.X.field, d.Z.field)
    _dim_check(args, "k", d.k)
    _dim_check(args, "m", d.m)
    return d


def _collapse_json(result) -> dict:
    if result is splitting.BASEPOINT:
        return result.to_json()
    if isinstance(result, spectral.PolarFactorization):
        return {"A": result.A.to_json(), "Z": result.Z.to_json()}
    return result.to_json()


# -- handlers: (args, payload, tol) -> (json object, exit code) ----------------


def _cmd_cayley(args, payload, tol):
    return stiefel.cayley(_coords(args, payload), tol).to_json(), 0


def _cmd_cayley_inv(args, payload, tol):
    return stiefel.cayley_inv(_point(args, payload), tol).to_json(), 0


def _cmd_polar(args, payload, tol):
    B = _matrix(payload)
    _field_check(args, B.field)
    pf = spectral.polar_factor(B, tol)
    return {"A": pf.A.to_json(), "Z": pf.Z.to_json()}, 0


def _cmd_eigh(args, payload, tol):
    X = _matrix(payload)
    _field_check(args, X.field)
    dec = spectral.eigh(X, tol)
    return {"Q": dec.Q.to_json(), "lambda": [float(x) for x in dec.lam]}, 0


_EXP_KINDS = {
    "general": spectral.exp_matrix,
    "selfadjoint": spectral.exp_selfadjoint,
    "log": spectral.log_posdef,
    "sqrt": spectral.sqrt_posdef,
}


def _cmd_exp(args, payload, tol):
    M = _matrix(payload)
    _field_check(args, M.field)
    fn = _EXP_KINDS[args.kind]
    out = fn(M) if fn is spectral.exp_matrix else fn(M, tol)
    return out.to_json(), 0


def _cmd_filtration_level(args, payload, tol):
    p = _point(args, payload)
    level, ambiguous = stiefel.classify_level(p, tol)
    return {"level": level, "ambiguous": ambiguous, "n": p.n, "m": p.m}, 0


def _cmd_stratum_decompose(args, payload, tol):
    p = _point(args, payload)
    k = _required(args, "k")
    out = stiefel.stratum_decompose(p, k, tol)
    if isinstance(out, stiefel.InLowerStratum):
        return {"in_lower_stratum": True, "level": out.level}, 0
    if isinstance(out, stiefel.AboveStratum):
        return {"above_stratum": True, "level": out.level}, 0
    return out.to_json(), 0


def _cmd_stratum_reconstruct(args, payload, tol):
    s = stiefel.StratumCoords.from_json(payload)
    _field_check(args, s.psi.field, s.coords.field)
    n = s.psi.rows if args.n is None else args.n
    m = s.coords.m if args.m is None else args.m
    return stiefel.stratum_reconstruct(s, n, m, tol).to_json(), 0


def _cmd_collapse_t(args, payload, tol):
    return _collapse_json(splitting.collapse_t(_hom(args, payload), tol)), 0


def _cmd_collapse_cflat(args, payload, tol):
    return _collapse_json(splitting.collapse_cflat(_point(args, payload), tol)), 0


def _cmd_composite_f(args, payload, tol):
    d = _hom(args, payload)
    return splitting.composite_F(d.Y, d.X, d.Z, tol).to_json(), 0


def _cmd_hom(args, payload, tol):
    if args.op == "decompose":
        M = _matrix(payload)
        _field_check(args, M.field)
        return splitting.hom_decompose(M).to_json(), 0
    return splitting.hom_assemble(_hom(args, payload)).to_json(), 0


def _cmd_jacobian_check(args, payload, tol):
    field, k, m = _field(args), _required(args, "k"), _required(args, "m")
    dev = splitting.jacobian_origin_check(field, k, m, args.h)
    passed = dev < 5e-4
    return {"field": field.value, "k": k, "m": m, "h": args.h, "max_deviation": dev, "passed": passed}, 0 if passed else 1


def _cmd_series(args, payload, tol):
    field, N = _field(args), _required(args, "degree")
    wedge = series.wedge_poincare(field, N)
    product = series.product_poincare(field, N)
    equal, first = series.series_compare(field, N)
    report = {
        "field": field.value,
        "N": N,
        "equal": equal,
        "first_mismatch": first,
        "coefficients": {"wedge": list(wedge.coeffs), "product": list(product.coeffs)},
    }
    return report, 0 if equal else 1


def _cmd_rep_dims(args, payload, tol):
    r = series.rep_dims(_field(args), _required(args, "k"), args.m or 0)
    return {"field": r.field.value, "k": r.k, "m": r.m, "dim_nu": r.dim_nu, "dim_ad": r.dim_ad, "dim_sa": r.dim_sa}, 0


def _cmd_thom_table(args, payload, tol):
    table = series.thom_dimension_table(_field(args), args.m or 0, _required(args, "k"))
    return {"table": [list(row) for row in table]}, 0


def _cmd_verify(args, payload, tol):
    fields = [args.field] if args.field else ["R", "C", "H"]
    if args.trials < 1:
        raise InputError("--trials must be positive")
    reports = verify.run_all(fields, args.trials, args.seed)
    ok = all(r.passed for r in reports)
    return {"seed": args.seed, "trials": args.trials, "passed": ok, "reports": [r.to_json() for r in reports]}, 0 if ok else 1


def _cmd_zeta(args, payload, tol):
    zm = stiefel.zeta(_field(args), _required(args, "k"))
    out = {"matrix": zm.matrix.to_json()}
    if payload is not None:
        x = _matrix(payload)
        _field_check(args, x.field)
        out["image"] = zm(x).to_json()
    return out, 0


def _cmd_galois_act(args, payload, tol):
    t = galois_from_json(_need(payload, "galois"))
    p = _point(args, _need(payload, "point"))
    return stiefel.galois_act(t, p).to_json(), 0


def _cmd_conjugate_embedding(args, payload, tol):
    psi = _matrix(_need(payload, "psi"))
    p = _point(args, _need(payload, "point"))
    return stiefel.conjugate_embedding(psi, p, tol).to_json(), 0


def _cmd_galois(args, payload, tol):
    s = galois_from_json(_need(payload, "s"))
    _field_check(args, s.field)
    if args.op == "inverse":
        return galois_to_json(algebra.galois_inverse(s)), 0
    if args.op == "apply":
        a = scalar_from_json(_need(payload, "a"), s.field)
        return {"value": scalar_to_json(algebra.galois_apply(s, a))}, 0
    t = galois_from_json(_need(payload, "t"))
    if args.op == "compose":
        return galois_to_json(algebra.galois_compose(s, t)), 0
    return {"equal": algebra.galois_equal(s, t)}, 0


def _cmd_scalar(args, payload, tol):
    field = Field.parse(_need(payload, "field"))
    _field_check(args, field)
    a = scalar_from_json(_need(payload, "a"), field)
    if args.op == "conj":
        return {"value": scalar_to_json(algebra.conjugate(a))}, 0
    b = scalar_from_json(_need(payload, "b"), field)
    return {"value": scalar_to_json(algebra.scalar_mul(a, b))}, 0


def _two(payload):
    A, B = _matrix(_need(payload, "A")), _matrix(_need(payload, "B"))
    return A, B


def _cmd_matrix(args, payload, tol):
    op = args.op
    if op == "identity":
        return matk.identity(_required(args, "n"), _field(args)).to_json(), 0
    if op in ("matmul", "add", "inner"):
        A, B = _two(payload)
        _field_check(args, A.field, B.field)
        if op == "inner":
            return {"value": scalar_to_json(matk.inner_product(A, B))}, 0
        return (matk.matmul(A, B) if op == "matmul" else matk.add(A, B)).to_json(), 0
    if op == "real-scale":
        c = _need(payload, "c")
        if not isinstance(c, (int, float)) or isinstance(c, bool):
            raise InputError("'c' must be a real number")
        A = _matrix(_need(payload, "A"))
        _field_check(args, A.field)
        return matk.real_scale(float(c), A).to_json(), 0
    M = _matrix(payload)
    _field_check(args, M.field)
    if op == "adjoint":
        return matk.adjoint(M).to_json(), 0
    if op == "inverse":
        return matk.gauss_inverse(M, tol).to_json(), 0
    if op == "rank":
        return {"rank": matk.rank(M, tol)}, 0
    if op == "orthobasis":
        return matk.image_orthobasis(M, tol).to_json(), 0
    if op == "is-isometry":
        return {"is_isometry": matk.is_isometry(M, tol), "residual": matk.isometry_residual(M)}, 0
    X, Z = matk.skew_self_split(M)
    return {"X": X.to_json(), "Z": Z.to_json()}, 0


_RANDOM_KINDS = {
    "matrix": lambda rng, a, f: matk.random_matrix(rng, _required(a, "n"), _required(a, "m"), f),
    "isometry": lambda rng, a, f: matk.random_isometry(rng, _required(a, "n"), _required(a, "k"), f),
    "skew": lambda rng, a, f: matk.random_skew(rng, _required(a, "k"), f),
    "selfadjoint": lambda rng, a, f: matk.random_selfadjoint(rng, _required(a, "k"), f),
}


def _cmd_random(args, payload, tol):
    rng = np.random.default_rng(args.seed)
    return _RANDOM_KINDS[args.kind](rng, args, _field(args)).to_json(), 0


# name -> (handler, stdin mode none|optional|required, help)
SUBCOMMANDS: dict[str, tuple[Callable, str, str]] = {
    "cayley": (_cmd_cayley, "required", "Cayley coordinates {Y, X} -> Stiefel point"),
    "cayley-inv": (_cmd_cayley_inv, "required", "top-stratum Stiefel point -> {Y, X}"),
    "polar": (_cmd_polar, "required", "injective matrix B -> {A, Z} with B = A exp(-Z)"),
    "eigh": (_cmd_eigh, "required", "self-adjoint matrix -> {Q, lambda}"),
    "exp": (_cmd_exp, "required", "matrix exponential (or --kind selfadjoint/log/sqrt)"),
    "filtration-level": (_cmd_filtration_level, "required", "Stiefel point -> {level, ambiguous}"),
    "stratum-decompose": (_cmd_stratum_decompose, "required", "Stiefel point and --k -> {psi, Y, X}"),
    "stratum-reconstruct": (_cmd_stratum_reconstruct, "required", "{psi, Y, X} -> Stiefel point"),
    "collapse-t": (_cmd_collapse_t, "required", "{Y, X, Z} -> {A, Z} or the basepoint"),
    "collapse-cflat": (_cmd_collapse_cflat, "required", "Stiefel point -> {Y, X} or the basepoint"),
    "composite-f": (_cmd_composite_f, "required", "{Y, X, Z} -> cayley(Y, X) exp(-Z)"),
    "hom": (_cmd_hom, "required", "--op decompose: M -> {Y, X, Z}; --op assemble: inverse"),
    "jacobian-check": (_cmd_jacobian_check, "none", "max |J - I| of the composite at the origin"),
    "series": (_cmd_series, "none", "compare wedge and product Poincare series"),
    "rep-dims": (_cmd_rep_dims, "none", "real dimensions of nu, ad and sa"),
    "thom-table": (_cmd_thom_table, "none", "(k, dim(nu + ad)) for k = 0..--k"),
    "verify": (_cmd_verify, "none", "run the randomized verification suites"),
    "zeta": (_cmd_zeta, "optional", "matrix of zeta (and its value on a column read from stdin)"),
    "galois-act": (_cmd_galois_act, "required", "{galois, point} -> twisted point"),
    "conjugate-embedding": (_cmd_conjugate_embedding, "required", "{psi, point} -> extended point"),
    "galois": (_cmd_galois, "required", "compose/inverse/equal/apply on Galois elements"),
    "scalar": (_cmd_scalar, "required", "mul/conj on scalars"),
    "matrix": (_cmd_matrix, "optional", "basic K-matrix operations"),
    "random": (_cmd_random, "none", "seeded random matrices"),
}

_OPS = {
    "hom": ("decompose", "assemble"),
    "galois": ("compose", "inverse", "equal", "apply"),
    "scalar": ("mul", "conj"),
    "matrix": (
        "matmul", "add", "real-scale", "identity", "adjoint", "inner", "inverse",
        "rank", "orthobasis", "is-isometry", "skew-self-split",
    ),
}

# library operation -> (subcommand, extra argv)
OPERATION_ROUTES: dict[str, tuple[str, tuple[str, ...]]] = {
    "scalar_mul": ("scalar", ("--op", "mul")),
    "conjugate": ("scalar", ("--op", "conj")),
    "galois_apply": ("galois", ("--op", "apply")),
    "galois_compose": ("galois", ("--op", "compose")),
    "galois_inverse": ("galois", ("--op", "inverse")),
    "galois_equal": ("galois", ("--op", "equal")),
    "matmul": ("matrix", ("--op", "matmul")),
    "add": ("matrix", ("--op", "add")),
    "real_scale": ("matrix", ("--op", "real-scale")),
    "identity": ("matrix", ("--op", "identity")),
    "adjoint": ("matrix", ("--op", "adjoint")),
    "inner_product": ("matrix", ("--op", "inner")),
    "gauss_inverse": ("matrix", ("--op", "inverse")),
    "rank": ("matrix", ("--op", "rank")),
    "image_orthobasis": ("matrix", ("--op", "orthobasis")),
    "is_isometry": ("matrix", ("--op", "is-isometry")),
    "skew_self_split": ("matrix", ("--op", "skew-self-split")),
    "random_matrix": ("random", ("--kind", "matrix")),
    "random_isometry": ("random", ("--kind", "isometry")),
    "random_skew": ("random", ("--kind", "skew")),
    "random_selfadjoint": ("random", ("--kind", "selfadjoint")),
    "eigh": ("eigh", ()),
    "exp_matrix": ("exp", ()),
    "exp_selfadjoint": ("exp", ("--kind", "selfadjoint")),
    "log_posdef": ("exp", ("--kind", "log")),
    "sqrt_posdef": ("exp", ("--kind", "sqrt")),
    "polar_factor": ("polar", ()),
    "filtration_level": ("filtration-level", ()),
    "cayley": ("cayley", ()),
    "cayley_inv": ("cayley-inv", ()),
    "conjugate_embedding": ("conjugate-embedding", ()),
    "galois_act": ("galois-act", ()),
    "zeta": ("zeta", ()),
    "stratum_decompose": ("stratum-decompose", ()),
    "stratum_reconstruct": ("stratum-reconstruct", ()),
    "hom_decompose": ("hom", ("--op", "decompose")),
    "hom_assemble": ("hom", ("--op", "assemble")),
    "collapse_t": ("collapse-t", ()),
    "collapse_cflat": ("collapse-cflat", ()),
    "composite_F": ("composite-f", ()),
    "jacobian_origin_check": ("jacobian-check", ()),
    "rep_dims": ("rep-dims", ()),
    "wedge_poincare": ("series", ()),
    "product_poincare": ("series", ()),
    "series_compare": ("series", ()),
    "thom_dimension_table": ("thom-table", ()),
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kstiefel", description="Stiefel-manifold maps over R, C and H.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--field", choices=["R", "C", "H"], default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-8)
        if name == "series":
            p.add_argument("--degree", type=int, default=None)
        if name == "verify":
            p.add_argument("--trials", type=int, default=500)
        if name == "jacobian-check":
            p.add_argument("--h", type=float, default=1e-4)
        if name in _OPS:
            p.add_argument("--op", choices=_OPS[name], required=True)
        if name == "exp":
            p.add_argument("--kind", choices=sorted(_EXP_KINDS), default="general")
        if name == "random":
            p.add_argument("--kind", choices=sorted(_RANDOM_KINDS), required=True)
    return parser


def _read_payload(stdin, mode: str):
    if mode == "none":
        return None
    text = stdin.read()
    if not text.strip():
        if mode == "optional":
            return None
        raise InputError("this subcommand reads a JSON payload from standard input")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON on standard input: {exc}") from None


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    """Execute one subcommand; returns the exit code."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed its diagnostic
        return 0 if exc.code == 0 else 2
    handler, mode, _ = SUBCOMMANDS[args.command]
    try:
        tol = ToleranceConfig(eps_iso=args.tol, eps_rank=args.tol)
        payload = _read_payload(stdin, mode)
        obj, code = handler(args, payload, tol)
    except (InputError, ValueError, KeyError, TypeError, np.linalg.LinAlgError) as exc:
        stderr.write(f"kstiefel {args.command}: {type(exc).__name__}: {exc}\n")
        return 2
    stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    return code


def main() -> None:
    sys.exit(run())
