"""Command-line interface.

Exit codes: 0 success, 1 a mathematical negative (invalid table, not
isomorphic, lift infeasible), 2 usage, input or budget errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import bounds as bnd
from .algebra import (
    BasedAlgebra,
    StructureTable,
    discriminant,
    make_bullet,
    make_rank8_example,
    make_split,
    make_truncated_poly,
    violations,
)
from .deform import lift_obstruction, make_pi_example, singularity_report, split_table, tangent_dim
from .enumeration import census, classify, records_csv
from .exactla import BudgetExceeded, InvertibleMatrix
from .localstruct import CanonicalData, GoodBasisError, InconsistentData, NotLocalError, extract_canonical, reconstruct
from .ringlift import enumerate_rings, to_fp_algebra
from .symmetry import act, automorphisms, isomorphic


class UsageError(Exception):
    pass


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _read_table(path: str) -> StructureTable:
    try:
        return StructureTable.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed algebra file {path}: {exc}") from exc


def _read_algebra(path: str) -> BasedAlgebra:
    t = _read_table(path)
    bad = violations(t)
    if bad:
        raise UsageError(f"{path} is not a valid based algebra ({len(bad)} violated identities)")
    return BasedAlgebra(t)


def _named_point(name: str, n: int | None, q: int | None) -> BasedAlgebra:
    builders = {"bullet": make_bullet, "split": make_split, "trunc": make_truncated_poly}
    if name == "rank8":
        return make_rank8_example(q or 2)
    if name in builders:
        if n is None or q is None:
            raise UsageError(f"--point {name} needs --n and --q")
        return builders[name](n, q)
    return _read_algebra(name)


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- subcommands ------------------------------------------------------------------


def cmd_validate(args) -> int:
    t = _read_table(args.file)
    bad = violations(t)
    if not bad:
        _emit("valid")
        return 0
    _emit("invalid")
    for v in bad:
        _emit(str(v))
    return 1


def cmd_disc(args) -> int:
    A = _read_algebra(args.file)
    delta = discriminant(A)
    if args.format == "json":
        _emit(_json({"discriminant": delta, "etale": delta != 0}))
    else:
        _emit(f"discriminant {delta}\netale {'yes' if delta else 'no'}")
    return 0


def cmd_act(args) -> int:
    A = _read_algebra(args.file)
    try:
        M = InvertibleMatrix(A.n, A.modulus, np.asarray(_read_json(args.matrix), dtype=np.int64))
    except ValueError as exc:
        raise UsageError(f"bad matrix: {exc}") from exc
    _emit(_json(act(M, A).to_json()))
    return 0


def cmd_iso(args) -> int:
    A, B = _read_algebra(args.a), _read_algebra(args.b)
    M = isomorphic(A, B)
    if M is None:
        _emit("not isomorphic")
        return 1
    _emit(_json({"isomorphic": True, "matrix": M.entries.tolist()}))
    return 0


def cmd_aut(args) -> int:
    A = _read_algebra(args.file)
    auts = automorphisms(A)
    if args.format == "json":
        _emit(_json({"order": len(auts), "matrices": [m.entries.tolist() for m in auts]}))
    else:
        _emit(f"order {len(auts)}")
    return 0


def cmd_classify(args) -> int:
    records = classify(args.n, args.q, full_sweep=args.full_sweep, seed_order=args.seed_order)
    if args.format == "json":
        _emit(
            _json(
                [
                    {
                        "class_id": r.class_id,
                        "representative": r.representative.to_json(),
                        "aut_order": r.aut_order,
                        "orbit_size": r.orbit_size,
                        "delta_nonzero": r.delta_nonzero,
                        "is_local": r.is_local,
                        "filtration": list(r.filtration),
                        "idempotents": r.idempotents,
                    }
                    for r in records
                ]
            )
        )
    else:
        _emit(records_csv(records))
    return 0


CENSUS_HEADER = ["n", "q", "valid_tables", "h_order", "classes", "etale_classes", "local_classes"]


def cmd_census(args) -> int:
    c = census(args.n, args.q, full_sweep=args.full_sweep, seed_order=args.seed_order)
    row = [c.n, c.q, c.valid_tables, c.h_order, c.class_count, c.etale_class_count, c.local_class_count]
    if args.format == "json":
        _emit(_json(dict(zip(CENSUS_HEADER, row))))
    else:
        _emit(_csv([row], CENSUS_HEADER))
    return 0


def cmd_tangent(args) -> int:
    A = _named_point(args.point, args.n, args.q)
    if args.report:
        r = singularity_report(A, args.space)
        _emit(_json(r.__dict__))
    else:
        _emit(str(tangent_dim(A, args.space)))
    return 0


def cmd_lift_check(args) -> int:
    t = make_pi_example(args.p) if args.point == "pi" else split_table(args.n, args.p * args.p)
    r = lift_obstruction(t)
    if args.format == "json":
        obj = {"feasible": r.feasible}
        if r.feasible:
            obj["lift"] = r.lifted.to_json()
        else:
            obj["certificate"] = r.certificate.tolist()
        _emit(_json(obj))
    else:
        _emit("feasible" if r.feasible else "infeasible")
    return 0 if r.feasible else 1


BOUNDS_HEADER = ["n", "branch", "lower_bound", "optimal_d", "etale_floor", "max_of"]


def cmd_bounds(args) -> int:
    rows = []
    for n in range(1, args.n_max + 1):
        rep = bnd.lower_bound(n)
        rows.append([n, rep.branch, _fraction(rep.lower_bound), rep.argmax_d, n * n, _fraction(max(rep.lower_bound, Fraction(n * n)))])
    _emit(_csv(rows, BOUNDS_HEADER))
    return 0


def cmd_canonical(args) -> int:
    if args.reconstruct:
        try:
            data = CanonicalData.from_json(_read_json(args.file))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed canonical data: {exc}") from exc
        try:
            _emit(_json(reconstruct(data).to_json()))
        except InconsistentData as exc:
            _emit(f"inconsistent: {exc}")
            return 1
        return 0
    A = _read_algebra(args.file)
    try:
        _emit(_json(extract_canonical(A).to_json()))
    except NotLocalError as exc:
        _emit(f"not local: {exc}")
        return 1
    return 0


def cmd_rings(args) -> int:
    rings = enumerate_rings(args.p, args.n)
    if args.format == "json":
        _emit(_json([R.to_json() for R in rings]))
        return 0
    rows = []
    for k, R in enumerate(rings):
        _, A = to_fp_algebra(R)
        rows.append([args.p, args.n, k, "-".join(map(str, R.a)), _json(A.c.tolist()), _json(A.d.tolist())])
    _emit(_csv(rows, ["p", "n", "ring_id", "a", "c", "d"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="algmod", description="Based commutative algebras over small prime fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    def fmt(p, default="csv"):
        p.add_argument("--format", choices=["json", "csv"], default=default)

    p = sub.add_parser("validate", help="check the defining identities of a table")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("disc", help="discriminant and etale test")
    p.add_argument("file")
    fmt(p)
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("act", help="apply a basis change")
    p.add_argument("file")
    p.add_argument("--matrix", required=True, help="JSON n x n matrix")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("iso", help="isomorphism witness")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("aut", help="automorphism group")
    p.add_argument("file")
    fmt(p)
    p.set_defaults(func=cmd_aut)

    for name, func in [("classify", cmd_classify), ("census", cmd_census)]:
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--full-sweep", action="store_true", help="unpruned sweep instead of the search")
        p.add_argument("--seed-order", type=int, default=0, choices=[0, 1], help="search cell order")
        fmt(p)
        p.set_defaults(func=func)

    p = sub.add_parser("tangent", help="tangent space dimension")
    p.add_argument("--point", required=True, help="bullet, split, trunc, rank8 or a JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--space", choices=["b", "b1"], default="b1")
    p.add_argument("--report", action="store_true", help="print the singularity report")
    p.set_defaults(func=cmd_tangent)

    p = sub.add_parser("lift-check", help="lift a table from Z/p^2 to Z/p^3")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--point", choices=["pi", "split"], default="pi")
    p.add_argument("--n", type=int, default=4, help="rank of the split table")
    fmt(p)
    p.set_defaults(func=cmd_lift_check)

    p = sub.add_parser("bounds", help="lower-bound table")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("canonical", help="extract or reconstruct canonical data")
    p.add_argument("file")
    p.add_argument("--reconstruct", action="store_true")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("rings", help="rings of order p^n")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    fmt(p)
    p.set_defaults(func=cmd_rings)
    return ap


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (GoodBasisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
