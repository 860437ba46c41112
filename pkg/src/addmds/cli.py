"""Command-line front end.

Exit codes: 0 = success and the checked property holds; 1 = the input is
well-formed but the property fails (not MDS, not self-orthogonal, not
linear); 2 = unreadable input, from a malformed file or bad arguments
(argparse uses 2 as well); 3 = an internal consistency violation, which
points at a bug rather than at the input.

Every reporting command takes --porcelain for line-oriented structured
output: one record per line, space-separated tokens, first token the key.
Transform commands (dual, project, truncate) always write a code file --
the same format they read -- to stdout or -o, so they compose.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import classify as cl
from . import fileio
from . import linalg as la
from .arcs import is_in_desarguesian_spread
from .codes import AdditiveCode, bush_bound, is_self_orthogonal_a, quantum_params
from .gf import FieldError, make_field
from .group import GroupContext

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


class InternalCheckError(AssertionError):
    pass


def _read_code(path: str) -> AdditiveCode:
    if path == "-":
        return fileio.code_from_text(sys.stdin.read())
    with open(path) as fh:
        return fileio.code_from_text(fh.read())


def _write_code(code: AdditiveCode, out: str | None) -> None:
    text = fileio.code_to_text(code)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _distance(code: AdditiveCode) -> int | None:
    if code.is_mds():
        d = code.n - code.k + 1
        # cross-check the geometric distance when it is affordable
        try:
            hd = code.hyperplane_distance()
        except ValueError:
            hd = d
        if hd != d:
            raise InternalCheckError(
                f"MDS block ranks say d = {d} but hyperplane load gives {hd}")
        return d
    try:
        return code.hyperplane_distance()
    except ValueError:
        pass
    try:
        return code.min_weight()
    except ValueError:
        return None


def _emit(args, rows: list[tuple], human: str) -> None:
    if args.porcelain:
        for row in rows:
            print(" ".join(str(x) for x in row))
    else:
        print(human)


def cmd_verify(args) -> int:
    code = _read_code(args.code)
    q, h = code.tower.q, code.tower.h
    mds = code.is_mds()
    d = _distance(code)
    bush = bush_bound(q, h, code.k)
    linear = code.is_linear_over_top()
    rows = [
        ("n", code.n), ("k", code.k), ("q", q), ("h", h),
        ("d", d if d is not None else "unknown"),
        ("mds", "yes" if mds else "no"),
        ("bush", bush),
        ("linear-over-top", "yes" if linear else "no"),
    ]
    dtxt = str(d) if d is not None else "?"
    human = (f"(n, M, d) = ({code.n}, {q}^{code.G.shape[0]}, {dtxt}) over "
             f"F_{q ** h}, F_{q}-linear; "
             + ("MDS" if mds else "not MDS")
             + f"; length bound n <= {bush}"
             + ("; linear over the top field" if linear else
                "; properly additive as written"))
    _emit(args, rows, human)
    if mds and d is not None and d != code.n - code.k + 1:
        raise InternalCheckError("MDS but d != n - k + 1")
    return EXIT_OK if mds else EXIT_PROPERTY


def cmd_dual(args) -> int:
    _write_code(_read_code(args.code).dual(), args.out)
    return EXIT_OK


def cmd_project(args) -> int:
    _write_code(_read_code(args.code).project(args.at), args.out)
    return EXIT_OK


def cmd_truncate(args) -> int:
    code = _read_code(args.code)
    try:
        drop = {int(t) for t in args.drop.split(",")}
    except ValueError:
        raise fileio.FileFormatError("--drop takes a comma-separated id list")
    keep = [j for j in range(code.n) if j not in drop]
    if len(keep) + len(drop) != code.n:
        raise fileio.FileFormatError("--drop lists columns outside the code")
    if not keep:
        raise fileio.FileFormatError("--drop removes every column")
    _write_code(code.truncate(keep), args.out)
    return EXIT_OK


def cmd_quantum_check(args) -> int:
    code = _read_code(args.code)
    if code.tower.h != 2:
        print("the trace-alternating form needs a degree-2 extension",
              file=sys.stderr)
        return EXIT_PROPERTY
    if not is_self_orthogonal_a(code):
        _emit(args, [("self-orthogonal", "no")],
              "not self-orthogonal under the trace-alternating form")
        return EXIT_PROPERTY
    n, logical, dist = quantum_params(code)
    q = code.tower.q
    rows = [("self-orthogonal", "yes"),
            ("n", n), ("logical", logical), ("distance", dist), ("q", q)]
    _emit(args, rows, f"self-orthogonal: [[{n}, {logical}, {dist}]]_{q}")
    return EXIT_OK


def cmd_is_linear(args) -> int:
    code = _read_code(args.code)
    linear = code.is_linear_over_top()
    uni, ids = code.to_arc()
    params = None
    if len(set(ids)) == len(ids):
        params = is_in_desarguesian_spread(uni, ids)
        if linear and params is None:
            raise InternalCheckError(
                "linear as written but its arc is in no Desarguesian spread")
        verdict = "yes" if params is not None else "no"
    else:
        # repeated column blocks: the spread test needs distinct elements
        verdict = "yes" if linear else "unknown"
    rows = [("linear-over-top", "yes" if linear else "no"),
            ("desarguesian", verdict)]
    if params is not None:
        rows.append(("subfield-degree", params.subfield_degree))
    if linear:
        human = "linear over the top field"
    elif params is not None:
        human = ("equivalent to a linear code (the arc is in a Desarguesian "
                 f"spread, subfield degree {params.subfield_degree})")
    elif verdict == "unknown":
        human = "not linear as written; repeated columns leave no arc to test"
    else:
        human = "not equivalent to a linear code"
    _emit(args, rows, human)
    return EXIT_OK if verdict == "yes" else EXIT_PROPERTY


def _parse_space(text: str) -> tuple[int, int]:
    try:
        dim, q = (int(t) for t in text.split(","))
    except ValueError:
        raise fileio.FileFormatError("--space takes 'projective-dimension,q'")
    if dim < 1 or q < 2:
        raise fileio.FileFormatError(f"no projective space PG({dim}, {q})")
    return dim, q


def _field_of_order(q: int):
    p, m = q, 1
    for cand in range(2, q + 1):
        if cand * cand > q:
            break
        if q % cand == 0:
            p = cand
            m = 0
            while q > 1:
                if q % p:
                    raise fileio.FileFormatError(f"{q} is not a prime power")
                q //= p
                m += 1
            break
    try:
        return make_field(p, m)
    except FieldError as exc:
        raise fileio.FileFormatError(str(exc))


def cmd_classify(args) -> int:
    dim, q = _parse_space(args.space)
    field = _field_of_order(q)
    if not 0 <= args.dim < dim:
        raise fileio.FileFormatError(
            f"--dim {args.dim} is not a proper subspace dimension of PG({dim}, {q})")
    universe = la.subspace_universe(field, dim + 1, args.dim + 1)
    db = None
    if args.db and not args.resume:
        if os.path.exists(args.db):
            raise fileio.FileFormatError(
                f"{args.db} exists; pass --resume to continue it")
    ctx = GroupContext(universe)
    if args.db and args.resume:
        if os.path.exists(args.db):
            db = cl.OrbitDatabase.load(args.db)
            db.check_universe(universe, ctx.group_order)
    log = None if args.porcelain else (
        lambda msg: print(msg, file=sys.stderr, flush=True))
    db = cl.classify(universe, max_size=args.max_size, db=db,
                     db_path=args.db, ctx=ctx, workers=args.workers, log=log)
    census = cl.desarguesian_census(db)
    if args.porcelain:
        h = db.header()
        print(" ".join(str(x) for x in (
            "header", "p", h["p"], "m", h["m"], "n_vec", h["n_vec"],
            "r", h["r"], "group_order", h["group_order"])))
        for size, count in db.counts().items():
            print(f"size {size} classes {count} desarguesian {census[size]}")
    else:
        print(f"arcs of {args.dim}-subspaces of PG({dim}, {q}), "
              f"group order {db.group_order}")
        for size, count in db.counts().items():
            print(f"  size {size:3d}: {count} classes, "
                  f"{census[size]} in Desarguesian spreads")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="addmds",
        description="additive MDS codes via arcs of projective subspaces",
        epilog="exit codes: 0 ok, 1 property fails, 2 bad input, "
               "3 internal inconsistency")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    p = add("verify", cmd_verify, help="parameters, MDS and linearity report")
    p.add_argument("code", help="code file, or - for stdin")
    p.add_argument("--porcelain", action="store_true")

    p = add("dual", cmd_dual, help="dual code under the trace form")
    p.add_argument("code")
    p.add_argument("-o", "--out")

    p = add("project", cmd_project, help="shorten at a coordinate")
    p.add_argument("code")
    p.add_argument("--at", type=int, required=True, metavar="COLUMN")
    p.add_argument("-o", "--out")

    p = add("truncate", cmd_truncate, help="drop coordinates")
    p.add_argument("code")
    p.add_argument("--drop", required=True, metavar="I,J,..")
    p.add_argument("-o", "--out")

    p = add("quantum-check", cmd_quantum_check,
            help="trace-alternating self-orthogonality and [[n, n-2k, k+1]]")
    p.add_argument("code")
    p.add_argument("--porcelain", action="store_true")

    p = add("is-linear", cmd_is_linear,
            help="linearity as written and up to equivalence")
    p.add_argument("code")
    p.add_argument("--porcelain", action="store_true")

    p = add("classify", cmd_classify,
            help="classify arcs of subspaces up to collineations")
    p.add_argument("--space", required=True, metavar="DIM,Q",
                   help="ambient projective space PG(DIM, Q)")
    p.add_argument("--dim", type=int, required=True,
                   help="projective dimension of the arc elements")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--db", default=None, help="database file to write")
    p.add_argument("--resume", action="store_true",
                   help="continue an existing database")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel jobs (default: ADDMDS_WORKERS or 1)")
    p.add_argument("--porcelain", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (fileio.FileFormatError, cl.DatabaseError, FieldError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
