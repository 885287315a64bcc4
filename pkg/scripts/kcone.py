from typing import Any, Callable, Sequence
import argparse
import json
import logging
import pathlib
import sys

import structlog
import sympy

from kcone import exactnum
from kcone.catalog import Catalog
from kcone.cone import can_blowdown_to_orbit, face_invariants, validate
from kcone.construct import (
    CLOSE_BOX,
    DEFAULT_SEED,
    bihomogeneous_check,
    close_chain,
    example_family,
    obstructed_family,
    weighted_homogeneous_check,
)
from kcone.document import (
    Document,
    cone_from_json,
    cone_to_json,
    dumps,
    euler_report_to_json,
    graph_to_json,
    plan_to_json,
    report_to_json,
    require_reeb,
)
from kcone.errors import KConeError, ValidityError
from kcone.euler import verify_global_identity
from kcone.graph import canonical_form, count_nontrivial_chains, extract_graph, toric_condition_check
from kcone.reeb import TRANSVERSE_BOX, choose_transverse_circle, is_admissible, isotropy_profile, rank_of
from kcone.render import write_svg
from kcone.surgery import BLOWDOWN_BOX, blowdown_delete, cut, orbit_blowup_normal, plan_blowdown_sequence

from scripts.sweep import sweep

logger = structlog.get_logger("kcone")


def vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def read_json(path: pathlib.Path) -> Any:
    text = sys.stdin.read() if str(path) == "-" else path.read_text()
    return json.loads(text)


def load(args) -> Document:
    return Document.from_json(read_json(args.path), args.d)


def load_with_reeb(args):
    doc = load(args)
    return doc.cone, require_reeb(doc)


def cmd_validate(args):
    obj = read_json(args.path)
    cone = cone_from_json(obj["cone"] if isinstance(obj, dict) else obj)
    report = validate(cone)
    return report_to_json(report), 0 if report.is_good else 1


def cmd_invariants(args):
    cone = load(args).cone
    inv = face_invariants(cone, args.face)
    return {"b": inv.b, "f": inv.f, "blowdown": can_blowdown_to_orbit(cone, args.face)}, 0


def cmd_rank(args):
    cone, reeb = load_with_reeb(args)
    return {"rank": rank_of(reeb), "admissible": is_admissible(cone, reeb)}, 0


def cmd_profile(args):
    cone, reeb = load_with_reeb(args)
    p = isotropy_profile(cone, reeb)
    return {
        "v0": p.v0,
        "s": p.s,
        "k": p.k,
        "flats": p.flats,
        "vertex_orders": p.vertex_orders,
        "lie_basis": p.lie_basis,
    }, 0


def cmd_graph(args):
    cone, reeb = load_with_reeb(args)
    graph = extract_graph(cone, reeb, args.y)
    return {
        "graph": graph_to_json(graph),
        "canonical": canonical_form(graph),
        "nontrivial_chains": count_nontrivial_chains(graph),
    }, 0


def cmd_euler_check(args):
    cone, reeb = load_with_reeb(args)
    y = args.y or choose_transverse_circle(cone, reeb, box=args.box or TRANSVERSE_BOX)
    report = verify_global_identity(cone, reeb, y)
    return {"y": y, **euler_report_to_json(report)}, 0 if report.ok else 1


def cmd_blowup(args):
    cone = load(args).cone
    if (args.t is None) == (args.vertex is None):
        raise SystemExit("blowup needs exactly one of --t and --vertex")
    t = args.t if args.t is not None else orbit_blowup_normal(cone, args.vertex, box=args.box or BLOWDOWN_BOX)
    result = cut(cone, t)
    return {"kind": result.kind, "index": result.index, "t": t, "cone": cone_to_json(result.cone)}, 0


def cmd_blowdown(args):
    cone = load(args).cone
    return {"cone": cone_to_json(blowdown_delete(cone, args.face))}, 0


def cmd_plan(args):
    cone = load(args).cone
    plan = plan_blowdown_sequence(cone, args.keep, box=args.box or BLOWDOWN_BOX)
    return plan_to_json(plan), 0


def cmd_construct(args):
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    if args.family == "example":
        family = example_family(args.k, args.d or exactnum.DISCRIMINANT)
    else:
        family = obstructed_family(args.k, seed, args.d or exactnum.DISCRIMINANT)
    doc = Document(family.cone, family.reeb, {"name": family.name, "provenance": args.family})
    return doc.to_json(), 0


def cmd_close(args):
    chain = read_json(args.path)
    return {"t": close_chain(chain, box=args.box or CLOSE_BOX)}, 0


def cmd_toric_check(args):
    omega = (args.omega[:2], args.omega[2:]) if args.omega else None
    v = toric_condition_check(args.vmin, args.vmax, omega)
    return {"v": v}, 0 if v is not None else 1


def cmd_render(args):
    cone, reeb = load_with_reeb(args)
    write_svg(cone, reeb, args.out)
    return {"out": str(args.out)}, 0


def cmd_catalog(args):
    catalog = Catalog.open(args.store)
    if args.action == "list":
        return catalog.entries(), 0
    if args.target is None:
        raise SystemExit(f"catalog {args.action} needs a target")
    if args.action == "add":
        doc = Document.from_json(read_json(pathlib.Path(args.target)), args.d)
        return {"hash": catalog.add(doc)}, 0
    doc = catalog.get(args.target)
    return doc.to_json(), 0


def exponents(text: str) -> tuple[list[tuple[int, ...]], int]:
    expr = sympy.sympify(text)
    symbols = sorted(expr.free_symbols, key=lambda s: s.name)
    return [tuple(m) for m in sympy.Poly(expr, *symbols).monoms()], len(symbols)


def cmd_homogeneous(args):
    monomials, n = exponents(args.poly)
    if len(args.weights) != n:
        raise SystemExit(f"{n} variables but {len(args.weights)} weights")
    if args.weights2 is not None:
        ok = bihomogeneous_check(monomials, args.weights, args.degree, args.weights2, args.degree2)
    else:
        ok = weighted_homogeneous_check(monomials, args.weights, args.degree)
    return {"homogeneous": ok, "monomials": monomials}, 0


def cmd_sweep(args):
    ks = range(args.kmin, args.kmax + 1)
    rows = sweep(args.family, ks, args.seed or DEFAULT_SEED, args.d or exactnum.DISCRIMINANT)
    return rows, 0 if all(r["ok"] for r in rows) else 1


def parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=None, help="quadratic discriminant")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--box", type=int, default=None, help="search radius")
    common.add_argument("-v", "--verbose", action="store_true", default=False)

    p = argparse.ArgumentParser("kcone", description="good cones and rank 2 K-contact 5-manifolds")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name: str, fn: Callable, path: bool = True, **kwargs):
        s = sub.add_parser(name, parents=[common], **kwargs)
        if path:
            s.add_argument("path", type=pathlib.Path)
        s.set_defaults(fn=fn)
        return s

    command("validate", cmd_validate)
    command("invariants", cmd_invariants).add_argument("--face", type=int, required=True)
    command("rank", cmd_rank)
    command("profile", cmd_profile)
    command("graph", cmd_graph).add_argument("--y", type=vector, default=None)
    command("euler-check", cmd_euler_check).add_argument("--y", type=vector, default=None)

    s = command("blowup", cmd_blowup)
    s.add_argument("--t", type=vector, default=None)
    s.add_argument("--vertex", type=int, default=None)

    command("blowdown", cmd_blowdown).add_argument("--face", type=int, required=True)
    command("plan", cmd_plan).add_argument("--keep", type=vector, required=True)

    s = command("construct", cmd_construct, path=False)
    s.add_argument("--family", choices=["example", "obstructed"], default="example")
    s.add_argument("--k", type=int, required=True)

    command("close", cmd_close)

    s = command("toric-check", cmd_toric_check, path=False)
    s.add_argument("--vmin", type=vector, required=True)
    s.add_argument("--vmax", type=vector, required=True)
    s.add_argument("--omega", type=vector, default=None, help="two rays as a,b,c,d")

    command("render", cmd_render).add_argument("--out", type=pathlib.Path, required=True)

    s = command("catalog", cmd_catalog, path=False)
    s.add_argument("action", choices=["add", "list", "get"])
    s.add_argument("target", nargs="?", default=None)
    s.add_argument("--store", type=pathlib.Path, required=True)

    s = command("homogeneous", cmd_homogeneous, path=False)
    s.add_argument("--poly", required=True)
    s.add_argument("--weights", type=vector, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--weights2", type=vector, default=None)
    s.add_argument("--degree2", type=int, default=None)

    s = command("sweep", cmd_sweep, path=False)
    s.add_argument("--family", choices=["example", "obstructed", "both"], default="both")
    s.add_argument("--kmin", type=int, default=2)
    s.add_argument("--kmax", type=int, default=8)
    return p


def configure_logging(verbose: bool):
    structlog.configure(
        logger_factory=structlog.PrintLoggerFactory(sys.stderr),
        wrapper_class=structlog.make_filtering_bound_logger(logging.DEBUG if verbose else logging.WARNING),
    )


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2

    configure_logging(args.verbose)
    try:
        if args.d is not None:
            exactnum.check_discriminant(args.d)
        out, code = args.fn(args)
    except json.JSONDecodeError as exc:
        print(f"{getattr(args, 'path', '-')}:{exc.lineno}:{exc.colno}: {exc.msg}", file=sys.stderr)
        return 2
    except ValidityError as exc:
        logger.error("invalid", command=args.command, error=str(exc))
        print(dumps({"error": str(exc), "report": report_to_json(exc.report)}))
        return 1
    except KConeError as exc:
        logger.error("failed", command=args.command, error=str(exc))
        print(dumps({"error": str(exc), "kind": type(exc).__name__}))
        return 1
    except (TypeError, KeyError, OSError, sympy.SympifyError) as exc:
        print(f"kcone {args.command}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        print(f"kcone {args.command}: {exc.code}", file=sys.stderr)
        return 2

    print(dumps(out))
    return code


def main():
    sys.exit(run())
