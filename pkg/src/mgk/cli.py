"""Command-line entry point: ``mgk analyze|verify|quotient|product|wreath|search``.

Reports are ``key: value`` lines; ``--format structured`` prints the same
content as one JSON object.  Exit codes: 0 pass, 1 verification failure,
2 input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import io as mio
from .core import MagmaTable, StructureReport, classify, verify_core_identities
from .errors import MgkError, StructuralError
from .products import (CentralEmbedding, build_and_check, check_direct_laws, direct_product,
                       plan_search, search_factors, smashed_product)
from .subquot import SubStructure, quotient_by_central

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class Report:
    """Ordered key/value report with text and JSON renderings."""

    def __init__(self):
        self.items: list = []
        self.ok = True

    def add(self, key, value):
        self.items.append((str(key), value))

    def check(self, c):
        """Add a CheckResult or IdentityCheck."""
        self.ok &= bool(c.passed)
        val = f"{'pass' if c.passed else 'FAIL'} ({c.checked} checked)"
        if c.witness is not None:
            val += f" witness={list(c.witness)}"
        self.add(c.id, val)

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            return json.dumps(dict(self.items), indent=2)
        return "\n".join(f"{k}: {_text(v)}" for k, v in self.items)


def _text(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return str(v)


def _names(g: MagmaTable, idx) -> list:
    return [g.elem_names[int(i)] for i in idx]


def _profile(r: StructureReport) -> str:
    if r.is_group:
        return "abelian group" if r.is_commutative else "group"
    if r.is_central_metagroup:
        return "central metagroup"
    if r.is_metagroup:
        return "metagroup"
    if r.is_loop:
        return "loop"
    return "quasigroup" if r.is_quasigroup else "magma"


def structure_items(rep: Report, g: MagmaTable, r: StructureReport, prefix: str = ""):
    rep.add(prefix + "name", g.name)
    rep.add(prefix + "order", r.order)
    rep.add(prefix + "profile", _profile(r))
    rep.add(prefix + "quasigroup", r.is_quasigroup)
    rep.add(prefix + "loop", r.is_loop)
    if not r.is_loop:
        return
    rep.add(prefix + "identity", g.elem_names[r.identity])
    rep.add(prefix + "metagroup", r.is_metagroup)
    rep.add(prefix + "central metagroup", r.is_central_metagroup)
    rep.add(prefix + "group", r.is_group)
    rep.add(prefix + "commutative", r.is_commutative)
    rep.add(prefix + "commutant size", len(r.commutant))
    rep.add(prefix + "nucleus", _names(g, r.nucleus))
    rep.add(prefix + "center", _names(g, r.center))
    rep.add(prefix + "center size", len(r.center))
    if r.is_metagroup:
        rep.add(prefix + "t_range", _names(g, r.t_range))
        rep.add(prefix + "z_m", _names(g, r.z_m))


def _elem_list(g: MagmaTable, raw: Optional[str]) -> list:
    if raw is None or raw == "":
        return []
    return [mio._elem(g, x.strip()) for x in raw.split(",")]


def _input_table(args) -> MagmaTable:
    if args.gen and args.input:
        raise StructuralError("give either a table path or --gen, not both")
    if args.gen:
        return mio.load_table(args.gen)
    if not args.input:
        raise StructuralError("an input table (path or --gen) is required")
    return mio.read_table(args.input)


def _finish(rep: Report, args) -> int:
    print(rep.render(args.format))
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- commands -------------------------------------------------------------

def cmd_analyze(args) -> int:
    g = _input_table(args)
    r = classify(g)
    rep = Report()
    structure_items(rep, g, r)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(r.as_dict(), indent=2) + "\n")
    return _finish(rep, args)


def cmd_verify(args) -> int:
    g = _input_table(args)
    checks = verify_core_identities(g, args.identity or None)
    rep = Report()
    rep.add("name", g.name)
    for c in checks:
        rep.check(c)
    rep.add("verify", "pass" if rep.ok else "FAIL")
    return _finish(rep, args)


def cmd_quotient(args) -> int:
    g = _input_table(args)
    z0 = SubStructure(g, _elem_list(g, args.z0))
    q = quotient_by_central(g, z0)
    rep = Report()
    rep.add("z0", _names(g, z0.members))
    structure_items(rep, q.table, classify(q.table), "quotient ")
    if args.out:
        mio.write_table(q.table, args.out)
    if args.map:
        mio.write_mapping(q.coset_of, args.map)
    return _finish(rep, args)


def cmd_product(args) -> int:
    rep = Report()
    if args.kind == "direct":
        if args.factors:
            raise StructuralError("direct products take tables, not a factor file")
        gs = [mio.load_table(x) for x in args.inputs]
        if not gs:
            raise StructuralError("direct product needs at least one input")
        table = direct_product(gs)
        rep.add("kind", "direct")
        rep.add("order", table.order)
        rep.add("profile", _profile(classify(table)))
        for c in check_direct_laws(table, gs):
            rep.check(c)
    else:
        if not args.factors or args.inputs:
            raise StructuralError(f"{args.kind} products take exactly one --factors file")
        spec = mio.read_factors(args.factors)
        pr = build_and_check(spec, twisted=args.kind == "twisted")
        table = pr.table
        rep.add("kind", pr.kind)
        rep.add("order", table.order)
        rep.add("profile", _profile(pr.structure))
        for c in pr.checks:
            if c.id in ("3.3.2", "3.4.2"):
                rep.ok &= c.passed
                if c.passed:
                    rep.add("t closed-form", f"agree {c.checked}/{c.checked} triples")
                else:
                    rep.add("t closed-form", f"DISAGREE at triple {list(c.witness)} ({c.checked} scanned)")
            else:
                rep.check(c)
        if args.kind == "smashed":
            rep.add("equals direct", smashed_product(spec, validate=False).same_operation(
                direct_product([spec.a, spec.b], require=False)))
    if args.out:
        mio.write_table(table, args.out)
    return _finish(rep, args)


def cmd_wreath(args) -> int:
    from .wreath import (build_metamorphism, build_theorem_4_14, check_action_identities,
                         check_metagroup_condition, check_transversal_laws, wreath_product)

    rep = Report()
    if args.theorem_4_14:
        if args.spec:
            raise StructuralError("--theorem-4-14 builds its own spec; drop the spec path")
        if not (args.d and args.b and args.d0 is not None and args.b0 is not None):
            raise StructuralError("--theorem-4-14 needs --d, --d0, --b and --b0")
        d, b = mio.load_table(args.d), mio.load_table(args.b)
        z0 = _elem_list(d, args.z0) if args.z0 else None
        d2 = mio._elem(d, args.d2) if args.d2 is not None else None
        ext = build_theorem_4_14(d, mio._elem(d, args.d0), b, mio._elem(b, args.b0), z0=z0, d2=d2)
        rep.add("A", _names(d, ext.spec.trans.a_sub.members))
        rep.add("V", _names(d, ext.spec.trans.v))
        for line in ext.lines():
            k, _, v = line.partition(": ")
            rep.add(k, v)
        rep.ok = ext.f0_square_ok and ext.h_equality and ext.metagroup.passed
        if ext.generator_check is not None:
            rep.ok &= ext.generator_check["generates"]
        if args.out:
            mio.write_table(ext.table, args.out)
        return _finish(rep, args)

    if not args.spec:
        raise StructuralError("a wreath spec file is required")
    spec = mio.read_wreath_spec(args.spec)
    d = spec.d
    rep.add("convention", spec.convention)
    rep.add("A", _names(d, spec.trans.a_sub.members))
    rep.add("V", _names(d, spec.trans.v))
    rep.add("order", spec.order)
    for c in check_transversal_laws(spec.trans):
        rep.check(c)
    table = wreath_product(spec)
    if args.check_metagroup:
        wr = check_metagroup_condition(spec, table)
        for line in wr.lines()[:3]:
            k, _, v = line.partition(": ")
            rep.add(k, v)
        for c in wr.checks:
            rep.check(c)
        if spec.convention == "left":
            for c in check_action_identities(spec):
                rep.check(c)
        rep.ok &= wr.ok
    else:
        r = classify(table)
        rep.add("loop", "pass" if r.is_loop else "FAIL")
        rep.ok &= r.is_loop
    if args.metamorphism:
        spec2 = mio.read_wreath_spec(args.spec, transversal_override=args.metamorphism.split(","))
        m = build_metamorphism(spec, spec2)
        rep.add("V2", _names(d, spec2.trans.v))
        rep.add("metamorphism bijective", "pass" if m.bijective else "FAIL")
        c2 = wreath_product(spec2)
        rep.add("nu values", _names(c2, m.nu_values))
        rep.add("nu central", "pass" if m.nu_central else "FAIL")
        rep.ok &= m.bijective and m.nu_central
    if args.out:
        mio.write_table(table, args.out)
    return _finish(rep, args)


def cmd_search(args) -> int:
    a, b = mio.load_table(args.a), mio.load_table(args.b)
    if args.z:
        z = CentralEmbedding(mio.load_table(args.z), _elem_list(a, args.into_a), _elem_list(b, args.into_b))
    else:
        z = CentralEmbedding(MagmaTable("Z1", ["e"], [[0]]), [a.require_identity()], [b.require_identity()])
    plan = plan_search(a, b, z)
    rep = Report()
    rep.add("A", a.name)
    rep.add("B", b.name)
    rep.add("Z", z.z_table.name)
    rep.add("candidates", plan.size)
    counts = {"valid": 0, "smashed nonassociative": 0, "twisted nonassociative": 0, "checks failed": 0}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for i, spec in enumerate(search_factors(a, b, z, args.budget)):
        counts["valid"] += 1
        doc = {}
        for twisted in (False, True):
            pr = build_and_check(spec, twisted)
            kind = "twisted" if twisted else "smashed"
            if not pr.structure.is_group:
                counts[f"{kind} nonassociative"] += 1
            if not pr.ok:
                counts["checks failed"] += 1
            doc[kind] = {"structure": pr.structure.as_dict(),
                         "checks": {c.id: c.passed for c in pr.checks}}
        if args.out:
            stem = os.path.join(args.out, f"spec_{i:06d}")
            mio.write_factors(spec, stem + ".json")
            with open(stem + ".report.json", "w", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, indent=2) + "\n")
    for k, v in counts.items():
        rep.add(k, v)
    rep.ok = counts["checks failed"] == 0
    if args.out:
        with open(os.path.join(args.out, "summary.txt"), "w", encoding="utf-8") as fh:
            fh.write(rep.render("text") + "\n")
    return _finish(rep, args)


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "structured"], default="text",
                        help="key: value lines (default) or one JSON object")
    p = argparse.ArgumentParser(prog="mgk", description="Finite metagroup construction and verification.")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, helptext):
        return sub.add_parser(name, help=helptext, parents=[common])

    def with_input(sp):
        sp.add_argument("input", nargs="?", help="table file (JSON)")
        sp.add_argument("--gen", help="built-in table, e.g. cyclic:4, sym3, quaternion8, cayley-dickson:3")

    sp = command("analyze", "classify a table")
    with_input(sp)
    sp.add_argument("--out", help="write the structure report as JSON")
    sp.set_defaults(func=cmd_analyze)

    sp = command("verify", "run the metagroup identity suite")
    with_input(sp)
    sp.add_argument("--identity", action="append", help="only this identity id (repeatable)")
    sp.set_defaults(func=cmd_verify)

    sp = command("quotient", "quotient by a central subgroup")
    with_input(sp)
    sp.add_argument("--z0", required=True, help="comma-separated elements of Z0")
    sp.add_argument("--out", help="write the quotient table")
    sp.add_argument("--map", help="write the element -> coset mapping")
    sp.set_defaults(func=cmd_quotient)

    sp = command("product", "direct, smashed or smashed twisted product")
    sp.add_argument("kind", choices=["direct", "smashed", "twisted"])
    sp.add_argument("inputs", nargs="*", help="tables for a direct product (paths or generator ids)")
    sp.add_argument("--factors", help="factor file for smashed/twisted products")
    sp.add_argument("--out", help="write the product table")
    sp.set_defaults(func=cmd_product)

    sp = command("wreath", "smashed twisted wreath product")
    sp.add_argument("spec", nargs="?", help="wreath spec file")
    sp.add_argument("--check-metagroup", action="store_true")
    sp.add_argument("--metamorphism", metavar="V2", help="comma-separated second transversal, e first")
    sp.add_argument("--theorem-4-14", action="store_true", help="build the splitting extension instance")
    sp.add_argument("--d", help="D table for --theorem-4-14")
    sp.add_argument("--d0", help="non-central element of D")
    sp.add_argument("--b", help="B table for --theorem-4-14")
    sp.add_argument("--b0", help="element of B")
    sp.add_argument("--z0", help="comma-separated Z0 in D (default Z_m(D))")
    sp.add_argument("--d2", help="second element for the generator check")
    sp.add_argument("--out", help="write the product table")
    sp.set_defaults(func=cmd_wreath)

    sp = command("search", "enumerate smashing factor sets")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("z", nargs="?", help="Z table (default trivial)")
    sp.add_argument("--into-a", help="comma-separated images of Z in A")
    sp.add_argument("--into-b", help="comma-separated images of Z in B")
    sp.add_argument("--budget", type=int, default=10 ** 6)
    sp.add_argument("--out", help="directory for factor files and reports")
    sp.set_defaults(func=cmd_search)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MgkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
