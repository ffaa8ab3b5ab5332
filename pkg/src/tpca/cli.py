"""Command-line front end.

Exit codes: 0 when every requested suite passes, 1 when something was
checked and failed, 2 for usage, parse and missing-table errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import axioms, identities, wab
from .algfile import AlgebraFileError, format_algebra, load_algebra, parse_matrix
from .conformal import ConformalAlgebra, MissingTable, ParamDecl
from .constructions import NotATPCA, change_basis, commutator, derivation_product, tensor
from .polyring import ParseError, parse_poly

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _compat(alg, circ, bracket, star):
    res = identities.check_compatibility_criterion(alg, circ, bracket)
    rep = axioms.CheckReport.combine("compat", [res.poisson, res.transposed, res.triples])
    # The criterion is an equivalence: it passes when the two sides agree.
    out = {"suite": "compat", "status": "pass" if res.agreement else "fail", "pass": res.agreement}
    out.update(res.to_dict())
    out["laws"] = rep.to_dict()["laws"]
    return out


SUITES = {
    "assoc": lambda a, c, b, s: axioms.check_associative(a, c),
    "comm": lambda a, c, b, s: axioms.check_commutative(a, c),
    "lie": lambda a, c, b, s: axioms.check_lie(a, b),
    "tpca": lambda a, c, b, s: axioms.check_tpca(a, c, b),
    "nc-tpca": lambda a, c, b, s: axioms.check_nc_tpca(a, c, b),
    "poisson": lambda a, c, b, s: axioms.check_poisson_leibniz(a, c, b, form="both"),
    "transposed": lambda a, c, b, s: axioms.check_transposed_leibniz(a, c, b, form="both"),
    "identities": lambda a, c, b, s: identities.check_derived_identities(a, c, b),
    "nc-identities": lambda a, c, b, s: identities.check_derived_identities(
        a, c, b, laws=wab.NC_IDENTITY_SUBSET, precondition="none"),
    "nth": lambda a, c, b, s: identities.check_nth_transposed_leibniz(a, c, b),
    "triples": lambda a, c, b, s: identities.check_triple_products(a, c, b),
    "compat": _compat,
    "left-symmetric": lambda a, c, b, s: axioms.check_left_symmetric(a, s),
    "novikov": lambda a, c, b, s: axioms.check_novikov(a, s),
    "np": lambda a, c, b, s: axioms.check_np_conditions(a, c, s),
    "prelie-commutative": lambda a, c, b, s: axioms.check_prelie_commutative(a, c, s),
    "prelie-poisson": lambda a, c, b, s: axioms.check_prelie_poisson(a, c, s),
    "diff-np": lambda a, c, b, s: axioms.check_diff_np(a, c, s),
    "assoc-consequences": lambda a, c, b, s: axioms.check_assoc_consequences(a, c),
}


def _suite_list(text: str) -> list:
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown or not names:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}")
    return names


def _default_suites(alg: ConformalAlgebra, circ: str, bracket: str) -> list:
    has_c, has_b = alg.has(circ), alg.has(bracket)
    if has_c and has_b:
        return ["tpca", "identities"]
    if has_c:
        return ["assoc", "comm"]
    if has_b:
        return ["lie"]
    raise UsageError(f"algebra has no {circ!r} or {bracket!r} table")


def run_suites(alg, names, circ="circ", bracket="bracket", star="star") -> list:
    out = []
    for n in names:
        try:
            r = SUITES[n](alg, circ, bracket, star)
        except MissingTable as e:
            raise UsageError(f"suite {n!r}: {e.args[0]}") from None
        out.append(r if isinstance(r, dict) else r.to_dict())
    return out


def _suite_ok(d: dict) -> bool:
    return d["pass"] or d.get("status") == "vacuous"


def _suite_text(d: dict) -> str:
    lines = [f"[{d['status'].upper()}] {d['suite']}"]
    if d.get("note"):
        lines.append(f"  note: {d['note']}")
    if "both_hold" in d:
        lines.append(f"  both_hold={d['both_hold']} triple_products_vanish={d['triple_products_vanish']}")
    laws = {}
    for l in d.get("laws", []):
        laws.setdefault(l["law"], []).append(l)
    for law, inst in laws.items():
        bad = [l for l in inst if not l["pass"]]
        lines.append(f"  {law}: {len(inst) - len(bad)}/{len(inst)} instances vanish")
        for l in bad:
            lines.append(f"    ({', '.join(l['tuple'])}): {l['residual']}")
    for i in d.get("items", []):
        lines.append(f"  [{'ok' if i['pass'] else 'FAIL'}] {i['name']}")
    return "\n".join(lines)


class Report:
    def __init__(self, command: str, inputs: dict, timings: bool):
        self.data = {"command": command, "inputs": inputs, "suites": [], "pass": True}
        self.timings = {} if timings else None
        self.text = []

    def timed(self, label, fn, *args, **kwargs):
        t = time.perf_counter()
        out = fn(*args, **kwargs)
        if self.timings is not None:
            self.timings[label] = round(time.perf_counter() - t, 6)
        return out

    def add_suites(self, suites):
        self.data["suites"].extend(suites)
        self.text.extend(_suite_text(s) for s in suites)
        if not all(_suite_ok(s) for s in suites):
            self.data["pass"] = False

    def emit(self, fmt: str, stream) -> None:
        if self.timings is not None:
            self.data["timings"] = self.timings
        if fmt == "json":
            stream.write(json.dumps(self.data, indent=2) + "\n")
        else:
            stream.write("\n".join(self.text) + ("\n" if self.text else ""))


# --- loading ---------------------------------------------------------------------


def _load(path: str) -> ConformalAlgebra:
    try:
        return load_algebra(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except AlgebraFileError as e:
        raise UsageError(f"{path}: {e}") from None


def _load_matrix(path: str, generators):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_matrix(fh.read(), generators)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except AlgebraFileError as e:
        raise UsageError(f"{path}: {e}") from None


def _with_matrix_params(alg: ConformalAlgebra, mf) -> ConformalAlgebra:
    decls = {p.name: p for p in alg.params}
    for p in mf.params:
        old = decls.get(p.name)
        decls[p.name] = ParamDecl(p.name, p.nonzero or (old is not None and old.nonzero))
    return ConformalAlgebra(alg.generators, alg.tables, tuple(decls.values()), alg.name)


def _scalar(text: str | None, name: str):
    """``--a``/``--b`` values: a number or a parameter expression."""
    if text is None:
        return None
    try:
        p = parse_poly(text)
    except ParseError as e:
        raise UsageError(f"--{name}: {e}") from None
    if p.variables():
        raise UsageError(f"--{name} may not involve d or lambda variables")
    if p.is_constant() and not p.params():
        c = p.constant().constant()
        return int(c) if c.denominator == 1 else c
    return p


def _catalog_id(text: str) -> str:
    cid = text[5:] if text.startswith("case-") else text
    if cid not in wab.CATALOG_IDS:
        raise UsageError(f"unknown catalog id {text!r}; known ids: {', '.join(wab.CATALOG_IDS)}")
    return cid


def _write_output(rep: Report, alg: ConformalAlgebra, out_path: str | None, fmt: str):
    text = format_algebra(alg)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.data["output_file"] = out_path
        if fmt == "text":
            rep.text.append(f"wrote {out_path}")
    else:
        rep.data["output"] = text
        if fmt == "text":
            rep.text.append(text.rstrip("\n"))


def _and_check(rep: Report, alg, suites, args):
    if suites:
        rep.add_suites(rep.timed("check", run_suites, alg, _suite_list(suites), args.circ, args.bracket, args.star))


# --- commands --------------------------------------------------------------------


def cmd_check(args, rep: Report):
    alg = _load(args.file)
    names = _suite_list(args.suites) if args.suites else _default_suites(alg, args.circ, args.bracket)
    rep.add_suites(rep.timed("check", run_suites, alg, names, args.circ, args.bracket, args.star))


def _catalog_suites(cid: str) -> list:
    if cid == "vir-c":
        return ["assoc", "comm", "lie", "tpca", "identities"]
    return ["lie", "nc-tpca", "nc-identities"]


def cmd_catalog(args, rep: Report):
    cid = _catalog_id(args.id)
    alg = wab.catalog(cid)
    if args.action == "show":
        _write_output(rep, alg, args.output, args.report)
        return
    names = _suite_list(args.suites) if args.suites else _catalog_suites(cid)
    rep.add_suites(rep.timed("check", run_suites, alg, names))


def cmd_tensor(args, rep: Report):
    a1, a2 = _load(args.file1), _load(args.file2)
    try:
        out = rep.timed("tensor", tensor, a1, a2, args.circ, args.bracket)
    except MissingTable as e:
        raise UsageError(f"tensor: {e.args[0]}") from None
    _write_output(rep, out, args.output, args.report)
    _and_check(rep, out, args.and_check, args)


def cmd_transform(args, rep: Report):
    alg = _load(args.file)
    mf = _load_matrix(args.matrix, alg.generators)
    if mf.generators != alg.generators:
        raise UsageError("matrix generators do not match the algebra")
    try:
        T = mf.basis_change()
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = rep.timed("transform", change_basis, _with_matrix_params(alg, mf), T)
    out = ConformalAlgebra(out.generators, out.tables, out.params, args.name if args.name is not None else alg.name)
    _write_output(rep, out.without_unused_params(), args.output, args.report)
    _and_check(rep, out, args.and_check, args)


def cmd_derive(args, rep: Report):
    alg = _load(args.file)
    mf = _load_matrix(args.matrix, alg.generators)
    D = mf.endomorphism()
    try:
        star = rep.timed("derive", derivation_product, alg, args.circ, D)
    except MissingTable as e:
        raise UsageError(f"derive: {e.args[0]}") from None
    except ValueError as e:
        rep.data["pass"] = False
        rep.data["error"] = str(e)
        rep.text.append(f"[FAIL] {e}")
        return
    out = _with_matrix_params(alg, mf).with_table(args.star, star)
    if args.commutator:
        out = out.with_table(args.commutator, commutator(out, args.star))
    out = out.with_inferred_params()
    _write_output(rep, out, args.output, args.report)
    _and_check(rep, out, args.and_check, args)


def _record(rep: Report, result: dict, ok: bool, text: str):
    rep.data["result"] = result
    rep.data["pass"] = rep.data["pass"] and ok
    rep.text.append(text)


def _families_text(res) -> str:
    lines = [f"{'complete' if res.complete else 'INCOMPLETE'}: {len(res.families)} families, "
             f"{len(res.open_branches)} open branches"]
    for f in res.families:
        head = f.label or "family"
        shape = f.shape or {}
        desc = ", ".join(f"{k} = {v}" for k, v in shape.items() if k != "assumptions")
        assumptions = shape.get("assumptions", f.assumptions)
        lines.append(f"  {head}: {'; '.join(assumptions) or 'no assumptions'}" + (f"  [{desc}]" if desc else ""))
        if not f.label:
            nz = {k: str(v) for k, v in f.bindings.items() if not v.is_zero()}
            lines.append(f"    nonzero bindings: {nz or 'none'}; free: {', '.join(f.free) or 'none'}")
    for b in res.open_branches:
        lines.append(f"  OPEN ({b.reason}): {'; '.join(b.assumptions)}")
    return "\n".join(lines)


def cmd_wab(args, rep: Report):
    a, b = _scalar(args.a, "a"), _scalar(args.b, "b")
    sub = args.sub
    if sub == "residuals":
        cand = args.candidate
        if cand is None:
            raise UsageError("wab residuals needs --candidate")
        bare = cand[5:] if cand.startswith("case-") else cand
        if bare in wab.CATALOG_IDS or cand.startswith("case-"):
            cid = _catalog_id(cand)
            if cid == "vir-c":
                raise UsageError("vir-c is rank 1; residuals are for W(a,b) octuples")
            oct_ = wab.catalog_octuple(cid)
            default_a = "a" if cid == "1" else 2
        else:
            oct_ = wab.CandidateOctuple.from_algebra(_load(cand), args.circ)
            default_a = "a"
        a = default_a if a is None else a
        b = "b" if b is None else b
        rs = rep.timed("residuals", wab.residual_system, oct_, a, b)
        lines = [f"residual system: {'empty' if rs.is_empty() else f'{len(rs)} nonzero components'}"]
        lines += [f"  {e.label} {e.law}({', '.join(e.triple)})[{e.component}]: {e.residual}" for e in rs]
        _record(rep, rs.to_dict(), rs.is_empty(), "\n".join(lines))
    elif sub == "solve":
        if args.vir:
            res, _ = rep.timed("solve", wab.solve_vir, args.degree, args.depth)
        elif a is None:
            res = rep.timed("solve", wab.solve_reduced, args.degree, args.depth, args.c0_zero)
        else:
            for v, n in ((a, "a"), (1 if b is None else b, "b")):
                if not isinstance(v, (int, Fraction)):
                    raise UsageError(f"--{n} must be numeric for the full-system solver")
            res, _ = rep.timed("solve", wab.solve_full, a, 0 if b is None else b, args.degree, args.depth)
        _record(rep, res.to_dict(), res.complete, _families_text(res))
    elif sub == "normal-forms":
        r = rep.timed("normal-forms", wab.verify_normal_forms)
        rep.add_suites([r.to_dict()])
    elif sub == "lemmaA":
        if a is not None and not isinstance(a, (int, Fraction)):
            raise UsageError("--a must be numeric")
        if b is not None and not isinstance(b, (int, Fraction)):
            raise UsageError("--b must be numeric")
        r = rep.timed("lemmaA", wab.verify_a_constraint, a, 1 if b is None else b, args.degree, args.depth)
        rep.add_suites([r.to_dict()])


# --- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tpca", description="Check and construct conformal algebras.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("text", "json"), default="text")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--circ", default="circ", help="name of the associative product table")
    common.add_argument("--bracket", default="bracket", help="name of the Lie bracket table")
    common.add_argument("--star", default="star", help="name of the left-symmetric product table")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run checker suites on an algebra file")
    c.add_argument("file")
    c.add_argument("--suites", help=f"comma-separated: {', '.join(SUITES)}")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("catalog", parents=[common], help="show or check a classification entry")
    c.add_argument("id", help=", ".join(wab.CATALOG_IDS))
    c.add_argument("action", choices=("show", "check"))
    c.add_argument("--suites")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_catalog)

    for name, func, extra, hlp in (
            ("tensor", cmd_tensor, ("file1", "file2"), "tensor product of two TPCAs"),
            ("transform", cmd_transform, ("file", "matrix"), "change of basis by a matrix file"),
            ("derive", cmd_derive, ("file", "matrix"), "product a o D(b) from a derivation D")):
        c = sub.add_parser(name, parents=[common], help=hlp)
        for e in extra:
            c.add_argument(e)
        c.add_argument("-o", "--output")
        c.add_argument("--and-check", nargs="?", const="tpca", default=None, metavar="SUITES",
                       help="run suites on the result (default: tpca)")
        c.set_defaults(func=func)
        if name == "transform":
            c.add_argument("--name", help="name recorded in the output file")
        if name == "derive":
            c.add_argument("--commutator", metavar="TABLE",
                           help="also store the commutator of the derived product in TABLE")

    c = sub.add_parser("wab", parents=[common], help="W(a,b) classification pipeline")
    c.add_argument("sub", choices=("residuals", "solve", "normal-forms", "lemmaA"))
    c.add_argument("--candidate", help="catalog id (e.g. case-2.3) or rank-2 algebra file")
    c.add_argument("--a")
    c.add_argument("--b")
    c.add_argument("--degree", type=int, default=None)
    c.add_argument("--depth", type=int, default=2)
    c.add_argument("--c0-zero", action="store_true", help="reduced system with c0 = 0")
    c.add_argument("--vir", action="store_true", help="rank-1 Virasoro ansatz instead")
    c.set_defaults(func=cmd_wab)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS
    if getattr(args, "degree", 0) is None:
        if args.sub == "solve" and args.vir:
            args.degree = 3
        elif args.sub == "solve" and args.a is None:
            args.degree = 4
        else:
            args.degree = 2
    if getattr(args, "degree", 0) < 0 or getattr(args, "depth", 0) < 0:
        sys.stderr.write("tpca: --degree and --depth must be non-negative\n")
        return EXIT_USAGE
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "report", "command", "timings")}
    rep = Report(args.command if args.command != "wab" else f"wab {args.sub}", inputs, args.timings)
    try:
        args.func(args, rep)
    except (UsageError, MissingTable) as e:
        msg = e.args[0] if e.args else str(e)
        rep.data["pass"] = False
        rep.data["error"] = msg
        if args.report == "json":
            rep.emit("json", sys.stdout)
        sys.stderr.write(f"tpca: {msg}\n")
        return EXIT_USAGE
    except NotATPCA as e:
        rep.data["pass"] = False
        rep.data["error"] = str(e)
        rep.text.append(f"[FAIL] {e}")
    rep.emit(args.report, sys.stdout)
    return EXIT_PASS if rep.data["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
