"""Residual checkers for conformal axiom systems.

Each checker quantifies over all generator tuples and records the residual
``lhs - rhs`` of every law instance.  A law holds iff its residual is the
zero element; no simplification beyond canonical polynomial arithmetic is
performed.

Lambda-variables: ``x`` plays lambda, ``y`` mu and ``z`` gamma.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .conformal import (
    ConformalAlgebra,
    Endomorphism,
    LambdaElement,
    apply_endo,
    product,
)
from .polyring import Poly

__all__ = [
    "LawCheck",
    "CheckReport",
    "Ops",
    "run_laws",
    "check_associative",
    "check_commutative",
    "check_lie",
    "check_hom_lie",
    "check_left_symmetric",
    "check_novikov",
    "check_poisson_leibniz",
    "check_transposed_leibniz",
    "check_np_conditions",
    "check_prelie_commutative",
    "check_prelie_poisson",
    "check_diff_np",
    "check_assoc_consequences",
    "check_tpca",
    "check_nc_tpca",
]


@dataclass(frozen=True)
class LawCheck:
    law: str
    tuple: tuple
    residual: LambdaElement
    generators: tuple

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def residual_text(self) -> str:
        return self.residual.format(self.generators)

    def to_dict(self) -> dict:
        return {
            "law": self.law,
            "tuple": list(self.tuple),
            "residual": self.residual_text(),
            "pass": self.passed,
        }


@dataclass
class CheckReport:
    """Outcome of one suite.

    ``passed`` is true iff every recorded residual is zero.  ``status`` is
    ``"pass"``, ``"fail"`` or ``"vacuous"`` (residuals computed although the
    suite's hypotheses do not hold).
    """

    suite: str
    laws: list = field(default_factory=list)
    vacuous: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return all(l.passed for l in self.laws)

    @property
    def status(self) -> str:
        if self.vacuous:
            return "vacuous"
        return "pass" if self.passed else "fail"

    @property
    def ok(self) -> bool:
        """Not a failure: passed, or vacuous."""
        return self.vacuous or self.passed

    def failures(self) -> list:
        return [l for l in self.laws if not l.passed]

    def law_names(self) -> list:
        seen: dict = {}
        for l in self.laws:
            seen.setdefault(l.law, None)
        return list(seen)

    def law_passed(self, law: str) -> bool:
        return all(l.passed for l in self.laws if l.law == law)

    def to_dict(self) -> dict:
        d = {"suite": self.suite, "status": self.status, "pass": self.passed,
             "laws": [l.to_dict() for l in self.laws]}
        if self.note:
            d["note"] = self.note
        return d

    def to_text(self, verbose: bool = False) -> str:
        lines = [f"[{self.status.upper()}] {self.suite}"]
        if self.note:
            lines.append(f"  note: {self.note}")
        for law in self.law_names():
            inst = [l for l in self.laws if l.law == law]
            bad = [l for l in inst if not l.passed]
            lines.append(f"  {law}: {len(inst) - len(bad)}/{len(inst)} instances vanish")
            for l in (bad if not verbose else inst):
                lines.append(f"    ({', '.join(l.tuple)}): {l.residual_text()}")
        return "\n".join(lines)

    @classmethod
    def combine(cls, suite: str, reports: Iterable["CheckReport"], note: str = "") -> "CheckReport":
        laws = []
        vac = False
        for r in reports:
            laws.extend(r.laws)
            vac = vac or r.vacuous
        return cls(suite, laws, vac, note)


class Ops:
    """Product shorthands bound to an algebra and its table keys."""

    def __init__(self, alg: ConformalAlgebra, circ: str = "circ", bracket: str = "bracket",
                 star: str = "star"):
        self.alg = alg
        self.keys = {"circ": circ, "bracket": bracket, "star": star}

    def require(self, *roles: str):
        for r in roles:
            self.alg.table(self.keys[r])
        return self

    def c(self, a, b, i) -> LambdaElement:
        return product(self.alg, self.keys["circ"], a, b, i)

    def br(self, a, b, i) -> LambdaElement:
        return product(self.alg, self.keys["bracket"], a, b, i)

    def s(self, a, b, i) -> LambdaElement:
        return product(self.alg, self.keys["star"], a, b, i)


Law = tuple  # (label, arity, fn(ops, *elements) -> LambdaElement)


def run_laws(suite: str, alg: ConformalAlgebra, ops: Ops, laws: Sequence[Law], note: str = "") -> CheckReport:
    """Evaluate every law on every generator tuple of the matching arity."""
    gens = alg.generators
    basis = [alg.basis(i) for i in range(alg.rank)]
    out = []
    for label, arity, fn in laws:
        for tup in itertools.product(range(alg.rank), repeat=arity):
            res = fn(ops, *(basis[i] for i in tup))
            out.append(LawCheck(label, tuple(gens[i] for i in tup), res, gens))
    return CheckReport(suite, out, note=note)


# --- single-product laws ----------------------------------------------------

def _assoc(o, a, b, c):
    return o.c(a, o.c(b, c, "y"), "x") - o.c(o.c(a, b, "x"), c, "x+y")


def _comm(o, a, b):
    return o.c(a, b, "x") - o.c(b, a, "-d-x")


def check_associative(alg, op: str = "circ") -> CheckReport:
    return run_laws("associative", alg, Ops(alg, circ=op).require("circ"), [("associativity", 3, _assoc)])


def check_commutative(alg, op: str = "circ") -> CheckReport:
    return run_laws("commutative", alg, Ops(alg, circ=op).require("circ"), [("commutativity", 2, _comm)])


def _sesq(o, a, b):
    d = Poly.var("d")
    lam = Poly.var("x")
    left = o.br(a * d, b, "x") + o.br(a, b, "x") * lam
    right = o.br(a, b * d, "x") - o.br(a, b, "x") * (d + lam)
    return left + right


def _skew(o, a, b):
    return o.br(a, b, "x") + o.br(b, a, "-d-x")


def _jacobi(o, a, b, c):
    return (o.br(a, o.br(b, c, "y"), "x") - o.br(o.br(a, b, "x"), c, "x+y")
            - o.br(b, o.br(a, c, "x"), "y"))


def check_lie(alg, op: str = "bracket") -> CheckReport:
    """Sesquilinearity smoke test, skew-symmetry and the Jacobi identity."""
    ops = Ops(alg, bracket=op).require("bracket")
    return run_laws("lie", alg, ops, [
        ("sesquilinearity", 2, _sesq),
        ("skew-symmetry", 2, _skew),
        ("jacobi", 3, _jacobi),
    ])


def check_hom_lie(alg, op: str, alpha: Endomorphism) -> CheckReport:
    """Skew-symmetry and the alpha-twisted Jacobi identity."""
    if alpha.rank != alg.rank:
        raise ValueError("endomorphism rank does not match the algebra")
    A = lambda e: apply_endo(alpha, e)  # noqa: E731

    def hom_jacobi(o, a, b, c):
        return (o.br(A(a), o.br(b, c, "y"), "x") - o.br(o.br(a, b, "x"), A(c), "x+y")
                - o.br(A(b), o.br(a, c, "x"), "y"))

    ops = Ops(alg, bracket=op).require("bracket")
    return run_laws("hom-lie", alg, ops, [("skew-symmetry", 2, _skew), ("hom-jacobi", 3, hom_jacobi)])


def _lsym(o, a, b, c):
    return (o.s(o.s(a, b, "x"), c, "x+y") - o.s(a, o.s(b, c, "y"), "x")
            - o.s(o.s(b, a, "y"), c, "x+y") + o.s(b, o.s(a, c, "x"), "y"))


def _right_comm(o, a, b, c):
    return o.s(o.s(a, b, "x"), c, "x+y") - o.s(o.s(a, c, "x"), b, "-y-d")


def check_left_symmetric(alg, op: str = "star") -> CheckReport:
    return run_laws("left-symmetric", alg, Ops(alg, star=op).require("star"),
                    [("left-symmetry", 3, _lsym)])


def check_novikov(alg, op: str = "star") -> CheckReport:
    return run_laws("novikov", alg, Ops(alg, star=op).require("star"),
                    [("left-symmetry", 3, _lsym), ("right-commutativity", 3, _right_comm)])


# --- two-product laws -------------------------------------------------------

def _leibniz(o, a, b, c):
    return (o.br(a, o.c(b, c, "y"), "x") - o.c(o.br(a, b, "x"), c, "x+y")
            - o.c(b, o.br(a, c, "x"), "y"))


def _leibniz_rewritten(o, a, b, c):
    return (o.br(o.c(a, b, "x"), c, "y") - o.c(b, o.br(a, c, "x"), "y-x")
            - o.c(a, o.br(b, c, "y-x"), "x"))


def _tleibniz(o, a, b, c):
    return (o.c(a, o.br(b, c, "y"), "x") * 2 - o.br(o.c(a, b, "x"), c, "x+y")
            - o.br(b, o.c(a, c, "x"), "y"))


def _tleibniz_rewritten(o, a, b, c):
    return (o.c(o.br(a, b, "x"), c, "y") * 2 - o.br(a, o.c(b, c, "y-x"), "x")
            + o.br(b, o.c(a, c, "x"), "y-x"))


# "defining" is the law as usually stated; "rewritten" is an equivalent form
# obtained with commutativity of circ and skew-symmetry of the bracket.
_FORMS = {
    "poisson": {"defining": ("leibniz", _leibniz), "rewritten": ("leibniz-rewritten", _leibniz_rewritten)},
    "transposed": {"defining": ("transposed-leibniz", _tleibniz),
                   "rewritten": ("transposed-leibniz-rewritten", _tleibniz_rewritten)},
}


def _forms(form: str, family: str) -> list:
    table = _FORMS[family]
    chosen = tuple(table) if form == "both" else (form,)
    for f in chosen:
        if f not in table:
            raise ValueError(f"unknown form {form!r}; expected one of {tuple(table) + ('both',)}")
    return [(table[f][0], 3, table[f][1]) for f in chosen]


def check_poisson_leibniz(alg, circ: str = "circ", bracket: str = "bracket", form: str = "defining") -> CheckReport:
    ops = Ops(alg, circ, bracket).require("circ", "bracket")
    return run_laws("poisson-leibniz", alg, ops, _forms(form, "poisson"))


def check_transposed_leibniz(alg, circ: str = "circ", bracket: str = "bracket",
                             form: str = "defining") -> CheckReport:
    ops = Ops(alg, circ, bracket).require("circ", "bracket")
    return run_laws("transposed-leibniz", alg, ops, _forms(form, "transposed"))


def _f7(o, a, b, c):
    return o.s(o.c(a, b, "x"), c, "x+y") - o.c(a, o.s(b, c, "y"), "x")


def _h8(o, a, b, c):
    return (o.c(o.s(a, b, "x"), c, "x+y") - o.s(a, o.c(b, c, "y"), "x")
            - o.c(o.s(b, a, "y"), c, "x+y") + o.s(b, o.c(a, c, "x"), "y"))


def _hh1(o, a, b, c):
    return (o.s(a, o.c(b, c, "y"), "x") - o.c(o.s(a, b, "x"), c, "x+y")
            - o.c(b, o.s(a, c, "x"), "y"))


def _np_shift1(o, a, b, c):
    return o.c(a, o.s(b, c, "-d-y"), "x") - o.s(o.c(a, b, "x"), c, "-d-y")


def _np_shift2(o, a, b, c):
    return o.c(a, o.s(b, c, "y"), "-d-x") - o.s(o.c(a, b, "-d-y"), c, "-d+y-x")


def _np_shift3(o, a, b, c):
    return o.c(a, o.s(b, c, "-d-y"), "-d-x") - o.s(o.c(a, b, "-d+y-x"), c, "-d-y")


def check_np_conditions(alg, circ: str = "circ", star: str = "star") -> CheckReport:
    """The two compatibility laws plus their three shifted-variable consequences."""
    ops = Ops(alg, circ=circ, star=star).require("circ", "star")
    return run_laws("np-conditions", alg, ops, [
        ("circ-star-associativity", 3, _f7),
        ("circ-star-symmetry", 3, _h8),
        ("np-shift-1", 3, _np_shift1),
        ("np-shift-2", 3, _np_shift2),
        ("np-shift-3", 3, _np_shift3),
    ])


def check_prelie_commutative(alg, circ: str = "circ", star: str = "star") -> CheckReport:
    ops = Ops(alg, circ=circ, star=star).require("circ", "star")
    return run_laws("prelie-commutative", alg, ops, [("star-derivation", 3, _hh1)])


def _comm_assoc(alg, circ) -> list:
    return [check_associative(alg, circ), check_commutative(alg, circ)]


def check_prelie_poisson(alg, circ: str = "circ", star: str = "star") -> CheckReport:
    ops = Ops(alg, circ=circ, star=star).require("circ", "star")
    parts = _comm_assoc(alg, circ) + [
        check_left_symmetric(alg, star),
        run_laws("", alg, ops, [("circ-star-associativity", 3, _f7), ("circ-star-symmetry", 3, _h8)]),
    ]
    return CheckReport.combine("prelie-poisson", parts)


def check_diff_np(alg, circ: str = "circ", star: str = "star") -> CheckReport:
    ops = Ops(alg, circ=circ, star=star).require("circ", "star")
    parts = _comm_assoc(alg, circ) + [
        check_novikov(alg, star),
        run_laws("", alg, ops, [("circ-star-associativity", 3, _f7), ("circ-star-symmetry", 3, _h8),
                                ("star-derivation", 3, _hh1)]),
    ]
    return CheckReport.combine("diff-np", parts)


def _rem1_1(o, a, b, c):
    return o.c(a, o.c(b, c, "-d-y"), "x") - o.c(o.c(a, b, "x"), c, "-d-y")


def _rem1_2(o, a, b, c):
    return o.c(a, o.c(b, c, "y"), "-d-x") - o.c(o.c(a, b, "-d-y"), c, "-d+y-x")


def _rem1_3(o, a, b, c):
    return o.c(a, o.c(b, c, "-d-y"), "-d-x") - o.c(o.c(a, b, "-d+y-x"), c, "-d-y")


def _rem3(o, a, b, c):
    return o.c(a, o.c(b, c, "y"), "x") - o.c(b, o.c(a, c, "x"), "y")


def check_assoc_consequences(alg, circ: str = "circ") -> CheckReport:
    """Shifted-variable associativity consequences and the exchange identity
    valid in commutative associative algebras."""
    ops = Ops(alg, circ=circ).require("circ")
    return run_laws("assoc-consequences", alg, ops, [
        ("assoc-shift-1", 3, _rem1_1),
        ("assoc-shift-2", 3, _rem1_2),
        ("assoc-shift-3", 3, _rem1_3),
        ("exchange", 3, _rem3),
    ])


def check_tpca(alg, circ: str = "circ", bracket: str = "bracket") -> CheckReport:
    """Commutative associative + Lie + transposed Leibniz."""
    Ops(alg, circ, bracket).require("circ", "bracket")
    return CheckReport.combine("tpca", _comm_assoc(alg, circ) + [
        check_lie(alg, bracket), check_transposed_leibniz(alg, circ, bracket)])


def check_nc_tpca(alg, circ: str = "circ", bracket: str = "bracket") -> CheckReport:
    """Associative + Lie + transposed Leibniz; commutativity not required."""
    Ops(alg, circ, bracket).require("circ", "bracket")
    return CheckReport.combine("nc-tpca", [
        check_associative(alg, circ), check_lie(alg, bracket),
        check_transposed_leibniz(alg, circ, bracket)])
