"""Derived identities of transposed Poisson conformal algebras.

Contents: the seven consequences of the transposed Leibniz rule, the
n-th-product form of that rule, and the criterion for an algebra to be
simultaneously Poisson and transposed Poisson.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

from .axioms import (
    CheckReport,
    LawCheck,
    Ops,
    check_poisson_leibniz,
    check_tpca,
    check_transposed_leibniz,
    run_laws,
)
from .conformal import nth

__all__ = [
    "IDENTITY_LAWS",
    "check_derived_identities",
    "check_nth_transposed_leibniz",
    "default_nth_bound",
    "CompatibilityResult",
    "check_compatibility_criterion",
    "check_triple_products",
]


def _cyclic_circ_outside(o, x, y, z):
    return (o.c(x, o.br(y, z, "y"), "x") + o.c(y, o.br(z, x, "-d-x"), "y")
            + o.c(z, o.br(x, y, "x"), "-d-x-y"))


def _cyclic_bracket_inside(o, x, y, z):
    return (o.c(o.br(x, y, "x"), z, "y") + o.c(o.br(y, z, "y-x"), x, "-d-x")
            + o.c(o.br(z, x, "-d-x"), y, "-d-y+x"))


def _cyclic_h_outer_bracket(o, h, x, y, z):
    return (o.br(o.c(h, o.br(x, y, "z"), "x"), z, "x+y")
            + o.br(o.c(h, o.br(y, z, "y-z"), "x"), x, "-d-z")
            + o.br(o.c(h, o.br(z, x, "-d-z"), "x"), y, "-d-y+z"))


def _cyclic_h_inner(o, h, x, y, z):
    return (o.br(o.br(x, y, "z"), o.c(h, z, "x"), "y")
            + o.br(o.br(y, z, "y-z"), o.c(h, x, "x"), "-d-x-z")
            + o.br(o.br(z, x, "-d-z"), o.c(h, y, "x"), "-d-x-y+z"))


def _cyclic_h_mixed(o, h, x, y, z):
    return (o.c(o.br(h, x, "x"), o.br(y, z, "y-z"), "x+z")
            + o.c(o.br(h, y, "x"), o.br(z, x, "-d-z"), "x+y-z")
            + o.c(o.br(h, z, "x"), o.br(x, y, "z"), "-d-y"))


def _six_a(o, u, v, x, y):
    return (o.br(o.c(u, x, "x"), o.c(v, y, "z"), "y")
            + o.br(o.c(v, x, "z"), o.c(u, y, "x"), "z+y-x")
            - o.c(o.c(u, v, "x"), o.br(x, y, "y-x"), "x+z") * 2)


def _six_b(o, u, v, x, y):
    return (o.c(x, o.br(u, o.c(v, y, "z"), "x"), "y-x")
            + o.c(o.br(o.c(v, x, "z"), u, "z+y-x"), y, "z+y")
            - o.c(o.c(u, v, "x"), o.br(x, y, "y-x"), "x+z"))


IDENTITY_LAWS = (
    ("cyclic-circ-outside", 3, _cyclic_circ_outside),
    ("cyclic-bracket-inside", 3, _cyclic_bracket_inside),
    ("cyclic-h-outer-bracket", 4, _cyclic_h_outer_bracket),
    ("cyclic-h-inner", 4, _cyclic_h_inner),
    ("cyclic-h-mixed", 4, _cyclic_h_mixed),
    ("four-element-double", 4, _six_a),
    ("four-element-single", 4, _six_b),
)


def check_derived_identities(alg, circ: str = "circ", bracket: str = "bracket",
                             laws=None, precondition: str = "tpca") -> CheckReport:
    """All seven derived identities (or the named subset).

    When the algebra fails the precondition suite the residuals are still
    computed, and the report is marked vacuous instead of failed.
    ``precondition="none"`` skips that check.
    """
    ops = Ops(alg, circ, bracket).require("circ", "bracket")
    chosen = [l for l in IDENTITY_LAWS if laws is None or l[0] in laws]
    if laws is not None and len(chosen) != len(set(laws)):
        known = {l[0] for l in IDENTITY_LAWS}
        raise ValueError(f"unknown identity names: {sorted(set(laws) - known)}")
    report = run_laws("identities", alg, ops, chosen)
    if precondition == "tpca":
        pre = check_tpca(alg, circ, bracket)
        if not pre.passed:
            report.vacuous = True
            report.note = "algebra is not a TPCA; identities are not implied"
    elif precondition != "none":
        raise ValueError(f"unknown precondition {precondition!r}")
    return report


def default_nth_bound(alg, circ: str = "circ", bracket: str = "bracket") -> int:
    """Bound on n, m beyond which every n-th product residual vanishes.

    Total degree in d and lambda is used because sesquilinearity turns d
    into lambda.
    """
    def deg(t):
        return max((p.total_degree() for _, e in t.items() for p in e if p), default=0)

    return deg(alg.table(circ)) + deg(alg.table(bracket)) + 1


def check_nth_transposed_leibniz(alg, circ: str = "circ", bracket: str = "bracket",
                                 N: int | None = None) -> CheckReport:
    """``2 a_(n)(b_[m] c) = sum_j C(n,j) (a_(j) b)_[n+m-j] c + b_[m](a_(n) c)``
    for every generator triple and all ``n, m <= N``."""
    Ops(alg, circ, bracket).require("circ", "bracket")
    if N is None:
        N = default_nth_bound(alg, circ, bracket)
    if N < 0:
        raise ValueError("N must be non-negative")
    gens = alg.generators
    basis = [alg.basis(i) for i in range(alg.rank)]
    out = []
    for i, j, k in itertools.product(range(alg.rank), repeat=3):
        a, b, c = basis[i], basis[j], basis[k]
        for n in range(N + 1):
            a_n_c = nth(alg, circ, a, c, n)
            a_j_b = [nth(alg, circ, a, b, jj) for jj in range(n + 1)]
            for m in range(N + 1):
                res = nth(alg, circ, a, nth(alg, bracket, b, c, m), n) * 2
                for jj in range(n + 1):
                    res = res - nth(alg, bracket, a_j_b[jj], c, n + m - jj) * comb(n, jj)
                res = res - nth(alg, bracket, b, a_n_c, m)
                out.append(LawCheck(f"nth-transposed-leibniz[n={n},m={m}]",
                                    (gens[i], gens[j], gens[k]), res, gens))
    return CheckReport("nth-transposed-leibniz", out)


def _tp_circ_bracket(o, a, b, c):
    return o.c(a, o.br(b, c, "y"), "x")


def _tp_bracket_circ(o, a, b, c):
    return o.c(o.br(b, a, "y-x"), c, "y")


def _tp_bracket_of_circ(o, a, b, c):
    return o.br(o.c(a, b, "x"), c, "x+y")


def check_triple_products(alg, circ: str = "circ", bracket: str = "bracket") -> CheckReport:
    ops = Ops(alg, circ, bracket).require("circ", "bracket")
    return run_laws("triple-products", alg, ops, [
        ("circ-of-bracket", 3, _tp_circ_bracket),
        ("bracket-then-circ", 3, _tp_bracket_circ),
        ("bracket-of-circ", 3, _tp_bracket_of_circ),
    ])


@dataclass
class CompatibilityResult:
    both_hold: bool
    triple_products_vanish: bool
    poisson: CheckReport
    transposed: CheckReport
    triples: CheckReport

    @property
    def agreement(self) -> bool:
        return self.both_hold == self.triple_products_vanish

    def to_dict(self) -> dict:
        return {
            "both_hold": self.both_hold,
            "triple_products_vanish": self.triple_products_vanish,
            "agreement": self.agreement,
        }


def check_compatibility_criterion(alg, circ: str = "circ", bracket: str = "bracket") -> CompatibilityResult:
    """Poisson and transposed Leibniz rules together versus vanishing of the
    three mixed triple products.  Meaningful when ``circ`` is commutative
    associative and ``bracket`` is Lie."""
    p = check_poisson_leibniz(alg, circ, bracket)
    t = check_transposed_leibniz(alg, circ, bracket)
    tr = check_triple_products(alg, circ, bracket)
    return CompatibilityResult(p.passed and t.passed, tr.passed, p, t, tr)
