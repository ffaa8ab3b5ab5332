"""The Virasoro and W(a,b) Lie conformal algebras and compatible products.

A product on W(a,b) is described by eight polynomials in ``d`` and ``x``::

    L o L = f1 L + f2 M      L o M = g1 L + g2 M
    M o L = h1 L + h2 M      M o M = q1 L + q2 M

:func:`residual_system` generates, from first principles, the conditions
for such a product to be associative and to satisfy the transposed Leibniz
rule with the W(a,b) bracket.  :func:`transcribed_equations` holds
independent hand transcriptions of a subset of those conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .axioms import Ops, _assoc, _tleibniz
from .conformal import ConformalAlgebra, LambdaElement, ParamDecl, StructureTable
from .polyring import ParamField, Poly, parse_poly

__all__ = [
    "make_vir",
    "make_wab",
    "CATALOG_IDS",
    "catalog",
    "catalog_octuple",
    "FUNCS",
    "ORACLE_LABELS",
    "S_GENERIC",
    "CandidateOctuple",
    "ResidualEntry",
    "ResidualSystem",
    "residual_system",
    "EQUATION_LABELS",
    "transcribed_equations",
    "shifted",
    "ansatz",
    "reduced_equations",
    "a2_shape",
    "solve_reduced",
    "FAMILY_ASSUMPTIONS",
    "solve_full",
    "family_octuple",
    "solve_vir",
    "VerificationReport",
    "table_differences",
    "normal_form_transformations",
    "NC_IDENTITY_SUBSET",
    "nf1_commutativity",
    "verify_normal_forms",
    "verify_a_constraint",
    "verify_vir_classification",
]

FUNCS = ("f1", "f2", "g1", "g2", "h1", "h2", "q1", "q2")
# (row generator, column generator) -> (function giving the L part, function giving the M part)
_PAIRS = {(0, 0): ("f1", "f2"), (0, 1): ("g1", "g2"), (1, 0): ("h1", "h2"), (1, 1): ("q1", "q2")}

S_GENERIC = "s0 + s1*x + s2*x^2 + s3*x^3"


def _P(s) -> Poly:
    return parse_poly(s) if isinstance(s, str) else Poly.coerce(s)


def _wab_bracket(a, b) -> StructureTable:
    a, b = Poly.coerce(_P(a)), Poly.coerce(_P(b))
    d, x = Poly.var("d"), Poly.var("x")
    ll = LambdaElement([d + x * 2, Poly()])
    lm = LambdaElement([Poly(), d + a * x + b])
    ml = LambdaElement([Poly(), (a - 1) * d + a * x - b])
    z = LambdaElement.zero(2)
    return StructureTable([[ll, lm], [ml, z]], "skew")


def _vir_bracket() -> StructureTable:
    return StructureTable([[LambdaElement([_P("d + 2*x")])]], "skew")


def _decls(alg_tables, nonzero=()) -> tuple:
    used: set = set()
    for t in alg_tables.values():
        used |= t.params()
    return tuple(ParamDecl(n, n in nonzero) for n in used)


def make_vir() -> ConformalAlgebra:
    return ConformalAlgebra(("L",), {"bracket": _vir_bracket()}, name="Vir")


def make_wab(a="a", b="b") -> ConformalAlgebra:
    """W(a, b); ``a`` and ``b`` may be numbers, parameter names or expressions."""
    tables = {"bracket": _wab_bracket(a, b)}
    return ConformalAlgebra(("L", "M"), tables, _decls(tables), name=f"W({a},{b})")


# --- candidate octuples -----------------------------------------------------


@dataclass(frozen=True)
class CandidateOctuple:
    f1: Poly = field(default_factory=Poly)
    f2: Poly = field(default_factory=Poly)
    g1: Poly = field(default_factory=Poly)
    g2: Poly = field(default_factory=Poly)
    h1: Poly = field(default_factory=Poly)
    h2: Poly = field(default_factory=Poly)
    q1: Poly = field(default_factory=Poly)
    q2: Poly = field(default_factory=Poly)
    nonzero: frozenset = frozenset()

    def __post_init__(self):
        for n in FUNCS:
            p = _P(getattr(self, n))
            bad = p.variables() - {"d", "x"}
            if bad:
                raise ValueError(f"{n} may only involve d and x, found {sorted(bad)}")
            object.__setattr__(self, n, p)
        object.__setattr__(self, "nonzero", frozenset(self.nonzero))

    @classmethod
    def of(cls, nonzero: Iterable[str] = (), **funcs) -> "CandidateOctuple":
        unknown = set(funcs) - set(FUNCS)
        if unknown:
            raise ValueError(f"unknown functions {sorted(unknown)}")
        return cls(**{k: _P(v) for k, v in funcs.items()}, nonzero=frozenset(nonzero))

    def funcs(self) -> dict:
        return {n: getattr(self, n) for n in FUNCS}

    def params(self) -> set:
        out: set = set()
        for p in self.funcs().values():
            out |= p.params()
        return out

    def circ_table(self) -> StructureTable:
        rows = [[LambdaElement([getattr(self, _PAIRS[(i, j)][0]), getattr(self, _PAIRS[(i, j)][1])])
                 for j in range(2)] for i in range(2)]
        return StructureTable(rows)

    def to_algebra(self, a="a", b="b", name: str = "") -> ConformalAlgebra:
        tables = {"circ": self.circ_table(), "bracket": _wab_bracket(a, b)}
        return ConformalAlgebra(("L", "M"), tables, _decls(tables, self.nonzero), name)

    @classmethod
    def from_algebra(cls, alg: ConformalAlgebra, circ: str = "circ") -> "CandidateOctuple":
        if alg.rank != 2:
            raise ValueError("octuples describe rank-2 algebras")
        t = alg.table(circ)
        vals = {}
        for (i, j), (fl, fm) in _PAIRS.items():
            vals[fl], vals[fm] = t.entry(i, j)[0], t.entry(i, j)[1]
        return cls(**vals, nonzero=frozenset(alg.nonzero_params()))

    def evaluate_params(self, bindings) -> "CandidateOctuple":
        return CandidateOctuple(**{n: p.evaluate_params(bindings) for n, p in self.funcs().items()},
                                nonzero=self.nonzero - set(bindings))

    def subs_params(self, values) -> "CandidateOctuple":
        return CandidateOctuple(**{n: p.subs_params(values) for n, p in self.funcs().items()},
                                nonzero=self.nonzero - set(values))


# --- catalog ------------------------------------------------------------------

_CATALOG = {
    "1": (None, {}, ()),
    "2.1": (2, {"f2": S_GENERIC}, ()),
    "2.2": (2, {"f1": "c1", "f2": "c2*x", "g2": "c1"}, ("c1",)),
    "2.3": (2, {"f1": "c1", "f2": "c3", "g2": "c1", "h2": "c1"}, ("c1",)),
    "2.4": (2, {"f1": "m - k*x", "f2": "k*m/c0*x - k^2/c0*x^2", "g2": "m - k*x",
                "h1": "c0", "h2": "k*x", "q2": "c0"}, ("c0",)),
    "NF1": (2, {"f2": S_GENERIC}, ()),
    "NF2": (2, {"f1": "c1", "g2": "c1"}, ("c1",)),
    "NF3": (2, {"f1": "c1", "g2": "c1", "h2": "c1"}, ("c1",)),
    "NF4": (2, {"f1": "c1", "f2": "1", "g2": "c1", "h2": "c1"}, ("c1",)),
    "NF5": (2, {"f1": "c", "g2": "c", "h1": "1", "h2": "0", "q2": "1"}, ()),
}

CATALOG_IDS = ("1", "2.1", "2.2", "2.3", "2.4", "NF1", "NF2", "NF3", "NF4", "NF5", "vir-c")


def catalog_octuple(case: str) -> CandidateOctuple:
    if case not in _CATALOG:
        raise KeyError(f"unknown catalog id {case!r}; known: {', '.join(CATALOG_IDS)}")
    _, funcs, nz = _CATALOG[case]
    return CandidateOctuple.of(nonzero=nz, **funcs)


def catalog(case: str) -> ConformalAlgebra:
    """Algebras of the W(a,b)/Virasoro classification by id.

    ``"1"`` is W(a,b) with the zero product; ``"2.x"`` and ``"NF1".."NF5"``
    live on W(2,b); ``"vir-c"`` is Vir with ``L o L = c L``.
    """
    if case == "vir-c":
        circ = StructureTable([[LambdaElement([_P("c")])]], "commutative")
        return ConformalAlgebra(("L",), {"circ": circ, "bracket": _vir_bracket()}, ("c",), name="vir-c")
    oct_ = catalog_octuple(case)
    a = _CATALOG[case][0]
    return oct_.to_algebra("a" if a is None else a, "b", name=case)


# --- residual system ----------------------------------------------------------

_GEN = ("L", "M")
_TRIPLES = list(itertools.product(range(2), repeat=3))

EQUATION_LABELS: dict = {}
_n = 8
for _t in _TRIPLES:
    for _c in range(2):
        EQUATION_LABELS[("assoc", _t, _c)] = f"yyy{_n}"
        _n += 1
for _t in _TRIPLES:
    for _c in range(2):
        if _t[1:] == (1, 1) and _c == 0:
            continue  # bracket of M with M-valued output only: component is identically zero
        EQUATION_LABELS[("tl", _t, _c)] = f"yyy{_n}"
        _n += 1
del _n, _t, _c


@dataclass(frozen=True)
class ResidualEntry:
    label: str
    law: str           # "assoc" or "tl"
    triple: tuple      # generator names
    component: str     # "L" or "M"
    residual: Poly


@dataclass
class ResidualSystem:
    entries: list  # every component, vanishing or not

    @property
    def nonzero(self) -> list:
        return [e for e in self.entries if e.residual]

    def is_empty(self) -> bool:
        return not self.nonzero

    def __len__(self):
        return len(self.nonzero)

    def __iter__(self):
        return iter(self.nonzero)

    def by_label(self) -> dict:
        return {e.label: e.residual for e in self.entries}

    def to_dict(self) -> dict:
        return {"empty": self.is_empty(),
                "residuals": [{"label": e.label, "law": e.law, "triple": list(e.triple),
                               "component": e.component, "residual": str(e.residual)}
                              for e in self.nonzero]}


def residual_system(c: CandidateOctuple, a="a", b="b") -> ResidualSystem:
    """Associativity and transposed-Leibniz residual components of ``c`` on
    W(a, b), for all eight generator triples."""
    alg = c.to_algebra(a, b)
    ops = Ops(alg)
    basis = [alg.basis(0), alg.basis(1)]
    entries = []
    for law, fn in (("assoc", _assoc), ("tl", _tleibniz)):
        for t in _TRIPLES:
            res = fn(ops, *(basis[i] for i in t))
            for comp in range(2):
                label = EQUATION_LABELS.get((law, t, comp), f"{law}({''.join(_GEN[i] for i in t)})[{_GEN[comp]}]")
                entries.append(ResidualEntry(label, law, tuple(_GEN[i] for i in t), _GEN[comp], res[comp]))
    return ResidualSystem(entries)


# --- hand transcriptions ------------------------------------------------------


def shifted(f: Poly, d_arg, x_arg) -> Poly:
    """``f(d_arg, x_arg)`` by simultaneous substitution."""
    tmp = f.rename("x", "_s") if "x" in f.variables() else f
    tmp = tmp.substitute("d", _P(d_arg))
    return tmp.substitute("_s", _P(x_arg)) if "_s" in tmp.variables() else tmp


def _oracle_eqs(F: Mapping[str, Poly], a: Poly, b: Poly) -> dict:
    D, lam, mu = Poly.var("d"), Poly.var("x"), Poly.var("y")

    def S(n, d_arg, x_arg):
        return shifted(F[n], d_arg, x_arg)

    dl, mlm = D + lam, -lam - mu
    lpm, dm = lam + mu, D + mu
    eqs = {}
    # associativity, first components
    for lbl, (u1, u2, v1, v2, w1, w2, z1, z2) in {
        "yyy8": ("f1", "f2", "f1", "g1", "f1", "f2", "f1", "h1"),
        "yyy9": ("f1", "f2", "f2", "g2", "f1", "f2", "f2", "h2"),
        "yyy10": ("g1", "g2", "f1", "g1", "f1", "f2", "g1", "q1"),
        "yyy12": ("h1", "h2", "f1", "g1", "g1", "g2", "f1", "h1"),
        "yyy16": ("f1", "f2", "h1", "q1", "h1", "h2", "f1", "h1"),
        "yyy23": ("q1", "q2", "h2", "q2", "q1", "q2", "g2", "q2"),
    }.items():
        eqs[lbl] = (S(u1, dl, mu) * S(v1, D, lam) + S(u2, dl, mu) * S(v2, D, lam)
                    - S(w1, mlm, lam) * S(z1, D, lpm) - S(w2, mlm, lam) * S(z2, D, lpm))
    two = Poly.const(2)
    eqs["yyy24"] = (two * (D + lam + mu * 2) * F["f1"] - (D + lam * 2 + mu * 2) * S("f1", mlm, lam)
                    - (D + mu * 2) * S("f1", dm, lam))
    eqs["yyy25"] = (two * (D + lam + mu * 2) * F["f2"] - ((a - 1) * D + a * lpm - b) * S("f2", mlm, lam)
                    - (D + a * mu + b) * S("f2", dm, lam))
    eqs["yyy26"] = two * (D + lam + a * mu + b) * F["g1"] - (D + mu * 2) * S("g1", dm, lam)
    eqs["yyy27"] = (two * (D + lam + a * mu + b) * F["g2"] - (D + a * lpm + b) * S("f1", mlm, lam)
                    - (D + a * mu + b) * S("g2", dm, lam))
    eqs["yyy30"] = (D + a * lpm + b) * S("g1", mlm, lam) + ((a - 1) * D + a * mu - b) * S("g1", dm, lam)
    eqs["yyy31"] = (two * (D + lam + mu * 2) * F["h1"] - (D + lam * 2 + mu * 2) * S("h1", mlm, lam)
                    - (D + mu * 2) * S("h1", dm, lam))
    eqs["yyy33"] = two * (D + lam + a * mu + b) * F["q1"] - (D + mu * 2) * S("q1", dm, lam)
    eqs["yyy34"] = (two * (D + lam + a * mu + b) * F["q2"] - (D + a * lpm + b) * S("h1", mlm, lam)
                    - (D + a * mu + b) * S("q2", dm, lam))
    eqs["yyy37"] = (D + a * lpm + b) * S("q1", mlm, lam) + ((a - 1) * D + a * mu - b) * S("q1", dm, lam)
    return eqs


ORACLE_LABELS = ("yyy8", "yyy9", "yyy10", "yyy12", "yyy16", "yyy23", "yyy24", "yyy25", "yyy26",
                 "yyy27", "yyy30", "yyy31", "yyy33", "yyy34", "yyy37")


def transcribed_equations(c: CandidateOctuple, a="a", b="b", subset: Sequence[str] | None = None) -> dict:
    """Hand-transcribed equations (``lhs - rhs``) for the labels in ``subset``.

    Returns ``{label: residual}``; an equation holds iff its residual is zero.
    """
    subset = ORACLE_LABELS if subset is None else tuple(subset)
    unknown = set(subset) - set(ORACLE_LABELS)
    if unknown:
        raise ValueError(f"no transcription for {sorted(unknown)}")
    eqs = _oracle_eqs(c.funcs(), _P(a), _P(b))
    return {k: eqs[k] for k in subset}


# --- bounded-degree ansatz and solver drivers ---------------------------------


def ansatz(name: str, degree: int, variables=("d", "x")) -> tuple:
    """``sum u_{i,j} d^i x^j`` over ``i, j <= degree`` with fresh unknowns.

    Returns ``(poly, unknown_names)``.  With one variable the unknowns are
    ``name0, name1, ...``.
    """
    if degree < 0:
        raise ValueError("degree bound must be non-negative")
    terms, names = Poly(), []
    if len(variables) == 1:
        for j in range(degree + 1):
            u = f"{name}{j}"
            names.append(u)
            terms = terms + Poly.var(u) * Poly.var(variables[0]) ** j
        return terms, names
    for i in range(degree + 1):
        for j in range(degree + 1):
            u = f"{name}_{i}_{j}"
            names.append(u)
            terms = terms + Poly.var(u) * Poly.var(variables[0]) ** i * Poly.var(variables[1]) ** j
    return terms, names


def reduced_equations(p: Poly, s: Poly, l: Poly, c0) -> dict:
    """The six conditions on ``p, s, l`` (polynomials in ``x``) and ``c0``
    left over when a = 2 and the product has the shape
    ``g1 = q1 = 0, h1 = q2 = c0, f1 = g2 = p, f2 = s, h2 = l``."""
    c0 = Poly.coerce(_P(c0) if isinstance(c0, str) else c0)
    lam, mu = Poly.var("x"), Poly.var("y")

    def at(f, arg):
        return f.substitute("x", arg)

    P = {"lam": p, "mu": at(p, mu), "sum": at(p, lam + mu)}
    S = {"lam": s, "mu": at(s, mu), "sum": at(s, lam + mu)}
    L = {"lam": l, "mu": at(l, mu), "sum": at(l, lam + mu)}
    return {
        "r1": c0 * L["lam"] + c0 * L["mu"] - c0 * L["sum"],
        "r2": c0 * S["mu"] + P["mu"] * L["lam"] - c0 * S["sum"] - L["lam"] * L["sum"],
        "r3": c0 * L["lam"] + c0 * P["sum"] - c0 * P["mu"],
        "r4": P["lam"] * L["mu"] + c0 * S["lam"] - P["lam"] * L["sum"],
        "r5": P["lam"] * S["mu"] + P["mu"] * S["lam"] - P["lam"] * S["sum"] - S["lam"] * L["sum"],
        "r6": P["lam"] * P["sum"] + c0 * S["lam"] - P["lam"] * P["mu"],
    }


def a2_shape(p: Poly, s: Poly, l: Poly, c0="c0") -> CandidateOctuple:
    c0 = _P(c0)
    return CandidateOctuple(f1=p, f2=s, g2=p, h1=c0, h2=l, q2=c0)


def _family_polys(fam, names) -> Poly:
    out = Poly()
    for j, u in enumerate(names):
        v = fam.value(u)
        if not v.is_zero():
            out = out + Poly.const(v) * Poly.var("x") ** j
    return out


# Branch conditions of each family, with c1 naming the constant term of p.
FAMILY_ASSUMPTIONS = {
    "B1": ("c0 = 0", "c1 = 0"),
    "B2": ("c0 = 0", "c1 != 0", "l = 0"),
    "B3": ("c0 = 0", "c1 != 0", "l = c1"),
    "B4": ("c0 != 0",),
}


def _label_reduced(fam, D: int) -> tuple:
    """Match a solver family against the four shapes; returns (label, view in the family notation)."""
    p = _family_polys(fam, [f"p{j}" for j in range(D + 1)])
    s = _family_polys(fam, [f"s{j}" for j in range(D + 1)])
    l = _family_polys(fam, [f"l{j}" for j in range(D + 1)])
    c0 = fam.value("c0")
    x = Poly.var("x")
    free = set(fam.free)

    def is_free_symbol(v: ParamField) -> str | None:
        if v.is_polynomial() and len(v.num) == 1:
            (m, c), = v.num.items()
            if c == 1 and len(m) == 1 and m[0][1] == 1 and m[0][0] in free:
                return m[0][0]
        return None

    view = None
    if c0.is_zero():
        if not p and not l:
            if all(fam.value(f"s{j}") == ParamField(f"s{j}") for j in range(D + 1)):
                return "B1", {"c0": "0", "p": "0", "l": "0", "s": "s(x) arbitrary"}
        elif p.is_constant() and (c1 := is_free_symbol(p.constant())) and c1 in fam.nonzero:
            if not l:
                if not s:
                    return "B2", {"c0": "0", "p": "c1", "l": "0", "s": "0"}
                if s.degree("x") == 1 and s.coefficient_of("x", 0).is_zero():
                    c2 = is_free_symbol(s.coefficient_of("x", 1).constant())
                    if c2:
                        return "B2", {"c0": "0", "p": "c1", "l": "0", "s": "c2*x"}
            elif l == p and s.is_constant():
                if not s:
                    view = {"c0": "0", "p": "c1", "l": "c1", "s": "0"}
                elif is_free_symbol(s.constant()):
                    view = {"c0": "0", "p": "c1", "l": "c1", "s": "c3"}
                if view:
                    return "B3", view
    else:
        c0n = is_free_symbol(c0)
        if c0n and c0n in fam.nonzero:
            k = l.coefficient_of("x", 1).constant()
            m = p.coefficient_of("x", 0).constant()
            if l == x * Poly.const(k) and p == Poly.const(m) - x * Poly.const(k):
                expect = (x * Poly.const(k * m / c0) - x ** 2 * Poly.const(k * k / c0))
                if s == expect:
                    return "B4", {"c0": "c0", "p": "m - k*x", "l": "k*x", "s": "k*m/c0*x - k^2/c0*x^2"}
    return None, {"p": str(p), "s": str(s), "l": str(l), "c0": str(c0)}


def solve_reduced(degree: int = 4, depth: int = 2, c0_zero: bool = False):
    """Solve the reduced a = 2 system with ``p, s, l`` of degree <= ``degree``.

    Splits on ``c0`` then on the constant term of ``p``.  With ``c0_zero``
    the scalar ``c0`` is set to zero before solving.
    """
    from .solver import coefficient_equations, solve

    p, pn = ansatz("p", degree, ("x",))
    s, sn = ansatz("s", degree, ("x",))
    l, ln = ansatz("l", degree, ("x",))
    c0 = Poly.const(0) if c0_zero else Poly.var("c0")
    eqs = coefficient_equations(reduced_equations(p, s, l, c0).values())
    unknowns = pn + sn + ln + ([] if c0_zero else ["c0"])
    res = solve(eqs, unknowns, split_vars=(("c0",) if not c0_zero else ()) + ("p0",), depth=depth)
    for fam in res.families:
        if c0_zero:
            fam.bindings.setdefault("c0", ParamField(0))
        fam.label, fam.shape = _label_reduced(fam, degree)
        if fam.label:
            fam.shape["assumptions"] = list(FAMILY_ASSUMPTIONS[fam.label])
    res.families.sort(key=lambda f: (f.label or "~", f.assumptions))
    return res


def solve_full(a, b, degree: int = 2, depth: int = 2, split_vars=()):
    """Solve the complete associativity + transposed-Leibniz system for an
    octuple whose entries have degree <= ``degree`` in each of d and x.

    ``a`` and ``b`` must be numbers: every name in the equations is treated
    as an unknown.
    """
    from fractions import Fraction

    from .solver import coefficient_equations, solve

    for v in (a, b):
        if not isinstance(v, (int, Fraction)):
            raise ValueError("solve_full needs numeric a and b")
    funcs, unknowns = {}, []
    for n in FUNCS:
        funcs[n], names = ansatz(n, degree)
        unknowns += names
    cand = CandidateOctuple(**funcs)
    rs = residual_system(cand, a, b)
    eqs = coefficient_equations(e.residual for e in rs)
    res = solve(eqs, unknowns, split_vars=split_vars, depth=depth)
    return res, unknowns


def family_octuple(fam, degree: int) -> CandidateOctuple:
    """Octuple of a :func:`solve_full` family (free unknowns stay symbolic)."""
    out = {}
    for n in FUNCS:
        p = Poly()
        for i in range(degree + 1):
            for j in range(degree + 1):
                v = fam.value(f"{n}_{i}_{j}")
                if not v.is_zero():
                    p = p + Poly.const(v) * Poly.var("d") ** i * Poly.var("x") ** j
        out[n] = p
    return CandidateOctuple(**out)


def solve_vir(degree: int = 3, depth: int = 2):
    """Rank-1 ansatz ``L o L = f(d, x) L`` against associativity and the
    transposed Leibniz rule with the Virasoro bracket."""
    from .axioms import check_associative, check_transposed_leibniz
    from .solver import coefficient_equations, solve

    f, names = ansatz("f", degree)
    alg = ConformalAlgebra(("L",), {"circ": StructureTable([[LambdaElement([f])]]),
                                    "bracket": _vir_bracket()})
    res_polys = [l.residual[0] for l in check_associative(alg).laws + check_transposed_leibniz(alg).laws]
    res = solve(coefficient_equations(res_polys), names, depth=depth)
    return res, names


# --- verification reports -----------------------------------------------------


@dataclass
class VerificationReport:
    """Named list of check items, each a dict with at least ``name`` and ``pass``."""

    title: str
    items: list

    @property
    def passed(self) -> bool:
        return all(i["pass"] for i in self.items)

    def to_dict(self) -> dict:
        return {"suite": self.title, "status": "pass" if self.passed else "fail",
                "pass": self.passed, "items": self.items}

    def to_text(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for i in self.items:
            extra = {k: v for k, v in i.items() if k not in ("name", "pass")}
            detail = "; ".join(f"{k}={v}" for k, v in extra.items())
            lines.append(f"  [{'ok' if i['pass'] else 'FAIL'}] {i['name']}" + (f"  ({detail})" if detail else ""))
        return "\n".join(lines)


def table_differences(alg1: ConformalAlgebra, alg2: ConformalAlgebra, keys=("circ", "bracket")) -> list:
    """Entries where the named tables of two same-rank algebras disagree."""
    out = []
    for key in keys:
        t1, t2 = alg1.table(key), alg2.table(key)
        for i in range(alg1.rank):
            for j in range(alg1.rank):
                e1, e2 = t1.entry(i, j), t2.entry(i, j)
                if e1 != e2:
                    g = alg1.generators
                    out.append(f"{key}({g[i]},{g[j]}): {e1.format(g)} vs {e2.format(g)}")
    return out


def _with_nonzero(alg: ConformalAlgebra, *names) -> ConformalAlgebra:
    decls = [ParamDecl(p.name, p.nonzero or p.name in names) for p in alg.params]
    return ConformalAlgebra(alg.generators, alg.tables, decls, alg.name)


def normal_form_transformations() -> list:
    """``(label, source algebra, basis change, target algebra)`` for every
    reduction of a classification case to a normal form."""
    from .constructions import BasisChange

    d, b = Poly.var("d"), Poly.var("b")
    one, zero = Poly.const(1), Poly()
    out = []
    c1, c2, c3 = (Poly.var(n) for n in ("c1", "c2", "c3"))
    inv_c1 = Poly.const(ParamField(1) / ParamField("c1"))

    # L' = L - (c2/c1)(d - b) M
    T22 = BasisChange([[one, -(c2 * inv_c1) * (d - b)], [zero, one]])
    out.append(("2.2 -> NF2", catalog("2.2"), T22, catalog("NF2")))

    # b != 0: L' = L + c3/(b c1) (d - b) M
    inv_bc1 = Poly.const(ParamField(1) / (ParamField("b") * ParamField("c1")))
    T23 = BasisChange([[one, c3 * inv_bc1 * (d - b)], [zero, one]])
    out.append(("2.3 (b != 0) -> NF3", _with_nonzero(catalog("2.3"), "b"), T23, catalog("NF3")))

    at_b0 = {"b": 0}
    out.append(("2.3 (b = 0, c3 = 0) -> NF3 at b = 0", catalog("2.3").evaluate_params({"b": 0, "c3": 0}),
                BasisChange([[one, zero], [zero, one]]), catalog("NF3").evaluate_params(at_b0)))

    # b = 0, c3 != 0: M' = c3 M
    src = _with_nonzero(catalog("2.3").evaluate_params(at_b0), "c3")
    out.append(("2.3 (b = 0, c3 != 0) -> NF4", src, BasisChange([[one, zero], [zero, c3]]),
                catalog("NF4").evaluate_params(at_b0)))

    # M' = M / c0, then L' = L - k (d - b) M'
    T1 = BasisChange([[one, zero], [zero, Poly.const(ParamField(1) / ParamField("c0"))]])
    T2 = BasisChange([[one, -Poly.var("k") * (d - b)], [zero, one]])
    target = catalog("NF5").subs_params({"c": ParamField("m") + ParamField("k") * ParamField("b")})
    out.append(("2.4 -> NF5 with c = m + k b", catalog("2.4"), T1.then(T2), target))
    return out


NC_IDENTITY_SUBSET = ("cyclic-h-outer-bracket", "cyclic-h-inner", "four-element-double")


def nf1_commutativity(s) -> dict:
    """For ``L o L = s(x) M``: the predicate ``s(x) == s(-d-x)`` next to the
    outcome of the commutativity checker."""
    from .axioms import check_commutative

    s = _P(s)
    predicate = s == s.substitute("x", -Poly.var("d") - Poly.var("x"))
    checked = check_commutative(CandidateOctuple(f2=s).to_algebra(2, "b")).passed
    return {"predicate": predicate, "checker": checked}


def verify_normal_forms() -> VerificationReport:
    """Basis changes from the classification cases to the normal forms, and
    the law checks on each normal form."""
    from .axioms import check_nc_tpca
    from .constructions import change_basis
    from .identities import check_derived_identities

    items = []
    for label, src, T, target in normal_form_transformations():
        new = change_basis(src, T)
        diff = table_differences(new, target)
        back = change_basis(new, T.inverse())
        items.append({"name": label, "pass": not diff and not table_differences(back, src),
                      "differences": diff})
    for nf in ("NF1", "NF2", "NF3", "NF4", "NF5"):
        alg = catalog(nf)
        nc = check_nc_tpca(alg)
        ids = check_derived_identities(alg, laws=NC_IDENTITY_SUBSET, precondition="none")
        items.append({"name": f"{nf} nc-tpca", "pass": nc.passed,
                      "failures": sorted({l.law for l in nc.failures()})})
        items.append({"name": f"{nf} identities without commutativity", "pass": ids.passed,
                      "failures": sorted({l.law for l in ids.failures()})})
    for s in (S_GENERIC, "s0", "s1*x", "0"):
        r = nf1_commutativity(s)
        items.append({"name": f"NF1 commutativity predicate, s = {s}",
                      "pass": r["predicate"] == r["checker"], "commutative": r["checker"]})
    return VerificationReport("normal-forms", items)


def _reduced_matches(r: Poly, reduced: dict) -> list:
    """Reduced equations equal to ``r`` up to sign and swapping x with y."""
    swapped = r.rename("x", "_s").rename("y", "x").rename("_s", "y")
    return [k for k, q in reduced.items() if q in (r, -r, swapped, -swapped)]


def verify_a_constraint(a=None, b=1, degree: int = 2, depth: int = 2, shape_degree: int = 3) -> VerificationReport:
    """a = 2: the shape residuals reduce to the six reduced equations and
    h1 != q2 breaks the system.  a != 2 (default a = 3): only the zero
    octuple survives the bounded-degree solver."""
    items = []
    if a is None or a == 2:
        p, _ = ansatz("p", shape_degree, ("x",))
        s, _ = ansatz("s", shape_degree, ("x",))
        l, _ = ansatz("l", shape_degree, ("x",))
        rs = residual_system(a2_shape(p, s, l), 2, "b")
        red = reduced_equations(p, s, l, Poly.var("c0"))
        matched = {e.label: _reduced_matches(e.residual, red) for e in rs}
        hit = set().union(*matched.values()) if matched else set()
        unmatched = [k for k, v in matched.items() if not v]
        items.append({"name": "a = 2 shape reduces to the six reduced equations",
                      "pass": not unmatched and hit == set(red),
                      "matched": matched,
                      "unmatched": unmatched})
        bad = CandidateOctuple.of(h1="c0", q2="c0 + 1")
        items.append({"name": "a = 2 with h1 != q2 leaves a nonzero residual",
                      "pass": not residual_system(bad, 2, "b").is_empty()})
    if a is None or a != 2:
        a_num = 3 if a is None else a
        res, unknowns = solve_full(a_num, b, degree, depth)
        only_zero = (res.complete and len(res.families) == 1 and not res.families[0].free
                     and all(res.families[0].value(u).is_zero() for u in unknowns))
        items.append({"name": f"a = {a_num}, b = {b}, degree <= {degree}: only the zero product",
                      "pass": only_zero, "families": len(res.families),
                      "open_branches": len(res.open_branches)})
    return VerificationReport("a-constraint", items)


def verify_vir_classification(degree: int = 3) -> VerificationReport:
    from .axioms import check_associative, check_commutative, check_lie, check_tpca

    alg = catalog("vir-c")
    items = [{"name": f"vir-c {r.suite}", "pass": r.passed}
             for r in (check_associative(alg), check_commutative(alg), check_lie(alg), check_tpca(alg))]
    res, names = solve_vir(degree)
    const = (res.complete and len(res.families) == 1
             and res.families[0].free == ["f_0_0"]
             and all(res.families[0].value(u).is_zero() for u in names if u != "f_0_0"))
    items.append({"name": f"rank-1 ansatz, degree <= {degree}: only constant f", "pass": const})
    bad = ConformalAlgebra(("L",), {"circ": StructureTable([[LambdaElement([Poly.var("d")])]]),
                                    "bracket": _vir_bracket()})
    fails = check_associative(bad)
    items.append({"name": "f = d fails associativity", "pass": not fails.passed,
                  "residual": fails.failures()[0].residual_text() if not fails.passed else ""})
    return VerificationReport("virasoro", items)
