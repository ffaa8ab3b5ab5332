"""Algebra-producing constructions: currents, sums, tensors, commutators,
derivation-induced products, h-twists and C[d]-basis changes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .axioms import check_tpca
from .conformal import (
    LAM,
    ConformalAlgebra,
    Endomorphism,
    LambdaElement,
    StructureTable,
    apply_endo,
    eval_product,
    is_derivation,
)
from .polyring import DEL, Kind, ParamField, Poly, var_kind

__all__ = [
    "OrdinaryAlgebra",
    "current",
    "tensor",
    "direct_sum",
    "commutator",
    "derivation_product",
    "alpha_h",
    "h_bracket",
    "BasisChange",
    "change_basis",
    "NotATPCA",
]


class NotATPCA(ValueError):
    pass


@dataclass(frozen=True)
class OrdinaryAlgebra:
    """Finite-dimensional algebra with a product and a bracket.

    ``product[i][j]`` and ``bracket[i][j]`` are coefficient lists over the
    basis ``names``.
    """

    names: tuple
    product: tuple
    bracket: tuple

    def __post_init__(self):
        n = len(self.names)
        if n < 1:
            raise ValueError("dimension must be at least 1")

        def norm(t):
            rows = tuple(tuple(tuple(ParamField.coerce(c) for c in cell) for cell in row) for row in t)
            if len(rows) != n or any(len(r) != n or any(len(c) != n for c in r) for r in rows):
                raise ValueError("structure constants must be n x n x n")
            return rows

        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "product", norm(self.product))
        object.__setattr__(self, "bracket", norm(self.bracket))

    @property
    def dim(self) -> int:
        return len(self.names)

    @classmethod
    def from_rules(cls, names: Sequence[str], product: Mapping = None, bracket: Mapping = None):
        """Build from sparse rules such as ``{("e", "f"): {"f": 1}}``."""
        n = len(names)
        pos = {g: i for i, g in enumerate(names)}

        def dense(rules):
            t = [[[0] * n for _ in range(n)] for _ in range(n)]
            for (g, h), out in (rules or {}).items():
                for k, c in out.items():
                    t[pos[g]][pos[h]][pos[k]] = c
            return t

        return cls(tuple(names), dense(product), dense(bracket))


def current(ord_alg: OrdinaryAlgebra) -> ConformalAlgebra:
    """C[d] tensor A with lambda-independent products copied from A."""
    n = ord_alg.dim

    def table(t, sym):
        return StructureTable([[LambdaElement(Poly.const(c) for c in t[i][j]) for j in range(n)]
                               for i in range(n)], sym)

    tables = {"circ": table(ord_alg.product, "none"), "bracket": table(ord_alg.bracket, "none")}
    return ConformalAlgebra(ord_alg.names, tables, name="current").with_inferred_params()


def _merge_params(*algs) -> tuple:
    out: dict = {}
    for a in algs:
        for p in a.params:
            if p.name in out:
                out[p.name] = type(p)(p.name, out[p.name].nonzero or p.nonzero)
            else:
                out[p.name] = p
    return tuple(out.values())


def tensor(alg1: ConformalAlgebra, alg2: ConformalAlgebra, circ: str = "circ",
           bracket: str = "bracket", verify: bool = True) -> ConformalAlgebra:
    """Tensor product over C[d] of two TPCAs.

    Both factors must pass the TPCA suite (checked unless ``verify`` is off).
    """
    for alg in (alg1, alg2):
        alg.table(circ)
        alg.table(bracket)
        if verify:
            rep = check_tpca(alg, circ, bracket)
            if not rep.passed:
                f = rep.failures()[0]
                raise NotATPCA(f"factor {alg.name or '<unnamed>'} is not a TPCA: "
                               f"{f.law} on ({', '.join(f.tuple)}) leaves {f.residual_text()}")
    r1, r2 = alg1.rank, alg2.rank
    gens = tuple(f"{g}_{h}" for g in alg1.generators for h in alg2.generators)
    c1, c2 = alg1.table(circ), alg2.table(circ)
    b1, b2 = alg1.table(bracket), alg2.table(bracket)

    def outer(u: LambdaElement, v: LambdaElement) -> LambdaElement:
        return LambdaElement(p * q if p and q else Poly() for p in u for q in v)

    circ_rows, br_rows = [], []
    for i1 in range(r1):
        for i2 in range(r2):
            crow, brow = [], []
            for j1 in range(r1):
                for j2 in range(r2):
                    u, v = c1.entry(i1, j1), c2.entry(i2, j2)
                    crow.append(outer(u, v))
                    brow.append(outer(b1.entry(i1, j1), v) + outer(u, b2.entry(i2, j2)))
            circ_rows.append(crow)
            br_rows.append(brow)
    # Both factors are TPCAs here, so the tags hold (and are re-verified).
    tables = {circ: StructureTable(circ_rows, "commutative" if verify else "none"),
              bracket: StructureTable(br_rows, "skew" if verify else "none")}
    name = f"{alg1.name or 'A'}(x){alg2.name or 'B'}"
    return ConformalAlgebra(gens, tables, _merge_params(alg1, alg2), name)


def direct_sum(alg1: ConformalAlgebra, alg2: ConformalAlgebra) -> ConformalAlgebra:
    """Block-diagonal sum.  A table missing on one side counts as zero there;
    clashing generator names get ``_1``/``_2`` suffixes."""
    g1, g2 = alg1.generators, alg2.generators
    if set(g1) & set(g2):
        g1 = tuple(f"{g}_1" for g in g1)
        g2 = tuple(f"{g}_2" for g in g2)
    r1, r2 = alg1.rank, alg2.rank
    n = r1 + r2
    tables = {}
    for key in sorted(set(alg1.tables) | set(alg2.tables)):
        rows = [[LambdaElement.zero(n) for _ in range(n)] for _ in range(n)]
        for alg, off in ((alg1, 0), (alg2, r1)):
            if not alg.has(key):
                continue
            t = alg.table(key)
            pad_l, pad_r = [Poly()] * off, [Poly()] * (n - off - alg.rank)
            for (i, j), e in t.items():
                rows[i + off][j + off] = LambdaElement(pad_l + list(e) + pad_r)
        sym = {alg1.tables[key].symmetry if key in alg1.tables else None,
               alg2.tables[key].symmetry if key in alg2.tables else None} - {None}
        tables[key] = StructureTable(rows, sym.pop() if len(sym) == 1 else "none")
    return ConformalAlgebra(g1 + g2, tables, _merge_params(alg1, alg2),
                            f"{alg1.name or 'A'}(+){alg2.name or 'B'}")


def commutator(alg: ConformalAlgebra, star: str = "star") -> StructureTable:
    """``[a_x b] = a * _x b - b * _{-d-x} a`` on generators."""
    t = alg.table(star)
    swap = Poly.var(DEL) * -1 - Poly.var(LAM)
    rows = [[t.entry(i, j) - t.entry(j, i).substitute(LAM, swap) for j in range(t.rank)]
            for i in range(t.rank)]
    return StructureTable(rows, "skew")


def derivation_product(alg: ConformalAlgebra, circ: str, D: Endomorphism) -> StructureTable:
    """``a * _x b = a o_x D(b)``; rejects D unless it is a derivation of circ."""
    bad = is_derivation(alg, circ, D)
    if bad:
        (i, j), res = bad[0]
        g = alg.generators
        raise ValueError(f"not a derivation: residual on ({g[i]}, {g[j]}) is {res.format(g)}")
    n = alg.rank
    rows = [[eval_product(alg, circ, alg.basis(i), apply_endo(D, alg.basis(j)), LAM) for j in range(n)]
            for i in range(n)]
    return StructureTable(rows)


def _check_h(alg: ConformalAlgebra, h: LambdaElement):
    if h.rank != alg.rank:
        raise ValueError("h has the wrong rank")
    lam = [v for v in h.variables() if var_kind(v) is Kind.LAM]
    if lam:
        raise ValueError(f"h must be an element of the algebra (no lambda-variables), found {lam}")


def alpha_h(alg: ConformalAlgebra, circ: str, h: LambdaElement) -> Endomorphism:
    """``alpha_h(e) = (h o_x e)|_{x=0}``."""
    _check_h(alg, h)
    cols = [eval_product(alg, circ, h, alg.basis(j), LAM).substitute(LAM, 0) for j in range(alg.rank)]
    return Endomorphism.from_columns(cols)


def h_bracket(alg: ConformalAlgebra, circ: str, bracket: str, h: LambdaElement) -> StructureTable:
    """``[a_x b]^h = (h o_y [a_x b])|_{y=0}``."""
    _check_h(alg, h)
    br = alg.table(bracket)
    rows = [[eval_product(alg, circ, h, br.entry(i, j), "y").substitute("y", 0) for j in range(alg.rank)]
            for i in range(alg.rank)]
    return StructureTable(rows)


# --- basis change -----------------------------------------------------------

def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Poly()
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _adjugate(m):
    n = len(m)
    if n == 1:
        return [[Poly.const(1)]]
    adj = [[Poly()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            c = _det(minor)
            adj[j][i] = c if (i + j) % 2 == 0 else -c
    return adj


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Poly()) for j in range(n)] for i in range(n)]


class BasisChange:
    """New generators ``e'_i = sum_j T[i][j] e_j`` with ``T`` unimodular over C[d]."""

    def __init__(self, matrix: Sequence[Sequence]):
        T = [[Poly.coerce(a) for a in row] for row in matrix]
        n = len(T)
        if n == 0 or any(len(r) != n for r in T):
            raise ValueError("basis change matrix must be square")
        for row in T:
            for a in row:
                if any(v != DEL for v in a.variables()):
                    raise ValueError(f"basis change entries may only involve d: {a}")
        det = _det(T)
        if not det.is_constant() or det.is_zero():
            raise ValueError(f"basis change is not unimodular: determinant {det}")
        inv_det = ParamField.coerce(1) / det.constant()
        inv = [[a.scale(inv_det) for a in row] for row in _adjugate(T)]
        ident = _matmul(T, inv)
        for i in range(n):
            for j in range(n):
                if ident[i][j] != Poly.const(1 if i == j else 0):
                    raise ValueError("basis change inverse check failed")
        self.matrix = tuple(tuple(r) for r in T)
        self.inverse_matrix = tuple(tuple(r) for r in inv)
        self.det = det

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def inverse(self) -> "BasisChange":
        return BasisChange(self.inverse_matrix)

    def then(self, other: "BasisChange") -> "BasisChange":
        """Apply self, then ``other`` (expressed in self's new basis)."""
        return BasisChange(_matmul([list(r) for r in other.matrix], [list(r) for r in self.matrix]))

    def new_generator(self, i: int) -> LambdaElement:
        return LambdaElement(self.matrix[i])

    def to_new(self, r: LambdaElement) -> LambdaElement:
        """Coordinates of an old-basis element in the new basis."""
        n = self.rank
        return LambdaElement(sum((r[k] * self.inverse_matrix[k][l] for k in range(n) if r[k]), Poly())
                             for l in range(n))


def change_basis(alg: ConformalAlgebra, T: BasisChange, generators: Sequence[str] | None = None) -> ConformalAlgebra:
    if T.rank != alg.rank:
        raise ValueError("basis change rank does not match the algebra")
    rows = [T.new_generator(i) for i in range(alg.rank)]
    tables = {}
    for key, t in alg.tables.items():
        new = [[T.to_new(eval_product(t, key, rows[i], rows[j], LAM)) for j in range(alg.rank)]
               for i in range(alg.rank)]
        tables[key] = StructureTable(new, t.symmetry)
    gens = tuple(generators) if generators else alg.generators
    return ConformalAlgebra(gens, tables, _merge_params(alg), alg.name).with_inferred_params()
