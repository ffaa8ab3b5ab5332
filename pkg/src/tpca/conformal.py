"""Free C[d]-modules of finite rank and sesquilinear lambda-products.

An element of ``A[lambda, mu, ...]`` is a :class:`LambdaElement`: one
:class:`~tpca.polyring.Poly` per generator.  A lambda-product is stored as a
:class:`StructureTable` of its values on generators and extended to
arbitrary elements by sesquilinearity in :func:`eval_product`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .polyring import DEL, Kind, Poly, VarId, parse_poly, var_key, var_kind

__all__ = [
    "LambdaElement",
    "StructureTable",
    "ConformalAlgebra",
    "ParamDecl",
    "Endomorphism",
    "MissingTable",
    "eval_product",
    "product",
    "conjugate",
    "nth_product",
    "nth",
    "apply_endo",
    "is_derivation",
    "fresh_lam",
    "idx",
]

LAM = "x"  # designated lambda of every structure table

Index = Union[str, Poly]


class MissingTable(KeyError):
    pass


@functools.lru_cache(maxsize=4096)
def idx(text: str) -> Poly:
    """Parse an index expression such as ``"-d-x"`` (cached)."""
    return parse_poly(text)


def fresh_lam(used: Iterable[str]) -> str:
    used = set(used)
    k = 1
    while f"_t{k}" in used:
        k += 1
    return f"_t{k}"


def _needs_parens(s: str) -> bool:
    depth = 0
    body = s[1:] if s.startswith("-") else s
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and i > 0 and body[i - 1] == " ":
            return True
    return False


class LambdaElement:
    """Vector of polynomial coordinates with respect to the generators."""

    __slots__ = ("coords", "_hash")

    def __init__(self, coords: Iterable):
        self.coords = tuple(Poly.coerce(c) for c in coords)
        self._hash = None

    @classmethod
    def zero(cls, rank: int) -> "LambdaElement":
        return cls([Poly()] * rank)

    @classmethod
    def basis(cls, rank: int, i: int, coeff=1) -> "LambdaElement":
        return cls([Poly.coerce(coeff) if k == i else Poly() for k in range(rank)])

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def _check(self, other: "LambdaElement"):
        if other.rank != self.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other):
        if not isinstance(other, LambdaElement):
            return NotImplemented
        self._check(other)
        return LambdaElement(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        if not isinstance(other, LambdaElement):
            return NotImplemented
        self._check(other)
        return LambdaElement(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return LambdaElement(-a for a in self.coords)

    def __mul__(self, c):
        c = Poly.coerce(c)
        return LambdaElement(c * a for a in self.coords)

    __rmul__ = __mul__

    def map(self, f) -> "LambdaElement":
        return LambdaElement(f(a) for a in self.coords)

    def substitute(self, v, r) -> "LambdaElement":
        return self.map(lambda a: a.substitute(v, r))

    def evaluate_params(self, bindings) -> "LambdaElement":
        return self.map(lambda a: a.evaluate_params(bindings))

    def subs_params(self, values) -> "LambdaElement":
        return self.map(lambda a: a.subs_params(values))

    def variables(self) -> set:
        out: set = set()
        for a in self.coords:
            out |= a.variables()
        return out

    def params(self) -> set:
        out: set = set()
        for a in self.coords:
            out |= a.params()
        return out

    def degree(self, v: str) -> int:
        return max(a.degree(v) for a in self.coords)

    def __eq__(self, other):
        if not isinstance(other, LambdaElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coords)
        return self._hash

    def format(self, generators: Sequence[str]) -> str:
        pieces = []
        for c, g in zip(self.coords, generators):
            if not c:
                continue
            s = str(c)
            if s == "1":
                piece = g
            elif s == "-1":
                piece = "-" + g
            elif _needs_parens(s):
                piece = f"({s})*{g}"
            else:
                piece = f"{s}*{g}"
            if not pieces:
                pieces.append(piece)
            elif piece.startswith("-"):
                pieces.append(" - " + piece[1:])
            else:
                pieces.append(" + " + piece)
        return "".join(pieces) or "0"

    def __str__(self):
        return self.format([f"e{i}" for i in range(self.rank)])

    def __repr__(self):
        return f"LambdaElement({str(self)!r})"


SYMMETRY_TAGS = ("none", "commutative", "skew")


class StructureTable:
    """Values ``e_i op_x e_j`` of a lambda-product on generators.

    Entries may use only ``d``, the table's lambda ``x`` and parameters.  A
    symmetry tag other than ``"none"`` is verified on construction.
    """

    __slots__ = ("entries", "symmetry", "_hash")

    def __init__(self, entries: Sequence[Sequence[LambdaElement]], symmetry: str = "none"):
        rows = tuple(tuple(e if isinstance(e, LambdaElement) else LambdaElement(e) for e in row)
                     for row in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows) or any(e.rank != n for r in rows for e in r):
            raise ValueError("structure table must be rank x rank with rank-length entries")
        for r in rows:
            for e in r:
                bad = {v for v in e.variables() if v not in (DEL, LAM)}
                if bad:
                    raise ValueError(f"table entries may only use d and {LAM}; found {sorted(bad)}")
        if symmetry not in SYMMETRY_TAGS:
            raise ValueError(f"unknown symmetry tag {symmetry!r}")
        self.entries = rows
        self.symmetry = symmetry
        self._hash = None
        if symmetry != "none":
            bad = self.symmetry_violations(symmetry)
            if bad:
                (i, j), res = bad[0]
                raise ValueError(f"table is not {symmetry}: entry ({i},{j}) residual {res}")

    @classmethod
    def zero(cls, rank: int, symmetry: str = "none") -> "StructureTable":
        z = LambdaElement.zero(rank)
        return cls([[z] * rank for _ in range(rank)], symmetry)

    @classmethod
    def from_dict(cls, rank: int, entries: Mapping, symmetry: str = "none") -> "StructureTable":
        z = LambdaElement.zero(rank)
        return cls([[entries.get((i, j), z) for j in range(rank)] for i in range(rank)], symmetry)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> LambdaElement:
        return self.entries[i][j]

    def items(self):
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                yield (i, j), e

    def is_zero(self) -> bool:
        return all(e.is_zero() for _, e in self.items())

    def map(self, f, symmetry: str = "none") -> "StructureTable":
        return StructureTable([[f(e) for e in row] for row in self.entries], symmetry)

    def with_symmetry(self, symmetry: str) -> "StructureTable":
        return StructureTable(self.entries, symmetry)

    def evaluate_params(self, bindings) -> "StructureTable":
        return StructureTable([[e.evaluate_params(bindings) for e in row] for row in self.entries],
                              self.symmetry)

    def subs_params(self, values) -> "StructureTable":
        return StructureTable([[e.subs_params(values) for e in row] for row in self.entries],
                              self.symmetry)

    def params(self) -> set:
        out: set = set()
        for _, e in self.items():
            out |= e.params()
        return out

    def max_lambda_degree(self) -> int:
        return max(e.degree(LAM) for _, e in self.items())

    def symmetry_violations(self, symmetry: str):
        sign = 1 if symmetry == "commutative" else -1
        swap = idx("-d-x")
        out = []
        for i in range(self.rank):
            for j in range(self.rank):
                res = self.entries[j][i] - self.entries[i][j].substitute(LAM, swap) * sign
                if res:
                    out.append(((i, j), res))
        return out

    def __eq__(self, other):
        if not isinstance(other, StructureTable):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __repr__(self):
        return f"StructureTable(rank={self.rank}, symmetry={self.symmetry!r})"


@dataclass(frozen=True)
class ParamDecl:
    name: str
    nonzero: bool = False

    def __post_init__(self):
        if var_kind(self.name) is not Kind.PARAM:
            raise ValueError(f"{self.name!r} cannot be used as a parameter name")


@dataclass(frozen=True)
class ConformalAlgebra:
    """Generators, declared parameters and named structure tables."""

    generators: tuple
    tables: Mapping[str, StructureTable] = field(default_factory=dict)
    params: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        decls = [p if isinstance(p, ParamDecl) else ParamDecl(p) for p in self.params]
        object.__setattr__(self, "params", tuple(sorted(decls, key=lambda p: var_key(p.name))))
        object.__setattr__(self, "tables", dict(self.tables))
        if len(set(self.generators)) != len(self.generators) or not self.generators:
            raise ValueError("generator names must be distinct and non-empty")
        for key, t in self.tables.items():
            if t.rank != self.rank:
                raise ValueError(f"table {key!r} has rank {t.rank}, algebra has rank {self.rank}")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def table(self, key: str) -> StructureTable:
        try:
            return self.tables[key]
        except KeyError:
            raise MissingTable(f"algebra {self.name or '<unnamed>'} has no table {key!r}") from None

    def has(self, key: str) -> bool:
        return key in self.tables

    def with_table(self, key: str, table: StructureTable, name: str | None = None) -> "ConformalAlgebra":
        tables = dict(self.tables)
        tables[key] = table
        return ConformalAlgebra(self.generators, tables, self._params_for(tables), name or self.name)

    def without_table(self, key: str) -> "ConformalAlgebra":
        tables = {k: v for k, v in self.tables.items() if k != key}
        return ConformalAlgebra(self.generators, tables, self.params, self.name)

    def with_inferred_params(self) -> "ConformalAlgebra":
        """Declare every parameter used by a table (existing flags kept)."""
        return ConformalAlgebra(self.generators, self.tables, self._params_for(self.tables), self.name)

    def without_unused_params(self) -> "ConformalAlgebra":
        used: set = set()
        for t in self.tables.values():
            used |= t.params()
        return ConformalAlgebra(self.generators, self.tables,
                                tuple(p for p in self.params if p.name in used), self.name)

    def _params_for(self, tables) -> tuple:
        declared = {p.name: p for p in self.params}
        used: set = set()
        for t in tables.values():
            used |= t.params()
        for n in sorted(used - set(declared)):
            declared[n] = ParamDecl(n)
        return tuple(declared.values())

    def basis(self, i: Union[int, str]) -> LambdaElement:
        if isinstance(i, str):
            i = self.generators.index(i)
        return LambdaElement.basis(self.rank, i)

    def element(self, text: str) -> LambdaElement:
        """Build an element from ``"(d+1)*L + x*M"`` style text."""
        from .polyring import VarContext

        p = parse_poly(text, VarContext(generators=self.generators))
        return split_generators(p, self.generators)

    def nonzero_params(self) -> set:
        return {p.name for p in self.params if p.nonzero}

    def evaluate_params(self, bindings) -> "ConformalAlgebra":
        tables = {k: t.evaluate_params(bindings) for k, t in self.tables.items()}
        params = tuple(p for p in self.params if p.name not in bindings)
        return ConformalAlgebra(self.generators, tables, params, self.name)

    def subs_params(self, values) -> "ConformalAlgebra":
        tables = {k: t.subs_params(values) for k, t in self.tables.items()}
        alg = ConformalAlgebra(self.generators, tables, tuple(p for p in self.params if p.name not in values),
                               self.name)
        return ConformalAlgebra(alg.generators, tables, alg._params_for(tables), alg.name)


def split_generators(p: Poly, generators: Sequence[str]) -> LambdaElement:
    """Split a polynomial linear in ``@gen`` placeholders into coordinates."""
    coords = {g: {} for g in generators}
    for m, c in p.terms.items():
        gens = [(n, e) for n, e in m if var_kind(n) is Kind.GEN]
        if len(gens) != 1 or gens[0][1] != 1:
            raise ValueError(f"expression is not linear in the generators: {p}")
        g = gens[0][0][1:]
        if g not in coords:
            raise ValueError(f"unknown generator {g!r}")
        rest = tuple(t for t in m if t[0] != gens[0][0])
        coords[g][rest] = c
    return LambdaElement(Poly(coords[g]) for g in generators)


# ---------------------------------------------------------------------------
# evaluation


def _table_of(alg, op) -> StructureTable:
    if isinstance(alg, StructureTable):
        return alg
    return alg.table(op)


@functools.lru_cache(maxsize=1024)
def _renamed(table: StructureTable, v: str):
    return [[e.map(lambda p: p.rename(LAM, v)) for e in row] for row in table.entries]


def eval_product(alg, op, x: LambdaElement, y: LambdaElement, v: Union[str, VarId]) -> LambdaElement:
    """Sesquilinear extension of the table ``op`` to ``x op_v y``.

    Returns ``sum_ij x_i(d -> -v) * y_j(d -> d + v) * table(i, j)(x -> v)``.
    """
    table = _table_of(alg, op)
    v = v.name if isinstance(v, VarId) else v
    if var_kind(v) is not Kind.LAM:
        raise ValueError(f"{v!r} is not a lambda-variable")
    if x.rank != table.rank or y.rank != table.rank:
        raise ValueError(f"rank mismatch: table {table.rank}, operands {x.rank}, {y.rank}")
    if v in x.variables() or v in y.variables():
        raise ValueError(f"variable capture: {v!r} occurs in an operand")
    minus_v = -Poly.var(v)
    d_plus_v = Poly.var(DEL) + Poly.var(v)
    xs = [c.substitute(DEL, minus_v) if c else c for c in x.coords]
    ys = [c.substitute(DEL, d_plus_v) if c else c for c in y.coords]
    entries = _renamed(table, v)
    out = [Poly()] * table.rank
    for i, xi in enumerate(xs):
        if not xi:
            continue
        for j, yj in enumerate(ys):
            if not yj:
                continue
            e = entries[i][j]
            if e.is_zero():
                continue
            coef = xi * yj
            out = [o + coef * ek if ek else o for o, ek in zip(out, e.coords)]
    return LambdaElement(out)


def product(alg, op, x: LambdaElement, y: LambdaElement, index: Index) -> LambdaElement:
    """``x op_index y`` where the index is any polynomial in ``d`` and
    lambda-variables, e.g. ``"x+y"`` or ``"-d-y"``.  The ``d`` in the index
    acts on the result."""
    index = idx(index) if isinstance(index, str) else index
    used = x.variables() | y.variables()
    ivars = index.variables()
    if len(index.terms) == 1:
        (m, c), = index.terms.items()
        if c == 1 and len(m) == 1 and m[0][1] == 1 and var_kind(m[0][0]) is Kind.LAM \
                and m[0][0] not in used:
            return eval_product(alg, op, x, y, m[0][0])
    v = fresh_lam(used | ivars)
    return eval_product(alg, op, x, y, v).substitute(v, index)


def conjugate(alg, expr: LambdaElement, v: Union[str, VarId], target) -> LambdaElement:
    """Coordinatewise substitution ``v -> target`` (canonically ``-d-v``)."""
    return expr.substitute(v, target)


def nth_product(alg, op, i: int, j: int, n: int) -> LambdaElement:
    """``e_i (n) e_j``: n! times the lambda^n coefficient of the table entry."""
    if n < 0:
        raise ValueError("n must be non-negative")
    t = _table_of(alg, op)
    f = math.factorial(n)
    return t.entry(i, j).map(lambda p: p.coefficient_of(LAM, n).scale(f))


def nth(alg, op, x: LambdaElement, y: LambdaElement, n: int) -> LambdaElement:
    """n-th product of two lambda-free elements."""
    v = fresh_lam(x.variables() | y.variables())
    f = math.factorial(n)
    return eval_product(alg, op, x, y, v).map(lambda p: p.coefficient_of(v, n).scale(f))


@dataclass(frozen=True)
class Endomorphism:
    """C[d]-linear map given by a matrix over C[d] (column j is the image of e_j)."""

    matrix: tuple

    def __post_init__(self):
        m = tuple(tuple(Poly.coerce(a) for a in row) for row in self.matrix)
        n = len(m)
        if n == 0 or any(len(r) != n for r in m):
            raise ValueError("endomorphism matrix must be square")
        for r in m:
            for a in r:
                if any(var_kind(v) is Kind.LAM for v in a.variables()):
                    raise ValueError(f"endomorphism entries may not involve lambda-variables: {a}")
        object.__setattr__(self, "matrix", m)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, rank: int) -> "Endomorphism":
        return cls.scalar(rank, 1)

    @classmethod
    def zero(cls, rank: int) -> "Endomorphism":
        return cls.scalar(rank, 0)

    @classmethod
    def scalar(cls, rank: int, c) -> "Endomorphism":
        c = Poly.coerce(c)
        return cls(tuple(tuple(c if i == j else Poly() for j in range(rank)) for i in range(rank)))

    @classmethod
    def from_columns(cls, columns: Sequence[LambdaElement]) -> "Endomorphism":
        n = len(columns)
        return cls(tuple(tuple(columns[j][i] for j in range(n)) for i in range(n)))

    def column(self, j: int) -> LambdaElement:
        return LambdaElement(row[j] for row in self.matrix)

    def __call__(self, x: LambdaElement) -> LambdaElement:
        return apply_endo(self, x)


def apply_endo(e: Endomorphism, x: LambdaElement) -> LambdaElement:
    if e.rank != x.rank:
        raise ValueError(f"rank mismatch: endomorphism {e.rank}, element {x.rank}")
    out = []
    for row in e.matrix:
        acc = Poly()
        for a, xi in zip(row, x.coords):
            if a and xi:
                acc = acc + a * xi
        out.append(acc)
    return LambdaElement(out)


def is_derivation(alg, op, D: Endomorphism):
    """Nonzero residuals ``D(e_i op e_j) - D(e_i) op e_j - e_i op D(e_j)``.

    An empty list means ``D`` is a derivation of the product.
    """
    t = _table_of(alg, op)
    n = t.rank
    out = []
    for i in range(n):
        ei = LambdaElement.basis(n, i)
        for j in range(n):
            ej = LambdaElement.basis(n, j)
            res = (apply_endo(D, t.entry(i, j))
                   - eval_product(t, op, apply_endo(D, ei), ej, LAM)
                   - eval_product(t, op, ei, apply_endo(D, ej), LAM))
            if res:
                out.append(((i, j), res))
    return out
