"""Text format for algebras and generator maps.

Algebra file::

    # comment
    name: vir-c
    params: c, c0 nonzero
    generators: L
    table circ commutative:
      L L = c*L
    table bracket skew:
      L L = (d + 2*x)*L

Matrix file (basis changes and endomorphisms)::

    params: b, c1 nonzero, c2
    matrix:
      L = L - c2/c1*(d - b)*M
      M = M

In a matrix file each line gives the new generator (basis change) or the
image of the generator (endomorphism) in terms of the old generators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .conformal import (
    LAM,
    ConformalAlgebra,
    Endomorphism,
    LambdaElement,
    ParamDecl,
    StructureTable,
    split_generators,
)
from .constructions import BasisChange
from .polyring import Kind, VarContext, parse_poly, var_key, var_kind

__all__ = [
    "AlgebraFileError",
    "parse_algebra",
    "format_algebra",
    "load_algebra",
    "MatrixFile",
    "parse_matrix",
    "format_matrix",
    "make_algebra",
]


class AlgebraFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_TABLE = re.compile(r"table\s+([A-Za-z_][A-Za-z0-9_]*)(?:\s+(commutative|skew|none))?\s*:\s*\Z")
_ENTRY = re.compile(r"([^\s=]+)\s+([^\s=]+)\s*=\s*(.*)\Z")
_GEN = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield no, line, raw[:1].isspace()


def _parse_params(body: str, no: int) -> list:
    out = []
    for item in filter(None, (s.strip() for s in body.split(","))):
        words = item.split()
        if len(words) == 2 and words[1] == "nonzero":
            nonzero = True
        elif len(words) == 1:
            nonzero = False
        else:
            raise AlgebraFileError(f"bad parameter declaration {item!r}", no)
        if var_kind(words[0]) is not Kind.PARAM or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", words[0]):
            raise AlgebraFileError(f"{words[0]!r} cannot be a parameter name", no)
        out.append(ParamDecl(words[0], nonzero))
    names = [p.name for p in out]
    if len(set(names)) != len(names):
        raise AlgebraFileError("duplicate parameter", no)
    return out


def _parse_generators(body: str, no: int) -> tuple:
    gens = tuple(s.strip() for s in body.split(",") if s.strip())
    if not gens:
        raise AlgebraFileError("no generators declared", no)
    for g in gens:
        if not _GEN.match(g) or var_kind(g) is not Kind.PARAM:
            raise AlgebraFileError(f"{g!r} cannot be a generator name", no)
    if len(set(gens)) != len(gens):
        raise AlgebraFileError("duplicate generator", no)
    return gens


def _element(expr: str, gens, params, no: int) -> LambdaElement:
    ctx = VarContext(params=frozenset(p.name for p in params), generators=gens)
    try:
        return split_generators(parse_poly(expr, ctx), gens)
    except ValueError as e:
        raise AlgebraFileError(str(e), no) from None


def _header(lines, allowed):
    """Consume ``key: value`` header lines; returns (dict, remaining lines)."""
    head = {}
    rest = list(lines)
    while rest:
        no, line, indented = rest[0]
        m = re.fullmatch(r"\s*([a-z]+)\s*:\s*(.*)", line)
        if not m or m.group(1) not in allowed:
            break
        if m.group(1) in head:
            raise AlgebraFileError(f"duplicate {m.group(1)!r} section", no)
        head[m.group(1)] = (m.group(2).strip(), no)
        rest.pop(0)
    return head, rest


def parse_algebra(text: str) -> ConformalAlgebra:
    head, rest = _header(_lines(text), ("name", "params", "generators"))
    params = _parse_params(*head["params"]) if "params" in head else []
    if "generators" not in head:
        raise AlgebraFileError("missing 'generators:' line")
    gens = _parse_generators(*head["generators"])
    name = head["name"][0] if "name" in head else ""
    tables = {}
    current = None
    for no, line, indented in rest:
        m = _TABLE.fullmatch(line.strip()) if not indented else None
        if m:
            key, sym = m.group(1), m.group(2) or "none"
            if key in tables:
                raise AlgebraFileError(f"duplicate table {key!r}", no)
            current = {"sym": sym, "entries": {}, "line": no}
            tables[key] = current
            continue
        if current is None or not indented:
            raise AlgebraFileError(f"unexpected line {line.strip()!r}", no)
        e = _ENTRY.fullmatch(line.strip())
        if not e:
            raise AlgebraFileError(f"expected 'G H = expression', got {line.strip()!r}", no)
        g, h, expr = e.groups()
        for x in (g, h):
            if x not in gens:
                raise AlgebraFileError(f"unknown generator {x!r}", no)
        pair = (gens.index(g), gens.index(h))
        if pair in current["entries"]:
            raise AlgebraFileError(f"pair ({g}, {h}) given twice", no)
        el = _element(expr, gens, params, no)
        stray = sorted(v for v in el.variables() if var_kind(v) is Kind.LAM and v != LAM)
        if stray:
            raise AlgebraFileError(f"table entries may only use d and {LAM}; found {stray}", no)
        current["entries"][pair] = el
    built = {}
    for key, t in tables.items():
        try:
            built[key] = StructureTable.from_dict(len(gens), t["entries"], t["sym"])
        except ValueError as err:
            raise AlgebraFileError(f"table {key!r}: {err}", t["line"]) from None
    return ConformalAlgebra(gens, built, params, name)


def load_algebra(path) -> ConformalAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


def _format_params(params) -> str:
    return ", ".join(p.name + (" nonzero" if p.nonzero else "")
                     for p in sorted(params, key=lambda p: var_key(p.name)))


def format_algebra(alg: ConformalAlgebra) -> str:
    """Canonical text; ``parse_algebra(format_algebra(a)) == a``."""
    out = []
    if alg.name:
        out.append(f"name: {alg.name}")
    if alg.params:
        out.append(f"params: {_format_params(alg.params)}")
    out.append(f"generators: {', '.join(alg.generators)}")
    for key in sorted(alg.tables):
        t = alg.tables[key]
        out.append(f"table {key}" + (f" {t.symmetry}" if t.symmetry != "none" else "") + ":")
        for (i, j), e in t.items():
            if e:
                out.append(f"  {alg.generators[i]} {alg.generators[j]} = {e.format(alg.generators)}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class MatrixFile:
    generators: tuple
    params: tuple
    rows: tuple  # LambdaElement per generator

    def basis_change(self) -> BasisChange:
        return BasisChange([list(r) for r in self.rows])

    def endomorphism(self) -> Endomorphism:
        return Endomorphism.from_columns(list(self.rows))


def parse_matrix(text: str, generators=None) -> MatrixFile:
    head, rest = _header(_lines(text), ("params", "generators", "matrix"))
    params = _parse_params(*head["params"]) if "params" in head else []
    if "generators" in head:
        gens = _parse_generators(*head["generators"])
    elif generators:
        gens = tuple(generators)
    else:
        raise AlgebraFileError("matrix file needs a 'generators:' line")
    if "matrix" not in head or head["matrix"][0]:
        raise AlgebraFileError("expected a 'matrix:' section")
    rows = {}
    for no, line, indented in rest:
        m = re.fullmatch(r"\s*([^\s=]+)\s*=\s*(.*)", line)
        if not indented or not m:
            raise AlgebraFileError(f"expected 'G = expression', got {line.strip()!r}", no)
        g, expr = m.groups()
        if g not in gens:
            raise AlgebraFileError(f"unknown generator {g!r}", no)
        if g in rows:
            raise AlgebraFileError(f"generator {g!r} given twice", no)
        rows[g] = _element(expr, gens, params, no)
    for g in gens:
        rows.setdefault(g, LambdaElement.basis(len(gens), gens.index(g)))
    return MatrixFile(gens, tuple(params), tuple(rows[g] for g in gens))


def format_matrix(gens, rows, params=()) -> str:
    out = []
    if params:
        out.append(f"params: {_format_params(params)}")
    out.append(f"generators: {', '.join(gens)}")
    out.append("matrix:")
    for g, r in zip(gens, rows):
        out.append(f"  {g} = {r.format(gens)}")
    return "\n".join(out) + "\n"


def make_algebra(generators, tables: dict, params=(), name: str = "") -> ConformalAlgebra:
    """Build from ``{"bracket skew": {"L L": "(d+2*x)*L"}}`` style literals.

    Parameters used but not listed in ``params`` are declared automatically.
    """
    gens = tuple(generators)
    decls = [p if isinstance(p, ParamDecl) else ParamDecl(*p) if isinstance(p, tuple) else ParamDecl(p)
             for p in params]
    ctx = VarContext(generators=gens)
    built = {}
    for header, entries in tables.items():
        parts = header.split()
        key, sym = parts[0], parts[1] if len(parts) > 1 else "none"
        vals = {}
        for pair, expr in entries.items():
            g, h = pair.split()
            vals[(gens.index(g), gens.index(h))] = split_generators(parse_poly(expr, ctx), gens)
        built[key] = StructureTable.from_dict(len(gens), vals, sym)
    alg = ConformalAlgebra(gens, built, decls, name)
    return alg.with_inferred_params()
