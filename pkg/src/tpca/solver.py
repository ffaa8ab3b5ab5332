"""Case-splitting solver for polynomial systems in finitely many unknowns.

Moves, in priority order:

1. clean-up: drop vanished equations, divide out factors known to be
   nonzero, detect contradictions (an equation reduced to a nonzero constant);
2. an equation that is a single monomial in one unknown forces it to zero;
3. linear elimination of an unknown whose coefficient is invertible under
   the current assumptions (a constant times nonzero unknowns);
4. zero/nonzero split on the next designated scalar (counts against depth);
5. zero/nonzero split on an unknown dividing every term of an equation
   (a deduction from ``u * rest = 0``; does not count against depth, and
   still applies once the depth budget is spent);
6. otherwise the branch is reported as open.

The solver is sound but not complete: open branches are returned, never
dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .polyring import ParamField, Poly, var_key

__all__ = ["Family", "OpenBranch", "SolveResult", "solve", "coefficient_equations"]

_ONE = {(): Fraction(1)}


def coefficient_equations(polys: Iterable[Poly]) -> list:
    """Coefficients of polynomials in d and lambda-variables, as equations."""
    out = []
    for p in polys:
        out.extend(c for c in p.terms.values())
    return out


def _var_degree(num: dict, u: str) -> int:
    best = 0
    for m in num:
        for n, e in m:
            if n == u and e > best:
                best = e
    return best


def _split_linear(num: dict, u: str):
    """For ``num`` of degree 1 in ``u`` return (coefficient, rest) as dicts."""
    coef, rest = {}, {}
    for m, c in num.items():
        e = dict(m).get(u, 0)
        if e == 0:
            rest[m] = c
        else:
            coef[tuple(t for t in m if t[0] != u)] = c
    return coef, rest


def _vars(num: dict) -> set:
    return {n for m in num for n, _ in m}


@dataclass
class Family:
    """One solution family: ``bindings`` express solved unknowns in terms of
    the ``free`` ones, valid under ``assumptions``."""

    assumptions: list
    bindings: dict
    free: list
    nonzero: set
    conditions: list = field(default_factory=list)  # nonzero side conditions that are not monomials
    label: str | None = None
    shape: dict | None = None  # caller-supplied description of the family

    def value(self, u: str) -> ParamField:
        return self.bindings.get(u, ParamField(u))

    def to_dict(self) -> dict:
        d = {
            "assumptions": list(self.assumptions),
            "bindings": {k: str(self.bindings[k]) for k in sorted(self.bindings, key=var_key)},
            "free_params": list(self.free),
        }
        if self.conditions:
            d["conditions"] = [f"{c} != 0" for c in self.conditions]
        if self.label:
            d["label"] = self.label
        if self.shape:
            d["shape"] = dict(self.shape)
        return d


@dataclass
class OpenBranch:
    assumptions: list
    equations: list
    reason: str

    def to_dict(self) -> dict:
        return {"assumptions": list(self.assumptions), "reason": self.reason,
                "equations": [f"{e} = 0" for e in self.equations[:20]],
                "equation_count": len(self.equations)}


@dataclass
class SolveResult:
    families: list
    open_branches: list
    branches_explored: int = 0

    @property
    def complete(self) -> bool:
        return not self.open_branches

    def to_dict(self) -> dict:
        return {"complete": self.complete,
                "families": [f.to_dict() for f in self.families],
                "open_branches": [b.to_dict() for b in self.open_branches]}


class _State:
    __slots__ = ("eqs", "bindings", "nonzero", "conditions", "assumptions", "depth")

    def __init__(self, eqs, bindings, nonzero, conditions, assumptions, depth):
        self.eqs = eqs
        self.bindings = bindings
        self.nonzero = nonzero
        self.conditions = conditions
        self.assumptions = assumptions
        self.depth = depth

    def copy(self) -> "_State":
        return _State(list(self.eqs), dict(self.bindings), set(self.nonzero), list(self.conditions),
                      list(self.assumptions), self.depth)


def _clean(num: dict, nonzero: set):
    """Divide out nonzero factors and fix the leading coefficient to 1."""
    if not num:
        return None
    common = None
    for m in num:
        d = {n: e for n, e in m if n in nonzero}
        if common is None:
            common = d
        else:
            common = {n: min(e, d[n]) for n, e in common.items() if n in d}
        if not common:
            break
    if common:
        num = {tuple((n, e - common.get(n, 0)) for n, e in m if e - common.get(n, 0) > 0): c
               for m, c in num.items()}
    lead = max(num, key=lambda m: (sum(e for _, e in m), tuple((var_key(n), e) for n, e in m)))
    lc = num[lead]
    if lc != 1:
        num = {m: c / lc for m, c in num.items()}
    return num


def _key(num: dict):
    return frozenset(num.items())


def solve(equations: Sequence, unknowns: Sequence[str], split_vars: Sequence[str] = (),
          depth: int = 2, nonzero: Iterable[str] = (), max_branches: int = 10000) -> SolveResult:
    """Solve ``equations == 0`` for ``unknowns``.

    ``equations`` are polynomial :class:`ParamField` values (or anything
    coercible).  Names in ``nonzero`` are assumed nonzero throughout.
    """
    unknowns = list(unknowns)
    eqs = []
    for e in equations:
        e = ParamField.coerce(e)
        if not e.is_polynomial():
            e = ParamField._raw(e.num, _ONE)
        if e.num:
            eqs.append(e.num)
    start = _State(eqs, {}, set(nonzero), [], [], 0)
    result = SolveResult([], [])
    stack = [start]
    while stack:
        if result.branches_explored >= max_branches:
            for st in stack:
                result.open_branches.append(OpenBranch(st.assumptions, [_pf(n) for n in st.eqs],
                                                       "branch budget exhausted"))
            break
        st = stack.pop()
        result.branches_explored += 1
        out = _run(st, unknowns, list(split_vars), depth)
        if out is None:
            continue
        kind, payload = out
        if kind == "family":
            result.families.append(payload)
        elif kind == "open":
            result.open_branches.append(payload)
        else:  # split: push nonzero first so that the zero branch is explored first
            stack.extend(reversed(payload))
    result.families = _dedupe(result.families)
    return result


def _pf(num: dict) -> ParamField:
    return ParamField._raw(num, _ONE)


def _bind(st: _State, u: str, value: ParamField):
    vals = {u: value}
    new_eqs = []
    for num in st.eqs:
        if u in _vars(num):
            r = _pf(num).subs(vals)
            new_eqs.append(r.num)
        else:
            new_eqs.append(num)
    st.eqs = new_eqs
    st.bindings = {k: (v.subs(vals) if u in v.params() else v) for k, v in st.bindings.items()}
    st.bindings[u] = value
    if u in st.nonzero:
        st.nonzero.discard(u)
        if value.is_zero():
            return False
        if value.is_monomial():
            st.nonzero |= value.params()
        else:
            st.conditions.append(value)
    st.conditions = [c.subs(vals) if u in c.params() else c for c in st.conditions]
    if any(c.is_zero() for c in st.conditions):
        return False
    return True


def _run(st: _State, unknowns, split_vars, max_depth):
    while True:
        # 1. clean-up
        seen = set()
        eqs = []
        for num in st.eqs:
            num = _clean(num, st.nonzero)
            if num is None:
                continue
            if list(num) == [()]:
                return None  # nonzero constant: contradiction
            k = _key(num)
            if k not in seen:
                seen.add(k)
                eqs.append(num)
        eqs.sort(key=lambda n: (len(n), sorted((var_key(v) for v in _vars(n)))))
        st.eqs = eqs
        if not eqs:
            free = [u for u in unknowns if u not in st.bindings]
            return "family", Family(st.assumptions, dict(st.bindings), free, set(st.nonzero), st.conditions)
        # 2. single monomial in one unknown
        moved = False
        for num in eqs:
            if len(num) == 1:
                (m, _), = num.items()
                if len(m) == 1:
                    if not _bind(st, m[0][0], ParamField(0)):
                        return None
                    moved = True
                    break
        if moved:
            continue
        # 3. linear elimination
        pick = _pick_linear(eqs, st.nonzero, set(split_vars))
        if pick is not None:
            num, u, coef, rest = pick
            value = -_pf(rest) / _pf(coef)
            if not _bind(st, u, value):
                return None
            continue
        # 4. designated split
        present = set().union(*(_vars(n) for n in eqs))
        blocked = None
        for v in split_vars:
            if v in present and v not in st.nonzero and v not in st.bindings:
                if st.depth < max_depth:
                    return "split", _split(st, v, counted=True)
                blocked = v
                break
        # 5. factor split
        for num in eqs:
            common = None
            for m in num:
                names = {n for n, _ in m}
                common = names if common is None else common & names
            if common:
                v = min(common, key=var_key)
                return "split", _split(st, v, counted=False)
        reason = (f"split depth {max_depth} exhausted before splitting on {blocked}" if blocked
                  else "no applicable move")
        return "open", OpenBranch(st.assumptions, [_pf(n) for n in eqs], reason)


def _split(st: _State, v: str, counted: bool):
    zero, nz = st.copy(), st.copy()
    if counted:
        zero.depth += 1
        nz.depth += 1
    zero.assumptions.append(f"{v} = 0")
    ok = _bind(zero, v, ParamField(0))
    nz.assumptions.append(f"{v} != 0")
    nz.nonzero.add(v)
    return [s for s in ([zero] if ok else []) + [nz]]


def _pick_linear(eqs, nonzero, protected):
    best = None
    for num in eqs:
        for u in sorted(_vars(num), key=var_key):
            if _var_degree(num, u) != 1:
                continue
            coef, rest = _split_linear(num, u)
            if len(coef) != 1:
                continue
            (m, _), = coef.items()
            if any(n not in nonzero for n, _ in m):
                continue
            rank = (u in protected, u in nonzero, len(num), var_key(u))
            if best is None or rank < best[0]:
                best = (rank, (num, u, coef, rest))
    return None if best is None else best[1]


def _subsumed(f: Family, g: Family) -> bool:
    """Every solution of ``f`` is a solution of ``g``."""
    if f is g:
        return False
    point = {v: f.value(v) for v in g.free}
    for v in g.free:
        if v in g.nonzero and point[v].is_zero():
            return False
    for u, expr in g.bindings.items():
        if f.value(u) != expr.subs(point):
            return False
    return True


def _dedupe(families: list) -> list:
    out = []
    for i, f in enumerate(families):
        dominated = False
        for j, g in enumerate(families):
            if i == j:
                continue
            if _subsumed(f, g) and not (_subsumed(g, f) and j > i):
                dominated = True
                break
        if not dominated:
            out.append(f)
    return out
