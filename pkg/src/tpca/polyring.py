"""Exact sparse polynomials in ``d`` and formal lambda-variables.

Coefficients live in the field of rational functions in symbolic
parameters over the rationals (:class:`ParamField`).  Everything here is
immutable; equality is structural on canonical forms, so ``p == 0`` is an
exact zero test.

Variable naming convention (shared with the text format):

* ``d`` is the derivation symbol,
* ``x``, ``y``, ``z``, ``w`` and any name starting with ``_`` are
  lambda-variables,
* names starting with ``@`` are reserved for generator placeholders used
  while parsing algebra files,
* every other identifier is a parameter.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "Kind",
    "VarId",
    "ParamField",
    "Poly",
    "ParseError",
    "VarContext",
    "var_kind",
    "add",
    "mul",
    "neg",
    "scale",
    "substitute",
    "coefficient_of",
    "evaluate_params",
    "parse_poly",
    "DEL",
    "LAM_NAMES",
]

DEL = "d"
LAM_NAMES = ("x", "y", "z", "w")


class Kind(enum.Enum):
    DEL = "del"
    LAM = "lam"
    GEN = "gen"
    PARAM = "param"


_KIND_RANK = {Kind.DEL: 0, Kind.LAM: 1, Kind.GEN: 2, Kind.PARAM: 3}
_IDENT = re.compile(r"[A-Za-z_@][A-Za-z0-9_']*\Z")


@functools.lru_cache(maxsize=None)
def var_kind(name: str) -> Kind:
    if name == DEL:
        return Kind.DEL
    if name in LAM_NAMES or name.startswith("_"):
        return Kind.LAM
    if name.startswith("@"):
        return Kind.GEN
    return Kind.PARAM


def _natural(name: str) -> tuple:
    return tuple((1, int(t)) if t.isdigit() else (0, t)
                 for t in re.split(r"(\d+)", name) if t)


@functools.lru_cache(maxsize=None)
def var_key(name: str) -> tuple:
    kind = var_kind(name)
    if name in LAM_NAMES:
        return (_KIND_RANK[kind], 0, LAM_NAMES.index(name), ())
    return (_KIND_RANK[kind], 1, 0, _natural(name))


@dataclass(frozen=True)
class VarId:
    name: str
    kind: Kind

    @classmethod
    def of(cls, name: str) -> "VarId":
        if not _IDENT.match(name):
            raise ValueError(f"not a valid variable name: {name!r}")
        return cls(name, var_kind(name))

    def __str__(self) -> str:
        return self.name


def _name(v: Union[str, VarId]) -> str:
    return v.name if isinstance(v, VarId) else v


# ---------------------------------------------------------------------------
# monomials: tuples of (name, exponent) sorted by var_key

Mono = tuple


@functools.lru_cache(maxsize=1 << 16)
def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for n, e in b:
        d[n] = d.get(n, 0) + e
    return tuple(sorted(d.items(), key=lambda t: var_key(t[0])))


def _mono_deg(m: Mono) -> int:
    return sum(e for _, e in m)


@functools.lru_cache(maxsize=1 << 16)
def _mono_order_key(m: Mono) -> tuple:
    # graded lexicographic, descending when sorted ascending on this key
    return (-_mono_deg(m), tuple((var_key(n), -e) for n, e in m))


def _mono_str(m: Mono) -> str:
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


# ---------------------------------------------------------------------------
# polynomials in parameters: dict Mono -> Fraction (never stores zeros)

_ONE: dict = {(): Fraction(1)}


def _pp_add(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for m, c in b.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v += c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def _pp_neg(a: dict) -> dict:
    return {m: -c for m, c in a.items()}


def _pp_scale(a: dict, c: Fraction) -> dict:
    if not c:
        return {}
    if c == 1:
        return a
    return {m: v * c for m, v in a.items()}


def _pp_mul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if b is _ONE or b == _ONE:
        return a
    if a is _ONE or a == _ONE:
        return b
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _pp_is_one(a: dict) -> bool:
    return len(a) == 1 and a.get(()) == 1


def _pp_leading(a: dict) -> tuple:
    m = min(a, key=_mono_order_key)
    return m, a[m]


def _pp_str(a: dict) -> str:
    if not a:
        return "0"
    parts = []
    for m in sorted(a, key=_mono_order_key):
        c = a[m]
        neg = c < 0
        c = -c if neg else c
        if not m:
            body = str(c)
        elif c == 1:
            body = _mono_str(m)
        else:
            body = f"{c}*{_mono_str(m)}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _pp_vars(a: dict) -> set:
    return {n for m in a for n, _ in m}


def _pp_pow(a: dict, e: int) -> dict:
    out = _ONE
    base = a
    while e:
        if e & 1:
            out = _pp_mul(out, base)
        e >>= 1
        if e:
            base = _pp_mul(base, base)
    return out


def _mono_gcd_cancel(num: dict, den_mono: Mono):
    """Remove the largest monomial dividing both ``num`` and ``den_mono``."""
    if not den_mono:
        return num, den_mono
    g = dict(den_mono)
    for m in num:
        md = dict(m)
        for n in list(g):
            e = min(g[n], md.get(n, 0))
            if e:
                g[n] = e
            else:
                del g[n]
        if not g:
            return num, den_mono

    def div(m):
        out = []
        for n, e in m:
            e -= g.get(n, 0)
            if e:
                out.append((n, e))
        return tuple(out)

    return {div(m): c for m, c in num.items()}, div(den_mono)


def _sympy_cancel(num: dict, den: dict):
    # general multivariate gcd is delegated to sympy
    import sympy
    from sympy.polys.domains import QQ

    names = sorted(_pp_vars(num) | _pp_vars(den), key=var_key)
    idx = {n: i for i, n in enumerate(names)}
    gens = [sympy.Symbol(n) for n in names]

    def to_sym(pp):
        d = {}
        for m, c in pp.items():
            exps = [0] * len(names)
            for n, e in m:
                exps[idx[n]] = e
            d[tuple(exps)] = QQ(c.numerator, c.denominator)
        return sympy.Poly.from_dict(d, *gens, domain=QQ)

    def from_sym(p):
        out = {}
        for exps, c in p.terms():
            m = tuple((names[i], e) for i, e in enumerate(exps) if e)
            out[m] = Fraction(int(c.numerator), int(c.denominator))
        return out

    n, d = to_sym(num), to_sym(den)
    g = n.gcd(d)
    return from_sym(n.exquo(g)), from_sym(d.exquo(g))


def _normalize(num: dict, den: dict):
    if not num:
        return {}, _ONE
    if len(den) == 1:
        (m, c), = den.items()
        if m:
            num, m = _mono_gcd_cancel(num, m)
        num = _pp_scale(num, 1 / c)
        return num, ({m: Fraction(1)} if m else _ONE)
    num, den = _sympy_cancel(num, den)
    if len(den) == 1:
        return _normalize(num, den)
    _, lc = _pp_leading(den)
    if lc != 1:
        num, den = _pp_scale(num, 1 / lc), _pp_scale(den, 1 / lc)
    return num, den


# ---------------------------------------------------------------------------


class ParamField:
    """Element of Q(params): a reduced fraction of parameter polynomials.

    The denominator is coprime to the numerator and has leading
    coefficient 1 in graded-lex order, so the representation is canonical.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, value: Union[int, Fraction, str, "ParamField"] = 0):
        if isinstance(value, ParamField):
            self.num, self.den = value.num, value.den
        elif isinstance(value, str):
            if var_kind(value) is not Kind.PARAM:
                raise ValueError(f"{value!r} is not a parameter name")
            self.num, self.den = {((value, 1),): Fraction(1)}, _ONE
        else:
            v = Fraction(value)
            self.num, self.den = ({(): v} if v else {}), _ONE
        self._hash = None

    @classmethod
    def _raw(cls, num: dict, den: dict) -> "ParamField":
        obj = cls.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @classmethod
    def fraction(cls, num: dict, den: dict = _ONE) -> "ParamField":
        if not den:
            raise ZeroDivisionError("zero denominator")
        return cls._raw(*_normalize(num, den))

    @staticmethod
    def coerce(value) -> "ParamField":
        if isinstance(value, ParamField):
            return value
        return ParamField(value)

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return _pp_is_one(self.den)

    def is_constant(self) -> bool:
        return self.is_polynomial() and (not self.num or list(self.num) == [()])

    def is_monomial(self) -> bool:
        """True for c * (product of parameters) / (product of parameters), c != 0."""
        return len(self.num) == 1 and len(self.den) == 1

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.get((), Fraction(0))

    def params(self) -> set:
        return _pp_vars(self.num) | _pp_vars(self.den)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = _coerce_pf(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den is o.den or self.den == o.den:
            if _pp_is_one(self.den):
                return ParamField._raw(_pp_add(self.num, o.num), _ONE)
            return ParamField.fraction(_pp_add(self.num, o.num), self.den)
        return ParamField.fraction(
            _pp_add(_pp_mul(self.num, o.den), _pp_mul(o.num, self.den)),
            _pp_mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return ParamField._raw(_pp_neg(self.num), self.den)

    def __sub__(self, other):
        o = _coerce_pf(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce_pf(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.num or not o.num:
            return ParamField._raw({}, _ONE)
        if _pp_is_one(self.den) and _pp_is_one(o.den):
            return ParamField._raw(_pp_mul(self.num, o.num), _ONE)
        return ParamField.fraction(_pp_mul(self.num, o.num),
                                   _pp_mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_pf(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError(f"division of {self} by zero")
        return ParamField.fraction(_pp_mul(self.num, o.den),
                                   _pp_mul(self.den, o.num))

    def __rtruediv__(self, other):
        return ParamField.coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return ParamField(1) / (self ** -e)
        return ParamField._raw(*_normalize(_pp_pow(self.num, e), _pp_pow(self.den, e))) \
            if not self.is_polynomial() else ParamField._raw(_pp_pow(self.num, e), _ONE)

    # -- substitution ---------------------------------------------------------

    def subs(self, values: Mapping[str, "ParamField"]) -> "ParamField":
        """Replace parameters by elements of the field (partial allowed)."""
        names = self.params() & set(values)
        if not names:
            return self
        cache: dict = {}

        def ev(pp):
            acc = ParamField(0)
            for m, c in pp.items():
                term = ParamField(c)
                rest = []
                for n, e in m:
                    if n in values:
                        key = (n, e)
                        if key not in cache:
                            cache[key] = ParamField.coerce(values[n]) ** e
                        term = term * cache[key]
                    else:
                        rest.append((n, e))
                if rest:
                    term = term * ParamField._raw({tuple(rest): Fraction(1)}, _ONE)
                acc = acc + term
            return acc

        num = ev(self.num)
        if _pp_is_one(self.den):
            return num
        den = ev(self.den)
        if den.is_zero():
            raise ZeroDivisionError(f"substitution makes the denominator of {self} vanish")
        return num / den

    # -- comparison / display -------------------------------------------------

    def __eq__(self, other):
        o = _coerce_pf(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def sign_negative(self) -> bool:
        """Whether the printed form starts with a minus sign."""
        return bool(self.num) and _pp_leading(self.num)[1] < 0

    def __str__(self):
        n = _pp_str(self.num)
        if _pp_is_one(self.den):
            return n
        if len(self.num) > 1:
            n = f"({n})"
        (dm, dc), = self.den.items() if len(self.den) == 1 else ((None, None),)
        if len(self.den) == 1 and len(dm) == 1 and dc == 1:
            d = _pp_str(self.den)
        else:
            d = f"({_pp_str(self.den)})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"ParamField({str(self)!r})"


def _coerce_pf(value):
    if isinstance(value, ParamField):
        return value
    if isinstance(value, (int, Fraction)):
        return ParamField(value)
    return NotImplemented


# ---------------------------------------------------------------------------


class Poly:
    """Sparse polynomial in ``d`` and lambda-variables over :class:`ParamField`."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, ParamField] | None = None):
        # callers hand over ownership; zero coefficients are dropped here
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        obj = cls.__new__(cls)
        obj.terms, obj._hash = terms, None
        return obj

    @classmethod
    def const(cls, c) -> "Poly":
        c = ParamField.coerce(c)
        return cls._raw({(): c} if not c.is_zero() else {})

    @classmethod
    def var(cls, name: Union[str, VarId]) -> "Poly":
        name = _name(name)
        if var_kind(name) is Kind.PARAM:
            return cls.const(ParamField(name))
        return cls._raw({((name, 1),): ParamField(1)})

    @classmethod
    def coerce(cls, value) -> "Poly":
        if isinstance(value, Poly):
            return value
        if isinstance(value, (int, Fraction, ParamField)):
            return cls.const(value)
        if isinstance(value, (str, VarId)):
            return cls.var(value)
        raise TypeError(f"cannot convert {value!r} to Poly")

    # -- predicates / accessors ---------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        """No ``d`` or lambda-variable occurs (parameters are allowed)."""
        return not self.terms or list(self.terms) == [()]

    def constant(self) -> ParamField:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant in d and lambda-variables")
        return self.terms.get((), ParamField(0))

    def variables(self) -> set:
        return {n for m in self.terms for n, _ in m}

    def params(self) -> set:
        out: set = set()
        for c in self.terms.values():
            out |= c.params()
        return out

    def degree(self, v: Union[str, VarId]) -> int:
        """Degree in ``v``; -1 for the zero polynomial."""
        name = _name(v)
        if not self.terms:
            return -1
        return max(dict(m).get(name, 0) for m in self.terms)

    def total_degree(self) -> int:
        return max((_mono_deg(m) for m in self.terms), default=-1)

    def coefficient_of(self, v: Union[str, VarId], n: int) -> "Poly":
        if n < 0:
            raise ValueError("exponent must be non-negative")
        name = _name(v)
        out = {}
        for m, c in self.terms.items():
            md = dict(m)
            if md.get(name, 0) == n:
                md.pop(name, None)
                out[tuple((k, e) for k, e in m if k != name)] = c
        return Poly._raw(out)

    def coefficients(self, names: Iterable[str] | None = None) -> dict:
        """Map monomials (restricted to ``names`` if given) to ParamField
        coefficients; used to turn polynomial identities into scalar
        equations."""
        if names is None:
            return dict(self.terms)
        names = set(names)
        out: dict = {}
        for m, c in self.terms.items():
            key = tuple((n, e) for n, e in m if n in names)
            rest = tuple((n, e) for n, e in m if n not in names)
            if rest:
                raise ValueError(f"monomial {_mono_str(m)} involves variables outside {sorted(names)}")
            out[key] = c
        return out

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        a, b = (self.terms, o.terms) if len(self.terms) >= len(o.terms) else (o.terms, self.terms)
        out = dict(a)
        for m, c in b.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[m]
                else:
                    out[m] = v
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ParamField)):
            return self.scale(other)
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.terms or not o.terms:
            return Poly._raw({})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m)
                p = c1 * c2
                out[m] = p if v is None else v + p
        return Poly._raw({m: c for m, c in out.items() if not c.is_zero()})

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "Poly":
        c = ParamField.coerce(c)
        if c.is_zero():
            return Poly._raw({})
        if c == 1:
            return self
        return Poly._raw({m: v * c for m, v in self.terms.items()})

    def __truediv__(self, other):
        c = other.constant() if isinstance(other, Poly) else ParamField.coerce(other)
        return self.scale(ParamField(1) / c)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        out, base = Poly.const(1), self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    # -- substitution -----------------------------------------------------------

    def substitute(self, v: Union[str, VarId], r) -> "Poly":
        name = _name(v)
        if var_kind(name) is Kind.PARAM:
            raise ValueError(f"{name!r} is a parameter; use evaluate_params")
        r = Poly.coerce(r)
        if not any(n == name for m in self.terms for n, _ in m):
            return self
        if r.terms and list(r.terms) != [()] and len(r.terms) == 1:
            (rm, rc), = r.terms.items()
            if rc == 1 and len(rm) == 1 and rm[0][1] == 1 and rm[0][0] not in self.variables():
                return self.rename(name, rm[0][0])
        powers = {0: Poly.const(1)}
        acc: dict = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for n, k in m:
                if n == name:
                    e = k
                else:
                    rest.append((n, k))
            rest = tuple(rest)
            if e == 0:
                part = {rest: c}
            else:
                if e not in powers:
                    powers[e] = r ** e
                part = {}
                for pm, pc in powers[e].terms.items():
                    part[_mono_mul(rest, pm)] = pc * c
            for pm, pc in part.items():
                cur = acc.get(pm)
                acc[pm] = pc if cur is None else cur + pc
        return Poly._raw({m: c for m, c in acc.items() if not c.is_zero()})

    def rename(self, old: str, new: str) -> "Poly":
        """Rename a variable that ``new`` does not already occur in."""
        if old == new:
            return self
        if new in self.variables():
            return self.substitute(old, Poly.var(new))
        out = {}
        for m, c in self.terms.items():
            if any(n == old for n, _ in m):
                m = tuple(sorted((((new if n == old else n), e) for n, e in m),
                                 key=lambda t: var_key(t[0])))
            out[m] = c
        return Poly._raw(out)

    def subs_params(self, values: Mapping[str, ParamField]) -> "Poly":
        """Replace parameters by ParamField values."""
        if not values:
            return self
        acc: dict = {}
        for m, c in self.terms.items():
            c2 = c.subs(values)
            if not c2.is_zero():
                cur = acc.get(m)
                acc[m] = c2 if cur is None else cur + c2
        return Poly._raw({m: c for m, c in acc.items() if not c.is_zero()})

    def evaluate_params(self, bindings: Mapping[str, Union[int, Fraction]]) -> "Poly":
        for n in bindings:
            if var_kind(n) is not Kind.PARAM:
                raise ValueError(f"{n!r} is not a parameter")
        values = {n: ParamField(Fraction(v)) for n, v in bindings.items()}
        acc: dict = {}
        for m, c in self.terms.items():
            try:
                c2 = c.subs(values)
            except ZeroDivisionError:
                raise ValueError(
                    f"binding {dict(bindings)} makes the denominator of coefficient "
                    f"{c} (of {_mono_str(m) or '1'}) vanish") from None
            if not c2.is_zero():
                acc[m] = c2
        return Poly._raw(acc)

    # -- comparison / display -------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, ParamField)):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _mono_order_key(t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            neg = False
            if len(c.num) == 1 and c.sign_negative():
                neg, c = True, -c
            if not m:
                body = str(c)
                if body.startswith("-"):
                    neg, body = True, body[1:]
            elif c == 1:
                body = _mono_str(m)
            else:
                cs = str(c)
                if len(c.num) > 1 and c.is_polynomial():
                    cs = f"({cs})"
                body = f"{cs}*{_mono_str(m)}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({str(self)!r})"


# ---------------------------------------------------------------------------
# functional surface


def add(p: Poly, q: Poly) -> Poly:
    return Poly.coerce(p) + Poly.coerce(q)


def mul(p: Poly, q: Poly) -> Poly:
    return Poly.coerce(p) * Poly.coerce(q)


def neg(p: Poly) -> Poly:
    return -Poly.coerce(p)


def scale(p: Poly, c) -> Poly:
    return Poly.coerce(p).scale(c)


def substitute(p: Poly, v: Union[str, VarId], r) -> Poly:
    return Poly.coerce(p).substitute(v, r)


def coefficient_of(p: Poly, v: Union[str, VarId], n: int) -> Poly:
    return Poly.coerce(p).coefficient_of(v, n)


def evaluate_params(p: Poly, bindings: Mapping[str, Union[int, Fraction]]) -> Poly:
    return Poly.coerce(p).evaluate_params(bindings)


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}" + (f" in {text!r}" if text else ""))


@dataclass(frozen=True)
class VarContext:
    """Names a parser may accept.

    ``params=None`` admits any non-reserved identifier as a parameter.
    ``generators`` maps generator names to placeholder variables (``@name``).
    """

    params: frozenset | None = None
    generators: tuple = ()
    lams: tuple = LAM_NAMES


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("id", m.group(2), start))
        else:
            tok = "^" if m.group(3) == "**" else m.group(3)
            out.append(("op", tok, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ctx: VarContext):
        self.text = text
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            tok = self.take()
            q = self.unary()
            if tok[1] == "*":
                p = p * q
            else:
                if not q.is_constant() or any(var_kind(n) is Kind.GEN for n in q.variables()):
                    self.error("divisor must not involve d, lambda-variables or generators", tok)
                if q.is_zero():
                    self.error("division by zero", tok)
                p = p / q.constant()
        return p

    def unary(self) -> Poly:
        t = self.peek()
        if t[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if t[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "num":
                self.error("exponent must be a non-negative integer literal", t)
            base = base ** int(t[1])
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t[0] == "num":
            return Poly.const(int(t[1]))
        if t[0] == "id":
            name = t[1]
            if name in self.ctx.generators:
                return Poly.var("@" + name)
            if name == DEL:
                return Poly.var(DEL)
            kind = var_kind(name)
            if kind is Kind.LAM:
                if name not in self.ctx.lams:
                    self.error(f"unknown lambda-variable {name!r}", t)
                return Poly.var(name)
            if self.ctx.params is not None and name not in self.ctx.params:
                self.error(f"unknown variable {name!r}", t)
            return Poly.var(name)
        if t[:2] == ("op", "("):
            p = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return p
        self.error(f"unexpected {t[1]!r}" if t[0] != "end" else "unexpected end of input", t)


def parse_poly(text: str, ctx: VarContext | None = None) -> Poly:
    """Parse the expression grammar into a canonical :class:`Poly`.

    ``d`` is the derivation, ``x y z w`` are lambda-variables, other
    identifiers are parameters.  ``/`` is accepted when the divisor is a
    nonzero parameter expression, which covers rational literals ``p/q``.
    """
    return _Parser(text, ctx or VarContext()).parse()
