"""Shared builders and random generators for the test suite."""

from __future__ import annotations

import random

from tpca.algfile import make_algebra
from tpca.conformal import ConformalAlgebra, Endomorphism, LambdaElement, StructureTable
from tpca.constructions import OrdinaryAlgebra, commutator, current, derivation_product
from tpca.polyring import Poly, parse_poly
from tpca.wab import catalog, make_vir

D, X = Poly.var("d"), Poly.var("x")


def P(text: str) -> Poly:
    return parse_poly(text)


# Two hand-authored ordinary transposed Poisson algebras.
ORD_IDEMPOTENT = OrdinaryAlgebra.from_rules(["e"], product={("e", "e"): {"e": 1}})
ORD_AFFINE = OrdinaryAlgebra.from_rules(
    ["e", "f"],
    product={("e", "e"): {"e": 1}, ("e", "f"): {"f": 1}, ("f", "e"): {"f": 1}},
    bracket={("e", "f"): {"f": 1}, ("f", "e"): {"f": -1}},
)


def unit_rank1() -> ConformalAlgebra:
    """``L o L = L`` with no bracket."""
    return make_algebra(["L"], {"circ commutative": {"L L": "L"}}, name="unit")


def derived_vir() -> ConformalAlgebra:
    """``L o L = L`` with the bracket induced by the derivation ``d``."""
    alg = unit_rank1()
    star = derivation_product(alg, "circ", Endomorphism([[D]]))
    alg = alg.with_table("star", star)
    return alg.with_table("bracket", commutator(alg, "star"))


def derived_affine() -> ConformalAlgebra:
    """Current algebra of the affine example with star from ``d + D0``, where
    ``D0`` scales ``f``, and bracket from the commutator of that star."""
    alg = current(ORD_AFFINE).without_table("bracket")
    Dm = Endomorphism([[D, Poly()], [Poly(), D + 1]])
    alg = alg.with_table("star", derivation_product(alg, "circ", Dm))
    return alg.with_table("bracket", commutator(alg, "star"))


def catalog_tpcas() -> dict:
    """Every commutative TPCA used by the meta-tests."""
    out = {
        "vir-c": catalog("vir-c"),
        "current-idempotent": current(ORD_IDEMPOTENT),
        "current-affine": current(ORD_AFFINE),
        "derived-vir": derived_vir().without_table("star"),
        "derived-affine": derived_affine().without_table("star"),
        "case-2.3": catalog("2.3"),
        "NF3": catalog("NF3"),
        "NF4": catalog("NF4"),
    }
    return out


def random_poly(rng: random.Random, max_deg: int = 2, variables=("d", "x"), density: float = 0.5,
                coeffs=(-2, -1, 1, 2)) -> Poly:
    out = Poly()
    for i in range(max_deg + 1):
        for j in range(max_deg + 1 - i):
            if rng.random() < density:
                out = out + Poly.const(rng.choice(coeffs)) * Poly.var(variables[0]) ** i * Poly.var(variables[1]) ** j
    return out


def random_table(rng: random.Random, rank: int, max_deg: int = 2, density: float = 0.35) -> StructureTable:
    rows = []
    for _ in range(rank):
        row = []
        for _ in range(rank):
            row.append(LambdaElement([random_poly(rng, max_deg, density=density) if rng.random() < 0.6 else Poly()
                                      for _ in range(rank)]))
        rows.append(row)
    return StructureTable(rows)


def rank1(circ: str | None = None, bracket: str | None = None, star: str | None = None) -> ConformalAlgebra:
    tables = {}
    for key, val in (("circ", circ), ("bracket", bracket), ("star", star)):
        if val is not None:
            tables[key] = {"L L": val}
    return make_algebra(["L"], tables)


def vir_with(circ: str) -> ConformalAlgebra:
    return make_vir().with_table("circ", rank1(circ=circ).table("circ"))


def perturb(alg: ConformalAlgebra, key: str, i: int, j: int, comp: int, delta: Poly) -> ConformalAlgebra:
    t = alg.table(key)
    rows = [[t.entry(r, c) for c in range(t.rank)] for r in range(t.rank)]
    e = list(rows[i][j])
    e[comp] = e[comp] + delta
    rows[i][j] = LambdaElement(e)
    return alg.with_table(key, StructureTable(rows))


def perturbations(alg: ConformalAlgebra, key: str, deltas=(Poly.const(1), X, D)):
    """Every single-coefficient perturbation of one table."""
    n = alg.rank
    for i in range(n):
        for j in range(n):
            for comp in range(n):
                for delta in deltas:
                    yield (i, j, comp, str(delta)), perturb(alg, key, i, j, comp, delta)


def symmetrized(t: StructureTable, sign: int) -> StructureTable:
    """``t(i,j) + sign * t(j,i)(x -> -d-x)``: commutative for +1, skew for -1."""
    swap = -D - X
    rows = [[t.entry(i, j) + t.entry(j, i).substitute("x", swap) * sign for j in range(t.rank)]
            for i in range(t.rank)]
    return StructureTable(rows, "commutative" if sign > 0 else "skew")


def random_symmetric_pair(rng: random.Random, rank: int, max_deg: int = 2) -> ConformalAlgebra:
    """Random commutative circ and skew bracket (not necessarily associative or
    Lie), both nonzero."""
    gens = tuple("LM"[:rank])
    while True:
        circ = symmetrized(random_table(rng, rank, max_deg), 1)
        bracket = symmetrized(random_table(rng, rank, max_deg), -1)
        if any(e for _, e in circ.items()) and any(e for _, e in bracket.items()):
            return ConformalAlgebra(gens, {"circ": circ, "bracket": bracket})


def _mutation_cases():
    from tpca import axioms as ax
    from tpca.identities import check_nth_transposed_leibniz, check_derived_identities
    from tpca.wab import make_wab

    return [
        ("associative", ax.check_associative, catalog("2.4"), "circ"),
        ("commutative", ax.check_commutative, catalog("vir-c"), "circ"),
        ("lie", ax.check_lie, make_wab(2, 1), "bracket"),
        ("hom-lie", lambda a: ax.check_hom_lie(a, "bracket", Endomorphism.scalar(1, 2)), make_vir(), "bracket"),
        ("left-symmetric", ax.check_left_symmetric, derived_vir(), "star"),
        ("novikov", ax.check_novikov, derived_vir(), "star"),
        ("poisson", lambda a: ax.check_poisson_leibniz(a, form="both"), rank1(circ="L", bracket="0"), "bracket"),
        ("transposed", lambda a: ax.check_transposed_leibniz(a, form="both"), catalog("vir-c"), "circ"),
        ("np", ax.check_np_conditions, derived_vir(), "star"),
        ("prelie-commutative", ax.check_prelie_commutative, derived_vir(), "star"),
        ("prelie-poisson", ax.check_prelie_poisson, derived_vir(), "star"),
        ("diff-np", ax.check_diff_np, derived_vir(), "star"),
        ("assoc-consequences", ax.check_assoc_consequences, catalog("NF3"), "circ"),
        ("tpca", ax.check_tpca, catalog("2.3"), "circ"),
        ("nc-tpca", ax.check_nc_tpca, catalog("NF5"), "circ"),
        ("identities", lambda a: check_derived_identities(a, precondition="none"), catalog("NF3"), "bracket"),
        ("nth", check_nth_transposed_leibniz, catalog("vir-c"), "circ"),
    ]


# (name, checker, passing base algebra, table to perturb)
MUTATION_CASES = _mutation_cases()


def random_unimodular(rng: random.Random, rank: int = 2):
    """Constant diagonal times one elementary matrix whose off-diagonal entry
    has d-degree <= 2."""
    from tpca.constructions import BasisChange

    if rank == 1:
        return BasisChange([[rng.choice([1, 2, -1])]])
    i, j = rng.sample(range(rank), 2)
    rows = [[Poly.const(rng.choice([1, 2, -1]) if r == s else 0) for s in range(rank)] for r in range(rank)]
    rows[i][j] = random_poly(rng, 2, ("d", "d"), 0.6)
    return BasisChange(rows)


def random_tpca(rng: random.Random) -> ConformalAlgebra:
    """A catalog TPCA with random integer parameters in a random basis."""
    from tpca.constructions import change_basis

    alg = rng.choice(list(catalog_tpcas().values()))
    alg = alg.evaluate_params({p.name: rng.choice([1, 2, 3, -1]) for p in alg.params})
    return change_basis(alg, random_unimodular(rng, alg.rank))
