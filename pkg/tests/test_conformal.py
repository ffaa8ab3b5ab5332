import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import D, X, P, random_poly, random_table
from tpca.conformal import (
    ConformalAlgebra,
    Endomorphism,
    LambdaElement,
    MissingTable,
    StructureTable,
    apply_endo,
    conjugate,
    eval_product,
    is_derivation,
    nth,
    nth_product,
)
from tpca.polyring import Poly
from tpca.wab import catalog, make_vir, make_wab

VIR = make_vir()
L = VIR.basis(0)


def el(alg, text):
    return alg.element(text)


def test_sesquilinearity_examples():
    assert eval_product(VIR, "bracket", L * D, L, "x") == LambdaElement([-X * (D + 2 * X)])
    assert eval_product(VIR, "bracket", L, L * D, "x") == LambdaElement([(D + X) * (D + 2 * X)])


def test_wab_bracket_entry():
    W = make_wab()
    out = eval_product(W, "bracket", W.basis("L"), W.basis("M"), "x")
    assert out == LambdaElement([Poly(), P("d + a*x + b")])


def test_variable_capture_is_rejected():
    with pytest.raises(ValueError):
        eval_product(VIR, "bracket", L * X, L, "x")


def test_missing_table():
    with pytest.raises(MissingTable):
        eval_product(VIR, "circ", L, L, "x")


def test_conjugate_examples():
    y = Poly.var("y")
    assert conjugate(VIR, LambdaElement([D + 2 * y]), "y", -D - X) == LambdaElement([-(D + 2 * X)])
    assert conjugate(VIR, LambdaElement.zero(1), "y", X) == LambdaElement.zero(1)
    c23 = catalog("2.3")
    ml = c23.table("circ").entry(1, 0).substitute("x", Poly.var("y"))
    assert conjugate(c23, ml, "y", -D - X) == LambdaElement([Poly(), P("c1")])


def test_nth_products():
    assert nth_product(VIR, "bracket", 0, 0, 1) == LambdaElement([Poly.const(2)])
    assert nth_product(VIR, "bracket", 0, 0, 0) == LambdaElement([D])
    assert nth_product(VIR, "bracket", 0, 0, 3) == LambdaElement.zero(1)


def test_endomorphisms():
    assert apply_endo(Endomorphism.identity(1), L * (D + 1)) == L * (D + 1)
    assert apply_endo(Endomorphism([[D]]), L) == L * D
    assert apply_endo(Endomorphism.zero(2), catalog("2.2").basis(1)) == LambdaElement.zero(2)
    with pytest.raises(ValueError):
        Endomorphism([[X]])


def test_is_derivation():
    assert is_derivation(VIR, "bracket", Endomorphism([[D]])) == []
    assert is_derivation(VIR, "bracket", Endomorphism.zero(1)) == []
    bad = is_derivation(VIR, "bracket", Endomorphism.identity(1))
    assert bad == [((0, 0), LambdaElement([-(D + 2 * X)]))]
    # d is a derivation of every table
    W = catalog("2.4")
    for key in ("circ", "bracket"):
        assert is_derivation(W, key, Endomorphism.scalar(2, D)) == []


def test_symmetry_tags_are_verified():
    with pytest.raises(ValueError):
        StructureTable([[LambdaElement([X])]], "commutative")
    with pytest.raises(ValueError):
        StructureTable([[LambdaElement([Poly.const(1)])]], "skew")
    StructureTable([[LambdaElement([D + 2 * X])]], "skew")


def test_tables_restricted_to_lambda_and_d():
    with pytest.raises(ValueError):
        StructureTable([[LambdaElement([Poly.var("y")])]])


def test_algebra_rank_consistency():
    with pytest.raises(ValueError):
        ConformalAlgebra(("L", "M"), {"circ": StructureTable.zero(1)})
    with pytest.raises(ValueError):
        ConformalAlgebra(("L", "L"))


def test_element_formatting():
    W = make_wab()
    assert el(W, "(d + 2*x)*L + M").format(W.generators) == "(d + 2*x)*L + M"


# --- properties ----------------------------------------------------------------

seeds = st.integers(0, 10 ** 6)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_sesquilinearity_on_random_elements(seed):
    rng = random.Random(seed)
    rank = rng.choice([1, 2])
    alg = ConformalAlgebra(tuple("LM"[:rank]), {"circ": random_table(rng, rank)})
    a = LambdaElement([random_poly(rng, 2, ("d", "d"), 0.5) for _ in range(rank)])
    b = LambdaElement([random_poly(rng, 2, ("d", "d"), 0.5) for _ in range(rank)])
    ab = eval_product(alg, "circ", a, b, "x")
    assert eval_product(alg, "circ", a * D, b, "x") + ab * X == LambdaElement.zero(rank)
    assert eval_product(alg, "circ", a, b * D, "x") == ab * (D + X)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_double_conjugation_is_identity(seed):
    rng = random.Random(seed)
    e = LambdaElement([random_poly(rng, 3) for _ in range(2)])
    once = conjugate(None, e, "x", -D - X)
    assert conjugate(None, once, "x", -D - X) == e


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_nth_products_reconstruct_entries(seed):
    rng = random.Random(seed)
    t = random_table(rng, 2, 3)
    alg = ConformalAlgebra(("L", "M"), {"circ": t})
    for i in range(2):
        for j in range(2):
            total = LambdaElement.zero(2)
            fact = 1
            for n in range(5):
                if n:
                    fact *= n
                total = total + nth_product(alg, "circ", i, j, n) * (X ** n * Poly.const(Fraction(1, fact)))
            assert total == t.entry(i, j)


def test_nth_on_elements_matches_generators():
    assert nth(VIR, "bracket", L, L, 1) == nth_product(VIR, "bracket", 0, 0, 1)
