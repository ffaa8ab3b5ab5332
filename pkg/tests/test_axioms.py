import random

import pytest

from _support import (
    MUTATION_CASES,
    D,
    catalog_tpcas,
    derived_affine,
    derived_vir,
    perturbations,
    random_symmetric_pair,
    random_tpca,
    rank1,
    unit_rank1,
    vir_with,
)
from tpca.axioms import (
    check_assoc_consequences,
    check_associative,
    check_commutative,
    check_diff_np,
    check_hom_lie,
    check_left_symmetric,
    check_lie,
    check_novikov,
    check_np_conditions,
    check_poisson_leibniz,
    check_prelie_commutative,
    check_prelie_poisson,
    check_tpca,
    check_transposed_leibniz,
)
from tpca.conformal import Endomorphism, MissingTable
from tpca.constructions import commutator
from tpca.wab import catalog, make_vir, make_wab


def test_associativity_examples():
    assert check_associative(catalog("vir-c")).passed
    bad = check_associative(rank1(circ="d*L"))
    assert not bad.passed
    assert bad.failures()[0].residual_text() == "(d^2 + 2*d*x + d*y)*L"
    assert check_associative(rank1(circ="0")).passed


def test_commutativity_examples():
    assert check_commutative(catalog("vir-c")).passed
    assert not check_commutative(rank1(circ="x*L")).passed
    assert check_commutative(rank1(circ="0")).passed


def test_lie_examples():
    assert check_lie(make_vir()).passed
    assert check_lie(make_wab()).passed
    bad = check_lie(rank1(bracket="L"))
    assert not bad.passed
    assert not bad.law_passed("skew-symmetry")


def test_hom_lie_examples():
    vir = make_vir()
    assert check_hom_lie(vir, "bracket", Endomorphism.identity(1)).passed
    assert not check_hom_lie(vir, "bracket", Endomorphism([[D]])).passed


def test_left_symmetric_and_novikov():
    dv = derived_vir()
    assert check_left_symmetric(dv).passed and check_novikov(dv).passed
    # an associative product is left-symmetric
    assert check_left_symmetric(catalog("2.4"), "circ").passed
    assert not check_novikov(rank1(star="x^2*L")).passed


def test_poisson_leibniz_examples():
    zero_bracket = rank1(circ="c*L", bracket="0")
    assert check_poisson_leibniz(zero_bracket, form="both").passed
    assert not check_poisson_leibniz(catalog("vir-c")).passed
    assert check_poisson_leibniz(vir_with("0"), form="both").passed


def test_transposed_leibniz_examples():
    assert check_transposed_leibniz(catalog("vir-c"), form="both").passed
    assert check_transposed_leibniz(catalog("2.4"), form="defining").passed
    assert not check_transposed_leibniz(vir_with("d*L")).passed


def test_np_and_prelie_examples():
    dv = derived_vir()
    assert check_np_conditions(dv).passed
    assert check_prelie_commutative(dv).passed
    assert check_diff_np(dv).passed
    assert check_prelie_poisson(dv).passed
    zero_star = unit_rank1().with_table("star", rank1(star="0").table("star"))
    assert check_np_conditions(zero_star).passed
    assert check_prelie_commutative(zero_star).passed
    bad = unit_rank1().with_table("star", rank1(star="L").table("star"))
    rep = check_prelie_commutative(bad)
    assert not rep.passed
    assert rep.failures()[0].residual_text() == "-L"


def test_assoc_consequences():
    for alg in catalog_tpcas().values():
        assert check_assoc_consequences(alg).passed
    assert check_assoc_consequences(rank1(circ="0")).passed
    assert not check_assoc_consequences(rank1(circ="d*L")).passed


def test_missing_tables_raise():
    with pytest.raises(MissingTable):
        check_tpca(make_vir())
    with pytest.raises(MissingTable):
        check_novikov(catalog("vir-c"))


def test_report_serialization():
    rep = check_tpca(catalog("vir-c"))
    d = rep.to_dict()
    assert d["suite"] == "tpca" and d["pass"] is True and d["status"] == "pass"
    assert {"law", "tuple", "residual", "pass"} <= set(d["laws"][0])
    assert "[PASS] tpca" in rep.to_text()


# --- equivalence of alternative forms --------------------------------------------


def test_transposed_leibniz_forms_agree():
    # The rewritten form relies on commutativity of circ and skew-symmetry of
    # the bracket, so it is compared on such inputs.
    rng = random.Random(7)
    algs = list(catalog_tpcas().values()) + [vir_with("d*L"), vir_with("d^2*L + c*L")]
    algs += [random_symmetric_pair(rng, rng.choice([1, 2])) for _ in range(12)] + [random_tpca(rng) for _ in range(4)]
    seen = set()
    for alg in algs:
        a = check_transposed_leibniz(alg, form="defining").passed
        b = check_transposed_leibniz(alg, form="rewritten").passed
        assert a == b
        seen.add(a)
    assert seen == {True, False}


def test_rewritten_form_needs_commutativity():
    # Noncommutative case 2.4 satisfies the defining rule but not the rewrite.
    alg = catalog("2.4")
    assert check_transposed_leibniz(alg, form="defining").passed
    assert not check_transposed_leibniz(alg, form="rewritten").passed


def test_poisson_forms_agree():
    rng = random.Random(11)
    algs = list(catalog_tpcas().values()) + [rank1(circ="c*L", bracket="0"), vir_with("0")]
    algs += [random_symmetric_pair(rng, rng.choice([1, 2])) for _ in range(15)]
    seen = set()
    for alg in algs:
        a = check_poisson_leibniz(alg, form="defining").passed
        assert a == check_poisson_leibniz(alg, form="rewritten").passed
        seen.add(a)
    assert seen == {True, False}


def test_commutator_of_left_symmetric_is_lie():
    for alg in (derived_vir(), derived_affine()):
        assert check_left_symmetric(alg).passed
        assert check_lie(alg.with_table("bracket", commutator(alg, "star"))).passed


# --- mutation testing ------------------------------------------------------------------


@pytest.mark.parametrize("name,check,base,key", MUTATION_CASES, ids=[c[0] for c in MUTATION_CASES])
def test_checker_rejects_a_perturbation(name, check, base, key):
    assert check(base).passed
    rejected = [label for label, alg in perturbations(base, key) if not check(alg).passed]
    assert rejected, f"{name}: no single-coefficient perturbation was rejected"
