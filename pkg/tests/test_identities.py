import random
from math import factorial

import pytest

from _support import catalog_tpcas, random_symmetric_pair, random_tpca, rank1, vir_with
from tpca.axioms import check_transposed_leibniz
from tpca.identities import (
    IDENTITY_LAWS,
    check_compatibility_criterion,
    check_nth_transposed_leibniz,
    check_derived_identities,
    default_nth_bound,
)
from tpca.conformal import StructureTable
from tpca.wab import NC_IDENTITY_SUBSET, catalog, make_vir, make_wab


def test_seven_identities_named():
    assert len(IDENTITY_LAWS) == 7


@pytest.mark.parametrize("name", sorted(catalog_tpcas()))
def test_identities_hold_on_every_catalog_tpca(name):
    rep = check_derived_identities(catalog_tpcas()[name])
    assert rep.status == "pass", rep.to_text()
    assert set(rep.law_names()) == {l[0] for l in IDENTITY_LAWS}


def test_identities_with_zero_circ():
    for bracket in (make_vir(), make_wab(2, 1)):
        alg = bracket.with_table("circ", StructureTable.zero(bracket.rank))
        assert check_derived_identities(alg).status == "pass"


def test_identities_on_non_tpca_are_vacuous():
    rep = check_derived_identities(vir_with("d*L"))
    assert rep.vacuous and rep.status == "vacuous"
    assert rep.note
    # without the precondition the same residuals simply fail
    assert check_derived_identities(vir_with("d*L"), precondition="none").status == "fail"


def test_unknown_identity_name():
    with pytest.raises(ValueError):
        check_derived_identities(catalog("vir-c"), laws=["nope"])


def test_noncommutative_subset():
    # The subset proved without commutativity holds on every normal form, while
    # the full list does not.
    for nf in ("NF1", "NF2", "NF5", "2.4"):
        alg = catalog(nf)
        assert check_derived_identities(alg, laws=NC_IDENTITY_SUBSET, precondition="none").passed
    assert not check_derived_identities(catalog("NF5"), precondition="none").passed


def test_cyclic_forms_agree():
    # The two cyclic identities are stated to be equivalent: compare verdicts.
    rng = random.Random(5)
    algs = list(catalog_tpcas().values()) + [random_symmetric_pair(rng, 1) for _ in range(6)]
    for alg in algs:
        a = check_derived_identities(alg, laws=["cyclic-circ-outside"], precondition="none").passed
        b = check_derived_identities(alg, laws=["cyclic-bracket-inside"], precondition="none").passed
        assert a == b


# --- n-th product form -------------------------------------------------------------


def test_nth_form_examples():
    alg = catalog("vir-c")
    rep = check_nth_transposed_leibniz(alg, N=2)
    assert rep.passed
    assert any(l.law == "nth-transposed-leibniz[n=0,m=1]" for l in rep.laws)
    # beyond all table degrees everything vanishes
    assert check_nth_transposed_leibniz(alg, N=6).passed
    bad = check_nth_transposed_leibniz(vir_with("d*L"))
    assert not bad.passed


def test_nth_form_is_the_coefficient_expansion():
    # Oracle: the (n, m) residual equals n! m! times the x^n y^m coefficient
    # of the defining rule's residual.
    rng = random.Random(21)
    cases = [catalog("vir-c"), vir_with("c*L + d*L")] + [random_symmetric_pair(rng, 1, 2) for _ in range(4)]
    for alg in cases:
        rule = check_transposed_leibniz(alg).laws[0].residual
        for law in check_nth_transposed_leibniz(alg, N=3).laws:
            n, m = (int(t.split("=")[1]) for t in law.law[law.law.index("[") + 1:-1].split(","))
            expect = rule.map(lambda p: p.coefficient_of("x", n).coefficient_of("y", m)) * (
                factorial(n) * factorial(m))
            assert law.residual == expect, (law.law, str(alg.table("circ").entry(0, 0)))


def test_default_bound():
    assert default_nth_bound(catalog("vir-c")) == 0 + 1 + 1
    with pytest.raises(ValueError):
        check_nth_transposed_leibniz(catalog("vir-c"), N=-1)


def test_rule_and_nth_form_equivalent_on_random_tables():
    rng = random.Random(3)
    seen = set()
    for k in range(12):
        alg = random_tpca(rng) if k % 3 == 0 else random_symmetric_pair(rng, rng.choice([1, 2]))
        a = check_transposed_leibniz(alg).passed
        assert a == check_nth_transposed_leibniz(alg).passed
        seen.add(a)
    assert seen == {True, False}


# --- compatibility criterion --------------------------------------------------------


def test_compatibility_examples():
    r = check_compatibility_criterion(rank1(circ="L", bracket="0"))
    assert r.both_hold and r.triple_products_vanish and r.agreement
    r = check_compatibility_criterion(catalog("vir-c"))
    assert not r.both_hold and not r.triple_products_vanish and r.agreement
    r = check_compatibility_criterion(vir_with("0"))
    assert r.both_hold and r.triple_products_vanish
    assert r.to_dict() == {"both_hold": True, "triple_products_vanish": True, "agreement": True}


def test_compatibility_agreement_on_random_pairs():
    rng = random.Random(9)
    for k in range(15):
        alg = random_tpca(rng) if k % 2 else random_symmetric_pair(rng, rng.choice([1, 2]))
        assert check_compatibility_criterion(alg).agreement
