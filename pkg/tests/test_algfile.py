from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import random

from _support import catalog_tpcas, random_symmetric_pair
from tpca.algfile import (
    AlgebraFileError,
    format_algebra,
    format_matrix,
    load_algebra,
    make_algebra,
    parse_algebra,
    parse_matrix,
)
from tpca.constructions import change_basis
from tpca.wab import CATALOG_IDS, catalog

ALGEBRAS = Path(__file__).resolve().parent.parent / "algebras"

VIR_TEXT = """\
# Virasoro with L o L = c L
name: vir-c
params: c
generators: L
table circ commutative:
  L L = c*L
table bracket skew:
  L L = (d + 2*x)*L
"""


def test_parse_example():
    alg = parse_algebra(VIR_TEXT)
    assert alg == catalog("vir-c")
    assert alg.table("bracket").symmetry == "skew"


@pytest.mark.parametrize("cid", CATALOG_IDS)
def test_catalog_round_trip(cid):
    alg = catalog(cid)
    text = format_algebra(alg)
    assert parse_algebra(text) == alg
    assert format_algebra(parse_algebra(text)) == text


@pytest.mark.parametrize("path", sorted(ALGEBRAS.glob("*.alg")), ids=lambda p: p.name)
def test_shipped_files_round_trip(path):
    alg = load_algebra(path)
    text = format_algebra(alg)
    assert parse_algebra(text) == alg
    assert format_algebra(parse_algebra(text)) == text


def test_other_algebras_round_trip():
    for alg in catalog_tpcas().values():
        assert parse_algebra(format_algebra(alg)) == alg


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_tables_round_trip(seed):
    alg = random_symmetric_pair(random.Random(seed), 2)
    assert parse_algebra(format_algebra(alg)) == alg


@pytest.mark.parametrize("text,line,fragment", [
    ("generators: L\ntable circ:\n  L L = d +* L\n", 3, "in 'd +* L'"),
    ("generators: L\ntable circ:\n  L N = L\n", 3, "unknown generator"),
    ("generators: L\ntable circ:\n  L L = L\n  L L = 2*L\n", 4, "given twice"),
    ("generators: L\ntable circ:\n  L L = q*L\n", 3, "q"),
    ("generators: L\ntable circ commutative:\n  L L = x*L\n", 2, "not commutative"),
    ("generators: L\n  L L = L\n", 2, "unexpected line"),
    ("generators: L, L\n", 1, "duplicate generator"),
    ("params: x\ngenerators: L\n", 1, "cannot be a parameter"),
    ("params: a, a\ngenerators: L\n", 1, "duplicate parameter"),
    ("generators: L\ntable circ:\n  L L = L\ntable circ:\n  L L = L\n", 4, "duplicate table"),
    ("generators: L\ntable circ:\n  L L = y*L\n", 3, ""),
])
def test_parse_errors_report_lines(text, line, fragment):
    with pytest.raises(AlgebraFileError) as e:
        parse_algebra(text)
    assert e.value.line == line
    assert fragment in str(e.value)


def test_missing_generators():
    with pytest.raises(AlgebraFileError, match="generators"):
        parse_algebra("name: x\n")


def test_matrix_files():
    m = parse_matrix((ALGEBRAS / "T-2.2.mat").read_text())
    assert m.generators == ("L", "M")
    new = change_basis(catalog("2.2"), m.basis_change())
    assert new.tables == load_algebra(ALGEBRAS / "nf2.alg").tables
    # omitted rows default to the identity
    assert m.rows[1] == catalog("2.2").basis(1)
    e = parse_matrix((ALGEBRAS / "del.mat").read_text()).endomorphism()
    assert e.rank == 1
    text = format_matrix(m.generators, m.rows, m.params)
    assert parse_matrix(text) == m


def test_matrix_errors():
    with pytest.raises(AlgebraFileError, match="generators"):
        parse_matrix("matrix:\n  L = L\n")
    with pytest.raises(AlgebraFileError, match="unknown generator"):
        parse_matrix("generators: L\nmatrix:\n  N = L\n")
    with pytest.raises(AlgebraFileError, match="matrix"):
        parse_matrix("generators: L\n")
    # generators may come from the algebra instead of the file
    assert parse_matrix("matrix:\n  L = 2*L\n", generators=("L",)).generators == ("L",)


def test_make_algebra_infers_params():
    alg = make_algebra(["L"], {"circ": {"L L": "k*L"}})
    assert [p.name for p in alg.params] == ["k"]
