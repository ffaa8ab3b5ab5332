"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as a script.
"""

from __future__ import annotations

import json
import random
import sys
import time
from pathlib import Path

import jsonschema
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from _support import (  # noqa: E402
    MUTATION_CASES,
    D,
    catalog_tpcas,
    perturbations,
    random_poly,
    random_symmetric_pair,
    random_tpca,
    random_table,
    symmetrized,
    unit_rank1,
)
from tpca.algfile import format_algebra, load_algebra, parse_algebra  # noqa: E402
from tpca.axioms import (  # noqa: E402
    check_associative,
    check_commutative,
    check_hom_lie,
    check_lie,
    check_tpca,
    check_transposed_leibniz,
)
from tpca.cli import main as cli_main  # noqa: E402
from tpca.conformal import ConformalAlgebra, Endomorphism, LambdaElement, StructureTable  # noqa: E402
from tpca.constructions import alpha_h, commutator, derivation_product, direct_sum, h_bracket, tensor  # noqa: E402
from tpca.identities import (  # noqa: E402
    check_compatibility_criterion,
    check_nth_transposed_leibniz,
    check_derived_identities,
)
from tpca.polyring import Poly  # noqa: E402
from tpca.wab import (  # noqa: E402
    CATALOG_IDS,
    FAMILY_ASSUMPTIONS,
    FUNCS,
    CandidateOctuple,
    catalog,
    catalog_octuple,
    make_vir,
    make_wab,
    transcribed_equations,
    residual_system,
    solve_full,
    solve_reduced,
    solve_vir,
    verify_normal_forms,
)

ROOT = Path(__file__).resolve().parent.parent
RESULTS: dict = {}


def record(number: int, title: str, ok: bool, elapsed: float, detail: str = "", limit: float | None = None):
    if limit is not None and elapsed >= limit:
        ok = False
        detail = f"{detail}; exceeded {limit:g} s".lstrip("; ")
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f} s)" + (f": {detail}" if detail else "")
    RESULTS[number] = (ok, line)
    return ok, line


def report(capsys, number, title, fn, limit=None):
    start = time.perf_counter()
    ok, detail = fn()
    ok, line = record(number, title, ok, time.perf_counter() - start, detail, limit)
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


# --- criteria ------------------------------------------------------------------------


def c1():
    reps = [check_lie(make_vir()), check_lie(make_wab())]
    zero = all(not l.residual for r in reps for l in r.laws)
    return all(r.passed for r in reps) and zero, "Vir and W(a,b) with symbolic a, b"


def c2():
    alg = catalog("vir-c")
    suites = [check_associative(alg), check_commutative(alg), check_lie(alg), check_tpca(alg)]
    res, names = solve_vir(3)
    only_const = (res.complete and len(res.families) == 1 and res.families[0].free == ["f_0_0"]
                  and all(res.families[0].value(u).is_zero() for u in names if u != "f_0_0"))
    bad = check_associative(ConformalAlgebra(("L",), {"circ": StructureTable([[LambdaElement([D])]]),
                                                      "bracket": make_vir().table("bracket")}))
    residual = bad.failures()[0].residual_text() if not bad.passed else ""
    ok = all(s.passed for s in suites) and only_const and bool(residual)
    return ok, f"ansatz gives f = f_0_0 only; f = d leaves {residual}"


def c3():
    empty = {}
    for case in ("1", "2.1", "2.2", "2.3", "2.4"):
        a = "a" if case == "1" else 2
        empty[case] = residual_system(catalog_octuple(case), a, "b").is_empty()
    declared = "c0" in catalog_octuple("2.4").nonzero
    return all(empty.values()) and declared, ", ".join(f"{k}: {'empty' if v else 'NONEMPTY'}" for k, v in empty.items())


def c4():
    rng = random.Random(2024)
    labels = ("yyy8", "yyy24", "yyy26", "yyy33")
    agree = total = 0
    zeros = {l: 0 for l in labels}
    for _ in range(60):
        oc = CandidateOctuple(**{n: (random_poly(rng, 2, density=0.4) if rng.random() < 0.4 else Poly())
                                 for n in FUNCS})
        a, b = rng.choice([(2, 0), (2, 1), (3, 1), ("a", "b")])
        eng = residual_system(oc, a, b).by_label()
        for lbl, r in transcribed_equations(oc, a, b).items():
            total += 1
            agree += (not r) == (not eng[lbl])
            if lbl in zeros and not r:
                zeros[lbl] += 1
    both = all(0 < z < 60 for z in zeros.values())
    return agree == total and both, f"{agree}/{total} label checks agree over 60 octuples"


def c5():
    res = solve_reduced(4, 2)
    labels = [f.label for f in res.families]
    sets = {f.label: tuple(f.shape["assumptions"]) for f in res.families if f.label}
    ok = res.complete and labels == ["B1", "B2", "B3", "B4"] and sets == FAMILY_ASSUMPTIONS
    return ok, "; ".join(f"{k}: {{{', '.join(v)}}}" for k, v in sets.items())


def c6():
    res, unknowns = solve_full(3, 1, degree=2)
    ok = (res.complete and len(res.families) == 1
          and all(res.families[0].value(u).is_zero() for u in unknowns))
    return ok, f"{len(unknowns)} unknowns, {len(res.families)} family, {len(res.open_branches)} open"


def c7():
    rep = verify_normal_forms()
    maps = [i for i in rep.items if "->" in i["name"]]
    ok = rep.passed and len(maps) == 5
    return ok, "; ".join(i["name"] for i in maps)


def c8():
    bad = [n for n, alg in catalog_tpcas().items() if check_derived_identities(alg).status != "pass"]
    rng = random.Random(8)
    verdicts = []
    for k in range(25):
        alg = random_tpca(rng) if k % 3 == 0 else random_symmetric_pair(rng, rng.choice([1, 2]))
        a = check_transposed_leibniz(alg).passed
        verdicts.append((a, a == check_nth_transposed_leibniz(alg).passed))
    ok = not bad and all(v for _, v in verdicts) and {a for a, _ in verdicts} == {True, False}
    return ok, (f"{len(catalog_tpcas())} catalog TPCAs; rule/n-th agreement {sum(v for _, v in verdicts)}/25 "
                f"({sum(a for a, _ in verdicts)} passing)")


def _split_pair(rng):
    """Bracket-free summand plus product-free summand: every mixed triple product vanishes."""
    left = ConformalAlgebra(("L",), {"circ": symmetrized(random_table(rng, 1), 1),
                                     "bracket": StructureTable.zero(1)})
    right = ConformalAlgebra(("M",), {"circ": StructureTable.zero(1),
                                      "bracket": symmetrized(random_table(rng, 1), -1)})
    return direct_sum(left, right)


def c9():
    notes = []
    t = tensor(catalog("vir-c"), load_algebra(ROOT / "algebras" / "vir-c2.alg"))
    ok_tensor = check_tpca(t).passed
    notes.append(f"tensor {'ok' if ok_tensor else 'FAILS'}")
    alg = unit_rank1()
    alg = alg.with_table("star", derivation_product(alg, "circ", Endomorphism([[D]])))
    ok_vir = commutator(alg, "star") == make_vir().table("bracket")
    ok_alpha = ok_h = True
    for a in catalog_tpcas().values():
        for i in range(a.rank):
            h = a.basis(i) * (D + 1)
            ok_alpha &= check_hom_lie(a, "bracket", alpha_h(a, "circ", h)).passed
            ok_h &= check_tpca(a.with_table("bracket", h_bracket(a, "circ", "bracket", h))).passed
    rng = random.Random(9)
    pairs = []
    for k in range(25):
        pairs.append(_split_pair(rng) if k % 3 == 0 else
                     random_tpca(rng) if k % 3 == 1 else random_symmetric_pair(rng, rng.choice([1, 2])))
    crit = [check_compatibility_criterion(p) for p in pairs]
    ok_iff = all(c.agreement for c in crit) and {c.both_hold for c in crit} == {True, False}
    notes.append(f"iff agrees on {sum(c.agreement for c in crit)}/25 ({sum(c.both_hold for c in crit)} compatible)")
    return ok_tensor and ok_vir and ok_alpha and ok_h and ok_iff, "; ".join(notes)


def c10():
    missed = []
    for name, check, base, key in MUTATION_CASES:
        if not check(base).passed or all(check(alg).passed for _, alg in perturbations(base, key)):
            missed.append(name)
    return not missed, f"{len(MUTATION_CASES) - len(missed)}/{len(MUTATION_CASES)} checkers reject a perturbation"


def _cli(*argv):
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = cli_main([str(a) for a in argv])
    return code, buf.getvalue()


def c11():
    schema = json.loads((ROOT / "docs" / "report.schema.json").read_text())
    files = sorted((ROOT / "algebras").glob("*.alg"))
    texts = [format_algebra(catalog(c)) for c in CATALOG_IDS] + [format_algebra(load_algebra(p)) for p in files]
    round_trip = all(format_algebra(parse_algebra(t)) == t for t in texts)
    alg = ROOT / "algebras"
    codes = {
        0: [("check", alg / "vir-c.alg"), ("catalog", "2.4", "check"), ("wab", "normal-forms")],
        1: [("check", alg / "broken.alg", "--suites", "assoc"), ("tensor", alg / "broken.alg", alg / "vir-c.alg")],
        2: [("check", "/nonexistent.alg"), ("catalog", "bogus", "show"), ("check", alg / "vir-c.alg", "--suites", "nope")],
    }
    code_ok = valid = True
    for want, runs in codes.items():
        for argv in runs:
            code, out = _cli(*argv, "--report", "json")
            code_ok &= code == want
            try:
                jsonschema.validate(json.loads(out), schema)
            except (ValueError, jsonschema.ValidationError):
                valid = False
    return round_trip and code_ok and valid, (f"{len(texts)} files round-trip; exit codes "
                                              f"{'ok' if code_ok else 'WRONG'}; schema {'ok' if valid else 'INVALID'}")


CRITERIA = [
    (1, "axiom ground truth", c1, 1.0),
    (2, "Virasoro classification", c2, 5.0),
    (3, "classification cases have empty residual systems", c3, 30.0),
    (4, "hand transcriptions agree with the engine", c4, None),
    (5, "reduced a = 2 solver", c5, 60.0),
    (6, "a = 3 gives only the zero product", c6, 120.0),
    (7, "normal forms", c7, None),
    (8, "identity meta-test and n-th product form", c8, None),
    (9, "constructions", c9, None),
    (10, "mutation testing", c10, None),
    (11, "CLI contract", c11, None),
]

@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(capsys, number, title, fn, limit):
    report(capsys, number, title, fn, limit)


if __name__ == "__main__":
    failed = 0
    for number, title, fn, limit in CRITERIA:
        try:
            report(None, number, title, fn, limit)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
