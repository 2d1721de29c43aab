from pathlib import Path

import pytest

from dl4lqs.dl4_model import FAnd, FName, FNot, parse_kb
from dl4lqs.dl4_translate import (
    background_axioms, background_parts, build_table, sigma, statement_flags, translate_conjunction,
    translate_kb, translate_statement, unrelativized_complement, unrelativized_datatype_exclusion,
)
from dl4lqs.dl_semantics_oracle import OracleSat, brute_force_consistent, kb_holds, model_to_4lqsr
from dl4lqs.fourlqs_core import (
    And, EvalCaps, Forall0, Iff, Implies, Mem01, Not, PairMem, V0, alpha_equivalent, evaluate, free_variables,
    parse_formula, to_text,
)
from dl4lqs.fourlqs_restrict import is_4lqsr
from dl4lqs.layout import Bound
from dl4lqs.solver import Sat, decide, ground, solve_cnf
from goldens import GOLDEN_KB_HEADER, TAU_GOLDENS
from kbgen import SHAPES, Sizes, random_kb

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
GUARDED = EvalCaps(sort1_universe=0, sort2_universe=0)


def _one(text):
    kb = parse_kb(GOLDEN_KB_HEADER + text + "\n")
    (s,) = kb.statements
    return kb, s, build_table(kb)


@pytest.mark.parametrize("label,text,golden,flags", TAU_GOLDENS, ids=[g[0] for g in TAU_GOLDENS])
def test_tau_golden(label, text, golden, flags):
    _, s, table = _one(text)
    assert alpha_equivalent(translate_statement(s, table), parse_formula(golden))
    assert tuple(statement_flags(s)) == tuple(flags)


def test_tau_of_conjunction_is_conjunction():
    kb = parse_kb(GOLDEN_KB_HEADER + "Assert a : C1.\nAssert (a, b) : R1.\n")
    table = build_table(kb)
    both = translate_conjunction(kb.statements, table)
    parts = [translate_statement(s, table) for s in kb.statements]
    assert alpha_equivalent(both, And(tuple(parts)))


def test_symbol_table_is_injective():
    kb = parse_kb(GOLDEN_KB_HEADER)
    table = build_table(kb)
    keys = list(table.keys_of_kind("concept")) + list(table.keys_of_kind("arole"))
    assert len({table.var_of(k) for k in keys}) == len(keys)
    variables = list(table.variables())
    assert len(set(variables)) == len(variables)


def test_psi7_verbatim():
    kb = parse_kb("Individual a.")
    table = build_table(kb)
    z1, z2 = V0("z1"), V0("z2")
    want = Forall0((z1, z2), Iff(And((Mem01(z1, table.I), Mem01(z2, table.I))), PairMem(z1, z2, table.U)))
    assert alpha_equivalent(background_parts(kb, table)["psi7"], want)


def test_background_without_datatypes():
    kb = parse_kb("Individual a.")
    psi = background_parts(kb, build_table(kb))
    assert all(psi[k] is None for k in ("psi4", "psi5", "psi6", "psi12"))


def test_min_sample_has_only_nonvacuous_parts():
    kb = parse_kb((SAMPLES / "min.dl4").read_text())
    psi = background_parts(kb, build_table(kb))
    present = {k for k, v in psi.items() if v is not None}
    assert present == {"psi1", "psi2", "psi4", "psi5", "psi7", "psi10"}


def test_two_datatypes_get_one_exclusion():
    kb = parse_kb("Datatype integer { constants 1; }\nDatatype colour { constants red; }\n")
    table = build_table(kb)
    psi4 = background_parts(kb, table)["psi4"]
    z = V0("z")
    colour, integer = table.datatype("colour"), table.datatype("integer")
    want = Forall0((z,), Implies(Mem01(z, colour), Not(Mem01(z, integer))))
    assert alpha_equivalent(psi4.parts[-1], want)
    assert len(psi4.parts) == 3


def test_sigma_cases():
    kb = parse_kb("Datatype integer { facets lo = minInclusive(1), hi = maxInclusive(9); }")
    table = build_table(kb)
    z = V0("z")
    lo = Mem01(z, table.facet("lo"))
    hi = Mem01(z, table.facet("hi"))
    assert sigma(FName("lo"), "integer", z, table) == lo
    assert sigma(FNot(FName("lo")), "integer", z, table) == Not(lo)
    assert sigma(FAnd(FName("lo"), FName("hi")), "integer", z, table) == And((lo, hi))


def test_assertion_appears_in_phi():
    out = translate_kb(parse_kb("Concept C. Individual a. Assert a : C."))
    text = to_text(out.phi_K)
    assert "(in0 a:a C:C)" in text
    assert out.psi["psi3"] is not None


def test_every_symbol_is_housed():
    for seed in range(100):
        kb = random_kb(seed, Sizes(dataterms=1, depth=3, statements=6))
        out = translate_kb(kb)
        housed = set(out.table.variables())
        assert free_variables(out.phi_K) <= housed


def test_restriction_closure_on_corpus():
    count = 0
    for seed in range(300):
        shapes = [SHAPES[seed % len(SHAPES)], SHAPES[(seed * 7) % len(SHAPES)]]
        kb = random_kb(seed, Sizes(dataterms=1, depth=3), shapes=shapes)
        assert is_4lqsr(translate_kb(kb).phi_K).accepted
        count += 1
    assert count == 300


@pytest.mark.parametrize("path", sorted(SAMPLES.glob("*.dl4")), ids=lambda p: p.name)
def test_samples_translate_into_fragment(path):
    assert is_4lqsr(translate_kb(parse_kb(path.read_text())).phi_K).accepted


# -- model correspondence -------------------------------------------------------------

SMALL = Sizes(individuals=2, concepts=2, aroles=1, croles=1, constants=2, facets=1, statements=4)
BOUND = Bound(2, {"integer": 3})


def test_forward_correspondence():
    sat = 0
    for seed in range(60):
        kb = random_kb(seed, SMALL)
        res = decide(kb, BOUND)
        if isinstance(res, Sat):
            assert kb_holds(kb, res.model)
            sat += 1
    assert sat > 20


def test_backward_correspondence():
    found = 0
    for seed in range(60):
        kb = random_kb(seed, SMALL)
        res = brute_force_consistent(kb, BOUND)
        if not isinstance(res, OracleSat):
            continue
        out = translate_kb(kb)
        m = model_to_4lqsr(res.interpretation, out.table, out.normalization.fresh_ledger)
        assert evaluate(out.phi_K, m, GUARDED)
        found += 1
    assert found > 20


# -- the literal clauses are too strong ------------------------------------------------


def _sat(phi, kb, table, n_ind=2):
    gr = ground(phi, Bound(n_ind, {d: 2 for d in kb.datatype_map.names()} or {"*": 1}), table, kb.datatype_map)
    return solve_cnf(gr.cnf).status == "sat"


def test_unguarded_complement_has_no_model():
    kb = parse_kb("Concept C1 C2. Individual a. Datatype string { constants e; }\nC1 EquivalentTo (not C2).")
    out = translate_kb(kb)
    background = background_axioms(out.normalization.kb, out.table)
    (s,) = out.normalization.kb.statements
    assert _sat(out.phi_K, kb, out.table)
    assert not _sat(And((background, unrelativized_complement(s, out.table))), kb, out.table)


def test_biconditional_datatype_exclusion_has_no_model():
    kb = parse_kb("Individual a.\nDatatype integer { constants 1; }\nDatatype colour { constants red; }\n")
    out = translate_kb(kb)
    assert _sat(out.phi_K, kb, out.table)
    literal = unrelativized_datatype_exclusion(kb, out.table)
    assert not _sat(And((out.phi_K, literal)), kb, out.table)
