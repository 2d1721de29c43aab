import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dl4lqs.dl4_model import CName, Datatype, DatatypeMap, make_kb, parse_kb
from dl4lqs.dl4_translate import background_parts, build_table, translate_kb, translate_statement
from dl4lqs.dl_semantics_oracle import kb_holds
from dl4lqs.fourlqs_core import EvalCaps, Forall1, Mem01, V0, V1, evaluate, free_variables
from dl4lqs.layout import Bound, BoundError, complete_bound, compute_default_bound
from dl4lqs.solver import (
    NotGroundable, PropCNF, Sat, UnsatWithinBound, decide, extract_model, ground,
    solve_cnf, to_dimacs,
)
from kbgen import Sizes, random_kb

GUARDED = EvalCaps(0, 0)


# -- bounds -----------------------------------------------------------------------------


def test_default_bound_counts_number_restrictions():
    kb = parse_kb("Concept C D. AbstractRole R. Individual a b. (AtLeast 2 R C) SubClassOf D.")
    b = compute_default_bound(kb)
    assert b.n_ind == 5
    assert b.n_data == (("*", 1),)


def test_default_bound_of_empty_kb():
    b = compute_default_bound(make_kb([]))
    assert b.n_ind == 1 and b.n_data == (("*", 1),)


def test_default_bound_of_datatype():
    kb = parse_kb("Datatype integer { constants 1 2 3; }")
    assert compute_default_bound(kb).count("integer") == 4


def test_bound_validation():
    with pytest.raises(BoundError):
        Bound(0)
    with pytest.raises(BoundError):
        Bound(1, {"integer": 0})
    dmap = DatatypeMap((Datatype("integer", ("1", "2")),))
    with pytest.raises(BoundError):
        complete_bound(Bound(1, {"integer": 1}), dmap)
    with pytest.raises(BoundError):
        complete_bound(Bound(1, {"real": 1}), dmap)


# -- CDCL -----------------------------------------------------------------------------------


def _cnf(n, clauses):
    return PropCNF(n, tuple(tuple(c) for c in clauses), tuple([None] + [("p", k) for k in range(1, n + 1)]))


def test_contradiction():
    assert solve_cnf(_cnf(1, [[1], [-1]])).status == "unsat"


def test_unit_propagation():
    res = solve_cnf(_cnf(2, [[1, 2], [-1]]))
    assert res.status == "sat"
    assert res.assignment[1] is False and res.assignment[2] is True


def test_empty_clause_set():
    assert solve_cnf(_cnf(3, [])).status == "sat"


def _var_masks(n):
    size = 1 << n
    masks = []
    for i in range(n):
        half = 1 << i
        m = ((1 << half) - 1) << half
        period = half * 2
        while period < size:
            m |= m << period
            period *= 2
        masks.append(m)
    return masks, (1 << size) - 1


def _random_3cnf(seed, n=20, m=85):
    rng = random.Random(seed)
    return [[v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)] for _ in range(m)]


def test_random_3cnf_against_exhaustive_enumeration():
    n = 20
    masks, full = _var_masks(n)
    outcomes = set()
    for seed in range(100):
        clauses = _random_3cnf(seed, n)
        models = full
        for c in clauses:
            cm = 0
            for lit in c:
                cm |= masks[lit - 1] if lit > 0 else full ^ masks[-lit - 1]
            models &= cm
        res = solve_cnf(_cnf(n, clauses))
        assert (res.status == "sat") == (models != 0), seed
        if res.status == "sat":
            index = sum(1 << (v - 1) for v in range(1, n + 1) if res.assignment[v])
            assert models >> index & 1
        outcomes.add(res.status)
    assert outcomes == {"sat", "unsat"}


def test_conflict_limit():
    # pigeonhole 5 into 4 needs many conflicts
    holes, pigeons = 4, 5
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            clauses.append([-var(p, h), -var(q, h)])
    cnf = _cnf(holes * pigeons, clauses)
    assert solve_cnf(cnf, max_conflicts=3).status == "limit"
    assert solve_cnf(cnf).status == "unsat"


def test_solver_is_deterministic():
    cnf = _cnf(20, _random_3cnf(7))
    trace1, trace2 = [], []
    assert solve_cnf(cnf, trace=trace1) == solve_cnf(cnf, trace=trace2)
    assert trace1 == trace2


def test_static_order_branches_on_lowest_free_variable():
    trace = []
    solve_cnf(_cnf(3, [[1, 2, 3]]), trace=trace)
    assert trace[0] == "decide -1 at level 1"


def test_dimacs_output():
    text = to_dimacs(_cnf(2, [[1, 2], [-1]]))
    lines = text.splitlines()
    assert "p cnf 2 2" in lines
    assert lines[-2:] == ["1 2 0", "-1 0"]


# -- grounding ------------------------------------------------------------------------------


def _check_grounding(phi, bound, table, dmap):
    """The CNF with the base atoms fixed is satisfiable iff the formula holds."""
    gr = ground(phi, bound, table, dmap)
    names = {v.name for v in free_variables(phi)}
    base = sorted(k for k in gr.ids if k[0] in ("in", "rel") and (k[2] if k[0] == "in" else k[1]) in names)
    assert len(base) <= 12
    checked = 0
    for bits in itertools.product((False, True), repeat=len(base)):
        assignment = [False] * (gr.cnf.num_vars + 1)
        units = []
        for key, b in zip(base, bits):
            assignment[gr.ids[key]] = b
            units.append([gr.ids[key] if b else -gr.ids[key]])
        m = extract_model(gr, tuple(assignment), table, dmap)
        fixed = PropCNF(gr.cnf.num_vars, gr.cnf.clauses + tuple(tuple(u) for u in units), gr.cnf.symbols)
        assert (solve_cnf(fixed).status == "sat") == evaluate(phi, m, GUARDED)
        checked += 1
    return gr, checked


def test_psi7_grounding_has_nine_pairs():
    kb = make_kb([])
    table = build_table(kb)
    psi7 = background_parts(kb, table)["psi7"]
    gr, checked = _check_grounding(psi7, Bound(2, {"*": 1}), table, kb.datatype_map)
    assert len(gr.layout.elements) ** 2 == 9
    assert checked == 2 ** 6  # two I bits and four free U bits, the rest is pinned


def test_universal_role_equivalence_is_pointwise():
    kb = parse_kb("AbstractRole R. R EquivalentTo U.")
    table = build_table(kb)
    (s,) = kb.statements
    phi = translate_statement(s, table)
    gr, checked = _check_grounding(phi, Bound(2, {"*": 1}), table, kb.datatype_map)
    assert checked == 2 ** 8


def test_assertion_grounding_one_element():
    kb = parse_kb("Concept C. Individual a. Assert a : C.")
    table = build_table(kb)
    (s,) = kb.statements
    gr = ground(translate_statement(s, table), Bound(1, {"*": 1}), table, kb.datatype_map)
    res = solve_cnf(gr.cnf)
    m = extract_model(gr, res.assignment, table, kb.datatype_map)
    assert m.value(table.ind("a")) == "u1"
    assert "u1" in m.value(table.concept(CName("C")))


def test_unsupported_pattern_is_reported():
    kb = make_kb([])
    table = build_table(kb)
    phi = Forall1((V1("Z"),), Mem01(V0("x"), V1("Z")))
    with pytest.raises(NotGroundable):
        ground(phi, Bound(1, {"*": 1}), table, kb.datatype_map)


# -- decide -----------------------------------------------------------------------------------


def test_ground_contradiction_unsat_at_every_bound():
    kb = parse_kb("Concept C1 C2. Individual a. Assert a : C1. Assert a : C2. C1 EquivalentTo (not C2).")
    for n in (1, 2, 3):
        res = decide(kb, Bound(n, {"*": 1}))
        assert isinstance(res, UnsatWithinBound)
        assert res.bound.n_ind == n


def test_single_assertion_sat():
    kb = parse_kb("Concept C. Individual a. Assert a : C.")
    res = decide(kb)
    assert isinstance(res, Sat)
    assert res.model.ind_map["a"] in res.model.concept_ext["C"]
    assert evaluate(translate_phi(kb), res.fourlqs_model, GUARDED)


def translate_phi(kb):
    return translate_kb(kb).phi_K


def test_role_hierarchy_entails_chain():
    kb = parse_kb(
        "AbstractRole R S T V. Individual a b c.\n"
        "Chain R S SubRoleOf S. Chain R T SubRoleOf R. Chain V T SubRoleOf T. Chain V S SubRoleOf V.\n"
        "Assert (a, b) : R. Assert (b, c) : S."
    )
    for n in (1, 2, 3, 4):
        res = decide(kb, Bound(n, {"*": 1}))
        assert isinstance(res, Sat)
        m = res.model
        assert (m.ind_map["a"], m.ind_map["c"]) in m.arole_ext["S"]


def test_at_most_violation_is_unsat():
    kb = parse_kb(
        "Concept C D. AbstractRole R. Individual a b c.\n"
        "C SubClassOf (AtMost 1 R D). Assert a : C.\n"
        "Assert (a, b) : R. Assert (a, c) : R. Assert b : D. Assert c : D. Assert b != c."
    )
    assert isinstance(decide(kb), UnsatWithinBound)


SMALL = Sizes(individuals=2, concepts=2, aroles=1, croles=1, constants=2, facets=1, statements=4)


def test_monotone_in_the_bound():
    sat_seen = 0
    for seed in range(40):
        kb = random_kb(seed, SMALL)
        verdicts = [isinstance(decide(kb, Bound(n, {"integer": d})), Sat) for n, d in ((1, 2), (2, 3), (3, 3), (3, 4))]
        first = verdicts.index(True) if True in verdicts else len(verdicts)
        assert all(verdicts[first:]), seed
        sat_seen += any(verdicts)
    assert sat_seen > 10


def test_decide_is_deterministic():
    for seed in range(15):
        kb = random_kb(seed, SMALL)
        assert decide(kb, Bound(2, {"integer": 3})) == decide(kb, Bound(2, {"integer": 3}))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_sat_models_replay(seed):
    kb = random_kb(seed, SMALL)
    res = decide(kb, Bound(2, {"integer": 3}))
    if isinstance(res, Sat):
        assert kb_holds(kb, res.model)
        assert evaluate(translate_phi(kb), res.fourlqs_model, GUARDED)
