from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dl4lqs.dl4_model import (
    Chain, ConceptAssertion, Datatype, DatatypeMap, FacetSpec, FName, FNot, FOr, FTop, FBottom,
    KBError, KBParseError, KnowledgeBase, RName, SubAtMost, CName, TDatatype, TFacet,
    classify_h_restricted, eval_data_range, eval_facet_expr, make_kb, parse_kb, print_kb,
)
from kbgen import SHAPES, Sizes, random_kb

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def test_parse_concept_assertion():
    kb = parse_kb("Concept C. Individual a. Assert a : C.")
    assert kb.abox == (ConceptAssertion("a", CName("C")),)


def test_parse_chain():
    kb = parse_kb("AbstractRole R S. Chain R S SubRoleOf S.")
    assert kb.rbox == (Chain((RName("R"), RName("S")), RName("S")),)


def test_undeclared_name():
    with pytest.raises(KBError):
        parse_kb("Individual a. Assert a : D.")


def test_syntax_error_position():
    with pytest.raises(KBParseError) as e:
        parse_kb("Concept C.\nIndividual a.\nAssert a : : C.")
    assert e.value.line == 3
    assert e.value.col > 1


def test_constant_in_two_datatypes():
    with pytest.raises(KBError):
        DatatypeMap((Datatype("integer", ("1",)), Datatype("str", ("1",))))


@pytest.mark.parametrize("path", sorted(SAMPLES.glob("*.dl4")), ids=lambda p: p.name)
def test_samples_round_trip(path):
    kb = parse_kb(path.read_text())
    assert parse_kb(print_kb(kb)) == kb


def test_empty_kb_prints_header_only():
    text = print_kb(KnowledgeBase())
    assert text.strip().startswith("#")
    assert parse_kb(text) == KnowledgeBase()


def test_print_is_order_canonical():
    a = parse_kb("Concept C D. Individual a. Assert a : C.   Assert a : D.")
    b = parse_kb("Concept D C. Individual a.\nAssert a : D.\nAssert a : C.")
    assert print_kb(a) == print_kb(b)


def test_parse_print_identity_on_corpus():
    sizes = Sizes(individuals=2, concepts=3, aroles=2, croles=1, constants=2, facets=2,
                  dataterms=1, depth=3, statements=6)
    for seed in range(1000):
        kb = random_kb(seed, sizes, datatype="integer" if seed % 3 else "boolean")
        assert parse_kb(print_kb(kb)) == kb, seed


def test_corpus_covers_every_shape():
    seen = set()
    sizes = Sizes(dataterms=1)
    for seed in range(len(SHAPES)):
        shape = SHAPES[seed]
        random_kb(seed, sizes, shapes=[shape])
        seen.add(shape)
    assert seen == set(SHAPES)


# -- h-restriction ----------------------------------------------------------------


def test_h_restricted():
    kb = parse_kb(
        "Concept C D. AbstractRole R S T.\n"
        "Chain R S T SubRoleOf T.\n"
        "C SubClassOf (AtMost 3 R D).\n"
    )
    assert classify_h_restricted(kb, 3)
    assert not classify_h_restricted(kb, 2)
    assert classify_h_restricted(KnowledgeBase(), 1)
    kb4 = make_kb([SubAtMost(CName("C"), 4, RName("R"), CName("D"))],
                  parse_kb("Concept C D. AbstractRole R.").signature)
    assert not classify_h_restricted(kb4, 3)


# -- data ranges ---------------------------------------------------------------------

DMAP = DatatypeMap((
    Datatype("integer", ("1", "5", "9"), (FacetSpec("big", "minInclusive", 5), FacetSpec("small", "maxInclusive", 4))),
    Datatype("colour", ("red", "blue"), (FacetSpec("warm", "ext", ("red",)),)),
))


def test_data_range_examples():
    assert eval_data_range(TFacet("colour", FTop()), DMAP) == {"red", "blue"}
    assert eval_data_range(TFacet("colour", FBottom()), DMAP) == set()
    assert eval_data_range(TFacet("integer", FName("big")), DMAP) == {"5", "9"}
    assert eval_data_range(TDatatype("integer"), DMAP) == {"1", "5", "9"}


@given(st.sampled_from(["big", "small"]))
def test_excluded_middle(f):
    e = FOr(FName(f), FNot(FName(f)))
    assert eval_facet_expr(e, "integer", DMAP) == set(DMAP.constants("integer"))


def test_foreign_facet_rejected():
    with pytest.raises(KBError):
        eval_facet_expr(FName("warm"), "integer", DMAP)


def test_datatypes_disjoint():
    a = eval_data_range(TDatatype("integer"), DMAP)
    b = eval_data_range(TDatatype("colour"), DMAP)
    assert not a & b


@settings(max_examples=50)
@given(st.text(alphabet="XYZQW", min_size=1, max_size=4))
def test_undeclared_names_rejected(name):
    with pytest.raises(KBError):
        parse_kb(f"Concept C. Individual a. Assert a : {name}.")
