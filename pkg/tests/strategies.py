"""Hypothesis strategies for small 4LQS formulas and interpretations."""

import itertools

from hypothesis import strategies as st

from dl4lqs.fourlqs_core import (
    And, Eq0, Eq1, Forall0, Interpretation, Mem01, Mem12, Mem23, Not, Or, PairEq, PairMem,
    V0, V1, V2, V3, mk_pair, powerset,
)

x, y, z = V0("x"), V0("y"), V0("z")
X, Y, Z = V1("X"), V1("Y"), V1("Z")
P = V2("P")
R = V3("R")

SORT0 = (x, y)
SORT1 = (X, Y)


def atoms(sort0=SORT0):
    s0 = st.sampled_from(sort0)
    s1 = st.sampled_from(SORT1)
    return st.one_of(
        st.builds(Eq0, s0, s0),
        st.builds(Mem01, s0, s1),
        st.builds(PairMem, s0, s0, st.just(R)),
        st.builds(PairEq, s0, s0, st.just(P)),
        st.builds(Eq1, s1, s1),
        st.builds(Mem12, s1, st.just(P)),
        st.builds(Mem23, st.just(P), st.just(R)),
    )


def formulas(sort0=SORT0, leaves=None, max_leaves=8):
    base = leaves if leaves is not None else atoms(sort0)
    return st.recursive(
        base,
        lambda kids: st.one_of(
            st.builds(Not, kids),
            st.builds(lambda a: And(tuple(a)), st.lists(kids, min_size=0, max_size=3)),
            st.builds(lambda a: Or(tuple(a)), st.lists(kids, min_size=0, max_size=3)),
        ),
        max_leaves=max_leaves,
    )


def quantified(max_leaves=6):
    """Formulas whose leaves may be sort-0 blocks binding z."""
    inner = formulas(sort0=(x, z), max_leaves=4).map(lambda b: Forall0((z,), b))
    return formulas(leaves=st.one_of(atoms(), inner), max_leaves=max_leaves)


def universe(n):
    return tuple(f"u{i}" for i in range(1, n + 1))


@st.composite
def interpretations(draw, max_size=3):
    n = draw(st.integers(1, max_size))
    uni = universe(n)
    el = st.sampled_from(uni)
    subset = st.frozensets(el)
    pairs = [mk_pair(a, b) for a, b in itertools.product(uni, repeat=2)]
    values = {x: draw(el), y: draw(el), z: draw(el), X: draw(subset), Y: draw(subset), Z: draw(subset)}
    values[P] = draw(st.frozensets(st.sampled_from(powerset(uni)), max_size=3))
    values[R] = draw(st.frozensets(st.sampled_from(pairs)))
    return Interpretation.build(uni, values)
