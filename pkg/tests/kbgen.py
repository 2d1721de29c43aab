"""Seeded random knowledge bases over small signatures."""

from __future__ import annotations

import random
from dataclasses import dataclass

from dl4lqs.dl4_model import (
    AtLeastSub,
    CAnd,
    CBottom,
    CDataValue,
    CHasValue,
    CName,
    CNominal,
    CNot,
    COr,
    CSelf,
    CTop,
    Chain,
    ConceptAssertion,
    DataAssertion,
    Datatype,
    DatatypeMap,
    DifferentIndividuals,
    Dis,
    Equiv,
    FacetSpec,
    FAnd,
    FBottom,
    FName,
    FNot,
    FOr,
    FTop,
    NegRoleAssertion,
    PDomain,
    PName,
    PNot,
    PRange,
    PRestrict,
    RAnd,
    RDomain,
    RId,
    RInverse,
    RName,
    RNot,
    ROr,
    RRange,
    RRestrict,
    RUniversal,
    RoleAssertion,
    RoleProp,
    SameIndividual,
    Signature,
    SomeSub,
    Sub,
    SubAll,
    SubAtMost,
    TAnd,
    TDatatype,
    TEnum,
    TFacet,
    TName,
    TNot,
    TOne,
    TOr,
    make_kb,
)

SHAPES = (
    "concept-equiv", "concept-sub", "arole-equiv", "arole-sub", "crole-equiv", "crole-sub",
    "data-equiv", "data-sub", "chain", "sym", "asym", "ref", "irref", "tra", "fun", "cfun",
    "dis", "all", "call", "some", "csome", "atleast", "atmost", "concept-assert",
    "role-assert", "crole-assert", "neg-role-assert", "neg-crole-assert", "same", "different",
    "data-assert",
)

NEEDS_CROLE = {"crole-equiv", "crole-sub", "cfun", "call", "csome", "crole-assert", "neg-crole-assert"}
NEEDS_DATA = NEEDS_CROLE | {"data-equiv", "data-sub", "data-assert"}


@dataclass(frozen=True)
class Sizes:
    individuals: int = 2
    concepts: int = 2
    aroles: int = 1
    croles: int = 1
    constants: int = 2
    facets: int = 1
    dataterms: int = 0
    depth: int = 2
    statements: int = 4
    max_n: int = 2


class KBGen:
    def __init__(self, seed, sizes: Sizes = Sizes(), datatype: str = "integer"):
        self.rng = random.Random(seed)
        self.sz = sizes
        self.inds = [f"a{k}" for k in range(1, sizes.individuals + 1)]
        self.concepts = [f"C{k}" for k in range(1, sizes.concepts + 1)]
        self.aroles = [f"R{k}" for k in range(1, sizes.aroles + 1)]
        self.croles = [f"P{k}" for k in range(1, sizes.croles + 1)]
        self.dataterms = [f"t{k}" for k in range(1, sizes.dataterms + 1)]
        self.dt = None
        if sizes.constants or sizes.facets or sizes.croles:
            if datatype == "boolean":
                consts = ("false", "true")[: sizes.constants]
            else:
                consts = tuple(str(10 * k) for k in range(1, sizes.constants + 1))
            facets = []
            for k in range(1, sizes.facets + 1):
                if datatype == "integer" and k % 2:
                    facets.append(FacetSpec(f"f{k}", "minInclusive", 10 * k + 5 * (k // 2)))
                else:
                    facets.append(FacetSpec(f"f{k}", "ext", tuple(self.rng.sample(consts, min(1, len(consts))))))
            self.dt = Datatype(datatype, consts, tuple(facets))
        self.consts = list(self.dt.constants) if self.dt else []
        self.facets = [f.name for f in self.dt.facets] if self.dt else []

    def pick(self, xs):
        return self.rng.choice(xs)

    # terms

    def concept(self, depth=None):
        d = self.sz.depth if depth is None else depth
        r = self.rng.random()
        if d <= 0 or r < 0.35:
            leaves = [CName(c) for c in self.concepts] * 3 + [CTop(), CBottom()]
            leaves += [CNominal(a) for a in self.inds]
            return self.pick(leaves)
        opts = ["not", "or", "and"]
        if self.aroles:
            opts += ["self", "value"]
        if self.croles and self.consts:
            opts.append("dvalue")
        k = self.pick(opts)
        if k == "not":
            return CNot(self.concept(d - 1))
        if k == "or":
            return COr(self.concept(d - 1), self.concept(d - 1))
        if k == "and":
            return CAnd(self.concept(d - 1), self.concept(d - 1))
        if k == "self":
            return CSelf(self.arole(d - 1))
        if k == "value":
            return CHasValue(self.arole(d - 1), self.pick(self.inds))
        return CDataValue(self.crole(d - 1), self.pick(self.consts))

    def arole(self, depth=None):
        d = self.sz.depth if depth is None else depth
        if d <= 0 or self.rng.random() < 0.4:
            return self.pick([RName(r) for r in self.aroles] * 4 + [RUniversal()])
        k = self.pick(["inv", "not", "or", "and", "dom", "ran", "res", "id"])
        if k == "inv":
            a = self.arole(d - 1)
            return RInverse(a) if not isinstance(a, RUniversal) else a
        if k == "not":
            return RNot(self.arole(d - 1))
        if k == "or":
            return ROr(self.arole(d - 1), self.arole(d - 1))
        if k == "and":
            return RAnd(self.arole(d - 1), self.arole(d - 1))
        if k == "dom":
            return RDomain(self.concept(d - 1), self.arole(d - 1))
        if k == "ran":
            return RRange(self.arole(d - 1), self.concept(d - 1))
        if k == "res":
            return RRestrict(self.concept(d - 1), self.arole(d - 1), self.concept(d - 1))
        return RId(self.concept(d - 1))

    def crole(self, depth=None):
        d = self.sz.depth if depth is None else depth
        if d <= 0 or self.rng.random() < 0.4:
            return PName(self.pick(self.croles))
        k = self.pick(["not", "dom", "ran", "res"])
        if k == "not":
            return PNot(self.crole(d - 1))
        if k == "dom":
            return PDomain(self.concept(d - 1), self.crole(d - 1))
        if k == "ran":
            return PRange(self.crole(d - 1), self.data(d - 1))
        return PRestrict(self.concept(d - 1), self.crole(d - 1), self.data(d - 1))

    def facet_expr(self, depth):
        if depth <= 0 or self.rng.random() < 0.5:
            return self.pick([FName(f) for f in self.facets] * 3 + [FTop(), FBottom()]) if self.facets \
                else self.pick([FTop(), FBottom()])
        k = self.pick(["not", "and", "or"])
        if k == "not":
            return FNot(self.facet_expr(depth - 1))
        cls = FAnd if k == "and" else FOr
        return cls(self.facet_expr(depth - 1), self.facet_expr(depth - 1))

    def data(self, depth=None):
        d = self.sz.depth if depth is None else depth
        leaves = [TDatatype(self.dt.name)]
        if self.consts:
            leaves += [TEnum(tuple(self.rng.sample(self.consts, self.rng.randint(1, len(self.consts)))))]
            leaves += [TOne(self.pick(self.consts))]
        leaves += [TFacet(self.dt.name, self.facet_expr(1))]
        leaves += [TName(t) for t in self.dataterms]
        if d <= 0 or self.rng.random() < 0.4:
            return self.pick(leaves)
        k = self.pick(["not", "and", "or"])
        if k == "not":
            return TNot(self.data(d - 1))
        cls = TAnd if k == "and" else TOr
        return cls(self.data(d - 1), self.data(d - 1))

    # statements

    def available_shapes(self):
        out = []
        for s in SHAPES:
            if s in NEEDS_CROLE and not self.croles:
                continue
            if s in NEEDS_DATA and self.dt is None:
                continue
            if s == "data-assert" and not self.consts:
                continue
            if s in ("crole-assert", "neg-crole-assert") and not self.consts:
                continue
            if not self.aroles and s not in NEEDS_DATA and s.split("-")[0] in (
                    "arole", "chain", "sym", "asym", "ref", "irref", "tra", "fun", "dis", "all",
                    "some", "atleast", "atmost", "role", "neg"):
                continue
            out.append(s)
        return out

    def statement(self, shape):
        c, r, p, t = self.concept, self.arole, self.crole, self.data
        ind = lambda: self.pick(self.inds)  # noqa: E731
        n = lambda: self.rng.randint(1, self.sz.max_n)  # noqa: E731
        if shape == "concept-equiv":
            return Equiv(c(), c())
        if shape == "concept-sub":
            return Sub(c(), c())
        if shape == "arole-equiv":
            return Equiv(r(), r())
        if shape == "arole-sub":
            return Sub(r(), r())
        if shape == "crole-equiv":
            return Equiv(p(), p())
        if shape == "crole-sub":
            return Sub(p(), p())
        if shape == "data-equiv":
            return Equiv(t(), t())
        if shape == "data-sub":
            return Sub(t(), t())
        if shape == "chain":
            return Chain(tuple(r(1) for _ in range(self.rng.randint(1, 2))), r(1))
        if shape in ("sym", "asym", "ref", "irref", "tra", "fun"):
            return RoleProp(shape.capitalize(), r(1))
        if shape == "cfun":
            return RoleProp("Fun", p(1))
        if shape == "dis":
            return Dis(r(1), r(1))
        if shape == "all":
            return SubAll(c(), r(), c())
        if shape == "call":
            return SubAll(c(), p(), t())
        if shape == "some":
            return SomeSub(r(), c(), c())
        if shape == "csome":
            return SomeSub(p(), t(), c())
        if shape == "atleast":
            return AtLeastSub(n(), r(1), c(1), c(1))
        if shape == "atmost":
            return SubAtMost(c(1), n(), r(1), c(1))
        if shape == "concept-assert":
            return ConceptAssertion(ind(), c())
        if shape == "role-assert":
            return RoleAssertion(ind(), ind(), r())
        if shape == "crole-assert":
            return RoleAssertion(ind(), self.pick(self.consts), p())
        if shape == "neg-role-assert":
            return NegRoleAssertion(ind(), ind(), r())
        if shape == "neg-crole-assert":
            return NegRoleAssertion(ind(), self.pick(self.consts), p())
        if shape == "same":
            return SameIndividual(ind(), ind())
        if shape == "different":
            return DifferentIndividuals(ind(), ind())
        if shape == "data-assert":
            return DataAssertion(self.pick(self.consts), t())
        raise ValueError(shape)

    def kb(self, shapes=None, count=None):
        avail = self.available_shapes()
        shapes = list(shapes) if shapes is not None else [
            self.pick(avail) for _ in range(count or self.sz.statements)
        ]
        sig = Signature(
            concepts=tuple(self.concepts), aroles=tuple(self.aroles), croles=tuple(self.croles),
            individuals=tuple(self.inds), dataterms=tuple(self.dataterms),
        )
        dmap = DatatypeMap((self.dt,) if self.dt else ())
        return make_kb([self.statement(s) for s in shapes], sig, dmap)


def random_kb(seed, sizes: Sizes = Sizes(), shapes=None, datatype="integer"):
    return KBGen(seed, sizes, datatype).kb(shapes)


def scaling_kb(s: int):
    """A 3-restricted KB with exactly s statements.

    The vocabulary grows with s while the individuals (3) and the two number
    restrictions stay fixed, so the default bound does not depend on s.
    """
    k = max(4, s // 4)
    A = [CName(f"A{i}") for i in range(k)]
    R = [RName(f"R{i}") for i in range(k)]
    inds = ("a", "b", "c")
    out = [SubAtMost(A[0], 2, R[0], A[1]), AtLeastSub(1, R[1], A[2], A[3])]
    i = 0
    while len(out) < s:
        pick, j = i % 6, (i // 6) % k
        nxt, nn = (j + 1) % k, (j + 2) % k
        if pick == 0:
            out.append(Sub(A[j], COr(A[nxt], CNot(A[nn]))))
        elif pick == 1:
            out.append(Chain((R[j], R[nxt], R[nn]), R[(j + 3) % k]))
        elif pick == 2:
            out.append(SubAll(A[j], R[j], A[nxt]))
        elif pick == 3:
            out.append(SomeSub(R[nxt], A[j], A[nn]))
        elif pick == 4:
            out.append(ConceptAssertion(inds[i % 3], A[j]))
        else:
            out.append(RoleAssertion(inds[i % 3], inds[(i + 1) % 3], R[j]))
        i += 1
    sig = Signature(concepts=tuple(a.name for a in A), aroles=tuple(r.name for r in R), individuals=inds)
    return make_kb(out, sig, DatatypeMap(()))
