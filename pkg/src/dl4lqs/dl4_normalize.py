"""Rewrite a knowledge base into the canonical statement shapes.

Compound terms are named bottom-up: every distinct compound subterm gets one
fresh name (prefix ``_``) defined by a single canonical equivalence.  Statements
that are already canonical pass through untouched, which makes the
transformation idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dl4_model import (
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
    AtLeastSub,
    Chain,
    ConceptAssertion,
    DataAssertion,
    DifferentIndividuals,
    Dis,
    Equiv,
    KBError,
    KnowledgeBase,
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
    SomeSub,
    Statement,
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
    kind_of,
    make_kb,
)

FRESH_PREFIX = "_"


# -- atomic positions ---------------------------------------------------------


def is_atomic(t) -> bool:
    k = kind_of(t)
    if k == "concept":
        return isinstance(t, (CName, CTop, CBottom))
    if k == "arole":
        return isinstance(t, (RName, RUniversal))
    if k == "crole":
        return isinstance(t, PName)
    return isinstance(t, (TDatatype, TFacet, TEnum, TName))


def _at(*ts) -> bool:
    return all(is_atomic(t) for t in ts)


def _canonical_equiv(left, right) -> bool:
    if not is_atomic(left):
        return False
    k = kind_of(left)
    r = right
    if k == "concept":
        if isinstance(r, CTop):
            return True
        if isinstance(r, CNot):
            return _at(r.arg)
        if isinstance(r, COr):
            return _at(r.left, r.right)
        if isinstance(r, CNominal):
            return True
        if isinstance(r, (CHasValue, CDataValue, CSelf)):
            return _at(r.role)
        return False
    if k == "arole":
        if isinstance(r, RUniversal):
            return True
        if isinstance(r, (RNot, RInverse)):
            return _at(r.arg)
        if isinstance(r, ROr):
            return _at(r.left, r.right)
        if isinstance(r, RId):
            return _at(r.concept)
        if isinstance(r, RDomain):
            return _at(r.concept, r.role)
        return False
    if k == "crole":
        if isinstance(r, PName):
            return True
        if isinstance(r, PNot):
            return _at(r.arg)
        if isinstance(r, PDomain):
            return _at(r.concept, r.role)
        if isinstance(r, PRange):
            return _at(r.role, r.data)
        if isinstance(r, PRestrict):
            return _at(r.domain, r.role, r.range)
        return False
    if is_atomic(r):
        return True
    if isinstance(r, TNot):
        return _at(r.arg)
    if isinstance(r, (TOr, TAnd)):
        return _at(r.left, r.right)
    return isinstance(r, TOne)


def is_canonical(s: Statement) -> bool:
    if isinstance(s, Equiv):
        return _canonical_equiv(s.left, s.right)
    if isinstance(s, Sub):
        # only concrete role inclusion is a listed shape
        return kind_of(s.left) == "crole" and _at(s.left, s.right)
    if isinstance(s, Chain):
        return _at(*s.roles, s.target)
    if isinstance(s, RoleProp):
        return s.prop in ("Ref", "Irref", "Fun") and _at(s.role)
    if isinstance(s, Dis):
        return _at(s.left, s.right)
    if isinstance(s, SubAll):
        return _at(s.sub, s.role, s.filler)
    if isinstance(s, SomeSub):
        return _at(s.role, s.filler, s.sup)
    if isinstance(s, AtLeastSub):
        return _at(s.role, s.filler, s.sup)
    if isinstance(s, SubAtMost):
        return _at(s.sub, s.role, s.filler)
    if isinstance(s, ConceptAssertion):
        return _at(s.concept)
    if isinstance(s, (RoleAssertion, NegRoleAssertion)):
        return _at(s.role)
    if isinstance(s, DataAssertion):
        return _at(s.term)
    return isinstance(s, (SameIndividual, DifferentIndividuals))


# -- the rewriting ------------------------------------------------------------


def _inv(r):
    """Inverse of a role; the universal role is its own inverse."""
    return r if isinstance(r, RUniversal) else RInverse(r)


@dataclass(frozen=True)
class NormalizationResult:
    kb: KnowledgeBase
    fresh_ledger: dict = field(default_factory=dict)  # fresh name -> defining term
    provenance: dict = field(default_factory=dict)  # canonical statement -> source


_FRESH_CLASS = {"concept": (CName, "C"), "arole": (RName, "R"), "crole": (PName, "P"), "data": (TName, "T")}


class _Normalizer:
    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        sig = kb.signature
        dm = kb.datatype_map
        self.taken = set(sig.kind_table()) | set(dm.names()) | set(dm.all_constants()) | set(dm.all_facets())
        self.counter = 0
        self.memo = {}
        self.ledger = {}
        self.fresh = {"concept": [], "arole": [], "crole": [], "data": []}
        self.out = []
        self.source = None

    def emit(self, s: Statement):
        assert is_canonical(s), s
        self.out.append((s, self.source))

    def new(self, kind, defining):
        cls, tag = _FRESH_CLASS[kind]
        while True:
            self.counter += 1
            name = f"{FRESH_PREFIX}{tag}{self.counter}"
            if name not in self.taken:
                break
        self.taken.add(name)
        self.fresh[kind].append(name)
        self.ledger[name] = defining
        return cls(name)

    def atom(self, t):
        if is_atomic(t):
            return t
        if t in self.memo:
            return self.memo[t]
        k = kind_of(t)
        rewritten = self.rewrite(t)
        if rewritten is not None:
            a = self.atom(rewritten)
            self.memo[t] = a
            return a
        a = self.new(k, t)
        self.memo[t] = a
        self.emit(Equiv(a, self.shape(t)))
        return a

    def rewrite(self, t):
        """Compound terms handled by reduction to other compound terms."""
        if isinstance(t, CAnd):
            return CNot(COr(CNot(t.left), CNot(t.right)))
        if isinstance(t, RAnd):
            return RNot(ROr(RNot(t.left), RNot(t.right)))
        if isinstance(t, RRange):
            return _inv(RDomain(t.concept, _inv(t.role)))
        if isinstance(t, RRestrict):
            return RRange(RDomain(t.domain, t.role), t.range)
        return None

    def shape(self, t):
        """Canonical right-hand side for a compound term, children atomized."""
        a = self.atom
        if isinstance(t, CNot):
            return CNot(a(t.arg))
        if isinstance(t, COr):
            return COr(a(t.left), a(t.right))
        if isinstance(t, CNominal):
            return t
        if isinstance(t, CSelf):
            return CSelf(a(t.role))
        if isinstance(t, CHasValue):
            return CHasValue(a(t.role), t.ind)
        if isinstance(t, CDataValue):
            return CDataValue(a(t.role), t.const)
        if isinstance(t, RInverse):
            return RInverse(a(t.arg))
        if isinstance(t, RNot):
            return RNot(a(t.arg))
        if isinstance(t, ROr):
            return ROr(a(t.left), a(t.right))
        if isinstance(t, RDomain):
            return RDomain(a(t.concept), a(t.role))
        if isinstance(t, RId):
            return RId(a(t.concept))
        if isinstance(t, PNot):
            return PNot(a(t.arg))
        if isinstance(t, PDomain):
            return PDomain(a(t.concept), a(t.role))
        if isinstance(t, PRange):
            return PRange(a(t.role), a(t.data))
        if isinstance(t, PRestrict):
            return PRestrict(a(t.domain), a(t.role), a(t.range))
        if isinstance(t, TNot):
            return TNot(a(t.arg))
        if isinstance(t, TOr):
            return TOr(a(t.left), a(t.right))
        if isinstance(t, TAnd):
            return TAnd(a(t.left), a(t.right))
        if isinstance(t, TOne):
            return t
        raise KBError(f"no canonical shape for {t!r}")

    def equate(self, left, right):
        """Canonical statements for left == right."""
        k = kind_of(left)
        x = self.atom(left)
        if isinstance(right, CTop) or isinstance(right, RUniversal):
            self.emit(Equiv(x, right))
            return
        if is_atomic(right):
            if k in ("crole", "data"):
                self.emit(Equiv(x, right))
            elif k == "concept":
                self.emit(Equiv(x, COr(right, right)))
            else:
                self.emit(Equiv(x, ROr(right, right)))
            return
        r = right
        while self.rewrite(r) is not None:
            r = self.rewrite(r)
        self.emit(Equiv(x, self.shape(r)))

    def statement(self, s: Statement):
        self.source = s
        if is_canonical(s):
            self.emit(s)
            return
        a = self.atom
        if isinstance(s, Equiv):
            self.equate(s.left, s.right)
        elif isinstance(s, Sub):
            k = kind_of(s.left)
            if k == "concept":
                top = self.atom_top()
                neg = a(CNot(s.left))
                self.emit(Equiv(top, COr(neg, a(s.right))))
            elif k == "arole":
                self.emit(Chain((a(s.left),), a(s.right)))
            elif k == "crole":
                self.emit(Sub(a(s.left), a(s.right)))
            else:
                t1 = a(s.left)
                neg = a(TNot(t1))
                empty = a(TAnd(t1, neg))
                top = a(TNot(empty))
                self.emit(Equiv(top, TOr(neg, a(s.right))))
        elif isinstance(s, Chain):
            self.emit(Chain(tuple(a(r) for r in s.roles), a(s.target)))
        elif isinstance(s, RoleProp):
            r = a(s.role)
            if s.prop == "Sym":
                self.emit(Chain((a(_inv(r)),), r))
            elif s.prop == "Tra":
                self.emit(Chain((r, r), r))
            elif s.prop == "Asym":
                self.emit(Dis(r, a(_inv(r))))
            else:
                self.emit(RoleProp(s.prop, r))
        elif isinstance(s, Dis):
            self.emit(Dis(a(s.left), a(s.right)))
        elif isinstance(s, SubAll):
            self.emit(SubAll(a(s.sub), a(s.role), a(s.filler)))
        elif isinstance(s, SomeSub):
            self.emit(SomeSub(a(s.role), a(s.filler), a(s.sup)))
        elif isinstance(s, AtLeastSub):
            self.emit(AtLeastSub(s.n, a(s.role), a(s.filler), a(s.sup)))
        elif isinstance(s, SubAtMost):
            self.emit(SubAtMost(a(s.sub), s.n, a(s.role), a(s.filler)))
        elif isinstance(s, ConceptAssertion):
            self.emit(ConceptAssertion(s.ind, a(s.concept)))
        elif isinstance(s, RoleAssertion):
            self.emit(RoleAssertion(s.subj, s.obj, a(s.role)))
        elif isinstance(s, NegRoleAssertion):
            self.emit(NegRoleAssertion(s.subj, s.obj, a(s.role)))
        elif isinstance(s, DataAssertion):
            self.emit(DataAssertion(s.const, a(s.term)))
        else:
            raise KBError(f"cannot normalize {s!r}")

    def atom_top(self):
        key = ("top-name",)
        if key not in self.memo:
            name = self.new("concept", CTop())
            self.memo[key] = name
            self.emit(Equiv(name, CTop()))
        return self.memo[key]

    def run(self) -> NormalizationResult:
        for s in self.kb.statements:
            self.statement(s)
        sig = self.kb.signature.extend(
            concepts=self.fresh["concept"],
            aroles=self.fresh["arole"],
            croles=self.fresh["crole"],
            dataterms=self.fresh["data"],
        )
        provenance = {}
        for s, src in self.out:
            provenance.setdefault(s, src)
        kb = make_kb((s for s, _ in self.out), sig, self.kb.datatype_map)
        return NormalizationResult(kb, dict(self.ledger), provenance)


def normalize(kb: KnowledgeBase) -> NormalizationResult:
    return _Normalizer(kb).run()
