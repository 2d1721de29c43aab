"""Knowledge bases of the description logic with datatypes.

Terms follow four small grammars (concepts, abstract roles, concrete roles,
datatype terms).  Statements cover the RBox, TBox and ABox forms of the
logic.  A KnowledgeBase stores its statements box by box in a canonical order,
so printing is deterministic and parse(print(kb)) == kb.

The concrete text format (``.dl4``) is line oriented::

    Concept Person Adult.
    ConcreteRole hasAge.
    Individual tom.
    Datatype integer { constants 18 40; facets ge18 = minInclusive(18); }

    Adult SubClassOf Person.
    Person SubClassOf (All hasAge integer).
    Assert (tom, 40) : hasAge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable


class KBError(ValueError):
    pass


class KBParseError(KBError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


# -- facet expressions ------------------------------------------------------


class FacetExpr:
    __slots__ = ()


@dataclass(frozen=True)
class FName(FacetExpr):
    name: str


@dataclass(frozen=True)
class FTop(FacetExpr):
    pass


@dataclass(frozen=True)
class FBottom(FacetExpr):
    pass


@dataclass(frozen=True)
class FNot(FacetExpr):
    arg: FacetExpr


@dataclass(frozen=True)
class FAnd(FacetExpr):
    left: FacetExpr
    right: FacetExpr


@dataclass(frozen=True)
class FOr(FacetExpr):
    left: FacetExpr
    right: FacetExpr


# -- terms ------------------------------------------------------------------


class Term:
    __slots__ = ()
    KIND = ""


class Concept(Term):
    __slots__ = ()
    KIND = "concept"


class ARole(Term):
    __slots__ = ()
    KIND = "arole"


class CRole(Term):
    __slots__ = ()
    KIND = "crole"


class DataTerm(Term):
    __slots__ = ()
    KIND = "data"


@dataclass(frozen=True)
class CName(Concept):
    name: str


@dataclass(frozen=True)
class CTop(Concept):
    pass


@dataclass(frozen=True)
class CBottom(Concept):
    pass


@dataclass(frozen=True)
class CNot(Concept):
    arg: Concept


@dataclass(frozen=True)
class COr(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class CAnd(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class CNominal(Concept):
    ind: str


@dataclass(frozen=True)
class CSelf(Concept):
    role: ARole


@dataclass(frozen=True)
class CHasValue(Concept):
    """Exists R.{a}."""

    role: ARole
    ind: str


@dataclass(frozen=True)
class CDataValue(Concept):
    """Exists P.{e}."""

    role: CRole
    const: str


@dataclass(frozen=True)
class RName(ARole):
    name: str


@dataclass(frozen=True)
class RUniversal(ARole):
    pass


@dataclass(frozen=True)
class RInverse(ARole):
    arg: ARole

    def __post_init__(self):
        if isinstance(self.arg, RUniversal):
            raise KBError("the universal role may not be inverted")


@dataclass(frozen=True)
class RNot(ARole):
    arg: ARole


@dataclass(frozen=True)
class ROr(ARole):
    left: ARole
    right: ARole


@dataclass(frozen=True)
class RAnd(ARole):
    left: ARole
    right: ARole


@dataclass(frozen=True)
class RDomain(ARole):
    """R restricted to pairs whose first element is in the concept."""

    concept: Concept
    role: ARole


@dataclass(frozen=True)
class RRange(ARole):
    role: ARole
    concept: Concept


@dataclass(frozen=True)
class RRestrict(ARole):
    domain: Concept
    role: ARole
    range: Concept


@dataclass(frozen=True)
class RId(ARole):
    concept: Concept


@dataclass(frozen=True)
class PName(CRole):
    name: str


@dataclass(frozen=True)
class PNot(CRole):
    arg: CRole


@dataclass(frozen=True)
class PDomain(CRole):
    concept: Concept
    role: CRole


@dataclass(frozen=True)
class PRange(CRole):
    role: CRole
    data: DataTerm


@dataclass(frozen=True)
class PRestrict(CRole):
    domain: Concept
    role: CRole
    range: DataTerm


@dataclass(frozen=True)
class TDatatype(DataTerm):
    name: str


@dataclass(frozen=True)
class TEnum(DataTerm):
    consts: tuple

    def __post_init__(self):
        object.__setattr__(self, "consts", tuple(self.consts))
        if not self.consts:
            raise KBError("an enumeration lists at least one constant")


@dataclass(frozen=True)
class TFacet(DataTerm):
    datatype: str
    expr: FacetExpr


@dataclass(frozen=True)
class TNot(DataTerm):
    arg: DataTerm


@dataclass(frozen=True)
class TAnd(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class TOr(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class TOne(DataTerm):
    const: str


@dataclass(frozen=True)
class TName(DataTerm):
    """Named datatype term; only introduced by normalization."""

    name: str


ROLE_KINDS = ("arole", "crole")


def kind_of(t) -> str:
    if isinstance(t, Term):
        return t.KIND
    raise KBError(f"{t!r} is not a term")


def subterms(t) -> Iterable:
    """Direct term children (facet expressions excluded)."""
    if isinstance(t, (CNot, RNot, PNot, TNot, RInverse)):
        return (t.arg,)
    if isinstance(t, (COr, CAnd, ROr, RAnd, TAnd, TOr)):
        return (t.left, t.right)
    if isinstance(t, (CSelf, CHasValue, CDataValue)):
        return (t.role,)
    if isinstance(t, (RDomain, PDomain)):
        return (t.concept, t.role)
    if isinstance(t, RRange):
        return (t.role, t.concept)
    if isinstance(t, PRange):
        return (t.role, t.data)
    if isinstance(t, (RRestrict, PRestrict)):
        return (t.domain, t.role, t.range)
    if isinstance(t, RId):
        return (t.concept,)
    return ()


# -- statements -------------------------------------------------------------


class Statement:
    __slots__ = ()
    BOX = ""


def _same_kind(a, b, what):
    if kind_of(a) != kind_of(b):
        raise KBError(f"{what}: both sides must be of the same kind")


@dataclass(frozen=True)
class Equiv(Statement):
    left: Term
    right: Term

    def __post_init__(self):
        _same_kind(self.left, self.right, "equivalence")

    @property
    def BOX(self):
        return "rbox" if kind_of(self.left) in ROLE_KINDS else "tbox"


@dataclass(frozen=True)
class Sub(Statement):
    left: Term
    right: Term

    def __post_init__(self):
        _same_kind(self.left, self.right, "subsumption")

    @property
    def BOX(self):
        return "rbox" if kind_of(self.left) in ROLE_KINDS else "tbox"


@dataclass(frozen=True)
class Chain(Statement):
    roles: tuple
    target: ARole
    BOX = "rbox"

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(self.roles))
        if not self.roles:
            raise KBError("a role chain has length at least 1")
        for r in self.roles + (self.target,):
            if kind_of(r) != "arole":
                raise KBError("role chains range over abstract roles")


ROLE_PROPERTIES = ("Sym", "Asym", "Ref", "Irref", "Tra", "Fun")


@dataclass(frozen=True)
class RoleProp(Statement):
    prop: str
    role: Term
    BOX = "rbox"

    def __post_init__(self):
        if self.prop not in ROLE_PROPERTIES:
            raise KBError(f"unknown role property {self.prop!r}")
        k = kind_of(self.role)
        if k == "crole" and self.prop != "Fun":
            raise KBError(f"{self.prop} applies to abstract roles only")
        if k not in ROLE_KINDS:
            raise KBError(f"{self.prop} expects a role")


@dataclass(frozen=True)
class Dis(Statement):
    left: ARole
    right: ARole
    BOX = "rbox"

    def __post_init__(self):
        for r in (self.left, self.right):
            if kind_of(r) != "arole":
                raise KBError("Dis expects abstract roles")


def _check_quant(role, filler):
    k = kind_of(role)
    if k == "arole":
        want = "concept"
    elif k == "crole":
        want = "data"
    else:
        raise KBError("quantified statements need a role")
    if kind_of(filler) != want:
        raise KBError(f"a {k} restriction needs a {want} filler")


@dataclass(frozen=True)
class SubAll(Statement):
    """C SubClassOf All R F."""

    sub: Concept
    role: Term
    filler: Term
    BOX = "tbox"

    def __post_init__(self):
        _check_quant(self.role, self.filler)


@dataclass(frozen=True)
class SomeSub(Statement):
    """Some R F SubClassOf C."""

    role: Term
    filler: Term
    sup: Concept
    BOX = "tbox"

    def __post_init__(self):
        _check_quant(self.role, self.filler)


@dataclass(frozen=True)
class AtLeastSub(Statement):
    n: int
    role: Term
    filler: Term
    sup: Concept
    BOX = "tbox"

    def __post_init__(self):
        _check_quant(self.role, self.filler)
        if not isinstance(self.n, int) or self.n < 1:
            raise KBError("cardinality bounds are at least 1")


@dataclass(frozen=True)
class SubAtMost(Statement):
    sub: Concept
    n: int
    role: Term
    filler: Term
    BOX = "tbox"

    def __post_init__(self):
        _check_quant(self.role, self.filler)
        if not isinstance(self.n, int) or self.n < 1:
            raise KBError("cardinality bounds are at least 1")


@dataclass(frozen=True)
class ConceptAssertion(Statement):
    ind: str
    concept: Concept
    BOX = "abox"


@dataclass(frozen=True)
class RoleAssertion(Statement):
    """(a, b) : R, or (a, e) : P for a concrete role."""

    subj: str
    obj: str
    role: Term
    BOX = "abox"


@dataclass(frozen=True)
class NegRoleAssertion(Statement):
    subj: str
    obj: str
    role: Term
    BOX = "abox"


@dataclass(frozen=True)
class SameIndividual(Statement):
    left: str
    right: str
    BOX = "abox"


@dataclass(frozen=True)
class DifferentIndividuals(Statement):
    left: str
    right: str
    BOX = "abox"


@dataclass(frozen=True)
class DataAssertion(Statement):
    const: str
    term: DataTerm
    BOX = "abox"


NUMBER_RESTRICTIONS = (AtLeastSub, SubAtMost)


def statement_terms(s: Statement) -> tuple:
    if isinstance(s, (Equiv, Sub, Dis)):
        return (s.left, s.right)
    if isinstance(s, Chain):
        return s.roles + (s.target,)
    if isinstance(s, RoleProp):
        return (s.role,)
    if isinstance(s, SubAll):
        return (s.sub, s.role, s.filler)
    if isinstance(s, (SomeSub, AtLeastSub)):
        return (s.role, s.filler, s.sup)
    if isinstance(s, SubAtMost):
        return (s.sub, s.role, s.filler)
    if isinstance(s, ConceptAssertion):
        return (s.concept,)
    if isinstance(s, (RoleAssertion, NegRoleAssertion)):
        return (s.role,)
    if isinstance(s, DataAssertion):
        return (s.term,)
    return ()


# -- datatype map -----------------------------------------------------------

BUILTIN_DATATYPES = ("integer", "boolean")
_INT = re.compile(r"-?[0-9]+$")


@dataclass(frozen=True)
class FacetSpec:
    name: str
    kind: str  # "minInclusive" | "maxInclusive" | "ext"
    value: object  # int bound or tuple of constants

    def __post_init__(self):
        if self.kind == "ext":
            object.__setattr__(self, "value", tuple(self.value))
        elif self.kind in ("minInclusive", "maxInclusive"):
            if not isinstance(self.value, int):
                raise KBError(f"facet {self.name}: {self.kind} needs an integer")
        else:
            raise KBError(f"unknown facet kind {self.kind!r}")


@dataclass(frozen=True)
class Datatype:
    name: str
    constants: tuple = ()
    facets: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(self.constants))
        object.__setattr__(self, "facets", tuple(self.facets))
        if len(set(self.constants)) != len(self.constants):
            raise KBError(f"datatype {self.name}: repeated constant")
        if self.name == "integer":
            for c in self.constants:
                if not _INT.match(c):
                    raise KBError(f"integer constant {c!r} is not an integer literal")
        if self.name == "boolean":
            for c in self.constants:
                if c not in ("true", "false"):
                    raise KBError(f"boolean constant {c!r} is not true or false")
        for f in self.facets:
            if f.kind != "ext" and self.name != "integer":
                raise KBError(f"facet {f.name}: {f.kind} applies to integer only")
            if f.kind == "ext":
                for c in f.value:
                    if c not in self.constants:
                        raise KBError(f"facet {f.name}: {c} is not a constant of {self.name}")

    def facet_names(self) -> tuple:
        return tuple(f.name for f in self.facets)


def _facet_holds(spec: FacetSpec, const: str) -> bool:
    if spec.kind == "ext":
        return const in spec.value
    k = int(const)
    if spec.kind == "minInclusive":
        return k >= spec.value
    return k <= spec.value


@dataclass(frozen=True)
class DatatypeMap:
    datatypes: tuple = ()

    def __post_init__(self):
        dts = tuple(sorted(self.datatypes, key=lambda d: d.name))
        object.__setattr__(self, "datatypes", dts)
        names = [d.name for d in dts]
        if len(set(names)) != len(names):
            raise KBError("datatype names must be distinct")
        seen = {}
        for d in dts:
            for c in d.constants:
                if c in seen:
                    raise KBError(f"constant {c} belongs to both {seen[c]} and {d.name}")
                seen[c] = d.name
        fseen = {}
        for d in dts:
            for f in d.facets:
                if f.name in fseen:
                    raise KBError(f"facet {f.name} declared twice")
                fseen[f.name] = d.name
        object.__setattr__(self, "_const_home", seen)
        object.__setattr__(self, "_facet_home", fseen)

    def names(self) -> tuple:
        return tuple(d.name for d in self.datatypes)

    def get(self, name: str) -> Datatype:
        for d in self.datatypes:
            if d.name == name:
                return d
        raise KBError(f"unknown datatype {name}")

    def constants(self, d: str) -> tuple:
        return self.get(d).constants

    def all_constants(self) -> tuple:
        return tuple(c for d in self.datatypes for c in d.constants)

    def facets(self, d: str) -> tuple:
        return self.get(d).facet_names()

    def all_facets(self) -> tuple:
        return tuple(f.name for d in self.datatypes for f in d.facets)

    def datatype_of_const(self, c: str) -> str:
        try:
            return self._const_home[c]
        except KeyError:
            raise KBError(f"unknown constant {c}") from None

    def datatype_of_facet(self, f: str) -> str:
        try:
            return self._facet_home[f]
        except KeyError:
            raise KBError(f"unknown facet {f}") from None

    def facet_spec(self, f: str) -> FacetSpec:
        d = self.get(self.datatype_of_facet(f))
        return next(s for s in d.facets if s.name == f)

    def facet_eval(self, f: str, c: str) -> bool:
        d = self.datatype_of_facet(f)
        if self.datatype_of_const(c) != d:
            raise KBError(f"constant {c} is not of datatype {d}")
        return _facet_holds(self.facet_spec(f), c)


def facet_expr_facets(e: FacetExpr) -> set:
    if isinstance(e, FName):
        return {e.name}
    if isinstance(e, FNot):
        return facet_expr_facets(e.arg)
    if isinstance(e, (FAnd, FOr)):
        return facet_expr_facets(e.left) | facet_expr_facets(e.right)
    return set()


def eval_facet_expr(e: FacetExpr, d: str, dmap: DatatypeMap) -> frozenset:
    """Extension of a facet expression over the declared constants of d."""
    universe = frozenset(dmap.constants(d))
    if isinstance(e, FName):
        if dmap.datatype_of_facet(e.name) != d:
            raise KBError(f"facet {e.name} does not belong to datatype {d}")
        return frozenset(c for c in universe if dmap.facet_eval(e.name, c))
    if isinstance(e, FTop):
        return universe
    if isinstance(e, FBottom):
        return frozenset()
    if isinstance(e, FNot):
        return universe - eval_facet_expr(e.arg, d, dmap)
    if isinstance(e, FAnd):
        return eval_facet_expr(e.left, d, dmap) & eval_facet_expr(e.right, d, dmap)
    if isinstance(e, FOr):
        return eval_facet_expr(e.left, d, dmap) | eval_facet_expr(e.right, d, dmap)
    raise KBError(f"not a facet expression: {e!r}")


def eval_data_range(dr: DataTerm, dmap: DatatypeMap) -> frozenset:
    """Extension of a data range over the declared constants.

    Complements are taken inside the union of all declared datatypes.
    """
    if isinstance(dr, TDatatype):
        return frozenset(dmap.constants(dr.name))
    if isinstance(dr, TEnum):
        for c in dr.consts:
            dmap.datatype_of_const(c)
        return frozenset(dr.consts)
    if isinstance(dr, TOne):
        dmap.datatype_of_const(dr.const)
        return frozenset((dr.const,))
    if isinstance(dr, TFacet):
        return eval_facet_expr(dr.expr, dr.datatype, dmap)
    if isinstance(dr, TNot):
        return frozenset(dmap.all_constants()) - eval_data_range(dr.arg, dmap)
    if isinstance(dr, TAnd):
        return eval_data_range(dr.left, dmap) & eval_data_range(dr.right, dmap)
    if isinstance(dr, TOr):
        return eval_data_range(dr.left, dmap) | eval_data_range(dr.right, dmap)
    raise KBError(f"not a data range: {dr!r}")


# -- knowledge bases --------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    concepts: tuple = ()
    aroles: tuple = ()
    croles: tuple = ()
    individuals: tuple = ()
    dataterms: tuple = ()

    def __post_init__(self):
        for f in ("concepts", "aroles", "croles", "individuals", "dataterms"):
            vals = tuple(getattr(self, f))
            if len(set(vals)) != len(vals):
                raise KBError(f"repeated name among {f}")
            object.__setattr__(self, f, tuple(sorted(vals)))

    def kind_table(self) -> dict:
        out = {}
        for kind, names in (
            ("concept", self.concepts),
            ("arole", self.aroles),
            ("crole", self.croles),
            ("individual", self.individuals),
            ("dataterm", self.dataterms),
        ):
            for n in names:
                if n in out:
                    raise KBError(f"name {n} declared as both {out[n]} and {kind}")
                out[n] = kind
        return out

    def extend(self, **more) -> "Signature":
        vals = {f: tuple(getattr(self, f)) + tuple(more.get(f, ())) for f in
                ("concepts", "aroles", "croles", "individuals", "dataterms")}
        return Signature(**vals)


@dataclass(frozen=True)
class KnowledgeBase:
    signature: Signature = field(default_factory=Signature)
    datatype_map: DatatypeMap = field(default_factory=DatatypeMap)
    rbox: tuple = ()
    tbox: tuple = ()
    abox: tuple = ()

    def __post_init__(self):
        for box in ("rbox", "tbox", "abox"):
            items = tuple(getattr(self, box))
            for s in items:
                if not isinstance(s, Statement) or s.BOX != box:
                    raise KBError(f"{s!r} does not belong in the {box}")
            keyed = {print_statement(s): s for s in items}
            object.__setattr__(self, box, tuple(keyed[k] for k in sorted(keyed)))
        check_kb(self)

    @property
    def statements(self) -> tuple:
        return self.rbox + self.tbox + self.abox


def make_kb(statements: Iterable[Statement], signature: Signature = None,
            datatype_map: DatatypeMap = None) -> KnowledgeBase:
    boxes = {"rbox": [], "tbox": [], "abox": []}
    for s in statements:
        boxes[s.BOX].append(s)
    return KnowledgeBase(signature or Signature(), datatype_map or DatatypeMap(), **boxes)


def infer_signature(statements: Iterable[Statement], datatype_map: DatatypeMap = None) -> Signature:
    """Smallest signature covering the names used by the statements."""
    dmap = datatype_map or DatatypeMap()
    acc = {"concepts": set(), "aroles": set(), "croles": set(), "individuals": set(), "dataterms": set()}

    def term(t):
        if isinstance(t, CName):
            acc["concepts"].add(t.name)
        elif isinstance(t, RName):
            acc["aroles"].add(t.name)
        elif isinstance(t, PName):
            acc["croles"].add(t.name)
        elif isinstance(t, TName):
            acc["dataterms"].add(t.name)
        elif isinstance(t, (CNominal, CHasValue)):
            acc["individuals"].add(t.ind)
        for k in subterms(t):
            term(k)

    consts = set(dmap.all_constants())
    for s in statements:
        for t in statement_terms(s):
            term(t)
        if isinstance(s, ConceptAssertion):
            acc["individuals"].add(s.ind)
        elif isinstance(s, (RoleAssertion, NegRoleAssertion)):
            acc["individuals"].add(s.subj)
            if s.obj not in consts:
                acc["individuals"].add(s.obj)
        elif isinstance(s, (SameIndividual, DifferentIndividuals)):
            acc["individuals"].update((s.left, s.right))
    return Signature(**{k: tuple(v) for k, v in acc.items()})


def _check_term(t, sig_kinds: dict, dmap: DatatypeMap):
    def need(name, kind):
        got = sig_kinds.get(name)
        if got != kind:
            raise KBError(f"undeclared {kind} name {name}")

    if isinstance(t, CName):
        need(t.name, "concept")
    elif isinstance(t, RName):
        need(t.name, "arole")
    elif isinstance(t, PName):
        need(t.name, "crole")
    elif isinstance(t, TName):
        need(t.name, "dataterm")
    elif isinstance(t, (CNominal, CHasValue)):
        need(t.ind, "individual")
    elif isinstance(t, CDataValue):
        dmap.datatype_of_const(t.const)
    elif isinstance(t, TDatatype):
        dmap.get(t.name)
    elif isinstance(t, TEnum):
        for c in t.consts:
            dmap.datatype_of_const(c)
    elif isinstance(t, TOne):
        dmap.datatype_of_const(t.const)
    elif isinstance(t, TFacet):
        dmap.get(t.datatype)
        for f in facet_expr_facets(t.expr):
            if dmap.datatype_of_facet(f) != t.datatype:
                raise KBError(f"facet {f} does not belong to datatype {t.datatype}")
    for k in subterms(t):
        _check_term(k, sig_kinds, dmap)


def check_kb(kb: KnowledgeBase):
    kinds = kb.signature.kind_table()
    dmap = kb.datatype_map
    clash = set(kinds) & (set(dmap.names()) | set(dmap.all_constants()) | set(dmap.all_facets()))
    if clash:
        raise KBError(f"name {sorted(clash)[0]} is declared twice")
    for s in kb.statements:
        for t in statement_terms(s):
            _check_term(t, kinds, dmap)

        def ind(a):
            if kinds.get(a) != "individual":
                raise KBError(f"undeclared individual name {a}")

        if isinstance(s, ConceptAssertion):
            ind(s.ind)
        elif isinstance(s, (RoleAssertion, NegRoleAssertion)):
            ind(s.subj)
            if kind_of(s.role) == "arole":
                ind(s.obj)
            else:
                dmap.datatype_of_const(s.obj)
        elif isinstance(s, (SameIndividual, DifferentIndividuals)):
            ind(s.left)
            ind(s.right)
        elif isinstance(s, DataAssertion):
            dmap.datatype_of_const(s.const)


def classify_h_restricted(kb: KnowledgeBase, h: int) -> bool:
    """True iff every chain length and cardinality bound is at most h."""
    if h < 1:
        raise ValueError("h must be a positive integer")
    for s in kb.statements:
        if isinstance(s, Chain) and len(s.roles) > h:
            return False
        if isinstance(s, NUMBER_RESTRICTIONS) and s.n > h:
            return False
    return True


# -- printing ---------------------------------------------------------------


def print_facet(e: FacetExpr) -> str:
    if isinstance(e, FName):
        return e.name
    if isinstance(e, FTop):
        return "top"
    if isinstance(e, FBottom):
        return "bottom"
    if isinstance(e, FNot):
        return f"(not {print_facet(e.arg)})"
    if isinstance(e, FAnd):
        return f"(and {print_facet(e.left)} {print_facet(e.right)})"
    if isinstance(e, FOr):
        return f"(or {print_facet(e.left)} {print_facet(e.right)})"
    raise KBError(f"not a facet expression: {e!r}")


def print_term(t) -> str:
    p = print_term
    if isinstance(t, (CName, RName, PName, TName, TDatatype)):
        return t.name
    if isinstance(t, CTop):
        return "Top"
    if isinstance(t, CBottom):
        return "Bottom"
    if isinstance(t, RUniversal):
        return "U"
    if isinstance(t, (CNot, RNot, PNot, TNot)):
        return f"(not {p(t.arg)})"
    if isinstance(t, (COr, ROr, TOr)):
        return f"(or {p(t.left)} {p(t.right)})"
    if isinstance(t, (CAnd, RAnd, TAnd)):
        return f"(and {p(t.left)} {p(t.right)})"
    if isinstance(t, CNominal):
        return "{" + t.ind + "}"
    if isinstance(t, TOne):
        return "{" + t.const + "}"
    if isinstance(t, CSelf):
        return f"(Self {p(t.role)})"
    if isinstance(t, CHasValue):
        return f"(Value {p(t.role)} {{{t.ind}}})"
    if isinstance(t, CDataValue):
        return f"(Value {p(t.role)} {{{t.const}}})"
    if isinstance(t, RInverse):
        return f"(Inverse {p(t.arg)})"
    if isinstance(t, (RDomain, PDomain)):
        return f"(DomainRestrict {p(t.concept)} {p(t.role)})"
    if isinstance(t, RRange):
        return f"(RangeRestrict {p(t.role)} {p(t.concept)})"
    if isinstance(t, PRange):
        return f"(RangeRestrict {p(t.role)} {p(t.data)})"
    if isinstance(t, (RRestrict, PRestrict)):
        return f"(Restrict {p(t.domain)} {p(t.role)} {p(t.range)})"
    if isinstance(t, RId):
        return f"(Id {p(t.concept)})"
    if isinstance(t, TEnum):
        return "(oneof " + " ".join(t.consts) + ")"
    if isinstance(t, TFacet):
        if isinstance(t.expr, FName):
            return t.expr.name
        return f"(facet {t.datatype} {print_facet(t.expr)})"
    raise KBError(f"cannot print {t!r}")


def print_statement(s: Statement) -> str:
    p = print_term
    if isinstance(s, Equiv):
        return f"{p(s.left)} EquivalentTo {p(s.right)}."
    if isinstance(s, Sub):
        kw = "SubRoleOf" if kind_of(s.left) in ROLE_KINDS else "SubClassOf"
        return f"{p(s.left)} {kw} {p(s.right)}."
    if isinstance(s, Chain):
        return "Chain " + " ".join(p(r) for r in s.roles) + f" SubRoleOf {p(s.target)}."
    if isinstance(s, RoleProp):
        return f"{s.prop} {p(s.role)}."
    if isinstance(s, Dis):
        return f"Dis {p(s.left)} {p(s.right)}."
    if isinstance(s, SubAll):
        return f"{p(s.sub)} SubClassOf (All {p(s.role)} {p(s.filler)})."
    if isinstance(s, SomeSub):
        return f"(Some {p(s.role)} {p(s.filler)}) SubClassOf {p(s.sup)}."
    if isinstance(s, AtLeastSub):
        return f"(AtLeast {s.n} {p(s.role)} {p(s.filler)}) SubClassOf {p(s.sup)}."
    if isinstance(s, SubAtMost):
        return f"{p(s.sub)} SubClassOf (AtMost {s.n} {p(s.role)} {p(s.filler)})."
    if isinstance(s, ConceptAssertion):
        return f"Assert {s.ind} : {p(s.concept)}."
    if isinstance(s, DataAssertion):
        return f"Assert {s.const} : {p(s.term)}."
    if isinstance(s, RoleAssertion):
        return f"Assert ({s.subj}, {s.obj}) : {p(s.role)}."
    if isinstance(s, NegRoleAssertion):
        return f"Assert ({s.subj}, {s.obj}) : not {p(s.role)}."
    if isinstance(s, SameIndividual):
        return f"Assert {s.left} = {s.right}."
    if isinstance(s, DifferentIndividuals):
        return f"Assert {s.left} != {s.right}."
    raise KBError(f"cannot print {s!r}")


def _print_facet_spec(f: FacetSpec) -> str:
    if f.kind == "ext":
        return f"{f.name} = {{" + " ".join(f.value) + "}"
    return f"{f.name} = {f.kind}({f.value})"


def print_datatype(d: Datatype) -> str:
    parts = []
    if d.constants:
        parts.append("constants " + " ".join(d.constants) + ";")
    if d.facets:
        parts.append("facets " + ", ".join(_print_facet_spec(f) for f in d.facets) + ";")
    inner = " ".join(parts)
    return f"Datatype {d.name} {{ {inner} }}" if inner else f"Datatype {d.name} {{ }}"


HEADER = "# DL4 knowledge base"


def print_kb(kb: KnowledgeBase) -> str:
    lines = [HEADER]
    sig = kb.signature
    for kw, names in (
        ("Concept", sig.concepts),
        ("AbstractRole", sig.aroles),
        ("ConcreteRole", sig.croles),
        ("Individual", sig.individuals),
    ):
        if names:
            lines.append(f"{kw} " + " ".join(names) + ".")
    for d in kb.datatype_map.datatypes:
        lines.append(print_datatype(d))
    if sig.dataterms:
        lines.append("DataTerm " + " ".join(sig.dataterms) + ".")
    for title, box in (("RBox", kb.rbox), ("TBox", kb.tbox), ("ABox", kb.abox)):
        if box:
            lines.append("")
            lines.append(f"# {title}")
            lines.extend(print_statement(s) for s in box)
    return "\n".join(lines) + "\n"


# -- parsing ----------------------------------------------------------------

KEYWORDS = frozenset(
    """Concept AbstractRole ConcreteRole Individual Datatype DataTerm SubClassOf
    EquivalentTo SubRoleOf Chain Some All AtLeast AtMost Self Inverse
    DomainRestrict RangeRestrict Restrict Id Value Dis Fun Ref Irref Sym Asym Tra Assert
    Top Bottom U not and or oneof facet top bottom constants facets""".split()
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<neq>!=)
  | (?P<punct>[(){}.,:;=])
  | (?P<name>-?[A-Za-z0-9_][A-Za-z0-9_\-]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    text: str
    kind: str
    line: int
    col: int


def _lex(text: str) -> list:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise KBParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("punct", "neq"):
                out.append(_Tok(s, "punct", line, col))
            elif kind == "name":
                out.append(_Tok(s, "name", line, col))
            col += len(s)
        pos = m.end()
    out.append(_Tok("", "eof", line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.kinds = {}  # name -> kind
        self.order = {"concept": [], "arole": [], "crole": [], "individual": [], "dataterm": []}
        self.datatypes = []
        self.consts = {}
        self.facets = {}  # facet -> datatype
        self.statements = []

    # token helpers
    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise KBParseError(msg, tok.line, tok.col)

    def expect(self, text):
        t = self.next()
        if t.text != text:
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def at(self, text) -> bool:
        return self.peek().text == text

    def name(self, what="a name") -> _Tok:
        t = self.next()
        if t.kind != "name":
            self.fail(f"expected {what}, found {t.text or 'end of input'!r}", t)
        return t

    def fresh_name(self) -> _Tok:
        t = self.name()
        if t.text in KEYWORDS:
            self.fail(f"{t.text!r} is a reserved word", t)
        if t.text in self.kinds or t.text in self.consts or t.text in self.facets or \
                any(d.name == t.text for d in self.datatypes):
            self.fail(f"name {t.text} is already declared", t)
        return t

    # top level
    def parse(self):
        while self.peek().kind != "eof":
            self.item()
        dmap = DatatypeMap(tuple(self.datatypes))
        sig = Signature(
            concepts=self.order["concept"],
            aroles=self.order["arole"],
            croles=self.order["crole"],
            individuals=self.order["individual"],
            dataterms=self.order["dataterm"],
        )
        return make_kb(self.statements, sig, dmap)

    def item(self):
        t = self.peek()
        decl = {"Concept": "concept", "AbstractRole": "arole", "ConcreteRole": "crole",
                "Individual": "individual", "DataTerm": "dataterm"}
        if t.text in decl:
            self.next()
            names = []
            while not self.at("."):
                names.append(self.fresh_name())
                self.kinds[names[-1].text] = decl[t.text]
            if not names:
                self.fail("declaration lists no names", t)
            self.expect(".")
            self.order[decl[t.text]].extend(n.text for n in names)
            return
        if t.text == "Datatype":
            self.datatype_decl()
            return
        start = self.peek()
        try:
            stmt = self.statement()
        except KBError as e:
            if isinstance(e, KBParseError):
                raise
            raise KBParseError(str(e), start.line, start.col) from None
        self.expect(".")
        self.statements.append(stmt)

    def datatype_decl(self):
        self.expect("Datatype")
        nt = self.fresh_name()
        name = nt.text
        self.expect("{")
        consts, specs = [], []
        while not self.at("}"):
            sec = self.name("'constants' or 'facets'")
            if sec.text == "constants":
                while not self.at(";"):
                    c = self.fresh_name()
                    if c.text in consts:
                        self.fail(f"constant {c.text} repeated", c)
                    consts.append(c.text)
                    self.consts[c.text] = name
            elif sec.text == "facets":
                while True:
                    ft = self.fresh_name()
                    self.expect("=")
                    if self.at("{"):
                        self.next()
                        vals = []
                        while not self.at("}"):
                            vals.append(self.name("a constant").text)
                            if self.at(","):
                                self.next()
                        self.expect("}")
                        spec = (ft.text, "ext", tuple(vals))
                    else:
                        k = self.name("minInclusive or maxInclusive")
                        if k.text not in ("minInclusive", "maxInclusive"):
                            self.fail(f"unknown facet kind {k.text!r}", k)
                        self.expect("(")
                        v = self.name("an integer")
                        if not _INT.match(v.text):
                            self.fail("expected an integer bound", v)
                        self.expect(")")
                        spec = (ft.text, k.text, int(v.text))
                    self.facets[ft.text] = name
                    specs.append(spec)
                    if self.at(","):
                        self.next()
                        continue
                    break
            else:
                self.fail(f"unknown datatype section {sec.text!r}", sec)
            self.expect(";")
        self.expect("}")
        if self.at("."):
            self.next()
        try:
            d = Datatype(name, tuple(consts), tuple(FacetSpec(*s) for s in specs))
        except KBError as e:
            raise KBParseError(str(e), nt.line, nt.col) from None
        self.datatypes.append(d)

    # statements
    def statement(self) -> Statement:
        t = self.peek()
        if t.text == "Assert":
            self.next()
            return self.assertion()
        if t.text == "Chain":
            self.next()
            roles = []
            while not self.at("SubRoleOf"):
                if self.peek().kind == "eof" or self.at("."):
                    self.fail("expected SubRoleOf")
                roles.append(self.term_of("arole"))
            self.expect("SubRoleOf")
            return Chain(tuple(roles), self.term_of("arole"))
        if t.text in ROLE_PROPERTIES:
            self.next()
            r = self.term()
            return RoleProp(t.text, r)
        if t.text == "Dis":
            self.next()
            return Dis(self.term_of("arole"), self.term_of("arole"))
        if t.text == "(" and self.peek(1).text in ("Some", "AtLeast"):
            self.next()
            kw = self.next().text
            n = self.number() if kw == "AtLeast" else None
            role = self.role_term()
            filler = self.term_of(_filler_kind(role))
            self.expect(")")
            self.expect("SubClassOf")
            sup = self.term_of("concept")
            return SomeSub(role, filler, sup) if n is None else AtLeastSub(n, role, filler, sup)
        left = self.term()
        kw = self.name("SubClassOf, SubRoleOf or EquivalentTo")
        k = kind_of(left)
        if kw.text == "EquivalentTo":
            return Equiv(left, self.term_of(k))
        if kw.text == "SubRoleOf":
            if k not in ROLE_KINDS:
                self.fail("SubRoleOf relates roles", kw)
            return Sub(left, self.term_of(k))
        if kw.text == "SubClassOf":
            if k in ROLE_KINDS:
                self.fail("SubClassOf relates concepts or datatype terms", kw)
            if k == "concept" and self.at("(") and self.peek(1).text in ("All", "AtMost"):
                self.next()
                q = self.next().text
                n = self.number() if q == "AtMost" else None
                role = self.role_term()
                filler = self.term_of(_filler_kind(role))
                self.expect(")")
                return SubAll(left, role, filler) if n is None else SubAtMost(left, n, role, filler)
            return Sub(left, self.term_of(k))
        self.fail(f"unexpected {kw.text!r}", kw)

    def number(self) -> int:
        t = self.name("a number")
        if not re.match(r"[0-9]+$", t.text):
            self.fail("expected a positive integer", t)
        return int(t.text)

    def assertion(self) -> Statement:
        if self.at("("):
            self.next()
            a = self.individual()
            self.expect(",")
            ob = self.name("an individual or constant")
            self.expect(")")
            self.expect(":")
            neg = False
            if self.at("not"):
                self.next()
                neg = True
            role = self.role_term()
            if kind_of(role) == "arole":
                self._need_kind(ob, "individual")
            elif ob.text not in self.consts:
                self.fail(f"undeclared constant {ob.text}", ob)
            cls = NegRoleAssertion if neg else RoleAssertion
            return cls(a, ob.text, role)
        first = self.name("an individual or constant")
        if self.at("=") or self.at("!="):
            op = self.next().text
            self._need_kind(first, "individual")
            b = self.individual()
            return SameIndividual(first.text, b) if op == "=" else DifferentIndividuals(first.text, b)
        self.expect(":")
        if first.text in self.consts:
            return DataAssertion(first.text, self.term_of("data"))
        self._need_kind(first, "individual")
        return ConceptAssertion(first.text, self.term_of("concept"))

    def individual(self) -> str:
        t = self.name("an individual")
        self._need_kind(t, "individual")
        return t.text

    def _need_kind(self, tok, kind):
        if self.kinds.get(tok.text) != kind:
            self.fail(f"undeclared {kind} name {tok.text}", tok)

    # terms
    def role_term(self):
        t = self.peek()
        r = self.term()
        if kind_of(r) not in ROLE_KINDS:
            self.fail("expected a role", t)
        return r

    def term_of(self, kind):
        t = self.peek()
        x = self.term()
        if kind_of(x) != kind:
            self.fail(f"expected a {kind} term, found a {kind_of(x)} term", t)
        return x

    def term(self):
        t = self.next()
        if t.kind == "name":
            return self.name_term(t)
        if t.text == "{":
            n = self.name("an individual or constant")
            self.expect("}")
            if n.text in self.consts:
                return TOne(n.text)
            self._need_kind(n, "individual")
            return CNominal(n.text)
        if t.text != "(":
            self.fail(f"expected a term, found {t.text or 'end of input'!r}", t)
        op = self.name("an operator")
        x = self.compound(op)
        self.expect(")")
        return x

    def name_term(self, t):
        s = t.text
        if s == "Top":
            return CTop()
        if s == "Bottom":
            return CBottom()
        if s == "U":
            return RUniversal()
        kind = self.kinds.get(s)
        if kind == "concept":
            return CName(s)
        if kind == "arole":
            return RName(s)
        if kind == "crole":
            return PName(s)
        if kind == "dataterm":
            return TName(s)
        if any(d.name == s for d in self.datatypes):
            return TDatatype(s)
        if s in self.facets:
            return TFacet(self.facets[s], FName(s))
        self.fail(f"undeclared name {s}", t)

    def compound(self, op):
        s = op.text
        if s == "not":
            return _negate(self.term())
        if s in ("or", "and"):
            a = self.term()
            b = self.term_of(kind_of(a))
            table = {"concept": (COr, CAnd), "arole": (ROr, RAnd), "data": (TOr, TAnd)}
            if kind_of(a) not in table:
                self.fail(f"'{s}' does not apply to concrete roles", op)
            cls = table[kind_of(a)][0 if s == "or" else 1]
            return cls(a, b)
        if s == "Self":
            return CSelf(self.term_of("arole"))
        if s == "Value":
            role = self.role_term()
            self.expect("{")
            v = self.name("an individual or constant")
            self.expect("}")
            if kind_of(role) == "arole":
                self._need_kind(v, "individual")
                return CHasValue(role, v.text)
            if v.text not in self.consts:
                self.fail(f"undeclared constant {v.text}", v)
            return CDataValue(role, v.text)
        if s == "Inverse":
            return RInverse(self.term_of("arole"))
        if s == "DomainRestrict":
            c = self.term_of("concept")
            r = self.role_term()
            return RDomain(c, r) if kind_of(r) == "arole" else PDomain(c, r)
        if s == "RangeRestrict":
            r = self.role_term()
            if kind_of(r) == "arole":
                return RRange(r, self.term_of("concept"))
            return PRange(r, self.term_of("data"))
        if s == "Restrict":
            c = self.term_of("concept")
            r = self.role_term()
            if kind_of(r) == "arole":
                return RRestrict(c, r, self.term_of("concept"))
            return PRestrict(c, r, self.term_of("data"))
        if s == "Id":
            return RId(self.term_of("concept"))
        if s == "oneof":
            consts = []
            while not self.at(")"):
                c = self.name("a constant")
                if c.text not in self.consts:
                    self.fail(f"undeclared constant {c.text}", c)
                consts.append(c.text)
            if not consts:
                self.fail("oneof lists at least one constant", op)
            return TEnum(tuple(consts))
        if s == "facet":
            d = self.name("a datatype")
            if not any(x.name == d.text for x in self.datatypes):
                self.fail(f"undeclared datatype {d.text}", d)
            return TFacet(d.text, self.facet_expr(d.text))
        self.fail(f"unknown operator {s!r}", op)

    def facet_expr(self, d):
        t = self.next()
        if t.kind == "name":
            if t.text == "top":
                return FTop()
            if t.text == "bottom":
                return FBottom()
            if self.facets.get(t.text) != d:
                self.fail(f"{t.text} is not a facet of {d}", t)
            return FName(t.text)
        if t.text != "(":
            self.fail("expected a facet expression", t)
        op = self.name("not, and or or")
        if op.text == "not":
            e = FNot(self.facet_expr(d))
        elif op.text in ("and", "or"):
            a = self.facet_expr(d)
            b = self.facet_expr(d)
            e = FAnd(a, b) if op.text == "and" else FOr(a, b)
        else:
            self.fail(f"unknown facet operator {op.text!r}", op)
        self.expect(")")
        return e


def _negate(x):
    table = {"concept": CNot, "arole": RNot, "crole": PNot, "data": TNot}
    return table[kind_of(x)](x)


def _filler_kind(role) -> str:
    return "concept" if kind_of(role) == "arole" else "data"


def parse_kb(text: str) -> KnowledgeBase:
    try:
        return _Parser(text).parse()
    except KBParseError:
        raise
    except KBError as e:
        raise KBParseError(str(e)) from None
