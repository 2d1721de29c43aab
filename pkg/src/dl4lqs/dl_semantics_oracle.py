"""Direct semantics of knowledge bases and an exhaustive model finder.

Nothing here goes through the set-theoretic translation, so it serves as an
independent check on it.  Interpretations are explicit finite structures;
``brute_force_consistent`` enumerates them over the same element layout the
grounding solver uses, depth first over the KB symbols, and rejects a branch
as soon as some statement whose symbols are all fixed is violated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping

from .dl4_model import (
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
    DatatypeMap,
    DifferentIndividuals,
    Dis,
    Equiv,
    FAnd,
    FBottom,
    FName,
    FNot,
    FOr,
    FTop,
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
    facet_expr_facets,
    kind_of,
    statement_terms,
    subterms,
)
from .fourlqs_core import Interpretation, decode_pair, mk_pair
from .layout import Bound, Layout, compute_default_bound, make_layout
from . import swrl


class OracleError(RuntimeError):
    pass


class ConversionError(OracleError):
    pass


class EnumerationRefused(OracleError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"refusing to enumerate about {estimate} interpretations (cap {cap})")
        self.estimate = estimate
        self.cap = cap


def _fs(x) -> frozenset:
    return frozenset(x)


@dataclass(frozen=True)
class DLInterpretation:
    delta_I: tuple
    delta_D: tuple
    blocks: tuple = ()  # ((datatype, elements), ...)
    concept_ext: Mapping = field(default_factory=dict)
    arole_ext: Mapping = field(default_factory=dict)
    crole_ext: Mapping = field(default_factory=dict)
    ind_map: Mapping = field(default_factory=dict)
    const_map: Mapping = field(default_factory=dict)
    facet_ext: Mapping = field(default_factory=dict)
    dataterm_ext: Mapping = field(default_factory=dict)
    dmap: DatatypeMap = field(default_factory=DatatypeMap)

    def __post_init__(self):
        object.__setattr__(self, "delta_I", tuple(self.delta_I))
        object.__setattr__(self, "delta_D", tuple(self.delta_D))
        object.__setattr__(self, "blocks", tuple((d, tuple(els)) for d, els in self.blocks))
        I, D = set(self.delta_I), set(self.delta_D)
        if not I or not D:
            raise OracleError("both domains must be nonempty")
        if I & D:
            raise OracleError("the abstract and data domains must be disjoint")
        seen = set()
        for d, els in self.blocks:
            if not els:
                raise OracleError(f"datatype {d} has an empty extension")
            if not set(els) <= D:
                raise OracleError(f"datatype {d} leaves the data domain")
            if seen & set(els):
                raise OracleError("datatype extensions must be pairwise disjoint")
            seen |= set(els)
        blocks = dict(self.blocks)
        for c, x in self.const_map.items():
            if x not in blocks.get(self.dmap.datatype_of_const(c), ()):
                raise OracleError(f"constant {c} is outside its datatype")
        for n, ext in self.concept_ext.items():
            if not set(ext) <= I:
                raise OracleError(f"concept {n} leaves the abstract domain")
        for n, ext in self.arole_ext.items():
            if any(u not in I or v not in I for u, v in ext):
                raise OracleError(f"role {n} leaves the abstract domain")
        for n, ext in self.crole_ext.items():
            if any(u not in I or v not in D for u, v in ext):
                raise OracleError(f"concrete role {n} is not typed abstract-to-data")
        for a, x in self.ind_map.items():
            if x not in I:
                raise OracleError(f"individual {a} is outside the abstract domain")
        for f, ext in self.facet_ext.items():
            d = self.dmap.datatype_of_facet(f)
            block = blocks.get(d, ())
            if not set(ext) <= set(block):
                raise OracleError(f"facet {f} leaves its datatype")
            for c in self.dmap.constants(d):
                if c in self.const_map and (self.const_map[c] in ext) != self.dmap.facet_eval(f, c):
                    raise OracleError(f"facet {f} disagrees with the datatype map on {c}")
        for n, ext in self.dataterm_ext.items():
            if not set(ext) <= D:
                raise OracleError(f"data term {n} leaves the data domain")

    def block(self, d: str) -> frozenset:
        for name, els in self.blocks:
            if name == d:
                return frozenset(els)
        raise OracleError(f"unknown datatype {d}")

    def render(self) -> list:
        def show(xs):
            return "{" + ", ".join(map(str, xs)) + "}"

        def pairs(xs):
            return "{" + ", ".join(f"({u}, {v})" for u, v in sorted(xs)) + "}"

        lines = [f"Delta_I = {show(self.delta_I)}", f"Delta_D = {show(self.delta_D)}"]
        lines += [f"{d} = {show(els)}" for d, els in self.blocks]
        lines += [f"{a} -> {x}" for a, x in sorted(self.ind_map.items())]
        lines += [f"{c} -> {x}" for c, x in sorted(self.const_map.items())]
        lines += [f"{n} = {show(sorted(e))}" for n, e in sorted(self.concept_ext.items())]
        lines += [f"{n} = {pairs(e)}" for n, e in sorted(self.arole_ext.items())]
        lines += [f"{n} = {pairs(e)}" for n, e in sorted(self.crole_ext.items())]
        lines += [f"{n} = {show(sorted(e))}" for n, e in sorted(self.facet_ext.items())]
        lines += [f"{n} = {show(sorted(e))}" for n, e in sorted(self.dataterm_ext.items())]
        return lines

    def to_json(self) -> dict:
        return {
            "delta_I": list(self.delta_I),
            "delta_D": list(self.delta_D),
            "datatypes": {d: list(els) for d, els in self.blocks},
            "individuals": dict(sorted(self.ind_map.items())),
            "constants": dict(sorted(self.const_map.items())),
            "concepts": {n: sorted(e) for n, e in sorted(self.concept_ext.items())},
            "abstract_roles": {n: [list(p) for p in sorted(e)] for n, e in sorted(self.arole_ext.items())},
            "concrete_roles": {n: [list(p) for p in sorted(e)] for n, e in sorted(self.crole_ext.items())},
            "facets": {n: sorted(e) for n, e in sorted(self.facet_ext.items())},
            "data_terms": {n: sorted(e) for n, e in sorted(self.dataterm_ext.items())},
        }


# -- term semantics -----------------------------------------------------------


def _lookup(table, name, what):
    try:
        return _fs(table[name])
    except KeyError:
        raise OracleError(f"undeclared {what} {name}") from None


def eval_concept(c, i: DLInterpretation) -> frozenset:
    I = _fs(i.delta_I)
    if isinstance(c, CName):
        return _lookup(i.concept_ext, c.name, "concept")
    if isinstance(c, CTop):
        return I
    if isinstance(c, CBottom):
        return frozenset()
    if isinstance(c, CNot):
        return I - eval_concept(c.arg, i)
    if isinstance(c, COr):
        return eval_concept(c.left, i) | eval_concept(c.right, i)
    if isinstance(c, CAnd):
        return eval_concept(c.left, i) & eval_concept(c.right, i)
    if isinstance(c, CNominal):
        return frozenset((_ind(c.ind, i),))
    if isinstance(c, CSelf):
        r = eval_role(c.role, i)
        return frozenset(x for x in I if (x, x) in r)
    if isinstance(c, CHasValue):
        r = eval_role(c.role, i)
        y = _ind(c.ind, i)
        return frozenset(x for x in I if (x, y) in r)
    if isinstance(c, CDataValue):
        r = eval_role(c.role, i)
        y = _const(c.const, i)
        return frozenset(x for x in I if (x, y) in r)
    raise OracleError(f"not a concept: {c!r}")


def _ind(a, i):
    try:
        return i.ind_map[a]
    except KeyError:
        raise OracleError(f"undeclared individual {a}") from None


def _const(e, i):
    try:
        return i.const_map[e]
    except KeyError:
        raise OracleError(f"undeclared constant {e}") from None


def eval_role(r, i: DLInterpretation) -> frozenset:
    I = i.delta_I
    if isinstance(r, RName):
        return _lookup(i.arole_ext, r.name, "abstract role")
    if isinstance(r, PName):
        return _lookup(i.crole_ext, r.name, "concrete role")
    if isinstance(r, RUniversal):
        return frozenset(itertools.product(I, I))
    if isinstance(r, RInverse):
        return frozenset((v, u) for u, v in eval_role(r.arg, i))
    if isinstance(r, RNot):
        return frozenset(itertools.product(I, I)) - eval_role(r.arg, i)
    if isinstance(r, PNot):
        return frozenset(itertools.product(I, i.delta_D)) - eval_role(r.arg, i)
    if isinstance(r, ROr):
        return eval_role(r.left, i) | eval_role(r.right, i)
    if isinstance(r, RAnd):
        return eval_role(r.left, i) & eval_role(r.right, i)
    if isinstance(r, (RDomain, PDomain)):
        c = eval_concept(r.concept, i)
        return frozenset(p for p in eval_role(r.role, i) if p[0] in c)
    if isinstance(r, RRange):
        c = eval_concept(r.concept, i)
        return frozenset(p for p in eval_role(r.role, i) if p[1] in c)
    if isinstance(r, PRange):
        t = eval_data(r.data, i)
        return frozenset(p for p in eval_role(r.role, i) if p[1] in t)
    if isinstance(r, RRestrict):
        c1, c2 = eval_concept(r.domain, i), eval_concept(r.range, i)
        return frozenset(p for p in eval_role(r.role, i) if p[0] in c1 and p[1] in c2)
    if isinstance(r, PRestrict):
        c, t = eval_concept(r.domain, i), eval_data(r.range, i)
        return frozenset(p for p in eval_role(r.role, i) if p[0] in c and p[1] in t)
    if isinstance(r, RId):
        return frozenset((x, x) for x in eval_concept(r.concept, i))
    raise OracleError(f"not a role: {r!r}")


def eval_facet(e, d: str, i: DLInterpretation) -> frozenset:
    block = i.block(d)
    if isinstance(e, FName):
        if i.dmap.datatype_of_facet(e.name) != d:
            raise OracleError(f"facet {e.name} is not a facet of {d}")
        return _lookup(i.facet_ext, e.name, "facet")
    if isinstance(e, FTop):
        return block
    if isinstance(e, FBottom):
        return frozenset()
    if isinstance(e, FNot):
        return block - eval_facet(e.arg, d, i)
    if isinstance(e, FAnd):
        return eval_facet(e.left, d, i) & eval_facet(e.right, d, i)
    if isinstance(e, FOr):
        return eval_facet(e.left, d, i) | eval_facet(e.right, d, i)
    raise OracleError(f"not a facet expression: {e!r}")


def eval_data(t, i: DLInterpretation) -> frozenset:
    if isinstance(t, TDatatype):
        return i.block(t.name)
    if isinstance(t, TEnum):
        return frozenset(_const(c, i) for c in t.consts)
    if isinstance(t, TOne):
        return frozenset((_const(t.const, i),))
    if isinstance(t, TFacet):
        return eval_facet(t.expr, t.datatype, i)
    if isinstance(t, TNot):
        return _fs(i.delta_D) - eval_data(t.arg, i)
    if isinstance(t, TAnd):
        return eval_data(t.left, i) & eval_data(t.right, i)
    if isinstance(t, TOr):
        return eval_data(t.left, i) | eval_data(t.right, i)
    if isinstance(t, TName):
        return _lookup(i.dataterm_ext, t.name, "data term")
    raise OracleError(f"not a data term: {t!r}")


def eval_term(t, i: DLInterpretation) -> frozenset:
    k = kind_of(t)
    if k == "concept":
        return eval_concept(t, i)
    if k == "data":
        return eval_data(t, i)
    return eval_role(t, i)


def compose(r: frozenset, s: frozenset) -> frozenset:
    succ = {}
    for v, w in s:
        succ.setdefault(v, []).append(w)
    return frozenset((u, w) for u, v in r for w in succ.get(v, ()))


def _successors(rel, x, filler) -> int:
    return sum(1 for u, v in rel if u == x and v in filler)


def satisfies(s: Statement, i: DLInterpretation) -> bool:
    if isinstance(s, Equiv):
        return eval_term(s.left, i) == eval_term(s.right, i)
    if isinstance(s, Sub):
        return eval_term(s.left, i) <= eval_term(s.right, i)
    if isinstance(s, Chain):
        rel = eval_role(s.roles[0], i)
        for r in s.roles[1:]:
            rel = compose(rel, eval_role(r, i))
        return rel <= eval_role(s.target, i)
    if isinstance(s, RoleProp):
        r = eval_role(s.role, i)
        inv = frozenset((v, u) for u, v in r)
        if s.prop == "Sym":
            return r == inv
        if s.prop == "Asym":
            return not (r & inv)
        if s.prop == "Ref":
            return all((x, x) in r for x in i.delta_I)
        if s.prop == "Irref":
            return not any(u == v for u, v in r)
        if s.prop == "Tra":
            return compose(r, r) <= r
        if s.prop == "Fun":
            firsts = [u for u, _ in r]
            return len(firsts) == len(set(firsts))
    if isinstance(s, Dis):
        return not (eval_role(s.left, i) & eval_role(s.right, i))
    if isinstance(s, SubAll):
        r, f = eval_role(s.role, i), eval_term(s.filler, i)
        c = eval_concept(s.sub, i)
        return all(v in f for u, v in r if u in c)
    if isinstance(s, SomeSub):
        r, f = eval_role(s.role, i), eval_term(s.filler, i)
        return {u for u, v in r if v in f} <= eval_concept(s.sup, i)
    if isinstance(s, AtLeastSub):
        r, f = eval_role(s.role, i), eval_term(s.filler, i)
        sup = eval_concept(s.sup, i)
        return all(x in sup for x in i.delta_I if _successors(r, x, f) >= s.n)
    if isinstance(s, SubAtMost):
        r, f = eval_role(s.role, i), eval_term(s.filler, i)
        return all(_successors(r, x, f) <= s.n for x in eval_concept(s.sub, i))
    if isinstance(s, ConceptAssertion):
        return _ind(s.ind, i) in eval_concept(s.concept, i)
    if isinstance(s, (RoleAssertion, NegRoleAssertion)):
        obj = _ind(s.obj, i) if kind_of(s.role) == "arole" else _const(s.obj, i)
        held = (_ind(s.subj, i), obj) in eval_role(s.role, i)
        return held if isinstance(s, RoleAssertion) else not held
    if isinstance(s, SameIndividual):
        return _ind(s.left, i) == _ind(s.right, i)
    if isinstance(s, DifferentIndividuals):
        return _ind(s.left, i) != _ind(s.right, i)
    if isinstance(s, DataAssertion):
        return _const(s.const, i) in eval_data(s.term, i)
    raise OracleError(f"unknown statement {s!r}")


def rule_holds(rule, i: DLInterpretation) -> bool:
    """Direct first-order reading of body -> head, variables over both domains."""
    universe = tuple(i.delta_I) + tuple(i.delta_D)

    def val(x, env):
        if isinstance(x, swrl.RVar):
            return env[x]
        if isinstance(x, swrl.RInd):
            return _ind(x.name, i)
        return _const(x.name, i)

    def holds(a, env):
        if isinstance(a, swrl.ConceptAtom):
            return val(a.arg, env) in eval_concept(CName(a.concept), i)
        if isinstance(a, swrl.DatatypeAtom):
            return val(a.arg, env) in eval_data(a.datarange, i)
        if isinstance(a, swrl.AbstractRoleAtom):
            return (val(a.first, env), val(a.second, env)) in eval_role(RName(a.role), i)
        if isinstance(a, swrl.ConcreteRoleAtom):
            return (val(a.first, env), val(a.second, env)) in eval_role(PName(a.role), i)
        if isinstance(a, swrl.SameAs):
            return val(a.first, env) == val(a.second, env)
        return val(a.first, env) != val(a.second, env)

    for combo in itertools.product(universe, repeat=len(rule.variables)):
        env = dict(zip(rule.variables, combo))
        if all(holds(a, env) for a in rule.body) and not all(holds(a, env) for a in rule.head):
            return False
    return True


def kb_holds(kb: KnowledgeBase, i: DLInterpretation, rules=()) -> bool:
    return all(satisfies(s, i) for s in kb.statements) and all(rule_holds(r, i) for r in rules)


def violated(kb: KnowledgeBase, i: DLInterpretation, rules=()) -> list:
    out = [s for s in kb.statements if not satisfies(s, i)]
    return out + [r for r in rules if not rule_holds(r, i)]


# -- brute force --------------------------------------------------------------


@dataclass(frozen=True)
class OracleSat:
    interpretation: DLInterpretation
    explored: int


@dataclass(frozen=True)
class ExhaustedNoModel:
    bound: Bound
    explored: int


def _subsets(elems):
    elems = tuple(elems)
    for mask in range(1 << len(elems)):
        yield frozenset(e for k, e in enumerate(elems) if mask >> k & 1)


def _term_symbols(t, dmap, out):
    if isinstance(t, CName):
        out.add(("concept", t.name))
    elif isinstance(t, RName):
        out.add(("arole", t.name))
    elif isinstance(t, PName):
        out.add(("crole", t.name))
    elif isinstance(t, TName):
        out.add(("dataterm", t.name))
    elif isinstance(t, (CNominal, CHasValue)):
        out.add(("ind", t.ind))
    elif isinstance(t, TFacet):
        for f in facet_expr_facets(t.expr):
            out.add(("facet", f))
    for k in subterms(t):
        _term_symbols(k, dmap, out)


def statement_symbols(s, dmap) -> set:
    out = set()
    if isinstance(s, swrl.Rule):
        for a in s.body + s.head:
            for x in swrl.atom_args(a):
                if isinstance(x, swrl.RInd):
                    out.add(("ind", x.name))
            if isinstance(a, swrl.ConceptAtom):
                out.add(("concept", a.concept))
            elif isinstance(a, swrl.AbstractRoleAtom):
                out.add(("arole", a.role))
            elif isinstance(a, swrl.ConcreteRoleAtom):
                out.add(("crole", a.role))
            elif isinstance(a, swrl.DatatypeAtom):
                _term_symbols(a.datarange, dmap, out)
        return out
    for t in statement_terms(s):
        _term_symbols(t, dmap, out)
    if isinstance(s, ConceptAssertion):
        out.add(("ind", s.ind))
    elif isinstance(s, (RoleAssertion, NegRoleAssertion)):
        out.add(("ind", s.subj))
        if kind_of(s.role) == "arole":
            out.add(("ind", s.obj))
    elif isinstance(s, (SameIndividual, DifferentIndividuals)):
        out.update((("ind", s.left), ("ind", s.right)))
    return out


DEFAULT_CAP = 1 << 40


def _domain_splits(layout: Layout):
    """(Delta_I, anonymous data elements) for each split of the individual side."""
    ind = layout.ind_side
    for k in range(1, len(ind) + 1):
        yield ind[:k], ind[k:] + layout.default


def enumeration_estimate(kb: KnowledgeBase, layout: Layout) -> int:
    sig, dm = kb.signature, kb.datatype_map
    pinned = len(layout.pinned_data) - len(layout.default)
    total = 0
    for delta_I, anon in _domain_splits(layout):
        k = len(delta_I)
        n_d = pinned + len(anon)
        est = k ** len(sig.individuals)
        est *= 2 ** (k * len(sig.concepts) + k * k * len(sig.aroles) + k * n_d * len(sig.croles))
        est *= 2 ** (n_d * len(sig.dataterms))
        for d in dm.datatypes:
            est *= 2 ** (len(layout.padding(d.name, dm)) * len(d.facets))
        total += est
    return total


def brute_force_consistent(kb: KnowledgeBase, bound: Bound = None, rules=(), cap: int = DEFAULT_CAP):
    """First interpretation over the bounded layout that satisfies kb and rules."""
    bound = bound or compute_default_bound(kb)
    dm = kb.datatype_map
    layout = make_layout(bound, dm)
    estimate = enumeration_estimate(kb, layout)
    if estimate > cap:
        raise EnumerationRefused(estimate, cap)
    checks = list(kb.statements) + list(rules)
    explored = 0
    for delta_I, anon in _domain_splits(layout):
        delta_D = tuple(e for _, els in layout.blocks for e in els) + tuple(anon)
        found, n = _search(kb, layout, delta_I, delta_D, checks)
        explored += n
        if found is not None:
            return OracleSat(found, explored)
    return ExhaustedNoModel(layout.bound, explored)


def _search(kb, layout, delta_I, delta_D, checks):
    sig, dm = kb.signature, kb.datatype_map
    blocks = layout.blocks
    const_map = dict(layout.const_elem)
    fixed_facets = {}
    choices = []  # (symbol, candidate values)
    for a in sig.individuals:
        choices.append((("ind", a), tuple(delta_I)))
    for c in sig.concepts:
        choices.append((("concept", c), tuple(_subsets(delta_I))))
    for r in sig.aroles:
        choices.append((("arole", r), tuple(_subsets(itertools.product(delta_I, delta_I)))))
    for p in sig.croles:
        choices.append((("crole", p), tuple(_subsets(itertools.product(delta_I, delta_D)))))
    for d in dm.datatypes:
        pad = layout.padding(d.name, dm)
        for f in d.facets:
            base = frozenset(const_map[c] for c in d.constants if dm.facet_eval(f.name, c))
            if pad:
                choices.append((("facet", f.name), tuple(base | s for s in _subsets(pad))))
            else:
                fixed_facets[f.name] = base
    for n in sig.dataterms:
        choices.append((("dataterm", n), tuple(_subsets(delta_D))))

    position = {sym: k for k, (sym, _) in enumerate(choices)}
    due = [[] for _ in range(len(choices) + 1)]
    for s in checks:
        syms = statement_symbols(s, dm)
        last = max((position[x] + 1 for x in syms if x in position), default=0)
        due[last].append(s)

    values = {"ind": {}, "concept": {}, "arole": {}, "crole": {}, "facet": dict(fixed_facets), "dataterm": {}}

    def interp():
        return DLInterpretation(
            delta_I, delta_D, blocks, values["concept"], values["arole"], values["crole"],
            values["ind"], const_map, values["facet"], values["dataterm"], dm,
        )

    def ok(level):
        if not due[level]:
            return True
        i = interp()
        return all(
            (rule_holds(s, i) if isinstance(s, swrl.Rule) else satisfies(s, i)) for s in due[level]
        )

    explored = 0

    def dfs(level):
        nonlocal explored
        if level == len(choices):
            explored += 1
            return interp()
        (kind, name), cands = choices[level]
        for v in cands:
            values[kind][name] = v
            if ok(level + 1):
                got = dfs(level + 1)
                if got is not None:
                    return got
        del values[kind][name]
        return None

    if not ok(0):
        return None, 1
    found = dfs(0)
    return found, max(explored, 1)


# -- conversions against the set-theoretic side -------------------------------


def model_from_4lqsr(m: Interpretation, table, dmap: DatatypeMap) -> DLInterpretation:
    """Read a DL interpretation off a model of the background axioms."""
    order = {e: k for k, e in enumerate(m.universe)}

    def sort_els(xs):
        return tuple(sorted(xs, key=order.__getitem__))

    def get(key):
        v = table.var_of(key)
        if v is None:
            return None
        return m.value(v)

    delta_I = sort_els(get(("I",)))
    delta_D = sort_els(get(("D",)))
    if not delta_I or not delta_D or set(delta_I) & set(delta_D):
        raise ConversionError("psi1 fails: X_I and X_D are not a partition into nonempty parts")
    blocks = tuple((d.name, sort_els(get(("datatype", d.name)))) for d in dmap.datatypes)
    concepts, aroles, croles, facets, dataterms, inds, consts = {}, {}, {}, {}, {}, {}, {}

    def relation(name, val, psi):
        out = set()
        for z in val:
            pair = decode_pair(z)
            if pair is None:
                raise ConversionError(f"{psi} fails: {name} contains a non-pair")
            out.add(pair)
        return frozenset(out)

    for key, var in table.items():
        kind = key[0]
        if kind == "concept":
            concepts[key[1]] = frozenset(m.value(var))
        elif kind == "arole":
            aroles[key[1]] = relation(key[1], m.value(var), "psi8")
        elif kind == "crole":
            croles[key[1]] = relation(key[1], m.value(var), "psi9")
        elif kind == "facet":
            facets[key[1]] = frozenset(m.value(var))
        elif kind == "dataterm":
            dataterms[key[1]] = frozenset(m.value(var)) & frozenset(delta_D)
        elif kind == "ind":
            inds[key[1]] = m.value(var)
        elif kind == "const":
            consts[key[1]] = m.value(var)
    try:
        return DLInterpretation(delta_I, delta_D, blocks, concepts, aroles, croles, inds, consts,
                                facets, dataterms, dmap)
    except OracleError as e:
        raise ConversionError(f"model violates the background axioms: {e}") from None


def extend_with_ledger(i: DLInterpretation, ledger: Mapping) -> DLInterpretation:
    """Give every fresh name the value of its defining term.

    Definitions may mention earlier fresh names, so they are taken in order.
    """
    tables = {
        "concept": dict(i.concept_ext),
        "arole": dict(i.arole_ext),
        "crole": dict(i.crole_ext),
        "data": dict(i.dataterm_ext),
    }
    cur = i
    for name, term in ledger.items():
        tables[kind_of(term)][name] = eval_term(term, cur)
        cur = replace(cur, concept_ext=tables["concept"], arole_ext=tables["arole"],
                      crole_ext=tables["crole"], dataterm_ext=tables["data"])
    return cur


def model_to_4lqsr(i: DLInterpretation, table, ledger: Mapping = None) -> Interpretation:
    """Set-theoretic model induced by a DL interpretation.

    Fresh names introduced by normalization take the value of their defining
    term, which only mentions names of the source KB.
    """
    i = extend_with_ledger(i, ledger or {})
    universe = tuple(i.delta_I) + tuple(i.delta_D)
    I = frozenset(i.delta_I)

    def rel(pairs):
        return frozenset(mk_pair(u, v) for u, v in pairs)

    values = {}
    for key, var in table.items():
        kind = key[0]
        if kind == "I" or kind == "Top":
            val = I
        elif kind == "D":
            val = frozenset(i.delta_D)
        elif kind == "Bot":
            val = frozenset()
        elif kind == "U":
            val = rel(itertools.product(i.delta_I, i.delta_I))
        elif kind == "concept":
            val = eval_concept(CName(key[1]), i)
        elif kind == "arole":
            val = rel(eval_role(RName(key[1]), i))
        elif kind == "crole":
            val = rel(eval_role(PName(key[1]), i))
        elif kind in ("datatype", "topd"):
            val = i.block(key[1])
        elif kind == "botd":
            val = frozenset()
        elif kind == "facet":
            val = _lookup(i.facet_ext, key[1], "facet")
        elif kind == "fexpr":
            val = eval_facet(key[2], key[1], i)
        elif kind == "enum":
            val = frozenset(_const(c, i) for c in key[1])
        elif kind == "dataterm":
            val = eval_data(TName(key[1]), i)
        elif kind == "ind":
            val = _ind(key[1], i)
        elif kind == "const":
            val = _const(key[1], i)
        else:
            raise ConversionError(f"unknown symbol kind {kind}")
        values[var] = val
    return Interpretation.build(universe, values)

