"""Translate a knowledge base into a single restricted four-level formula.

The output is the conjunction of the background axioms psi1..psi12 over the
KB signature with one clause tau(H) per canonical statement H.  Clauses whose
literal reading is unsatisfiable together with the background axioms are
relativized to the right domain; every such deviation is flagged per statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dl4_model import (
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
    RDomain,
    RId,
    RInverse,
    RName,
    RNot,
    ROr,
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
    statement_terms,
    subterms,
)
from .dl4_normalize import NormalizationResult, is_canonical, normalize
from .fourlqs_core import (
    And,
    Eq0,
    Forall0,
    Forall2,
    Formula,
    Iff,
    Implies,
    Mem01,
    Mem23,
    Not,
    Or,
    PairEq,
    PairMem,
    Var,
    conj,
    disj,
)
from .fourlqs_restrict import is_4lqsr


class TranslationError(RuntimeError):
    pass


# -- symbol table --------------------------------------------------------------


class SymbolTable:
    """Injective map from KB symbols to formula variables."""

    def __init__(self):
        self._by_key = {}
        self._by_name = {}
        self._counters = {}

    def _add(self, key, name, sort) -> Var:
        if key in self._by_key:
            return self._by_key[key]
        if name in self._by_name:
            raise TranslationError(f"variable name clash on {name}")
        v = Var(name, sort)
        self._by_key[key] = v
        self._by_name[name] = key
        return v

    def _numbered(self, tag, key, sort) -> Var:
        if key in self._by_key:
            return self._by_key[key]
        k = self._counters.get(tag, 0) + 1
        self._counters[tag] = k
        return self._add(key, f"{tag}:{k}", sort)

    # reserved
    @property
    def I(self):
        return self._add(("I",), "I", 1)

    @property
    def D(self):
        return self._add(("D",), "D", 1)

    @property
    def TOP(self):
        return self._add(("Top",), "Top", 1)

    @property
    def BOT(self):
        return self._add(("Bot",), "Bot", 1)

    @property
    def U(self):
        return self._add(("U",), "U", 3)

    def ind(self, a: str) -> Var:
        return self._add(("ind", a), f"a:{a}", 0)

    def const(self, e: str) -> Var:
        return self._add(("const", e), f"e:{e}", 0)

    def datatype(self, d: str) -> Var:
        return self._add(("datatype", d), f"d:{d}", 1)

    def top_d(self, d: str) -> Var:
        return self._add(("topd", d), f"top:{d}", 1)

    def bot_d(self, d: str) -> Var:
        return self._add(("botd", d), f"bot:{d}", 1)

    def facet(self, f: str) -> Var:
        return self._add(("facet", f), f"f:{f}", 1)

    def concept(self, c) -> Var:
        if isinstance(c, CName):
            return self._add(("concept", c.name), f"C:{c.name}", 1)
        if isinstance(c, CTop):
            return self.TOP
        if isinstance(c, CBottom):
            return self.BOT
        raise TranslationError(f"no variable for non-atomic concept {c!r}")

    def arole(self, r) -> Var:
        if isinstance(r, RName):
            return self._add(("arole", r.name), f"R:{r.name}", 3)
        if isinstance(r, RUniversal):
            return self.U
        raise TranslationError(f"no variable for non-atomic role {r!r}")

    def crole(self, p) -> Var:
        if isinstance(p, PName):
            return self._add(("crole", p.name), f"P:{p.name}", 3)
        raise TranslationError(f"no variable for non-atomic concrete role {p!r}")

    def role(self, r) -> Var:
        return self.arole(r) if kind_of(r) == "arole" else self.crole(r)

    def data(self, t) -> Var:
        if isinstance(t, TDatatype):
            return self.datatype(t.name)
        if isinstance(t, TName):
            return self._add(("dataterm", t.name), f"t:{t.name}", 1)
        if isinstance(t, TEnum):
            return self._numbered("enum", ("enum", t.consts), 1)
        if isinstance(t, TFacet):
            e = t.expr
            if isinstance(e, FName):
                return self.facet(e.name)
            if isinstance(e, FTop):
                return self.top_d(t.datatype)
            if isinstance(e, FBottom):
                return self.bot_d(t.datatype)
            return self._numbered("fx", ("fexpr", t.datatype, e), 1)
        raise TranslationError(f"no variable for non-atomic data term {t!r}")

    def unary(self, t) -> Var:
        return self.concept(t) if kind_of(t) == "concept" else self.data(t)

    # lookup
    def key_of(self, name: str):
        return self._by_name.get(name)

    def var_of(self, key):
        return self._by_key.get(key)

    def items(self):
        return list(self._by_key.items())

    def keys_of_kind(self, kind: str) -> list:
        return [k for k in self._by_key if k[0] == kind]

    def variables(self) -> list:
        return list(self._by_key.values())

    def render(self) -> list:
        out = []
        for key, v in self._by_key.items():
            what = key[0] if len(key) == 1 else f"{key[0]} " + " ".join(_show(x) for x in key[1:])
            out.append(f"{v.name}\t{v.sort}\t{what}")
        return out


def _show(x) -> str:
    if isinstance(x, tuple):
        return "{" + " ".join(map(str, x)) + "}"
    if isinstance(x, (FName, FTop, FBottom, FNot, FAnd, FOr)):
        from .dl4_model import print_facet

        return print_facet(x)
    return str(x)


def build_table(kb: KnowledgeBase) -> SymbolTable:
    t = SymbolTable()
    for reserved in ("I", "D", "TOP", "BOT", "U"):
        getattr(t, reserved)
    sig = kb.signature
    for a in sig.individuals:
        t.ind(a)
    dm = kb.datatype_map
    for d in dm.datatypes:
        t.datatype(d.name)
        t.top_d(d.name)
        t.bot_d(d.name)
        for f in d.facets:
            t.facet(f.name)
        for e in d.constants:
            t.const(e)
    for c in sig.concepts:
        t.concept(CName(c))
    for r in sig.aroles:
        t.arole(RName(r))
    for p in sig.croles:
        t.crole(PName(p))
    for n in sig.dataterms:
        t.data(TName(n))

    def walk(term):
        if kind_of(term) == "data" and isinstance(term, (TEnum, TFacet)):
            t.data(term)
        for k in subterms(term):
            walk(k)

    for s in kb.statements:
        for term in statement_terms(s):
            walk(term)
    return t


# -- background axioms ---------------------------------------------------------


def _z(name="z", suffix=""):
    return Var(f"{name}{suffix}", 0)


def sigma(expr, d: str, z: Var, table: SymbolTable) -> Formula:
    """Facet expression as a formula in the element variable z."""
    if isinstance(expr, FName):
        return Mem01(z, table.facet(expr.name))
    if isinstance(expr, FTop):
        return Mem01(z, table.top_d(d))
    if isinstance(expr, FBottom):
        return Mem01(z, table.bot_d(d))
    if isinstance(expr, FNot):
        return Not(sigma(expr.arg, d, z, table))
    if isinstance(expr, FAnd):
        return And((sigma(expr.left, d, z, table), sigma(expr.right, d, z, table)))
    if isinstance(expr, FOr):
        return Or((sigma(expr.left, d, z, table), sigma(expr.right, d, z, table)))
    raise TranslationError(f"not a facet expression: {expr!r}")


def background_parts(kb: KnowledgeBase, table: SymbolTable) -> dict:
    """psi1..psi12 keyed by name; vacuous ones map to None."""
    z = _z("z", "@psi")
    z1 = _z("z1", "@psi")
    z2 = _z("z2", "@psi")
    Z = Var("Z@psi", 2)
    I, D = table.I, table.D
    sig, dm = kb.signature, kb.datatype_map
    dts = [d.name for d in dm.datatypes]

    def m(x, X):
        return Mem01(x, X)

    def all_z(body):
        return Forall0((z,), body)

    def nonempty(X):
        return Not(all_z(Not(m(z, X))))

    psi = {}
    psi["psi1"] = And((
        all_z(Iff(m(z, I), Not(m(z, D)))),
        all_z(Or((m(z, I), m(z, D)))),
        nonempty(I),
        nonempty(D),
    ))
    psi["psi2"] = And((all_z(Iff(m(z, I), m(z, table.TOP))), all_z(Not(m(z, table.BOT)))))
    psi["psi3"] = conj(all_z(Implies(m(z, table.concept(CName(c))), m(z, I))) for c in sig.concepts) \
        if sig.concepts else None
    if dts:
        parts = []
        for d in dts:
            X = table.datatype(d)
            parts.append(And((all_z(Implies(m(z, X), m(z, D))), nonempty(X))))
        pairs = [
            Implies(m(z, table.datatype(a)), Not(m(z, table.datatype(b))))
            for i, a in enumerate(dts)
            for b in dts[i + 1:]
        ]
        if pairs:
            parts.append(all_z(conj(pairs)))
        psi["psi4"] = conj(parts)
        psi["psi5"] = conj(
            And((all_z(Iff(m(z, table.datatype(d)), m(z, table.top_d(d)))), all_z(Not(m(z, table.bot_d(d))))))
            for d in dts
        )
    else:
        psi["psi4"] = psi["psi5"] = None
    facets = [(f, d) for d in dts for f in dm.facets(d)]
    psi["psi6"] = conj(all_z(Implies(m(z, table.facet(f)), m(z, table.datatype(d)))) for f, d in facets) \
        if facets else None
    psi["psi7"] = Forall0((z1, z2), Iff(And((m(z1, I), m(z2, I))), PairMem(z1, z2, table.U)))

    def relational(X, second):
        return And((
            Forall2((Z,), Implies(Mem23(Z, X), Not(Forall0((z1, z2), Not(PairEq(z1, z2, Z)))))),
            Forall0((z1, z2), Implies(PairMem(z1, z2, X), And((m(z1, I), m(z2, second))))),
        ))

    psi["psi8"] = conj(relational(table.arole(RName(r)), I) for r in sig.aroles) if sig.aroles else None
    psi["psi9"] = conj(relational(table.crole(PName(p)), D) for p in sig.croles) if sig.croles else None
    facts = [m(table.ind(a), I) for a in sig.individuals]
    facts += [m(table.const(e), table.datatype(d)) for d in dts for e in dm.constants(d)]
    psi["psi10"] = conj(facts) if facts else None
    enums = [k for k in table.keys_of_kind("enum")]
    psi["psi11"] = conj(
        all_z(Iff(m(z, table.var_of(k)), disj(Eq0(z, table.const(e)) for e in k[1]))) for k in enums
    ) if enums else None
    fxs = table.keys_of_kind("fexpr")
    psi["psi12"] = conj(
        all_z(Iff(m(z, table.var_of(k)), And((m(z, table.datatype(k[1])), sigma(k[2], k[1], z, table)))))
        for k in fxs
    ) if fxs else None
    return psi


def background_axioms(kb: KnowledgeBase, table: SymbolTable) -> Formula:
    return conj(f for f in background_parts(kb, table).values() if f is not None)


# -- tau -----------------------------------------------------------------------

SUPPLEMENT = "supplement"
RELATIVIZED = "relativized"
SEMANTIC_READING = "semantic-reading"


def statement_flags(s: Statement) -> tuple:
    if isinstance(s, Dis):
        return (SUPPLEMENT,)
    if isinstance(s, Equiv) and isinstance(s.right, CSelf):
        return (SUPPLEMENT,)
    if isinstance(s, Equiv) and isinstance(s.right, (CNot, RNot, PNot, TNot)):
        return (RELATIVIZED,)
    if isinstance(s, RoleProp) and s.prop == "Ref":
        return (RELATIVIZED,)
    if isinstance(s, AtLeastSub):
        return (SEMANTIC_READING,)
    return ()


def translate_statement(s: Statement, table: SymbolTable, index=None) -> Formula:
    if not is_canonical(s):
        raise TranslationError(f"statement is not canonical: {s!r}")
    suf = "" if index is None else f"@{index}"
    z = _z("z", suf)

    def zs(n):
        return tuple(_z(f"z{i}", suf) for i in range(1, n + 1))

    m = Mem01
    rel = PairMem
    I, D = table.I, table.D

    if isinstance(s, Equiv):
        k = kind_of(s.left)
        r = s.right
        if k in ("concept", "data"):
            X = table.unary(s.left)
            lhs = m(z, X)
            if isinstance(r, CTop):
                rhs = m(z, table.TOP)
            elif isinstance(r, (CNot, TNot)):
                dom = I if k == "concept" else D
                rhs = And((m(z, dom), Not(m(z, table.unary(r.arg)))))
            elif isinstance(r, (COr, TOr)):
                rhs = Or((m(z, table.unary(r.left)), m(z, table.unary(r.right))))
            elif isinstance(r, TAnd):
                rhs = And((m(z, table.data(r.left)), m(z, table.data(r.right))))
            elif isinstance(r, CNominal):
                rhs = Eq0(z, table.ind(r.ind))
            elif isinstance(r, TOne):
                rhs = Eq0(z, table.const(r.const))
            elif isinstance(r, CHasValue):
                rhs = rel(z, table.ind(r.ind), table.arole(r.role))
            elif isinstance(r, CDataValue):
                rhs = rel(z, table.const(r.const), table.crole(r.role))
            elif isinstance(r, CSelf):
                rhs = rel(z, z, table.arole(r.role))
            else:
                rhs = m(z, table.data(r))
            return Forall0((z,), Iff(lhs, rhs))
        X1 = table.role(s.left)
        z1, z2 = zs(2)
        lhs = rel(z1, z2, X1)
        Z = Var(f"Z{suf}", 2)
        if isinstance(r, (RUniversal, PName)):
            return Forall2((Z,), Iff(Mem23(Z, X1), Mem23(Z, table.role(r))))
        if isinstance(r, ROr):
            return Forall2((Z,), Iff(Mem23(Z, X1), Or((Mem23(Z, table.arole(r.left)), Mem23(Z, table.arole(r.right))))))
        if isinstance(r, RNot):
            rhs = And((rel(z1, z2, table.U), Not(rel(z1, z2, table.arole(r.arg)))))
        elif isinstance(r, PNot):
            rhs = And((And((m(z1, I), m(z2, D))), Not(rel(z1, z2, table.crole(r.arg)))))
        elif isinstance(r, RInverse):
            rhs = rel(z2, z1, table.arole(r.arg))
        elif isinstance(r, RId):
            C = table.concept(r.concept)
            rhs = And((m(z1, C), m(z2, C), Eq0(z1, z2)))
        elif isinstance(r, (RDomain, PDomain)):
            rhs = And((rel(z1, z2, table.role(r.role)), m(z1, table.concept(r.concept))))
        elif isinstance(r, PRange):
            rhs = And((rel(z1, z2, table.crole(r.role)), m(z2, table.data(r.data))))
        elif isinstance(r, PRestrict):
            rhs = And((rel(z1, z2, table.crole(r.role)), m(z1, table.concept(r.domain)), m(z2, table.data(r.range))))
        else:
            raise TranslationError(f"unhandled role equivalence {s!r}")
        return Forall0((z1, z2), Iff(lhs, rhs))

    if isinstance(s, Sub):
        Z = Var(f"Z{suf}", 2)
        return Forall2((Z,), Implies(Mem23(Z, table.crole(s.left)), Mem23(Z, table.crole(s.right))))

    if isinstance(s, SubAll):
        z1, z2 = zs(2)
        return Forall0((z1, z2), Implies(m(z1, table.concept(s.sub)),
                                         Implies(rel(z1, z2, table.role(s.role)), m(z2, table.unary(s.filler)))))
    if isinstance(s, SomeSub):
        z1, z2 = zs(2)
        return Forall0((z1, z2), Implies(And((rel(z1, z2, table.role(s.role)), m(z2, table.unary(s.filler)))),
                                         m(z1, table.concept(s.sup))))
    if isinstance(s, SubAtMost):
        ws = zs(s.n + 1)
        X, F = table.role(s.role), table.unary(s.filler)
        body = And(tuple(And((m(w, F), rel(z, w, X))) for w in ws))
        same = disj(Eq0(ws[i], ws[j]) for i in range(len(ws)) for j in range(i + 1, len(ws)))
        return Forall0((z,) + ws, Implies(m(z, table.concept(s.sub)), Implies(body, same)))
    if isinstance(s, AtLeastSub):
        ws = zs(s.n)
        X, F = table.role(s.role), table.unary(s.filler)
        parts = [And((m(w, F), rel(z, w, X))) for w in ws]
        parts += [Not(Eq0(ws[i], ws[j])) for i in range(len(ws)) for j in range(i + 1, len(ws))]
        return Forall0((z,) + ws, Implies(conj(parts), m(z, table.concept(s.sup))))
    if isinstance(s, Chain):
        ws = zs(len(s.roles))
        seq = (z,) + ws
        body = conj(rel(seq[i], seq[i + 1], table.arole(r)) for i, r in enumerate(s.roles))
        return Forall0(seq, Implies(body, rel(z, ws[-1], table.arole(s.target))))
    if isinstance(s, RoleProp):
        X = table.role(s.role)
        if s.prop == "Ref":
            return Forall0((z,), Implies(m(z, I), rel(z, z, X)))
        if s.prop == "Irref":
            return Forall0((z,), Not(rel(z, z, X)))
        if s.prop == "Fun":
            z1, z2, z3 = zs(3)
            return Forall0((z1, z2, z3), Implies(And((rel(z1, z2, X), rel(z1, z3, X))), Eq0(z2, z3)))
    if isinstance(s, Dis):
        z1, z2 = zs(2)
        return Forall0((z1, z2), Not(And((rel(z1, z2, table.arole(s.left)), rel(z1, z2, table.arole(s.right))))))

    def obj(role, o):
        return table.ind(o) if kind_of(role) == "arole" else table.const(o)

    if isinstance(s, ConceptAssertion):
        return m(table.ind(s.ind), table.concept(s.concept))
    if isinstance(s, RoleAssertion):
        return rel(table.ind(s.subj), obj(s.role, s.obj), table.role(s.role))
    if isinstance(s, NegRoleAssertion):
        return Not(rel(table.ind(s.subj), obj(s.role, s.obj), table.role(s.role)))
    if isinstance(s, SameIndividual):
        return Eq0(table.ind(s.left), table.ind(s.right))
    if isinstance(s, DifferentIndividuals):
        return Not(Eq0(table.ind(s.left), table.ind(s.right)))
    if isinstance(s, DataAssertion):
        return m(table.const(s.const), table.data(s.term))
    raise TranslationError(f"no clause for {s!r}")


def translate_conjunction(statements, table: SymbolTable) -> Formula:
    """tau of a conjunction of statements is the conjunction of their clauses."""
    return And(tuple(translate_statement(s, table, i) for i, s in enumerate(statements)))


def unrelativized_complement(s: Equiv, table: SymbolTable) -> Formula:
    """Literal complement clause without the domain guard (kept for comparison)."""
    z = _z()
    if kind_of(s.left) in ("concept", "data"):
        return Forall0((z,), Iff(Mem01(z, table.unary(s.left)), Not(Mem01(z, table.unary(s.right.arg)))))
    Z = Var("Z", 2)
    return Forall2((Z,), Iff(Mem23(Z, table.role(s.left)), Not(Mem23(Z, table.role(s.right.arg)))))


def unrelativized_datatype_exclusion(kb: KnowledgeBase, table: SymbolTable) -> Formula:
    """Pairwise datatype clause read as a biconditional (kept for comparison)."""
    z = _z()
    dts = kb.datatype_map.names()
    return Forall0((z,), conj(
        Iff(Mem01(z, table.datatype(a)), Not(Mem01(z, table.datatype(b))))
        for i, a in enumerate(dts) for b in dts[i + 1:]
    ))


# -- whole KB ------------------------------------------------------------------


@dataclass(frozen=True)
class TranslationOutput:
    phi_K: Formula
    table: SymbolTable
    per_statement: dict
    psi: dict = field(default_factory=dict)
    normalization: NormalizationResult = None
    flags: dict = field(default_factory=dict)


def translate_kb(kb: KnowledgeBase) -> TranslationOutput:
    norm = normalize(kb)
    ckb = norm.kb
    table = build_table(ckb)
    psi = background_parts(ckb, table)
    per = {}
    flags = {}
    for i, s in enumerate(ckb.statements):
        per[s] = translate_statement(s, table, i)
        fl = statement_flags(s)
        if fl:
            flags[s] = fl
    parts = [f for f in psi.values() if f is not None] + list(per.values())
    phi = And(tuple(parts))
    report = is_4lqsr(phi)
    if not report.accepted:
        shown = "; ".join(v.render() for v in report.violations[:3])
        raise TranslationError(f"translator produced a formula outside the fragment: {shown}")
    return TranslationOutput(phi, table, per, psi, norm, flags)


def render_translation(out: TranslationOutput, width: int = 100) -> str:
    from .fourlqs_core import pretty

    lines = ["; symbol table: variable, sort, symbol"]
    lines += [f"; {row}" for row in out.table.render()]
    lines.append(pretty(out.phi_K, width))
    return "\n".join(lines) + "\n"

