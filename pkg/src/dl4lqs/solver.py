"""Bounded satisfiability of translated knowledge bases.

The translated formula is grounded over a finite layout (see ``layout``):
sort-0 quantifiers range over the layout elements, sort-2 quantifiers over all
ordered pairs plus one representative non-pair, and every sort-1 or sort-3
variable becomes a family of propositional atoms.  Facts fixed by the layout
(datatype blocks, constant facets, typing of roles) are folded away as
constants.  The resulting CNF goes to a small CDCL solver.

A satisfying assignment is decoded into a set-theoretic model, checked against
the formula, converted into a DL interpretation and checked against the source
statements directly before ``Sat`` is reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .dl4_model import KnowledgeBase
from .dl4_translate import TranslationOutput, translate_kb
from .dl_semantics_oracle import (
    DLInterpretation,
    ConversionError,
    kb_holds,
    model_from_4lqsr,
    model_to_4lqsr,
    violated,
)
from .fourlqs_core import (
    And,
    Eq0,
    EvalCaps,
    EvaluationError,
    Forall0,
    Forall2,
    Formula,
    Interpretation,
    Mem01,
    Mem23,
    Not,
    Or,
    PairEq,
    PairMem,
    evaluate,
    mk_pair,
)
from .layout import Bound, BoundError, Layout, complete_bound, compute_default_bound, make_layout
from . import swrl

__all__ = [
    "Bound",
    "BoundError",
    "compute_default_bound",
    "NotGroundable",
    "SolverError",
    "PropCNF",
    "Grounding",
    "ground",
    "solve_cnf",
    "SolveResult",
    "extract_model",
    "Sat",
    "UnsatWithinBound",
    "ResourceLimit",
    "decide",
    "to_dimacs",
]


class NotGroundable(ValueError):
    pass


class SolverError(RuntimeError):
    """A claimed model failed its own replay; this is a bug, never an answer."""


NONPAIR = "<nonpair>"


@dataclass(frozen=True)
class PropCNF:
    num_vars: int
    clauses: tuple
    symbols: tuple  # symbols[k] names variable k (index 0 unused)

    @property
    def size(self) -> int:
        return self.num_vars + len(self.clauses)


@dataclass(frozen=True)
class Grounding:
    cnf: PropCNF
    layout: Layout
    ids: dict  # base symbol -> variable


@dataclass(frozen=True)
class _Ind:
    name: str


class _Grounder:
    def __init__(self, table, layout: Layout, dmap):
        self.table = table
        self.layout = layout
        self.dmap = dmap
        self.E = layout.elements
        self.pinned = layout.pinned_data
        self.block_of = {e: layout.block_of(e) for e in self.E}
        self.const_at = {el: c for c, el in layout.const_elem}
        self.symbols = [None]
        self.ids = {}
        self.clauses = []
        self.gates = {}
        self.pairs = tuple(itertools.product(self.E, self.E)) + (NONPAIR,)
        self._allocate_base()

    # -- variables and pins

    def new_var(self, symbol) -> int:
        self.symbols.append(symbol)
        k = len(self.symbols) - 1
        if symbol[0] != "aux":
            self.ids[symbol] = k
        return k

    def _allocate_base(self):
        vs = self.table.variables()
        for X in (v for v in vs if v.sort == 1):
            for u in self.E:
                if self.pin1(X, u) is None:
                    self.new_var(("in", u, X.name))
        for R in (v for v in vs if v.sort == 3):
            for u in self.E:
                for w in self.E:
                    if self.pin3(R, u, w) is None:
                        self.new_var(("rel", R.name, u, w))
        for key, _ in self.table.items():
            if key[0] == "ind":
                lits = [self.new_var(("is", key[1], u)) for u in self.layout.ind_side]
                self.clauses.append(list(lits))
                for a, b in itertools.combinations(lits, 2):
                    self.clauses.append([-a, -b])

    def pin1(self, X, u):
        kind, *rest = self.table.key_of(X.name)
        data = u in self.pinned
        block = self.block_of[u]
        if kind in ("I", "concept", "Top", "Bot"):
            return False if data else None
        if kind == "D":
            return True if data else None
        if kind in ("datatype", "topd"):
            return block == rest[0]
        if kind == "botd":
            return False
        if kind == "facet":
            if block != self.dmap.datatype_of_facet(rest[0]):
                return False
            c = self.const_at.get(u)
            return None if c is None else self.dmap.facet_eval(rest[0], c)
        if kind == "enum":
            return self.const_at.get(u) in rest[0]
        if kind == "fexpr":
            return None if block == rest[0] else False
        return None

    def pin3(self, R, u, w):
        kind = self.table.key_of(R.name)[0]
        if u in self.pinned:
            return False
        if kind in ("arole", "U") and w in self.pinned:
            return False
        return None

    def mem1(self, u, X):
        p = self.pin1(X, u)
        return p if p is not None else self.ids[("in", u, X.name)]

    def rel(self, X, u, w):
        p = self.pin3(X, u, w)
        return p if p is not None else self.ids[("rel", X.name, u, w)]

    # -- gates

    def AND(self, lits):
        out = set()
        for l in lits:
            if l is False:
                return False
            if l is True:
                continue
            if -l in out:
                return False
            out.add(l)
        if not out:
            return True
        if len(out) == 1:
            return next(iter(out))
        key = frozenset(out)
        y = self.gates.get(key)
        if y is None:
            y = self.new_var(("aux",))
            self.gates[key] = y
            for l in out:
                self.clauses.append([-y, l])
            self.clauses.append([y] + [-l for l in out])
        return y

    @staticmethod
    def neg(l):
        return (not l) if isinstance(l, bool) else -l

    def OR(self, lits):
        return self.neg(self.AND(self.neg(l) for l in lits))

    # -- terms and atoms

    def term0(self, v, env):
        if v in env:
            return env[v]
        if v.sort != 0:
            raise NotGroundable(f"free variable {v.name} of sort {v.sort} in an element position")
        key = self.table.key_of(v.name)
        if key is None:
            raise NotGroundable(f"free variable {v.name} is not in the symbol table")
        if key[0] == "const":
            return self.layout.element_of_const(key[1])
        if key[0] == "ind":
            return _Ind(key[1])
        raise NotGroundable(f"variable {v.name} is not an element symbol")

    def set_var(self, v, env):
        if v in env:
            raise NotGroundable(f"quantified set variable {v.name}")
        if self.table.key_of(v.name) is None:
            raise NotGroundable(f"free variable {v.name} is not in the symbol table")
        return v

    def with_elements(self, terms, build):
        """Expand individual names over the individual side of the layout."""
        inds = sorted({t.name for t in terms if isinstance(t, _Ind)})
        if not inds:
            return build(terms)
        options = []
        for combo in itertools.product(self.layout.ind_side, repeat=len(inds)):
            env = dict(zip(inds, combo))
            concrete = [env[t.name] if isinstance(t, _Ind) else t for t in terms]
            guard = [self.ids[("is", a, u)] for a, u in env.items()]
            options.append(self.AND(guard + [build(concrete)]))
        return self.OR(options)

    def atom(self, f, env):
        t = type(f)
        if t is Mem01:
            X = self.set_var(f.target, env)
            return self.with_elements([self.term0(f.elem, env)], lambda ts: self.mem1(ts[0], X))
        if t is PairMem:
            X = self.set_var(f.target, env)
            return self.with_elements(
                [self.term0(f.first, env), self.term0(f.second, env)],
                lambda ts: self.rel(X, ts[0], ts[1]),
            )
        if t is Eq0:
            return self.with_elements(
                [self.term0(f.left, env), self.term0(f.right, env)], lambda ts: ts[0] == ts[1]
            )
        if t is Mem23:
            Z = env.get(f.elem)
            if Z is None:
                raise NotGroundable(f"free sort-2 variable {f.elem.name}")
            X = self.set_var(f.target, env)
            if Z == NONPAIR:
                return False
            return self.rel(X, Z[0], Z[1])
        if t is PairEq:
            Z = env.get(f.target)
            if Z is None:
                raise NotGroundable(f"free sort-2 variable {f.target.name}")
            if Z == NONPAIR:
                return False
            return self.with_elements(
                [self.term0(f.first, env), self.term0(f.second, env)],
                lambda ts: ts[0] == Z[0] and ts[1] == Z[1],
            )
        raise NotGroundable(f"{t.__name__} atoms are outside the groundable fragment")

    def domain(self, v):
        if v.sort == 0:
            return self.E
        if v.sort == 2:
            return self.pairs
        raise NotGroundable(f"quantifier over sort {v.sort}")

    def bindings(self, f, env):
        doms = [self.domain(v) for v in f.vars]
        for combo in itertools.product(*doms):
            e = dict(env)
            e.update(zip(f.vars, combo))
            yield e

    # -- formulas

    def g(self, f, env):
        t = type(f)
        if t is Not:
            return self.neg(self.g(f.body, env))
        if t is And:
            lits = []
            for p in f.parts:
                l = self.g(p, env)
                if l is False:
                    return False
                lits.append(l)
            return self.AND(lits)
        if t is Or:
            lits = []
            for p in f.parts:
                l = self.g(p, env)
                if l is True:
                    return True
                lits.append(l)
            return self.OR(lits)
        if t is Forall0 or t is Forall2:
            lits = []
            for e in self.bindings(f, env):
                l = self.g(f.body, e)
                if l is False:
                    return False
                lits.append(l)
            return self.AND(lits)
        if isinstance(f, Formula) and not hasattr(f, "vars"):
            return self.atom(f, env)
        raise NotGroundable(f"{t.__name__} is outside the groundable fragment")

    def disjuncts(self, f, env, out) -> bool:
        """Collect literals of a top-level disjunction; True when it is valid."""
        t = type(f)
        if t is Or:
            return any(self.disjuncts(p, env, out) for p in f.parts)
        if t is Not:
            b = f.body
            if type(b) is Not:
                return self.disjuncts(b.body, env, out)
            if type(b) is And:
                return any(self.disjuncts(Not(p), env, out) for p in b.parts)
        l = self.g(f, env)
        if l is True:
            return True
        if l is not False:
            out.append(l)
        return False

    def assert_(self, f, env):
        t = type(f)
        if t is And:
            for p in f.parts:
                self.assert_(p, env)
            return
        if t is Forall0 or t is Forall2:
            for e in self.bindings(f, env):
                self.assert_(f.body, e)
            return
        if t is Not and type(f.body) is Or:
            for p in f.body.parts:
                self.assert_(Not(p), env)
            return
        lits = []
        if self.disjuncts(f, env, lits):
            return
        lits = list(dict.fromkeys(lits))
        if any(-l in lits for l in lits):
            return
        self.clauses.append(lits)

    def result(self) -> Grounding:
        cnf = PropCNF(len(self.symbols) - 1, tuple(tuple(c) for c in self.clauses), tuple(self.symbols))
        return Grounding(cnf, self.layout, dict(self.ids))


def ground(phi: Formula, bound: Bound, table, dmap) -> Grounding:
    layout = make_layout(bound, dmap)
    gr = _Grounder(table, layout, dmap)
    gr.assert_(phi, {})
    return gr.result()


# -- CDCL -----------------------------------------------------------------------


@dataclass(frozen=True)
class SolveResult:
    status: str  # "sat", "unsat" or "limit"
    assignment: tuple = ()  # assignment[k] is the value of variable k
    stats: dict = field(default_factory=dict)


class _CDCL:
    def __init__(self, n, clauses):
        self.n = n
        self.val = [0] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.trail = []
        self.lim = []
        self.qhead = 0
        self.clauses = []
        self.watches = [[] for _ in range(2 * n + 2)]
        self.next_var = 1
        self.seen = [False] * (n + 1)
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0, "learned": 0}
        self.trace = None
        self.ok = True
        for c in clauses:
            self.add_input(c)

    def w(self, lit):
        return 2 * lit if lit > 0 else -2 * lit + 1

    def value(self, lit):
        v = self.val[abs(lit)]
        return v if lit > 0 else -v

    def enqueue(self, lit, reason):
        v = abs(lit)
        self.val[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def add_input(self, c):
        c = list(dict.fromkeys(c))
        if any(-l in c for l in c):
            return
        if not c:
            self.ok = False
            return
        if len(c) == 1:
            v = self.value(c[0])
            if v == -1:
                self.ok = False
            elif v == 0:
                self.enqueue(c[0], None)
            return
        self.attach(c)

    def attach(self, c):
        ci = len(self.clauses)
        self.clauses.append(c)
        self.watches[self.w(c[0])].append(ci)
        self.watches[self.w(c[1])].append(ci)
        return ci

    def propagate(self):
        clauses, watches = self.clauses, self.watches
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            false_lit = -lit
            ws = watches[self.w(false_lit)]
            keep = []
            i = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if self.value(first) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(c)):
                    if self.value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches[self.w(c[1])].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if self.value(first) == -1:
                    keep.extend(ws[i:])
                    watches[self.w(false_lit)] = keep
                    return ci
                self.enqueue(first, ci)
            watches[self.w(false_lit)] = keep
        return None

    def analyze(self, confl):
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.lim)
        c = self.clauses[confl]
        while True:
            for q in (c if p is None else c[1:]):
                v = abs(q)
                if not self.seen[v] and self.level[v] > 0:
                    self.seen[v] = True
                    if self.level[v] == cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not self.seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            self.seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            c = self.clauses[self.reason[abs(p)]]
        learnt[0] = -p
        for q in learnt[1:]:
            self.seen[abs(q)] = False
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def backtrack(self, lvl):
        if len(self.lim) <= lvl:
            return
        start = self.lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.val[v] = 0
            self.reason[v] = None
            if v < self.next_var:
                self.next_var = v
        del self.trail[start:]
        del self.lim[lvl:]
        self.qhead = len(self.trail)

    def pick(self):
        """Lowest unassigned variable, tried false first."""
        v = self.next_var
        while v <= self.n and self.val[v] != 0:
            v += 1
        self.next_var = v
        return -v if v <= self.n else None

    def solve(self, max_conflicts=None):
        if not self.ok:
            return "unsat"
        if self.propagate() is not None:
            return "unsat"
        while True:
            confl = self.propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                if self.trace is not None:
                    self.trace.append(f"conflict {self.stats['conflicts']} at level {len(self.lim)}")
                if not self.lim:
                    return "unsat"
                if max_conflicts is not None and self.stats["conflicts"] >= max_conflicts:
                    return "limit"
                learnt, lvl = self.analyze(confl)
                self.backtrack(lvl)
                if len(learnt) == 1:
                    self.enqueue(learnt[0], None)
                else:
                    ci = self.attach(learnt)
                    self.enqueue(learnt[0], ci)
                    self.stats["learned"] += 1
                continue
            lit = self.pick()
            if lit is None:
                return "sat"
            self.stats["decisions"] += 1
            if self.trace is not None:
                self.trace.append(f"decide {lit} at level {len(self.lim) + 1}")
            self.lim.append(len(self.trail))
            self.enqueue(lit, None)


def solve_cnf(cnf: PropCNF, max_conflicts: int = None, trace: list = None) -> SolveResult:
    """CDCL with watched literals, first-UIP learning and a static branching order."""
    s = _CDCL(cnf.num_vars, cnf.clauses)
    s.trace = trace
    status = s.solve(max_conflicts)
    if status != "sat":
        return SolveResult(status, (), dict(s.stats))
    assignment = tuple([False] + [s.val[v] == 1 for v in range(1, cnf.num_vars + 1)])
    for c in cnf.clauses:
        if not any(assignment[l] if l > 0 else not assignment[-l] for l in c):
            raise SolverError("the solver returned an assignment that falsifies a clause")
    return SolveResult("sat", assignment, dict(s.stats))


def to_dimacs(cnf: PropCNF) -> str:
    lines = []
    for k, sym in enumerate(cnf.symbols):
        if sym is not None and sym[0] != "aux":
            lines.append(f"c {k} " + " ".join(map(str, sym)))
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in cnf.clauses)
    return "\n".join(lines) + "\n"


# -- models ---------------------------------------------------------------------


def extract_model(gr: Grounding, assignment, table, dmap) -> Interpretation:
    """Set-theoretic model read off a propositional assignment."""
    g = _Grounder.__new__(_Grounder)
    g.table, g.layout, g.dmap = table, gr.layout, dmap
    g.E = gr.layout.elements
    g.pinned = gr.layout.pinned_data
    g.block_of = {e: gr.layout.block_of(e) for e in g.E}
    g.const_at = {el: c for c, el in gr.layout.const_elem}
    g.ids = gr.ids

    def truth(x):
        return x if isinstance(x, bool) else assignment[x]

    values = {}
    for key, var in table.items():
        if var.sort == 1:
            values[var] = frozenset(u for u in g.E if truth(g.mem1(u, var)))
        elif var.sort == 3:
            values[var] = frozenset(
                mk_pair(u, w) for u in g.E for w in g.E if truth(g.rel(var, u, w))
            )
        elif key[0] == "const":
            values[var] = gr.layout.element_of_const(key[1])
        elif key[0] == "ind":
            hits = [u for u in gr.layout.ind_side if assignment[gr.ids[("is", key[1], u)]]]
            values[var] = hits[0]
        else:
            raise SolverError(f"cannot decode symbol {var.name}")
    return Interpretation.build(g.E, values)


# -- deciding knowledge bases ---------------------------------------------------


@dataclass(frozen=True)
class Sat:
    model: DLInterpretation
    fourlqs_model: Interpretation
    bound: Bound
    stats: dict = field(default_factory=dict)


@dataclass(frozen=True)
class UnsatWithinBound:
    bound: Bound
    stats: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ResourceLimit:
    bound: Bound
    stats: dict = field(default_factory=dict)


def full_formula(out: TranslationOutput, rules=()) -> Formula:
    if not rules:
        return out.phi_K
    return And((out.phi_K,) + tuple(swrl.translate_rule(r, out.table) for r in rules))


def _replay(phi, m, caps, what):
    try:
        ok = evaluate(phi, m, caps)
    except EvaluationError as e:
        raise SolverError(f"{what} could not be evaluated: {e}") from None
    if not ok:
        raise SolverError(f"{what} does not satisfy the translated formula")


def decide(kb: KnowledgeBase, bound: Bound = None, rules=(), max_conflicts: int = None,
           translation: TranslationOutput = None, trace: list = None):
    out = translation or translate_kb(kb)
    dmap = kb.datatype_map
    bound = complete_bound(bound or compute_default_bound(kb), dmap)
    phi = full_formula(out, rules)
    gr = ground(phi, bound, out.table, dmap)
    res = solve_cnf(gr.cnf, max_conflicts, trace)
    stats = dict(res.stats, vars=gr.cnf.num_vars, clauses=len(gr.cnf.clauses),
                 elements=len(gr.layout.elements))
    if res.status == "unsat":
        return UnsatWithinBound(bound, stats)
    if res.status == "limit":
        return ResourceLimit(bound, stats)
    caps = EvalCaps(sort1_universe=0, sort2_universe=0)
    m = extract_model(gr, res.assignment, out.table, dmap)
    _replay(phi, m, caps, "the decoded model")
    try:
        dl = model_from_4lqsr(m, out.table, dmap)
    except ConversionError as e:
        raise SolverError(str(e)) from None
    if not kb_holds(kb, dl, rules):
        bad = violated(kb, dl, rules)
        raise SolverError(f"the decoded interpretation violates {bad[0]!r}")
    back = model_to_4lqsr(dl, out.table, out.normalization.fresh_ledger)
    _replay(out.phi_K, back, caps, "the re-encoded interpretation")
    return Sat(dl, m, bound, stats)
