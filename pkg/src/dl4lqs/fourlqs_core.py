"""Four-level quantified set-theoretic formulae.

Variables carry a sort in {0, 1, 2, 3}: sort-0 variables denote elements of a
finite universe, sort-1 variables sets of elements, sort-2 variables sets of
sets and sort-3 variables sets of sets of sets.  Ordered pairs of elements are
encoded as Kuratowski pairs, so a binary relation lives in a sort-3 variable.

The module provides the syntax tree, a sort checker, a reference evaluator over
small finite interpretations, occurrence polarity, free variables and a
parenthesised text syntax that round-trips exactly.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class SortError(ValueError):
    pass


class DomainError(ValueError):
    pass


class EvaluationError(RuntimeError):
    pass


class FormulaParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True, order=True)
class Var:
    name: str
    sort: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SortError("variable name must be a nonempty string")
        if any(ch.isspace() or ch in "()" for ch in self.name):
            raise SortError(f"variable name {self.name!r} contains a delimiter")
        if self.sort not in (0, 1, 2, 3):
            raise SortError(f"sort must be 0..3, got {self.sort!r}")

    def __str__(self):
        return self.name


def V0(name):
    return Var(name, 0)


def V1(name):
    return Var(name, 1)


def V2(name):
    return Var(name, 2)


def V3(name):
    return Var(name, 3)


class Formula:
    """Base class of all syntax tree nodes."""

    __slots__ = ()

    def children(self) -> tuple:
        return ()


def _want(v, sort, where):
    if not isinstance(v, Var):
        raise SortError(f"{where}: operand {v!r} is not a variable")
    if v.sort != sort:
        raise SortError(f"{where}: {v.name} has sort {v.sort}, expected {sort}")


# -- atoms ------------------------------------------------------------------


@dataclass(frozen=True)
class Eq0(Formula):
    left: Var
    right: Var

    def __post_init__(self):
        _want(self.left, 0, "eq0")
        _want(self.right, 0, "eq0")


@dataclass(frozen=True)
class Mem01(Formula):
    elem: Var
    target: Var

    def __post_init__(self):
        _want(self.elem, 0, "in0")
        _want(self.target, 1, "in0")


@dataclass(frozen=True)
class PairEq(Formula):
    first: Var
    second: Var
    target: Var

    def __post_init__(self):
        _want(self.first, 0, "pair-eq")
        _want(self.second, 0, "pair-eq")
        _want(self.target, 2, "pair-eq")


@dataclass(frozen=True)
class PairMem(Formula):
    first: Var
    second: Var
    target: Var

    def __post_init__(self):
        _want(self.first, 0, "pair-in")
        _want(self.second, 0, "pair-in")
        _want(self.target, 3, "pair-in")


@dataclass(frozen=True)
class Eq1(Formula):
    left: Var
    right: Var

    def __post_init__(self):
        _want(self.left, 1, "eq1")
        _want(self.right, 1, "eq1")


@dataclass(frozen=True)
class Mem12(Formula):
    elem: Var
    target: Var

    def __post_init__(self):
        _want(self.elem, 1, "in1")
        _want(self.target, 2, "in1")


@dataclass(frozen=True)
class Eq2(Formula):
    left: Var
    right: Var

    def __post_init__(self):
        _want(self.left, 2, "eq2")
        _want(self.right, 2, "eq2")


@dataclass(frozen=True)
class Mem23(Formula):
    elem: Var
    target: Var

    def __post_init__(self):
        _want(self.elem, 2, "in2")
        _want(self.target, 3, "in2")


ATOM_TYPES = (Eq0, Mem01, PairEq, PairMem, Eq1, Mem12, Eq2, Mem23)


def atom_vars(a) -> tuple:
    if isinstance(a, (PairEq, PairMem)):
        return (a.first, a.second, a.target)
    if isinstance(a, (Eq0, Eq1, Eq2)):
        return (a.left, a.right)
    return (a.elem, a.target)


# -- connectives and quantifiers -------------------------------------------


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __post_init__(self):
        _want_formula(self.body)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class And(Formula):
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        for p in self.parts:
            _want_formula(p)

    def children(self):
        return self.parts


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        for p in self.parts:
            _want_formula(p)

    def children(self):
        return self.parts


def _want_formula(f):
    if not isinstance(f, Formula):
        raise SortError(f"{f!r} is not a formula")


def _quantifier_sorts(f: Formula) -> set:
    """Sorts bound by any quantifier block inside f."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, _Forall):
            out.add(g.SORT)
        stack.extend(g.children())
    return out


@dataclass(frozen=True)
class _Forall(Formula):
    vars: tuple
    body: Formula

    SORT = -1
    ALLOWED_INNER = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise SortError("a quantifier block binds at least one variable")
        for v in self.vars:
            _want(v, self.SORT, f"forall{self.SORT}")
        if len(set(self.vars)) != len(self.vars):
            raise SortError("repeated variable in quantifier block")
        _want_formula(self.body)
        inner = _quantifier_sorts(self.body)
        bad = inner - self.ALLOWED_INNER
        if bad:
            raise SortError(
                f"forall{self.SORT} body may not contain forall{min(bad)} blocks"
            )

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Forall0(_Forall):
    SORT = 0
    ALLOWED_INNER = frozenset()


@dataclass(frozen=True)
class Forall1(_Forall):
    SORT = 1
    ALLOWED_INNER = frozenset({0})


@dataclass(frozen=True)
class Forall2(_Forall):
    SORT = 2
    ALLOWED_INNER = frozenset({0, 1})


FORALL_TYPES = {0: Forall0, 1: Forall1, 2: Forall2}

TRUE = And(())
FALSE = Or(())


def Implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def Iff(a: Formula, b: Formula) -> Formula:
    return And((Or((Not(a), b)), Or((Not(b), a))))


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


# -- traversal --------------------------------------------------------------


def node_at(f: Formula, path: Iterable[int]) -> Formula:
    node = f
    for i in path:
        kids = node.children()
        if not isinstance(i, int) or not 0 <= i < len(kids):
            raise IndexError(f"path step {i!r} does not address a child")
        node = kids[i]
    return node


def iter_nodes(f: Formula, prefix: tuple = ()) -> Iterator[tuple]:
    """Preorder (path, node) pairs."""
    stack = [(prefix, f)]
    while stack:
        path, node = stack.pop()
        yield path, node
        kids = node.children()
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), kids[i]))


class Polarity(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


def polarity(f: Formula, path: Iterable[int]) -> Polarity:
    """Polarity of the occurrence addressed by path.

    Counts the Not nodes strictly above the addressed node.
    """
    path = tuple(path)
    node = f
    flips = 0
    for i in path:
        if isinstance(node, Not):
            flips += 1
        kids = node.children()
        if not isinstance(i, int) or not 0 <= i < len(kids):
            raise IndexError(f"path step {i!r} does not address a child")
        node = kids[i]
    return Polarity.POSITIVE if flips % 2 == 0 else Polarity.NEGATIVE


def free_variables(f: Formula) -> frozenset:
    out = set()

    def walk(g, bound):
        if isinstance(g, ATOM_TYPES):
            out.update(v for v in atom_vars(g) if v not in bound)
        elif isinstance(g, _Forall):
            walk(g.body, bound | set(g.vars))
        else:
            for k in g.children():
                walk(k, bound)

    walk(f, frozenset())
    return frozenset(out)


def sort_check(f: Formula) -> bool:
    """Re-run every constructor check over the tree; raises SortError."""
    for _, node in iter_nodes(f):
        if isinstance(node, ATOM_TYPES):
            type(node)(*atom_vars(node))
        elif isinstance(node, _Forall):
            type(node)(node.vars, node.body)
        elif not isinstance(node, (Not, And, Or)):
            raise SortError(f"unknown node {node!r}")
    return True


def formula_size(f: Formula) -> int:
    return sum(1 for _ in iter_nodes(f))


# -- nested-set values ------------------------------------------------------


def mk_pair(a, b, universe=None):
    """Kuratowski pair {{a},{a,b}}; collapses to {{a}} when a == b."""
    if universe is not None:
        for x in (a, b):
            if x not in universe:
                raise DomainError(f"{x!r} is not in the universe")
    return frozenset((frozenset((a,)), frozenset((a, b))))


def decode_pair(value):
    """Inverse of mk_pair, or None when value is not a pair."""
    if not isinstance(value, frozenset) or not 1 <= len(value) <= 2:
        return None
    inner = sorted(value, key=len)
    if not all(isinstance(s, frozenset) for s in inner):
        return None
    if len(inner) == 1:
        (s,) = inner
        if len(s) != 1:
            return None
        (a,) = s
        return (a, a)
    small, big = inner
    if len(small) != 1 or len(big) != 2 or not small <= big:
        return None
    (a,) = small
    (b,) = big - small
    return (a, b)


def powerset(items) -> list:
    items = list(items)
    out = []
    for r in range(len(items) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(items, r))
    return out


# -- interpretations --------------------------------------------------------


def _built_from(value, sort, universe) -> bool:
    if sort == 0:
        return value in universe
    if not isinstance(value, frozenset):
        return False
    return all(_built_from(v, sort - 1, universe) for v in value)


@dataclass(frozen=True)
class Interpretation:
    universe: tuple
    assign0: Mapping = field(default_factory=dict)
    assign1: Mapping = field(default_factory=dict)
    assign2: Mapping = field(default_factory=dict)
    assign3: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        if not self.universe:
            raise DomainError("universe must be nonempty")
        if len(set(self.universe)) != len(self.universe):
            raise DomainError("universe elements must be distinct")
        uni = frozenset(self.universe)
        for sort, table in enumerate(self.maps()):
            for v, val in table.items():
                _want(v, sort, "interpretation")
                if not _built_from(val, sort, uni):
                    raise DomainError(f"value of {v.name} is not built from the universe")

    def maps(self):
        return (self.assign0, self.assign1, self.assign2, self.assign3)

    @classmethod
    def build(cls, universe, values: Mapping) -> "Interpretation":
        tables = ({}, {}, {}, {})
        for v, val in values.items():
            tables[v.sort][v] = val
        return cls(tuple(universe), *tables)

    def value(self, v: Var):
        table = self.maps()[v.sort]
        if v not in table:
            raise EvaluationError(f"variable {v.name} (sort {v.sort}) is unassigned")
        return table[v]

    def all_values(self) -> dict:
        out = {}
        for t in self.maps():
            out.update(t)
        return out


@dataclass(frozen=True)
class EvalCaps:
    """Largest universe for which unguarded quantifiers over sort-1 and
    sort-2 variables are enumerated."""

    sort1_universe: int = 6
    sort2_universe: int = 4


def _neg_guard(f, v, env):
    """A set S such that f is false whenever the value of v lies outside S."""
    if isinstance(f, (Mem01, Mem12, Mem23)) and f.elem == v and f.target != v:
        if f.target in env:
            return env[f.target]
        return None
    if isinstance(f, And):
        found = [g for g in (_neg_guard(p, v, env) for p in f.parts) if g is not None]
        if not found:
            return None
        return frozenset.intersection(*map(frozenset, found))
    if isinstance(f, Or):
        found = [_neg_guard(p, v, env) for p in f.parts]
        if not found or any(g is None for g in found):
            return None
        return frozenset().union(*found)
    if isinstance(f, Not):
        return _pos_guard(f.body, v, env)
    return None


def _pos_guard(f, v, env):
    """A set S such that f is true whenever the value of v lies outside S."""
    if isinstance(f, Not):
        return _neg_guard(f.body, v, env)
    if isinstance(f, Or):
        found = [g for g in (_pos_guard(p, v, env) for p in f.parts) if g is not None]
        if not found:
            return None
        return frozenset.intersection(*map(frozenset, found))
    if isinstance(f, And):
        found = [_pos_guard(p, v, env) for p in f.parts]
        if not found or any(g is None for g in found):
            return None
        return frozenset().union(*found)
    return None


def _flat_conjuncts(f):
    if isinstance(f, And):
        for p in f.parts:
            yield from _flat_conjuncts(p)
    else:
        yield f


class _Evaluator:
    def __init__(self, m: Interpretation, caps: EvalCaps):
        self.m = m
        self.caps = caps
        self.env = m.all_values()
        self._pow1 = None
        self._pow2 = None
        self._free = {}

    def domain(self, sort):
        uni = self.m.universe
        if sort == 0:
            return uni
        if sort == 1:
            if len(uni) > self.caps.sort1_universe:
                raise EvaluationError(
                    f"refusing to enumerate sets over a universe of {len(uni)} elements"
                )
            if self._pow1 is None:
                self._pow1 = powerset(uni)
            return self._pow1
        if len(uni) > self.caps.sort2_universe:
            raise EvaluationError(
                f"refusing to enumerate sets of sets over a universe of {len(uni)} elements"
            )
        if self._pow2 is None:
            self._pow2 = powerset(powerset(uni))
        return self._pow2

    def val(self, v):
        try:
            return self.env[v]
        except KeyError:
            raise EvaluationError(f"variable {v.name} (sort {v.sort}) is unassigned") from None

    def ev(self, f) -> bool:
        t = type(f)
        if t is Mem01 or t is Mem12 or t is Mem23:
            return self.val(f.elem) in self.val(f.target)
        if t is PairMem:
            return mk_pair(self.val(f.first), self.val(f.second)) in self.val(f.target)
        if t is Eq0 or t is Eq1 or t is Eq2:
            return self.val(f.left) == self.val(f.right)
        if t is PairEq:
            return mk_pair(self.val(f.first), self.val(f.second)) == self.val(f.target)
        if t is Not:
            return not self.ev(f.body)
        if t is And:
            return all(self.ev(p) for p in f.parts)
        if t is Or:
            return any(self.ev(p) for p in f.parts)
        if isinstance(f, _Forall):
            return self.forall(f)
        raise EvaluationError(f"unknown node {f!r}")

    def forall(self, f) -> bool:
        env = self.env
        saved = {v: env[v] for v in f.vars if v in env}
        try:
            for part in _flat_conjuncts(f.body):
                if not self._forall_part(f.vars, part):
                    return False
            return True
        finally:
            for v in f.vars:
                env.pop(v, None)
            env.update(saved)

    def _forall_part(self, block, part) -> bool:
        key = id(part)
        used = self._free.get(key)
        if used is None:
            used = self._free[key] = free_variables(part)
        env = self.env
        domains = []
        for v in block:
            if v not in used:
                # the value is irrelevant and every domain is nonempty
                domains.append((self.first_value(v.sort),))
                continue
            for w in block:
                env.pop(w, None)
            guard = _pos_guard(part, v, env)
            if guard is not None:
                domains.append(tuple(guard))
            else:
                domains.append(self.domain(v.sort))
        for combo in itertools.product(*domains):
            for v, x in zip(block, combo):
                env[v] = x
            if not self.ev(part):
                return False
        return True

    def first_value(self, sort):
        if sort == 0:
            return self.m.universe[0]
        return frozenset()


def evaluate(f: Formula, m: Interpretation, caps: EvalCaps = EvalCaps()) -> bool:
    """Whether m satisfies f.

    Quantifiers range over the universe, its powerset and the powerset of
    its powerset.  A quantified variable guarded by a negated membership in
    a known set only needs the members of that set, which keeps relation
    quantifiers cheap; unguarded sort-1 and sort-2 quantifiers are enumerated
    exhaustively and refused above the caps.
    """
    missing = [v for v in free_variables(f) if v not in m.maps()[v.sort]]
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        raise EvaluationError(f"unassigned free variables: {names}")
    return _Evaluator(m, caps).ev(f)


# -- alpha equivalence ------------------------------------------------------


def alpha_normal(f: Formula) -> Formula:
    """Rename bound variables by binding order and flatten And/Or.

    Two formulae are the same up to bound-variable names and the grouping
    of conjunctions/disjunctions iff their normal forms are equal.
    """
    counter = itertools.count()

    def go(g, ren):
        if isinstance(g, ATOM_TYPES):
            return type(g)(*(ren.get(v, v) for v in atom_vars(g)))
        if isinstance(g, Not):
            return Not(go(g.body, ren))
        if isinstance(g, (And, Or)):
            kind = type(g)
            parts = []
            for p in g.parts:
                q = go(p, ren)
                if type(q) is kind:
                    parts.extend(q.parts)
                else:
                    parts.append(q)
            if len(parts) == 1:
                return parts[0]
            return kind(tuple(parts))
        if isinstance(g, _Forall):
            ren2 = dict(ren)
            new = []
            for v in g.vars:
                w = Var(f"%{next(counter)}", v.sort)
                ren2[v] = w
                new.append(w)
            return type(g)(tuple(new), go(g.body, ren2))
        raise SortError(f"unknown node {g!r}")

    return go(f, {})


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    return alpha_normal(f) == alpha_normal(g)


# -- text syntax ------------------------------------------------------------

_ATOM_HEADS = {
    "eq0": (Eq0, (0, 0)),
    "in0": (Mem01, (0, 1)),
    "pair-eq": (PairEq, (0, 0, 2)),
    "pair-in": (PairMem, (0, 0, 3)),
    "eq1": (Eq1, (1, 1)),
    "in1": (Mem12, (1, 2)),
    "eq2": (Eq2, (2, 2)),
    "in2": (Mem23, (2, 3)),
}
_HEAD_OF = {cls: (head, sorts) for head, (cls, sorts) in _ATOM_HEADS.items()}


def to_text(f: Formula) -> str:
    out = []

    def go(g):
        if isinstance(g, ATOM_TYPES):
            head, _ = _HEAD_OF[type(g)]
            out.append("(" + head + " " + " ".join(v.name for v in atom_vars(g)) + ")")
        elif isinstance(g, Not):
            out.append("(not ")
            go(g.body)
            out.append(")")
        elif isinstance(g, (And, Or)):
            out.append("(and" if isinstance(g, And) else "(or")
            for p in g.parts:
                out.append(" ")
                go(p)
            out.append(")")
        elif isinstance(g, _Forall):
            out.append(f"(forall{g.SORT} (" + " ".join(v.name for v in g.vars) + ") ")
            go(g.body)
            out.append(")")
        else:
            raise SortError(f"unknown node {g!r}")

    go(f)
    return "".join(out)


def _tokens(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j


def _read_sexprs(text: str) -> list:
    stack = [[]]
    opens = []
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append([])
            opens.append((line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise FormulaParseError("unbalanced ')'", line, col)
            done = stack.pop()
            pos = opens.pop()
            stack[-1].append(_SList(done, pos))
        else:
            stack[-1].append(_SAtom(tok, (line, col)))
    if len(stack) != 1:
        line, col = opens[-1]
        raise FormulaParseError("unclosed '('", line, col)
    return stack[0]


@dataclass(frozen=True)
class _SAtom:
    text: str
    pos: tuple


@dataclass(frozen=True)
class _SList:
    items: list
    pos: tuple


def _build(sx, bound: dict) -> Formula:
    if not isinstance(sx, _SList) or not sx.items:
        raise FormulaParseError("expected a parenthesised formula", *sx.pos)
    head = sx.items[0]
    if not isinstance(head, _SAtom):
        raise FormulaParseError("expected an operator name", *sx.pos)
    op, args = head.text, sx.items[1:]

    def need(k):
        if len(args) != k:
            raise FormulaParseError(f"{op} expects {k} arguments, got {len(args)}", *sx.pos)

    if op in _ATOM_HEADS:
        cls, sorts = _ATOM_HEADS[op]
        need(len(sorts))
        vs = []
        for a, s in zip(args, sorts):
            if not isinstance(a, _SAtom):
                raise FormulaParseError("expected a variable name", *a.pos)
            vs.append(Var(a.text, s))
        try:
            return cls(*vs)
        except SortError as e:
            raise FormulaParseError(str(e), *sx.pos) from None
    if op == "not":
        need(1)
        return Not(_build(args[0], bound))
    if op in ("and", "or"):
        parts = tuple(_build(a, bound) for a in args)
        return And(parts) if op == "and" else Or(parts)
    if op in ("implies", "iff"):
        need(2)
        a, b = (_build(x, bound) for x in args)
        return Implies(a, b) if op == "implies" else Iff(a, b)
    if op in ("forall0", "forall1", "forall2"):
        need(2)
        sort = int(op[-1])
        block = args[0]
        if not isinstance(block, _SList) or not all(isinstance(b, _SAtom) for b in block.items):
            raise FormulaParseError("expected a list of bound variable names", *block.pos)
        vs = tuple(Var(b.text, sort) for b in block.items)
        try:
            return FORALL_TYPES[sort](vs, _build(args[1], bound))
        except SortError as e:
            raise FormulaParseError(str(e), *sx.pos) from None
    raise FormulaParseError(f"unknown operator {op!r}", *head.pos)


def parse_formula(text: str) -> Formula:
    """Parse one formula; several top-level formulae are conjoined."""
    items = _read_sexprs(text)
    if not items:
        raise FormulaParseError("empty input", 1, 1)
    fs = [_build(sx, {}) for sx in items]
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def pretty(f: Formula, width: int = 100) -> str:
    """Indented rendering that parses back to the same tree."""

    def go(g, ind):
        flat = to_text(g)
        if len(flat) + ind <= width or isinstance(g, ATOM_TYPES):
            return " " * ind + flat
        pad = " " * ind
        if isinstance(g, Not):
            return pad + "(not\n" + go(g.body, ind + 2) + ")"
        if isinstance(g, (And, Or)):
            head = "and" if isinstance(g, And) else "or"
            if not g.parts:
                return pad + f"({head})"
            return pad + f"({head}\n" + "\n".join(go(p, ind + 2) for p in g.parts) + ")"
        names = " ".join(v.name for v in g.vars)
        return pad + f"(forall{g.SORT} ({names})\n" + go(g.body, ind + 2) + ")"

    return go(f, 0)
