"""SWRL rules over a knowledge base and their universal-formula translation.

Surface syntax, one rule per statement::

    hasParent(X, Y), hasBrother(Y, Z) :- hasUncle(X, Z).
    Person(X), hasAge(X, Y), ge18(Y) :- Adult(X).

The body comes first and the head follows ``:-``.  Identifiers that start
with an uppercase letter or ``?`` are variables unless the KB declares them as
individuals or constants.  ``sameAs`` and ``differentFrom`` are built in;
``(Y >= 18)`` and ``(Y <= 5)`` resolve to a declared integer facet with that bound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dl4_model import CName, KnowledgeBase, PName, RName, TDatatype, TFacet, FName, print_term
from .fourlqs_core import Eq0, Forall0, Formula, Implies, Mem01, Not, PairMem, Var, conj


class RuleError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class SafetyError(RuleError):
    pass


# -- arguments and atoms --------------------------------------------------------


@dataclass(frozen=True)
class RVar:
    name: str


@dataclass(frozen=True)
class RInd:
    name: str


@dataclass(frozen=True)
class RConst:
    name: str


@dataclass(frozen=True)
class ConceptAtom:
    arg: object
    concept: str


@dataclass(frozen=True)
class DatatypeAtom:
    arg: object
    datarange: object  # TDatatype or TFacet


@dataclass(frozen=True)
class AbstractRoleAtom:
    first: object
    second: object
    role: str


@dataclass(frozen=True)
class ConcreteRoleAtom:
    first: object
    second: object
    role: str


@dataclass(frozen=True)
class SameAs:
    first: object
    second: object


@dataclass(frozen=True)
class DifferentFrom:
    first: object
    second: object


RULE_ATOMS = (ConceptAtom, DatatypeAtom, AbstractRoleAtom, ConcreteRoleAtom, SameAs, DifferentFrom)


def atom_args(a) -> tuple:
    if isinstance(a, (ConceptAtom, DatatypeAtom)):
        return (a.arg,)
    return (a.first, a.second)


def _check_args(a):
    def ok(x, allowed):
        if not isinstance(x, allowed):
            raise RuleError(f"argument {x.name} is not allowed in {type(a).__name__}")

    obj = (RVar, RInd)
    data = (RVar, RConst)
    if isinstance(a, ConceptAtom):
        ok(a.arg, obj)
    elif isinstance(a, DatatypeAtom):
        ok(a.arg, data)
    elif isinstance(a, ConcreteRoleAtom):
        ok(a.first, obj)
        ok(a.second, data)
    else:
        ok(a.first, obj)
        ok(a.second, obj)


@dataclass(frozen=True)
class Rule:
    body: tuple
    head: tuple
    variables: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "head", tuple(self.head))
        if not self.body or not self.head:
            raise RuleError("a rule needs a nonempty body and head")
        for a in self.body + self.head:
            _check_args(a)
        body_vars = _vars_in(self.body)
        missing = [v for v in _vars_in(self.head) if v not in body_vars]
        if missing:
            raise SafetyError(f"head variable not in body: {missing[0].name}")
        object.__setattr__(self, "variables", tuple(body_vars))


def _vars_in(atoms) -> list:
    out = []
    for a in atoms:
        for x in atom_args(a):
            if isinstance(x, RVar) and x not in out:
                out.append(x)
    return out


# -- printing -------------------------------------------------------------------


def _arg_text(x) -> str:
    return x.name


def print_atom(a) -> str:
    if isinstance(a, ConceptAtom):
        return f"{a.concept}({_arg_text(a.arg)})"
    if isinstance(a, DatatypeAtom):
        return f"{print_term(a.datarange)}({_arg_text(a.arg)})"
    if isinstance(a, (AbstractRoleAtom, ConcreteRoleAtom)):
        return f"{a.role}({_arg_text(a.first)}, {_arg_text(a.second)})"
    name = "sameAs" if isinstance(a, SameAs) else "differentFrom"
    return f"{name}({_arg_text(a.first)}, {_arg_text(a.second)})"


def print_rule(r: Rule) -> str:
    body = ", ".join(print_atom(a) for a in r.body)
    head = ", ".join(print_atom(a) for a in r.head)
    return f"{body} :- {head}."


# -- parsing --------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<punct>:-|>=|<=|[(),.])
  | (?P<name>\??-?[A-Za-z0-9_][A-Za-z0-9_\-]*)
    """,
    re.VERBOSE,
)


def _lex(text):
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise RuleError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("punct", "name"):
                out.append((m.group(), kind, line, col))
            col += len(m.group())
        pos = m.end()
    out.append(("", "eof", line, col))
    return out


class _RuleParser:
    def __init__(self, text: str, kb: KnowledgeBase):
        self.toks = _lex(text)
        self.i = 0
        self.kb = kb
        sig = kb.signature
        self.concepts = set(sig.concepts)
        self.aroles = set(sig.aroles)
        self.croles = set(sig.croles)
        self.inds = set(sig.individuals)
        dm = kb.datatype_map
        self.consts = set(dm.all_constants())
        self.datatypes = set(dm.names())
        self.facets = set(dm.all_facets())

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise RuleError(msg, tok[2], tok[3])

    def expect(self, text):
        t = self.next()
        if t[0] != text:
            self.fail(f"expected {text!r}, found {t[0] or 'end of input'!r}", t)
        return t

    def rules(self) -> list:
        out = []
        while self.peek()[1] != "eof":
            start = self.peek()
            body = self.atoms(":-")
            self.expect(":-")
            if self.peek()[0] == ".":
                self.fail("a rule needs a nonempty head")
            head = self.atoms(".")
            self.expect(".")
            try:
                out.append(Rule(tuple(body), tuple(head)))
            except RuleError as e:
                cls = SafetyError if isinstance(e, SafetyError) else RuleError
                raise cls(e.message, start[2], start[3]) from None
        return out

    def atoms(self, stop) -> list:
        out = [self.atom()]
        while self.peek()[0] == ",":
            self.next()
            out.append(self.atom())
        if self.peek()[0] != stop:
            self.fail(f"expected ',' or {stop!r}")
        return out

    def arg(self):
        t = self.next()
        if t[1] != "name":
            self.fail("expected a variable, individual or constant", t)
        s = t[0]
        if s in self.inds:
            return RInd(s)
        if s in self.consts:
            return RConst(s)
        if s.startswith("?"):
            return RVar(s[1:])
        if s[0].isupper():
            return RVar(s)
        self.fail(f"undeclared individual or constant {s}", t)

    def atom(self):
        t = self.peek()
        if t[0] == "(":
            return self.comparison()
        name = self.next()
        if name[1] != "name":
            self.fail("expected an atom", name)
        self.expect("(")
        args = [self.arg()]
        while self.peek()[0] == ",":
            self.next()
            args.append(self.arg())
        self.expect(")")
        s = name[0]
        arity = len(args)
        try:
            if s in ("sameAs", "differentFrom") and arity == 2:
                return (SameAs if s == "sameAs" else DifferentFrom)(*args)
            if arity == 1 and s in self.concepts:
                a = ConceptAtom(args[0], s)
            elif arity == 1 and s in self.datatypes:
                a = DatatypeAtom(args[0], TDatatype(s))
            elif arity == 1 and s in self.facets:
                d = self.kb.datatype_map.datatype_of_facet(s)
                a = DatatypeAtom(args[0], TFacet(d, FName(s)))
            elif arity == 2 and s in self.aroles:
                a = AbstractRoleAtom(args[0], args[1], s)
            elif arity == 2 and s in self.croles:
                a = ConcreteRoleAtom(args[0], args[1], s)
            else:
                self.fail(f"undeclared predicate {s}/{arity}", name)
            _check_args(a)
            return a
        except RuleError as e:
            if e.line:
                raise
            self.fail(e.message, name)

    def comparison(self):
        open_ = self.expect("(")
        arg = self.arg()
        op = self.next()
        if op[0] not in (">=", "<="):
            self.fail("expected >= or <=", op)
        bound = self.next()
        if not re.match(r"-?[0-9]+$", bound[0]):
            self.fail("expected an integer bound", bound)
        self.expect(")")
        kind = "minInclusive" if op[0] == ">=" else "maxInclusive"
        dm = self.kb.datatype_map
        for f in dm.all_facets():
            spec = dm.facet_spec(f)
            if spec.kind == kind and spec.value == int(bound[0]):
                a = DatatypeAtom(arg, TFacet(dm.datatype_of_facet(f), FName(f)))
                _check_args(a)
                return a
        self.fail(f"no declared facet {kind}({bound[0]}) for this comparison", open_)


def parse_rules(text: str, kb: KnowledgeBase) -> list:
    return _RuleParser(text, kb).rules()


def parse_rule(text: str, kb: KnowledgeBase) -> Rule:
    rules = parse_rules(text, kb)
    if len(rules) != 1:
        raise RuleError(f"expected exactly one rule, found {len(rules)}")
    return rules[0]


# -- translation ----------------------------------------------------------------


def rule_var(v: RVar) -> Var:
    return Var(v.name.lower(), 0)


def translate_rule(rule: Rule, table) -> Formula:
    """Universal closure of body -> head over the rule variables."""
    names = [rule_var(v) for v in rule.variables]
    if len(set(names)) != len(names):
        raise RuleError("two rule variables differ only in case")

    def term(x):
        if isinstance(x, RVar):
            return rule_var(x)
        if isinstance(x, RInd):
            return table.ind(x.name)
        return table.const(x.name)

    def atom(a):
        if isinstance(a, ConceptAtom):
            return Mem01(term(a.arg), table.concept(CName(a.concept)))
        if isinstance(a, DatatypeAtom):
            return Mem01(term(a.arg), table.data(a.datarange))
        if isinstance(a, AbstractRoleAtom):
            return PairMem(term(a.first), term(a.second), table.arole(RName(a.role)))
        if isinstance(a, ConcreteRoleAtom):
            return PairMem(term(a.first), term(a.second), table.crole(PName(a.role)))
        if isinstance(a, SameAs):
            return Eq0(term(a.first), term(a.second))
        return Not(Eq0(term(a.first), term(a.second)))

    body = Implies(conj(atom(a) for a in rule.body), conj(atom(a) for a in rule.head))
    return Forall0(tuple(names), body) if names else body
