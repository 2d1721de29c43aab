"""Syntactic membership test for the restricted fragment.

Two rules are checked, each with a sound but deliberately conservative
syntactic template:

* R1: inside a sort-1 quantifier block over Z1..Zm, every negatively occurring
  sort-0 block over z1..zn must have the guarded shape
  ``(and zi in Zj ...) -> chi`` so that its negation forces every zi in
  every Zj.
* R2a: inside a sort-2 quantifier block, a negatively occurring sort-0 block
  that is not under a sort-1 block must be ``(not (and <z, z'> = Y ...))``.
* R2b: a sort-1 block inside a sort-2 block must occur positively.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .fourlqs_core import (
    And,
    Forall0,
    Forall1,
    Forall2,
    Formula,
    Mem01,
    Not,
    Or,
    PairEq,
    iter_nodes,
)


class Verdict(enum.Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"


@dataclass(frozen=True)
class Violation:
    rule: str  # "R1" | "R2a" | "R2b"
    path: tuple
    explanation: str

    def render(self) -> str:
        where = "/".join(map(str, self.path)) or "<root>"
        return f"{self.rule}\t{where}\t{self.explanation}"


@dataclass(frozen=True)
class RestrictionReport:
    violations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))

    @property
    def verdict(self) -> Verdict:
        return Verdict.REJECTED if self.violations else Verdict.ACCEPTED

    @property
    def accepted(self) -> bool:
        return not self.violations

    def __add__(self, other: "RestrictionReport") -> "RestrictionReport":
        return RestrictionReport(self.violations + other.violations)


def _relative_nodes(f: Formula, stop=()):
    """(relative path, negated?, node) for nodes below f, not descending
    into node types listed in stop (those nodes are still yielded)."""
    stack = [((), 0, f)]
    while stack:
        path, nots, node = stack.pop()
        yield path, nots % 2 == 1, node
        if path and isinstance(node, stop):
            continue
        bump = 1 if isinstance(node, Not) else 0
        kids = node.children()
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), nots + bump, kids[i]))


def _disjuncts(f):
    if isinstance(f, Or):
        for p in f.parts:
            yield from _disjuncts(p)
    else:
        yield f


def _conjuncts(f):
    if isinstance(f, And):
        for p in f.parts:
            yield from _conjuncts(p)
    else:
        yield f


def entailed_by_negation(matrix: Formula) -> set:
    """Atoms certainly true whenever matrix is false."""
    out = set()
    for d in _disjuncts(matrix):
        if isinstance(d, Not):
            out.update(_conjuncts(d.body))
    return out


def check_restriction1(f: Formula) -> RestrictionReport:
    found = []
    for path, node in iter_nodes(f):
        if not isinstance(node, Forall1):
            continue
        outer = node.vars
        body_path = path + (0,)
        for rel, negated, inner in _relative_nodes(node.body):
            if not (negated and isinstance(inner, Forall0)):
                continue
            have = entailed_by_negation(inner.body)
            missing = [
                (z.name, Z.name)
                for z in inner.vars
                for Z in outer
                if Mem01(z, Z) not in have
            ]
            if missing:
                shown = ", ".join(f"{z} in {Z}" for z, Z in missing)
                found.append(
                    Violation(
                        "R1",
                        body_path + rel,
                        f"negative sort-0 block is not guarded by {shown}",
                    )
                )
    return RestrictionReport(found)


def _pair_template(block, matrix) -> bool:
    if not isinstance(matrix, Not):
        return False
    atoms = list(_conjuncts(matrix.body))
    if not atoms:
        return False
    bound = set(block)
    return all(
        isinstance(a, PairEq) and a.first in bound and a.second in bound for a in atoms
    )


def check_restriction2(f: Formula) -> RestrictionReport:
    found = []
    for path, node in iter_nodes(f):
        if not isinstance(node, Forall2):
            continue
        body_path = path + (0,)
        for rel, negated, inner in _relative_nodes(node.body, stop=(Forall1,)):
            where = body_path + rel
            if isinstance(inner, Forall1):
                if negated:
                    found.append(
                        Violation("R2b", where, "sort-1 block occurs negatively inside a sort-2 block")
                    )
            elif isinstance(inner, Forall0) and negated:
                if not _pair_template(inner.vars, inner.body):
                    found.append(
                        Violation(
                            "R2a",
                            where,
                            "negative sort-0 block is not a negated conjunction of pair equalities",
                        )
                    )
    return RestrictionReport(found)


def is_4lqsr(f: Formula) -> RestrictionReport:
    return check_restriction1(f) + check_restriction2(f)
