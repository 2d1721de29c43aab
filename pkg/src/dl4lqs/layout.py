"""Finite universes shared by the grounding solver and the brute-force oracle.

A universe has ``n_ind`` individual-side elements ``u1..un`` followed by one
block per datatype: its declared constants, then anonymous padding values.
When the KB declares no datatype a default data slot ``*`` keeps the data
domain nonempty.  Individual-side elements may still end up on the data side,
where they stand for data values outside every declared datatype.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dl4_model import NUMBER_RESTRICTIONS, DatatypeMap, KnowledgeBase

DEFAULT_SLOT = "*"


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class Bound:
    n_ind: int
    n_data: tuple = ()  # sorted ((datatype or "*", count), ...)

    def __post_init__(self):
        data = self.n_data.items() if isinstance(self.n_data, dict) else self.n_data
        data = tuple(sorted((str(d), int(n)) for d, n in data))
        object.__setattr__(self, "n_data", data)
        if not isinstance(self.n_ind, int) or self.n_ind < 1:
            raise BoundError("n_ind must be at least 1")
        names = [d for d, _ in data]
        if len(set(names)) != len(names):
            raise BoundError("a datatype is bounded twice")
        for d, n in data:
            if n < 1:
                raise BoundError(f"bound for {d} must be at least 1")

    def count(self, d: str):
        for name, n in self.n_data:
            if name == d:
                return n
        return None

    def render(self) -> str:
        data = ", ".join(f"{d}={n}" for d, n in self.n_data)
        return f"n_ind={self.n_ind}" + (f", {data}" if data else "")

    def to_json(self) -> dict:
        return {"n_ind": self.n_ind, "n_data": dict(self.n_data)}


def compute_default_bound(kb: KnowledgeBase) -> Bound:
    extra = sum(s.n for s in kb.statements if isinstance(s, NUMBER_RESTRICTIONS))
    n_ind = len(kb.signature.individuals) + extra + 1
    dts = kb.datatype_map.datatypes
    if dts:
        data = tuple((d.name, len(d.constants) + 1) for d in dts)
    else:
        data = ((DEFAULT_SLOT, 1),)
    return Bound(n_ind, data)


def complete_bound(bound: Bound, dmap: DatatypeMap) -> Bound:
    """Fill in datatypes the bound does not mention and check the rest."""
    names = set(dmap.names())
    given = dict(bound.n_data)
    for d in given:
        if d != DEFAULT_SLOT and d not in names:
            raise BoundError(f"bound names unknown datatype {d}")
        if d == DEFAULT_SLOT and names:
            raise BoundError("the default data slot only exists without datatypes")
    out = {}
    for dt in dmap.datatypes:
        n = given.get(dt.name, len(dt.constants) + 1)
        if n < max(1, len(dt.constants)):
            raise BoundError(f"bound for {dt.name} is below its {len(dt.constants)} constants")
        out[dt.name] = n
    if not names:
        out[DEFAULT_SLOT] = given.get(DEFAULT_SLOT, 1)
    return Bound(bound.n_ind, tuple(out.items()))


@dataclass(frozen=True)
class Layout:
    bound: Bound
    ind_side: tuple
    blocks: tuple  # ((datatype, elements), ...)
    const_elem: tuple  # ((constant, element), ...)
    default: tuple

    @property
    def elements(self) -> tuple:
        return self.ind_side + tuple(e for _, els in self.blocks for e in els) + self.default

    @property
    def pinned_data(self) -> frozenset:
        return frozenset(e for _, els in self.blocks for e in els) | frozenset(self.default)

    def block(self, d: str) -> tuple:
        for name, els in self.blocks:
            if name == d:
                return els
        raise BoundError(f"no block for datatype {d}")

    def block_of(self, elem):
        for name, els in self.blocks:
            if elem in els:
                return name
        return None

    def element_of_const(self, e: str):
        return dict(self.const_elem)[e]

    def padding(self, d: str, dmap: DatatypeMap) -> tuple:
        return self.block(d)[len(dmap.constants(d)):]


def make_layout(bound: Bound, dmap: DatatypeMap) -> Layout:
    bound = complete_bound(bound, dmap)
    ind = tuple(f"u{i}" for i in range(1, bound.n_ind + 1))
    blocks, consts = [], []
    for dt in dmap.datatypes:
        n = bound.count(dt.name)
        els = [f"{dt.name}:{c}" for c in dt.constants]
        consts += [(c, f"{dt.name}:{c}") for c in dt.constants]
        els += [f"{dt.name}:#{k}" for k in range(1, n - len(dt.constants) + 1)]
        blocks.append((dt.name, tuple(els)))
    default = ()
    if not dmap.datatypes:
        default = tuple(f"{DEFAULT_SLOT}:#{k}" for k in range(1, bound.count(DEFAULT_SLOT) + 1))
    return Layout(bound, ind, tuple(blocks), tuple(consts), default)
