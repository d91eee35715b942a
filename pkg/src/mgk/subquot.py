"""Substructures, Z_m and quotients by central subgroups."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import MagmaTable, classify, generate, require_metagroup
from .errors import NotCentral, NotSubgroup, StructuralError, TRangeEscapes


@dataclass(frozen=True)
class SubStructure:
    parent: MagmaTable
    members: tuple

    def __post_init__(self):
        mem = tuple(sorted(set(int(m) for m in self.members)))
        self.parent.check(*mem)
        object.__setattr__(self, "members", mem)

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return int(x) in self._set

    @property
    def _set(self):
        return frozenset(self.members)

    def escapee(self) -> Optional[int]:
        """First element produced by mul/ldiv/rdiv that leaves the set, or None."""
        g = self.parent
        m = np.array(self.members)
        x, y = m[:, None], m[None, :]
        inside = np.zeros(g.order, dtype=bool)
        inside[m] = True
        tables = [g.table]
        if g.is_quasigroup:
            tables += [g.ldiv_table, g.rdiv_table]
        for tab in tables:
            out = tab[x, y]
            bad = out[~inside[out]]
            if bad.size:
                return int(bad.flat[0])
        e = g.identity
        if e is not None and not inside[e]:
            return e
        return None

    def is_closed(self) -> bool:
        return self.escapee() is None

    def as_table(self, name: Optional[str] = None) -> MagmaTable:
        """The substructure as a table in its own right (local indices follow
        ``members`` order)."""
        g = self.parent
        m = np.array(self.members)
        local = np.full(g.order, -1, dtype=np.int64)
        local[m] = np.arange(len(m))
        sub = g.table[m[:, None], m[None, :]]
        if (local[sub] < 0).any():
            raise NotSubgroup(int(sub[local[sub] < 0].flat[0]))
        return MagmaTable(name or f"{g.name}|sub", [g.elem_names[i] for i in m], local[sub])


def closure(g: MagmaTable, generators: Iterable[int]) -> SubStructure:
    return SubStructure(g, generate(g, generators))


def z_m(g: MagmaTable) -> SubStructure:
    """Smallest subgroup of the center containing every associator value."""
    rep = require_metagroup(g)
    return SubStructure(g, rep.z_m)


@dataclass(frozen=True)
class QuotientTable:
    parent: MagmaTable
    z0: SubStructure
    cosets: tuple          # tuple of sorted member tuples, ordered by representative
    coset_of: tuple        # parent index -> coset index
    table: MagmaTable


def quotient_by_central(g: MagmaTable, z0: SubStructure) -> QuotientTable:
    """G/Z0 for a central subgroup Z0 containing all associator values.

    Coset well-definedness is checked rather than assumed, and the result is
    asserted to be a group.
    """
    if z0.parent is not g and not z0.parent.same_operation(g):
        raise StructuralError("z0 belongs to a different table")
    rep = require_metagroup(g)
    center = set(rep.center)
    for z in z0.members:
        if z not in center:
            raise NotCentral(z)
    bad = z0.escapee()
    if bad is not None:
        raise NotSubgroup(bad)
    for t in rep.t_range:
        if t not in z0:
            raise TRangeEscapes(t)

    n = g.order
    zs = np.array(z0.members)
    coset_of = np.full(n, -1, dtype=np.int64)
    cosets = []
    for a in range(n):
        if coset_of[a] >= 0:
            continue
        members = np.unique(g.table[a, zs])
        coset_of[members] = len(cosets)
        cosets.append(tuple(int(x) for x in members))
    reps = np.array([c[0] for c in cosets])
    k = len(cosets)
    qtab = coset_of[g.table[reps[:, None], reps[None, :]]]
    # every representative pair must land in the same coset
    full = coset_of[g.table]
    if not np.array_equal(full, qtab[coset_of[:, None], coset_of[None, :]]):
        pos = np.argwhere(full != qtab[coset_of[:, None], coset_of[None, :]])[0]
        raise StructuralError(f"coset product not well defined at {tuple(int(p) for p in pos)}")
    names = ["{" + ",".join(g.elem_names[i] for i in c) + "}" for c in cosets]
    q = MagmaTable(f"{g.name}/Z0", names, qtab)
    qrep = classify(q)
    if not qrep.is_group:
        raise StructuralError(f"quotient {q.name} is not a group")
    assert k * len(zs) == n
    return QuotientTable(g, z0, tuple(cosets), tuple(int(c) for c in coset_of), q)
