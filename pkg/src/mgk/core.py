"""Cayley tables, divisions, associators and structure classification.

Elements are dense indices ``0..n-1``; every element set is returned as a
sorted tuple of ints so reports are deterministic.  The heavy lifting is
vectorised with numpy: triple scans are chunked along the first variable so
memory stays bounded, and the first counterexample reported is always the
lexicographically smallest failing tuple.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotLoop, NotMetagroup, NotQuasigroup, OrderCapExceeded, StructuralError

DEFAULT_ORDER_CAP = 4096
# elements per vectorised block in triple scans
SCAN_BLOCK = 1 << 21


def order_cap() -> int:
    """Size cap for exhaustive scans; ``MGK_ORDER_CAP`` overrides the default."""
    raw = os.environ.get("MGK_ORDER_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise StructuralError(f"MGK_ORDER_CAP must be an integer, got {raw!r}")
    return DEFAULT_ORDER_CAP


def check_cap(order: int, what: str = "table", cap: Optional[int] = None) -> None:
    cap = order_cap() if cap is None else cap
    if order > cap:
        raise OrderCapExceeded(order, cap, what)


class MagmaTable:
    """A finite set with a total binary operation, stored as an index table.

    ``table[a, b]`` is the index of ``a*b``.  No algebraic law is assumed;
    use :func:`classify` to find out what the table is.
    """

    def __init__(self, name: str, elem_names: Sequence[str], table):
        arr = np.array(table, dtype=np.int64)
        n = len(elem_names)
        if n == 0:
            raise StructuralError("a table needs at least one element")
        if arr.shape != (n, n):
            raise StructuralError(f"table shape {arr.shape} does not match {n} element names")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            bad = np.argwhere((arr < 0) | (arr >= n))[0]
            raise StructuralError(f"entry at {tuple(int(i) for i in bad)} out of range [0, {n})")
        names = tuple(str(s) for s in elem_names)
        if len(set(names)) != n:
            raise StructuralError("element names must be pairwise distinct")
        arr.setflags(write=False)
        self.name = str(name)
        self.elem_names = names
        self.table = arr

    @property
    def order(self) -> int:
        return len(self.elem_names)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"MagmaTable({self.name!r}, order={self.order})"

    def __eq__(self, other):
        if not isinstance(other, MagmaTable):
            return NotImplemented
        return self.elem_names == other.elem_names and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.elem_names, self.table.tobytes()))

    def same_operation(self, other: "MagmaTable") -> bool:
        """Table equality ignoring names."""
        return self.table.shape == other.table.shape and np.array_equal(self.table, other.table)

    def index(self, name: str) -> int:
        try:
            return self.elem_names.index(name)
        except ValueError:
            raise StructuralError(f"{self.name}: no element named {name!r}")

    def check(self, *elems) -> None:
        n = self.order
        for x in elems:
            if not (isinstance(x, (int, np.integer)) and 0 <= x < n):
                raise StructuralError(f"{self.name}: element {x!r} outside [0, {n})")

    def renamed(self, name: str) -> "MagmaTable":
        return MagmaTable(name, self.elem_names, self.table)

    # -- derived tables -------------------------------------------------

    @cached_property
    def _latin(self):
        n = self.order
        target = np.arange(n)
        srt_rows = np.sort(self.table, axis=1)
        bad_rows = np.flatnonzero(~(srt_rows == target).all(axis=1))
        srt_cols = np.sort(self.table, axis=0)
        bad_cols = np.flatnonzero(~(srt_cols == target[:, None]).all(axis=0))
        return bad_rows, bad_cols

    @property
    def is_quasigroup(self) -> bool:
        rows, cols = self._latin
        return rows.size == 0 and cols.size == 0

    @cached_property
    def ldiv_table(self) -> np.ndarray:
        """``ldiv_table[a, b]`` is the unique x with a*x = b."""
        rows, _ = self._latin
        if rows.size:
            raise NotQuasigroup("row", int(rows[0]))
        n = self.order
        out = np.empty((n, n), dtype=np.int64)
        a = np.arange(n)[:, None]
        out[a, self.table] = np.arange(n)[None, :]
        out.setflags(write=False)
        return out

    @cached_property
    def rdiv_table(self) -> np.ndarray:
        """``rdiv_table[b, a]`` is the unique y with y*a = b, i.e. b/a."""
        _, cols = self._latin
        if cols.size:
            raise NotQuasigroup("column", int(cols[0]))
        n = self.order
        out = np.empty((n, n), dtype=np.int64)
        a = np.arange(n)[None, :]
        out[self.table, a] = np.arange(n)[:, None]
        out.setflags(write=False)
        return out

    @cached_property
    def identity(self) -> Optional[int]:
        n = self.order
        ar = np.arange(n)
        rows = (self.table == ar[None, :]).all(axis=1)
        cols = (self.table == ar[:, None]).all(axis=0)
        both = np.flatnonzero(rows & cols)
        return int(both[0]) if both.size else None

    def require_identity(self) -> int:
        e = self.identity
        if e is None:
            raise NotLoop(self.name)
        return e

    # vectorised primitives; arguments may be arrays of any broadcastable shape
    def mul(self, x, y):
        return self.table[x, y]

    def ldiv(self, x, y):
        return self.ldiv_table[x, y]

    def rdiv(self, x, y):
        return self.rdiv_table[x, y]

    def assoc(self, x, y, z):
        """Vectorised ((xy)z)/(x(yz))."""
        t = self.table
        return self.rdiv_table[t[t[x, y], z], t[x, t[y, z]]]


# -- scalar API -----------------------------------------------------------

def mul(g: MagmaTable, a: int, b: int) -> int:
    g.check(a, b)
    return int(g.table[a, b])


def left_div(g: MagmaTable, a: int, b: int) -> int:
    """The unique x with a*x = b."""
    g.check(a, b)
    return int(g.ldiv_table[a, b])


def right_div(g: MagmaTable, a: int, b: int) -> int:
    """The unique y with y*b = a, written a/b."""
    g.check(a, b)
    return int(g.rdiv_table[a, b])


def inv_left(g: MagmaTable, a: int) -> int:
    """a\\e."""
    g.check(a)
    return int(g.ldiv_table[a, g.require_identity()])


def inv_right(g: MagmaTable, a: int) -> int:
    """e/a."""
    g.check(a)
    return int(g.rdiv_table[g.require_identity(), a])


def associator(g: MagmaTable, a: int, b: int, c: int) -> int:
    g.check(a, b, c)
    return int(g.assoc(a, b, c))


def generate(g: MagmaTable, gens) -> tuple:
    """Smallest subset containing ``gens`` and the identity (if any) closed
    under multiplication and both divisions."""
    members = set(int(x) for x in gens)
    g.check(*members)
    e = g.identity
    if e is not None:
        members.add(e)
    if not members:
        return ()
    quasi = g.is_quasigroup
    while True:
        cur = np.array(sorted(members))
        x, y = cur[:, None], cur[None, :]
        found = set(np.unique(g.table[x, y]).tolist())
        if quasi:
            found.update(np.unique(g.ldiv_table[x, y]).tolist())
            found.update(np.unique(g.rdiv_table[x, y]).tolist())
        if found <= members:
            return tuple(int(m) for m in cur)
        members |= found


# -- classification -------------------------------------------------------

@dataclass(frozen=True)
class StructureReport:
    name: str
    order: int
    is_quasigroup: bool
    is_loop: bool
    identity: Optional[int]
    is_metagroup: bool
    is_central_metagroup: bool
    commutant: tuple = ()
    nucleus_left: tuple = ()
    nucleus_middle: tuple = ()
    nucleus_right: tuple = ()
    nucleus: tuple = ()
    center: tuple = ()
    t_range: tuple = ()
    z_m: tuple = ()

    @property
    def is_group(self) -> bool:
        return self.is_metagroup and self.t_range == (self.identity,)

    @property
    def is_commutative(self) -> bool:
        return len(self.commutant) == self.order

    def as_dict(self) -> dict:
        from dataclasses import asdict

        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


def _blocks(n_first: int, rest: int, budget: int = SCAN_BLOCK):
    step = max(1, budget // max(rest, 1))
    for i0 in range(0, n_first, step):
        yield i0, min(n_first, i0 + step)


def classify(g: MagmaTable) -> StructureReport:
    """Exhaustively classify ``g``: quasigroup/loop/metagroup flags plus
    commutant, nuclei, center, associator range and Z_m.

    The report is cached on the (read-only) table.
    """
    check_cap(g.order)
    cached = g.__dict__.get("_report")
    if cached is not None and cached.name == g.name:
        return cached
    rep = _classify(g)
    g.__dict__["_report"] = rep
    return rep


def _classify(g: MagmaTable) -> StructureReport:
    n = g.order
    if not g.is_quasigroup:
        return StructureReport(g.name, n, False, False, None, False, False)
    T = g.table
    e = g.identity
    loop = e is not None
    commutant = (T == T.T).all(axis=1)
    nl = np.zeros(n, dtype=bool)
    nm = np.ones(n, dtype=bool)
    nr = np.ones(n, dtype=bool)
    t_seen = np.zeros(n, dtype=bool)
    RD = g.rdiv_table
    for a0, a1 in _blocks(n, n * n):
        ab = T[a0:a1]                 # (k, n): a*b
        lhs = T[ab]                   # (k, n, n): (a*b)*c
        rhs = T[a0:a1][:, T]          # (k, n, n): a*(b*c)
        eq = lhs == rhs
        nl[a0:a1] = eq.all(axis=(1, 2))
        nm &= eq.all(axis=(0, 2))
        nr &= eq.all(axis=(0, 1))
        if loop:
            t_seen[np.unique(RD[lhs, rhs])] = True
    nucleus = nl & nm & nr
    center = commutant & nucleus
    as_tuple = lambda mask: tuple(int(i) for i in np.flatnonzero(mask))
    if not loop:
        return StructureReport(
            g.name, n, True, False, None, False, False,
            as_tuple(commutant), as_tuple(nl), as_tuple(nm), as_tuple(nr),
            as_tuple(nucleus), as_tuple(center),
        )
    t_range = as_tuple(t_seen)
    is_meta = bool(center[list(t_range)].all())
    is_central = False
    z_m: tuple = ()
    if is_meta:
        t2 = RD[T, T.T]
        is_central = bool(center[np.unique(t2)].all())
        z_m = generate(g, t_range)
    return StructureReport(
        g.name, n, True, True, e, is_meta, is_central,
        as_tuple(commutant), as_tuple(nl), as_tuple(nm), as_tuple(nr),
        as_tuple(nucleus), as_tuple(center), t_range, z_m,
    )


def require_metagroup(g: MagmaTable, report: Optional[StructureReport] = None) -> StructureReport:
    rep = report or classify(g)
    if not rep.is_metagroup:
        witness = None
        if rep.is_loop:
            center = set(rep.center)
            bad = [t for t in rep.t_range if t not in center]
            witness = bad[0] if bad else None
        raise NotMetagroup(g.name, witness)
    return rep


def associator_table(g: MagmaTable) -> np.ndarray:
    """Full n x n x n array of associator values (small tables only)."""
    check_cap(g.order)
    n = g.order
    ar = np.arange(n)
    return g.assoc(ar[:, None, None], ar[None, :, None], ar[None, None, :])


# -- inverse-opposite metagroups ------------------------------------------

def opposite_inv_metagroup(g: MagmaTable, side: str = "right") -> MagmaTable:
    """Metagroup on the inverted carrier with reversed multiplication.

    Index ``i`` of the result stands for the element ``e/i`` (side="right")
    or ``i\\e`` (side="left") of ``g``; the product of ``^i`` and ``^j`` is the
    hat of ``(^j)(^i)`` computed in ``g``.
    """
    require_metagroup(g)
    e = g.identity
    n = g.order
    ar = np.arange(n)
    if side == "right":
        hat = g.rdiv_table[e, ar]                     # e/a
        prod = g.table[hat[None, :], hat[:, None]]    # (e/a_j)(e/a_i)
        table = g.ldiv_table[prod, e]                 # back through Inv_l
        names = [f"inv_r({s})" for s in g.elem_names]
    elif side == "left":
        hat = g.ldiv_table[ar, e]                     # a\e
        prod = g.table[hat[None, :], hat[:, None]]
        table = g.rdiv_table[e, prod]
        names = [f"inv_l({s})" for s in g.elem_names]
    else:
        raise StructuralError(f"side must be 'left' or 'right', not {side!r}")
    return MagmaTable(f"Inv_{side[0]}({g.name})", names, table)


# -- exhaustive identity suite --------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    id: str
    statement: str
    passed: bool
    checked: int
    witness: Optional[tuple] = None

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        w = "" if self.witness is None else f" witness={list(self.witness)}"
        return f"{self.id}: {status} ({self.checked} tuples){w}"


def first_failure(domains: Sequence[np.ndarray], holds: Callable, budget: int = SCAN_BLOCK):
    """Scan the product of ``domains`` in lexicographic order.

    ``holds`` receives open-grid index arrays and returns a boolean array.
    Returns ``(count_checked, witness_or_None)``.
    """
    domains = [np.asarray(d, dtype=np.int64) for d in domains]
    shape_rest = [len(d) for d in domains[1:]]
    rest = int(np.prod(shape_rest)) if shape_rest else 1
    checked = 0
    for i0, i1 in _blocks(len(domains[0]), rest, budget):
        grids = np.ix_(domains[0][i0:i1], *domains[1:])
        ok = np.broadcast_to(holds(*grids), (i1 - i0, *shape_rest))
        if not ok.all():
            pos = np.argwhere(~ok)[0]
            checked += int(np.ravel_multi_index(tuple(pos), ok.shape)) + 1
            witness = (int(domains[0][i0 + pos[0]]),) + tuple(
                int(domains[k + 1][pos[k + 1]]) for k in range(len(shape_rest)))
            return checked, witness
        checked += ok.size
    return checked, None


def _identity_suite(g: MagmaTable, center: np.ndarray):
    e = g.identity
    M, LD, RD = g.table, g.ldiv_table, g.rdiv_table
    n = g.order
    ar = np.arange(n)
    li = LD[ar, e]          # a\e
    ri = RD[e, ar]          # e/a
    t = g.assoc

    def mul(x, y):
        return M[x, y]

    def ld(x, y):
        return LD[x, y]

    def rd(x, y):
        return RD[x, y]

    pair = [ar, ar]
    triple = [ar, ar, ar]
    suite = []

    suite.append(("2.2.1", "b\\e = (e/b) t(e/b, b, b\\e)", [ar],
                  lambda b: li[b] == mul(ri[b], t(ri[b], b, li[b]))))
    suite.append(("2.2.2", "(a\\e)b = (a\\b) t(e/a,a,a\\e) / t(e/a,a,a\\b)", pair,
                  lambda a, b: mul(li[a], b) == rd(mul(ld(a, b), t(ri[a], a, li[a])), t(ri[a], a, ld(a, b)))))
    suite.append(("2.2.3", "b(e/a) = (b/a) t(b/a,a,a\\e) / t(e/a,a,a\\e)", pair,
                  lambda a, b: mul(b, ri[a]) == rd(mul(rd(b, a), t(rd(b, a), a, li[a])), t(ri[a], a, li[a]))))
    suite.append(("2.2.4", "b(b\\a) = a and b\\(ba) = a", pair,
                  lambda a, b: (mul(b, ld(b, a)) == a) & (ld(b, mul(b, a)) == a)))
    suite.append(("2.2.5", "(a/b)b = a and (ab)/b = a", pair,
                  lambda a, b: (mul(rd(a, b), b) == a) & (rd(mul(a, b), b) == a)))
    # Changing one slot at a time by a central factor, over all tuples,
    # is equivalent to the full quantification over (p1, p2, p3).
    suite.append(("2.3.1", "t(p1 a1, p2 a2, p3 a3) = t(a1, a2, a3) for p_i in Z(G)", [center, ar, ar, ar],
                  lambda p, a1, a2, a3: (t(mul(p, a1), a2, a3) == t(a1, a2, a3))
                  & (t(a1, mul(p, a2), a3) == t(a1, a2, a3))
                  & (t(a1, a2, mul(p, a3)) == t(a1, a2, a3))))
    suite.append(("2.3.2", "t(a, a\\e, a) t(a\\e, a, e/a) = e", [ar],
                  lambda a: mul(t(a, li[a], a), t(li[a], a, ri[a])) == e))
    suite.append(("2.3.4", "b/(pa) = p^-1 (b/a) and b/p = p\\b = b p^-1 for p in Z(G)", [center, ar, ar],
                  lambda p, a, b: (rd(b, mul(p, a)) == mul(ri[p], rd(b, a)))
                  & (rd(b, p) == ld(p, b)) & (rd(b, p) == mul(b, ri[p]))))
    suite.append(("2.6.1", "e/(ab) = (e/b)(e/a) t(e/a,a,b) / t(e/b,e/a,ab)", pair,
                  lambda a, b: ri[mul(a, b)] == rd(mul(mul(ri[b], ri[a]), t(ri[a], a, b)),
                                                    t(ri[b], ri[a], mul(a, b)))))
    suite.append(("2.6.2", "(ab)\\e = (b\\e)(a\\e) t(ab,b\\e,a\\e) / t(a,b,b\\e)", pair,
                  lambda a, b: li[mul(a, b)] == rd(mul(mul(li[b], li[a]), t(mul(a, b), li[b], li[a])),
                                                    t(a, b, li[b]))))
    suite.append(("2.6.3", "a/(bc) = ((a/c)/b) t(a/(bc), b, c)", triple,
                  lambda a, b, c: rd(a, mul(b, c)) == mul(rd(rd(a, c), b), t(rd(a, mul(b, c)), b, c))))
    suite.append(("2.6.4", "(bc)\\a = (c\\(b\\a)) / t(b, c, (bc)\\a)", triple,
                  lambda a, b, c: ld(mul(b, c), a) == rd(ld(c, ld(b, a)), t(b, c, ld(mul(b, c), a)))))
    return suite


CORE_IDENTITIES = ("2.2.1", "2.2.2", "2.2.3", "2.2.4", "2.2.5", "2.3.1", "2.3.2", "2.3.4",
                   "2.6.1", "2.6.2", "2.6.3", "2.6.4")


def verify_core_identities(g: MagmaTable, only: Optional[Sequence[str]] = None) -> list:
    """Check the metagroup identity suite exhaustively.

    Returns one :class:`IdentityCheck` per identity, in suite order.  Raises
    :class:`NotMetagroup` if ``g`` is not a metagroup.
    """
    rep = require_metagroup(g)
    center = np.array(rep.center, dtype=np.int64)
    wanted = None if only is None else set(only)
    if wanted is not None:
        unknown = wanted - set(CORE_IDENTITIES)
        if unknown:
            raise StructuralError(f"unknown identity id(s): {sorted(unknown)}")
    out = []
    for ident, stmt, domains, holds in _identity_suite(g, center):
        if wanted is not None and ident not in wanted:
            continue
        checked, witness = first_failure(domains, holds)
        out.append(IdentityCheck(ident, stmt, witness is None, checked, witness))
    return out
