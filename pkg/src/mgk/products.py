"""Direct, smashed and smashed twisted products of metagroups.

Encodings
---------
* ``direct_product``: mixed radix, factor 0 most significant.
* smashed products: the pair ``(a, b)`` has index ``a * |B| + b``.
* Factor tables hold indices into the Z table: ``phi[a, b]`` is ``b^a`` (a
  B-index), ``eta[v, u, b]``, ``kappa[u, c, b]`` and ``xi[p, q]`` with ``p, q``
  pair indices are Z-indices.

The carrier is the plain Cartesian product A x B.  For the construction to be
a metagroup on that carrier (rather than on a quotient by the relation that
identifies ``(gv, b)`` with ``(v, gb)``), the factors must also be invariant
under Z in the B-slots; ``validate_factors`` reports this as ``3.2.2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product as iproduct
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .core import MagmaTable, StructureReport, check_cap, classify, first_failure, require_metagroup
from .errors import InvalidFactors, NotMetagroup, SearchSpaceExceeded, StructuralError
from .subquot import SubStructure


# -- direct products -----------------------------------------------------

def direct_product(gs: Sequence[MagmaTable], name: Optional[str] = None,
                   require: bool = True) -> MagmaTable:
    """Componentwise product; index is mixed radix with factor 0 most significant."""
    gs = list(gs)
    if not gs:
        raise StructuralError("direct_product needs at least one factor")
    check_cap(int(np.prod([g.order for g in gs])), "direct product")
    if require:
        for g in gs:
            require_metagroup(g)
    if len(gs) == 1:
        return gs[0]
    table = gs[0].table
    names = [(s,) for s in gs[0].elem_names]
    for g in gs[1:]:
        n, m = table.shape[0], g.order
        table = (table[:, None, :, None] * m + g.table[None, :, None, :]).reshape(n * m, n * m)
        names = [x + (s,) for x in names for s in g.elem_names]
    label = name or " x ".join(g.name for g in gs)
    return MagmaTable(label, ["(" + ",".join(t) + ")" for t in names], table)


def split_index(gs: Sequence[MagmaTable], x) -> tuple:
    """Components of a mixed-radix index (vectorised)."""
    x = np.asarray(x)
    out = []
    for g in reversed(gs):
        out.append(x % g.order)
        x = x // g.order
    return tuple(reversed(out))


@dataclass(frozen=True)
class CheckResult:
    id: str
    passed: bool
    checked: int
    witness: Optional[tuple] = None

    def line(self) -> str:
        w = "" if self.witness is None else f" witness={list(self.witness)}"
        return f"{self.id}: {'pass' if self.passed else 'FAIL'} ({self.checked} checked){w}"


def check_direct_laws(prod: MagmaTable, gs: Sequence[MagmaTable]) -> List[CheckResult]:
    """Componentwise associator law and center = product of centers."""
    n = prod.order
    ar = np.arange(n)
    comps = split_index(gs, ar)

    def holds(x, y, z):
        ok = True
        t = split_index(gs, prod.assoc(x, y, z))
        for g, c, tc in zip(gs, comps, t):
            ok = ok & (tc == g.assoc(c[x], c[y], c[z]))
        return ok

    checked, w = first_failure([ar, ar, ar], holds)
    out = [CheckResult("3.1.8", w is None, checked, w)]
    centers = [set(classify(g).center) for g in gs]
    pc = set(classify(prod).center)
    bad = [int(x) for x in ar
           if (int(x) in pc) != all(int(c[x]) in cz for c, cz in zip(comps, centers))]
    out.append(CheckResult("3.1.1", not bad, n, (bad[0],) if bad else None))
    return out


# -- central embeddings and factor specs --------------------------------

@dataclass(frozen=True, eq=False)
class CentralEmbedding:
    z_table: MagmaTable
    into_a: tuple
    into_b: tuple

    def __post_init__(self):
        object.__setattr__(self, "into_a", tuple(int(x) for x in self.into_a))
        object.__setattr__(self, "into_b", tuple(int(x) for x in self.into_b))
        n = self.z_table.order
        if len(self.into_a) != n or len(self.into_b) != n:
            raise StructuralError("embedding arrays must have one entry per Z element")

    @property
    def order(self) -> int:
        return self.z_table.order


def trivial_embedding(a: MagmaTable, b: MagmaTable) -> CentralEmbedding:
    z = MagmaTable("Z1", ["e"], [[0]])
    return CentralEmbedding(z, (a.require_identity(),), (b.require_identity(),))


def _frozen(arr, shape, what):
    out = np.array(arr, dtype=np.int64)
    if out.shape != shape:
        raise StructuralError(f"{what} has shape {out.shape}, expected {shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SmashedSpec:
    a: MagmaTable
    b: MagmaTable
    z: CentralEmbedding
    phi: np.ndarray
    eta: np.ndarray
    kappa: np.ndarray
    xi: np.ndarray
    strict_unit: bool = True

    def __post_init__(self):
        na, nb = self.a.order, self.b.order
        object.__setattr__(self, "phi", _frozen(self.phi, (na, nb), "phi"))
        object.__setattr__(self, "eta", _frozen(self.eta, (na, na, nb), "eta"))
        object.__setattr__(self, "kappa", _frozen(self.kappa, (na, nb, nb), "kappa"))
        object.__setattr__(self, "xi", _frozen(self.xi, (na * nb, na * nb), "xi"))
        if self.phi.min() < 0 or self.phi.max() >= nb:
            raise StructuralError("phi entries must be B indices")
        nz = self.z.order
        for nm in ("eta", "kappa", "xi"):
            arr = getattr(self, nm)
            if arr.min() < 0 or arr.max() >= nz:
                raise StructuralError(f"{nm} entries must be Z indices")

    def key(self) -> bytes:
        return b"".join(x.tobytes() for x in (self.phi, self.eta, self.kappa, self.xi))

    def __eq__(self, other):
        if not isinstance(other, SmashedSpec):
            return NotImplemented
        return (self.a == other.a and self.b == other.b and self.z.z_table == other.z.z_table
                and self.z.into_a == other.z.into_a and self.z.into_b == other.z.into_b
                and self.key() == other.key() and self.strict_unit == other.strict_unit)

    def __hash__(self):
        return hash(self.key())

    def pair(self, a, b):
        return np.asarray(a) * self.b.order + np.asarray(b)

    def unpair(self, p):
        p = np.asarray(p)
        return p // self.b.order, p % self.b.order


class _Z:
    """Array helpers for Z and its two embeddings."""

    def __init__(self, spec: SmashedSpec):
        z = spec.z
        self.table = z.z_table.table
        self.e = z.z_table.identity
        if self.e is None:
            raise StructuralError("Z must have an identity")
        self.into_a = np.array(z.into_a, dtype=np.int64)
        self.into_b = np.array(z.into_b, dtype=np.int64)
        self.inv = z.z_table.rdiv_table[self.e] if z.z_table.is_quasigroup else None
        self.from_b = np.full(spec.b.order, -1, dtype=np.int64)
        self.from_b[self.into_b[::-1]] = np.arange(z.order)[::-1]
        self.from_a = np.full(spec.a.order, -1, dtype=np.int64)
        self.from_a[self.into_a[::-1]] = np.arange(z.order)[::-1]

    def mul(self, *xs):
        out = xs[0]
        for x in xs[1:]:
            out = self.table[out, x]
        return out

    def div(self, x, y):
        return self.table[x, self.inv[y]]


def trivial_factors(a: MagmaTable, b: MagmaTable, z: Optional[CentralEmbedding] = None) -> SmashedSpec:
    """phi = identity action, eta = kappa = xi = e."""
    z = z or trivial_embedding(a, b)
    na, nb = a.order, b.order
    ez = z.z_table.require_identity()
    return SmashedSpec(a, b, z, np.tile(np.arange(nb), (na, 1)),
                       np.full((na, na, nb), ez), np.full((na, nb, nb), ez),
                       np.full((na * nb, na * nb), ez))


def forced_eta(a: MagmaTable, b: MagmaTable, z: CentralEmbedding, phi) -> np.ndarray:
    """eta(v, u, b) = b^{vu} \\ (b^u)^v as a Z index; raises if it leaves Z."""
    phi = np.asarray(phi)
    ar_a = np.arange(a.order)
    v, u, bb = np.ix_(ar_a, ar_a, np.arange(b.order))
    lhs = phi[v, phi[u, bb]]
    rhs = phi[a.table[v, u], bb]
    val = b.ldiv_table[rhs, lhs]
    return _to_z(b, z, val, "3.2.4")


def forced_kappa(a: MagmaTable, b: MagmaTable, z: CentralEmbedding, phi) -> np.ndarray:
    """kappa(u, c, b) = (c^u b^u) \\ (cb)^u as a Z index; raises if it leaves Z."""
    phi = np.asarray(phi)
    ar_b = np.arange(b.order)
    u, c, bb = np.ix_(np.arange(a.order), ar_b, ar_b)
    lhs = phi[u, b.table[c, bb]]
    rhs = b.table[phi[u, c], phi[u, bb]]
    return _to_z(b, z, b.ldiv_table[rhs, lhs], "3.2.6")


def _to_z(b, z, val, cond):
    from_b = np.full(b.order, -1, dtype=np.int64)
    from_b[np.array(z.into_b)[::-1]] = np.arange(z.order)[::-1]
    out = from_b[val]
    if (out < 0).any():
        raise InvalidFactors(cond, tuple(int(i) for i in np.argwhere(out < 0)[0]))
    return out


def from_action(a: MagmaTable, b: MagmaTable, z: Optional[CentralEmbedding], phi,
                xi=None) -> SmashedSpec:
    """Spec with the given action; eta and kappa are the values it forces."""
    z = z or trivial_embedding(a, b)
    phi = np.asarray(phi, dtype=np.int64)
    if xi is None:
        n = a.order * b.order
        xi = np.full((n, n), z.z_table.require_identity())
    return SmashedSpec(a, b, z, phi, forced_eta(a, b, z, phi), forced_kappa(a, b, z, phi), xi)


# -- validation -----------------------------------------------------------

FACTOR_CONDITIONS = ("3.2.1", "3.2.2", "3.2.3", "3.2.4", "3.2.5", "3.2.6", "3.2.7", "3.2.8")


@dataclass
class FactorReport:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def first_failure(self) -> Optional[CheckResult]:
        for r in self.results:
            if not r.passed:
                return r
        return None

    def lines(self) -> List[str]:
        return [r.line() for r in self.results]

    def raise_if_invalid(self):
        bad = self.first_failure()
        if bad is not None:
            raise InvalidFactors(bad.id, bad.witness)


def _scan(cond, mask_ok) -> CheckResult:
    mask_ok = np.asarray(mask_ok)
    if mask_ok.all():
        return CheckResult(cond, True, int(mask_ok.size))
    pos = np.argwhere(~mask_ok)[0]
    return CheckResult(cond, False, int(np.ravel_multi_index(tuple(pos), mask_ok.shape)) + 1,
                       tuple(int(p) for p in pos))


def _check_embedding(spec: SmashedSpec) -> CheckResult:
    z = spec.z.z_table
    zr = classify(z)
    if not (zr.is_group and zr.is_commutative):
        return CheckResult("3.2.1", False, 1, ("Z not a commutative group",))
    for side, g, emb in (("A", spec.a, spec.z.into_a), ("B", spec.b, spec.z.into_b)):
        rep = classify(g)
        if not rep.is_metagroup:
            return CheckResult("3.2.1", False, 1, (f"{side} not a metagroup",))
        emb = np.array(emb)
        if len(set(emb.tolist())) != len(emb):
            return CheckResult("3.2.1", False, 1, (f"into_{side.lower()} not injective",))
        hom = emb[z.table] == g.table[emb[:, None], emb[None, :]]
        if not hom.all():
            x, y = np.argwhere(~hom)[0]
            return CheckResult("3.2.1", False, 1, (f"into_{side.lower()} not a homomorphism", int(x), int(y)))
        center = set(rep.center)
        for x in emb:
            if int(x) not in center:
                return CheckResult("3.2.1", False, 1, (f"into_{side.lower()} leaves the center", int(x)))
        image = set(emb.tolist())
        for x in rep.z_m:
            if x not in image:
                return CheckResult("3.2.1", False, 1, (f"Z_m({side}) not inside the image", int(x)))
    return CheckResult("3.2.1", True, z.order)


def validate_factors(spec: SmashedSpec) -> FactorReport:
    """Check every smashing-factor condition exhaustively; first witness per id.

    Witness tuples are indices in the order the condition's variables are
    quantified (Z elements first where a gamma is involved).
    """
    rep = FactorReport()
    emb = _check_embedding(spec)
    rep.results.append(emb)
    if not emb.passed:
        # later conditions need working Z arithmetic and divisions
        for c in FACTOR_CONDITIONS[1:]:
            rep.results.append(CheckResult(c, False, 0, ("skipped: 3.2.1 failed",)))
        return rep
    Z = _Z(spec)
    A, B = spec.a, spec.b
    TA, TB = A.table, B.table
    eA, eB, eZ = A.identity, B.identity, Z.e
    na, nb, nz = A.order, B.order, spec.z.order
    phi, eta, kappa, xi = spec.phi, spec.eta, spec.kappa, spec.xi
    ga, gb = Z.into_a, Z.into_b
    zs = np.arange(nz)
    ar_a, ar_b = np.arange(na), np.arange(nb)
    xi4 = xi.reshape(na, nb, na, nb)

    # each phi(a) is a bijection of B
    rows_ok = np.array([len(np.unique(phi[u])) == nb for u in range(na)])
    rep.results.append(("3.2.3", rows_ok))

    # carrier compatibility: phi(gu) = phi(u), g^u = g,
    # xi invariant under Z in both B-slots
    g, u, bb = np.ix_(zs, ar_a, ar_b)
    ok_phi = phi[TA[ga[g], u], bb] == phi[u, bb]
    ok_fix = phi[np.ix_(ar_a, gb)] == gb[None, :]
    g, u, c, v, bb = np.ix_(zs, ar_a, ar_b, ar_a, ar_b)
    base = xi4[u, c, v, bb]
    ok_xc = xi4[u, TB[gb[g], c], v, bb] == base
    ok_xb = xi4[u, c, v, TB[gb[g], bb]] == base
    rep.results.append(("3.2.2", [ok_phi, ok_fix, ok_xc, ok_xb]))

    # phi fixes e, phi(e) = id, and phi(v) phi(u) = phi(vu) up to eta
    v, u, bb = np.ix_(ar_a, ar_a, ar_b)
    lhs = phi[v, phi[u, bb]]
    rhs = TB[phi[TA[v, u], bb], gb[eta[v, u, bb]]]
    rep.results.append(("3.2.4", [phi[:, eB] == eB, phi[eA] == ar_b, lhs == rhs]))

    # eta is Z-invariant in its B slot
    g, v, u, bb = np.ix_(zs, ar_a, ar_a, ar_b)
    rep.results.append(("3.2.5", eta[v, u, TB[gb[g], bb]] == eta[v, u, bb]))

    # phi(u) multiplicative up to kappa
    u, c, bb = np.ix_(ar_a, ar_b, ar_b)
    lhs = phi[u, TB[c, bb]]
    rhs = TB[TB[phi[u, c], phi[u, bb]], gb[kappa[u, c, bb]]]
    rep.results.append(("3.2.6", lhs == rhs))

    # kappa Z-invariant in both B slots, trivial on Z
    g, u, c, bb = np.ix_(zs, ar_a, ar_b, ar_b)
    base = kappa[u, c, bb]
    g2, u2, bb2 = np.ix_(zs, ar_a, ar_b)
    rep.results.append(("3.2.7", [kappa[u, TB[gb[g], c], bb] == base,
                                   kappa[u, c, TB[gb[g], bb]] == base,
                                   kappa[u2, gb[g2], bb2] == eZ,
                                   kappa[u2, bb2, gb[g2]] == eZ]))

    # xi Z-invariant in both A slots; unit when one side is in Z
    g, u, c, v, bb = np.ix_(zs, ar_a, ar_b, ar_a, ar_b)
    base = xi4[u, c, v, bb]
    checks = [xi4[TA[ga[g], u], c, v, bb] == base, xi4[u, c, TA[ga[g], v], bb] == base]
    if spec.strict_unit:
        g2, v2, bb2 = np.ix_(zs, ar_a, ar_b)
        checks += [xi4[ga[g2], eB, v2, bb2] == eZ, xi4[v2, bb2, ga[g2], eB] == eZ]
    rep.results.append(("3.2.8", checks))

    out = [rep.results[0]]
    for cond, masks in rep.results[1:]:
        if not isinstance(masks, list):
            masks = [masks]
        res = CheckResult(cond, True, 0)
        total = 0
        for m in masks:
            r = _scan(cond, m)
            if not r.passed:
                res = CheckResult(cond, False, total + r.checked, r.witness)
                break
            total += r.checked
        else:
            res = CheckResult(cond, True, total)
        out.append(res)
    rep.results = sorted(out, key=lambda r: FACTOR_CONDITIONS.index(r.id))
    return rep


# -- product tables -------------------------------------------------------

def _product_table(spec: SmashedSpec, twisted: bool) -> np.ndarray:
    A, B = spec.a, spec.b
    na, nb = A.order, B.order
    Z = _Z(spec)
    p = np.arange(na * nb)
    a, b = p // nb, p % nb
    a1, b1 = a[:, None], b[:, None]
    a2, b2 = a[None, :], b[None, :]
    acted = spec.phi[a1, b2]
    core = B.table[acted, b1] if twisted else B.table[b1, acted]
    bpart = B.table[Z.into_b[spec.xi], core]
    return A.table[a1, a2] * nb + bpart


def _pair_names(spec):
    return [f"({x},{y})" for x in spec.a.elem_names for y in spec.b.elem_names]


def smashed_product(spec: SmashedSpec, validate: bool = True) -> MagmaTable:
    """(a1,b1)(a2,b2) = (a1a2, xi b1 b2^{a1})."""
    check_cap(spec.a.order * spec.b.order, "smashed product")
    if validate:
        validate_factors(spec).raise_if_invalid()
    return MagmaTable(f"{spec.a.name} (x) {spec.b.name}", _pair_names(spec), _product_table(spec, False))


def smashed_twisted_product(spec: SmashedSpec, validate: bool = True) -> MagmaTable:
    """(a1,b1)*(a2,b2) = (a1a2, xi b2^{a1} b1)."""
    check_cap(spec.a.order * spec.b.order, "smashed twisted product")
    if validate:
        validate_factors(spec).raise_if_invalid()
    return MagmaTable(f"{spec.a.name} (*) {spec.b.name}", _pair_names(spec), _product_table(spec, True))


def closed_form_associator(spec: SmashedSpec, x, y, w, twisted: bool = False):
    """Associator of the product from the factor data alone (vectorised).

    Returns the pair index of ``(t_A(a1,a2,a3), zeta)``.  For the untwisted
    product

        zeta = t_B(b1, b2^a1, b3^(a1a2)) xi12 xi(12,3)
               / (xi(1,23) [xi23]^a1 kappa(a1, b2, b3^a2) eta(a1, a2, b3))

    and for the twisted one

        zeta = xi12 xi(12,3)
               / (t_B(b3^(a1a2), b2^a1, b1) xi(1,23) [xi23]^a1 kappa(a1, b3^a2, b2) eta(a1, a2, b3)).
    """
    A, B = spec.a, spec.b
    nb = B.order
    Z = _Z(spec)
    phi, xi, eta, kappa = spec.phi, spec.xi, spec.eta, spec.kappa
    a1, b1 = np.divmod(np.asarray(x), nb)
    a2, b2 = np.divmod(np.asarray(y), nb)
    a3, b3 = np.divmod(np.asarray(w), nb)
    TA, TB = A.table, B.table
    a12, a23 = TA[a1, a2], TA[a2, a3]
    xi12 = xi[x, y]
    xi23 = xi[y, w]
    xi23_act = Z.from_b[phi[a1, Z.into_b[xi23]]]
    eta_ = eta[a1, a2, b3]
    if not twisted:
        b12 = TB[b1, phi[a1, b2]]
        b23 = TB[b2, phi[a2, b3]]
        tB = Z.from_b[B.assoc(b1, phi[a1, b2], phi[a12, b3])]
        num = Z.mul(tB, xi12, xi[a12 * nb + b12, w])
        den = Z.mul(xi[x, a23 * nb + b23], xi23_act, kappa[a1, b2, phi[a2, b3]], eta_)
    else:
        b12 = TB[phi[a1, b2], b1]
        b23 = TB[phi[a2, b3], b2]
        tB = Z.from_b[B.assoc(phi[a12, b3], phi[a1, b2], b1)]
        num = Z.mul(xi12, xi[a12 * nb + b12, w])
        den = Z.mul(tB, xi[x, a23 * nb + b23], xi23_act, kappa[a1, phi[a2, b3], b2], eta_)
    zeta = Z.div(num, den)
    return A.assoc(a1, a2, a3) * nb + Z.into_b[zeta]


def check_closed_form(spec: SmashedSpec, table: MagmaTable, twisted: bool = False) -> CheckResult:
    n = table.order
    ar = np.arange(n)
    checked, w = first_failure([ar, ar, ar], lambda x, y, z: table.assoc(x, y, z)
                               == closed_form_associator(spec, x, y, z, twisted))
    return CheckResult("3.4.2" if twisted else "3.3.2", w is None, checked, w)


# -- inverses and divisions -----------------------------------------------

def formula_inverses(spec: SmashedSpec, twisted: bool = False):
    """(e,e)/(a,b) and (a,b)\\(e,e) for every pair, from the factor data.

    The xi argument uses the Z-coset representative of the solution's
    B-part (``e/b^(e/a)`` or ``b^(e/a)\\e``), which is where the solution
    actually lives.
    """
    A, B = spec.a, spec.b
    na, nb = A.order, B.order
    Z = _Z(spec)
    eA, eB = A.identity, B.identity
    p = np.arange(na * nb)
    a, b = p // nb, p % nb
    xi, phi, eta = spec.xi, spec.phi, spec.eta
    # right inverse
    a1 = A.rdiv_table[eA, a]
    bt = phi[a1, b]                                          # b^(e/a)
    if not twisted:
        rep_b1 = B.rdiv_table[eB, bt]
        x = Z.into_b[xi[a1 * nb + rep_b1, p]]
        b1 = B.rdiv_table[eB, B.table[x, bt]]
    else:
        rep_b1 = B.ldiv_table[bt, eB]
        x = Z.into_b[xi[a1 * nb + rep_b1, p]]
        b1 = B.ldiv_table[B.table[x, bt], eB]
    right = a1 * nb + b1
    # left inverse
    a2 = A.ldiv_table[a, eA]
    base = B.ldiv_table[b, eB] if not twisted else B.rdiv_table[eB, b]
    cand = phi[a1, base]                                     # (b\e)^(e/a) or (e/b)^(e/a)
    xz = xi[p, a2 * nb + cand]
    xz_act = Z.from_b[phi[a1, Z.into_b[xz]]]
    den = Z.into_b[Z.mul(xz_act, eta[a1, a, cand])]
    b2 = B.rdiv_table[cand, den]
    left = a2 * nb + b2
    return right, left


def check_inverse_formulas(spec: SmashedSpec, table: MagmaTable, twisted: bool = False) -> List[CheckResult]:
    e = table.require_identity()
    right, left = formula_inverses(spec, twisted)
    n = table.order
    ar = np.arange(n)
    ids = ("3.4.5", "3.4.8", "3.4.9", "3.4.10") if twisted else ("3.3.5", "3.3.8", "3.3.9", "3.3.10")
    out = [_scan(ids[0], right == table.rdiv_table[e, ar]),
           _scan(ids[1], left == table.ldiv_table[ar, e])]
    M, RD, t = table.table, table.rdiv_table, table.assoc
    r_inv, l_inv = RD[e, ar], table.ldiv_table[ar, e]

    def ldiv_formula(x, y):
        u = M[l_inv[x], y]
        return RD[M[u, t(r_inv[x], x, u)], t(r_inv[x], x, l_inv[x])]

    def rdiv_formula(y, x):
        u = M[y, r_inv[x]]
        return RD[M[u, t(r_inv[x], x, l_inv[x])], t(u, x, l_inv[x])]

    x, y = np.ix_(ar, ar)
    out.append(_scan(ids[2], ldiv_formula(x, y) == table.ldiv_table[x, y]))
    out.append(_scan(ids[3], rdiv_formula(y, x) == table.rdiv_table[y, x]))
    return out


# -- normality ------------------------------------------------------------

def _as_members(h) -> np.ndarray:
    return np.array(h.members if isinstance(h, SubStructure) else sorted(h), dtype=np.int64)


def almost_normal_witness(g: MagmaTable, h) -> Optional[int]:
    m = _as_members(h)
    left = np.sort(g.table[:, m], axis=1)       # xH
    right = np.sort(g.table[m, :].T, axis=1)    # Hx
    bad = np.flatnonzero((left != right).any(axis=1))
    return int(bad[0]) if bad.size else None


def almost_normal(g: MagmaTable, h) -> bool:
    return almost_normal_witness(g, h) is None


def normal_witness(g: MagmaTable, h) -> Optional[tuple]:
    w = almost_normal_witness(g, h)
    if w is not None:
        return ("almost", w)
    m = _as_members(h)
    T = g.table
    ar = np.arange(g.order)
    xH = T[:, m]                                   # (x, h)
    Hk = T[m, :]                                   # (h, k)
    for x in range(g.order):
        a = np.sort(T[xH[x][None, :], ar[:, None]], axis=1)        # (xH)k, rows k
        b = np.sort(T[x, Hk.T], axis=1)                             # x(Hk)
        c = np.sort(T[ar[:, None], xH[x][None, :]], axis=1)        # k(xH)
        d = np.sort(T[T[ar, x][:, None], m[None, :]], axis=1)      # (kx)H
        bad = np.flatnonzero((a != b).any(axis=1) | (c != d).any(axis=1))
        if bad.size:
            return (x, int(bad[0]))
    return None


def normal(g: MagmaTable, h) -> bool:
    return normal_witness(g, h) is None


def b_slice(spec: SmashedSpec, table: MagmaTable) -> SubStructure:
    e = spec.a.require_identity()
    nb = spec.b.order
    return SubStructure(table, [e * nb + b for b in range(nb)])


def z_image(spec: SmashedSpec) -> list:
    """Indices of (gamma, e) in the product."""
    nb, eB = spec.b.order, spec.b.require_identity()
    return [int(x) * nb + eB for x in spec.z.into_a]


# -- full product report --------------------------------------------------

@dataclass
class ProductReport:
    kind: str
    table: MagmaTable
    structure: StructureReport
    checks: List[CheckResult]

    @property
    def ok(self) -> bool:
        return self.structure.is_metagroup and all(c.passed for c in self.checks)


def build_and_check(spec: SmashedSpec, twisted: bool = False) -> ProductReport:
    """Build the product and run every cross-check that applies to it."""
    table = (smashed_twisted_product if twisted else smashed_product)(spec)
    rep = classify(table)
    checks = [CheckResult("metagroup", rep.is_metagroup, 1)]
    checks.append(check_closed_form(spec, table, twisted))
    checks.extend(check_inverse_formulas(spec, table, twisted))
    center = set(rep.center)
    zi = z_image(spec)
    bad = [x for x in zi if x not in center]
    checks.append(CheckResult("Z-central", not bad, len(zi), (bad[0],) if bad else None))
    w = almost_normal_witness(table, b_slice(spec, table))
    checks.append(CheckResult("B-almost-normal", w is None, table.order, None if w is None else (w,)))
    # normality upgrade: only asserted when Z_m(C) sits inside the B-copy of Z_m(B)
    nb = spec.b.order
    eA = spec.a.identity
    zmb = {eA * nb + x for x in classify(spec.b).z_m}
    if set(rep.z_m) <= zmb:
        nw = normal_witness(table, b_slice(spec, table))
        checks.append(CheckResult("B-normal", nw is None, table.order ** 2, nw))
    return ProductReport("twisted" if twisted else "smashed", table, rep, checks)


# -- factor search --------------------------------------------------------

def _phi_candidates(b: MagmaTable, z: CentralEmbedding) -> List[tuple]:
    """Permutations of B fixing e and the Z-image pointwise and commuting
    with Z-translation, in lexicographic order."""
    nb = b.order
    zb = list(z.into_b)
    eB = b.require_identity()
    fixed = set(zb) | {eB}
    free = [x for x in range(nb) if x not in fixed]
    out = []
    for perm in permutations(free):
        cand = list(range(nb))
        for src, dst in zip(free, perm):
            cand[src] = dst
        if all(cand[int(b.table[g, x])] == int(b.table[g, cand[x]]) for g in zb for x in range(nb)):
            out.append(tuple(cand))
    return out


def _orbit_classes(spec_shape, a: MagmaTable, b: MagmaTable, z: CentralEmbedding):
    """Class id per pair index under (u, c) ~ (g u, g' c)."""
    na, nb = spec_shape
    cls = -np.ones(na * nb, dtype=np.int64)
    k = 0
    start = a.require_identity() * nb + b.require_identity()
    for p in [start] + list(range(na * nb)):
        if cls[p] >= 0:
            continue
        u, c = divmod(p, nb)
        for g in z.into_a:
            for h in z.into_b:
                cls[int(a.table[g, u]) * nb + int(b.table[h, c])] = k
        k += 1
    return cls, k


@dataclass(frozen=True)
class SearchPlan:
    phi_candidates: tuple
    a_cosets: tuple          # representative per nontrivial Z-coset of A, plus member lists
    a_coset_of: tuple
    pair_class: tuple
    n_classes: int
    size: int


def plan_search(a: MagmaTable, b: MagmaTable, z: CentralEmbedding) -> SearchPlan:
    na, nb = a.order, b.order
    cands = _phi_candidates(b, z)
    coset_of = -np.ones(na, dtype=np.int64)
    k = 0
    for u in [a.require_identity()] + list(range(na)):
        if coset_of[u] < 0:
            for g in z.into_a:
                coset_of[int(a.table[g, u])] = k
            k += 1
    cls, ncls = _orbit_classes((na, nb), a, b, z)
    free = (ncls - 1) ** 2
    size = len(cands) ** (k - 1) * z.order ** free
    return SearchPlan(tuple(cands), tuple(range(k)), tuple(int(c) for c in coset_of),
                      tuple(int(c) for c in cls), ncls, int(size))


def search_factors(a: MagmaTable, b: MagmaTable, z: CentralEmbedding, budget: int) -> Iterator[SmashedSpec]:
    """Yield every valid spec in the pruned search space, in a fixed order.

    phi is constant on Z-cosets of A (identity on the coset of e) and drawn
    from Z-equivariant permutations fixing the Z-image; eta and kappa are
    the values forced by phi; xi is free on pairs of nontrivial Z x Z
    classes of A x B and e elsewhere.
    """
    plan = plan_search(a, b, z)
    if plan.size > budget:
        raise SearchSpaceExceeded(plan.size, budget)
    na, nb, nz = a.order, b.order, z.order
    ez = z.z_table.require_identity()
    coset_of = np.array(plan.a_coset_of)
    cls = np.array(plan.pair_class)
    ncls = plan.n_classes
    k = len(plan.a_cosets)
    ident = tuple(range(nb))
    for choice in iproduct(plan.phi_candidates, repeat=k - 1):
        per_coset = (ident,) + choice
        phi = np.array([per_coset[coset_of[u]] for u in range(na)], dtype=np.int64)
        try:
            eta = forced_eta(a, b, z, phi)
            kappa = forced_kappa(a, b, z, phi)
        except InvalidFactors:
            continue
        for vals in iproduct(range(nz), repeat=(ncls - 1) ** 2):
            small = np.full((ncls, ncls), ez, dtype=np.int64)
            if ncls > 1:
                small[1:, 1:] = np.array(vals, dtype=np.int64).reshape(ncls - 1, ncls - 1)
            xi = small[cls[:, None], cls[None, :]]
            spec = SmashedSpec(a, b, z, phi, eta, kappa, xi)
            if validate_factors(spec).ok:
                yield spec
