"""Built-in tables: cyclic groups, S3, Q8 and signed Cayley-Dickson bases.

Cayley-Dickson sign convention: the doubling rule

    (a, b)(c, d) = (ac - d* b, d a + b c*)

with conjugation negating every non-real basis unit.  Level L has 2**L
basis units e0 = 1, e1, ...; the signed basis {+-e_i} has order 2**(L+1).
Index k < 2**L stands for +e_k and index 2**L + k for -e_k.
"""
from __future__ import annotations

import re
from functools import lru_cache
from itertools import permutations

import numpy as np

from .core import MagmaTable
from .errors import StructuralError


def cyclic(n: int) -> MagmaTable:
    if n < 1:
        raise StructuralError("cyclic order must be positive")
    ar = np.arange(n)
    return MagmaTable(f"C{n}", [str(i) for i in range(n)], (ar[:, None] + ar[None, :]) % n)


def sym3() -> MagmaTable:
    """S3 on one-line permutations of 012; product is composition p(q(x))."""
    perms = sorted(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]
    return MagmaTable("S3", ["".join(map(str, p)) for p in perms], table)


_Q8_UNITS = ["1", "i", "j", "k"]
# Hamilton rules on units: (x, y) -> (sign, unit)
_Q8_RULES = {
    ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
    ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
    ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
}


def quaternion8() -> MagmaTable:
    """Hand-written quaternion group, laid out like ``cayley_dickson(2)``."""
    names = _Q8_UNITS + ["-" + u for u in _Q8_UNITS]

    def unit_mul(x, y):
        if x == "1":
            return 1, y
        if y == "1":
            return 1, x
        return _Q8_RULES[(x, y)]

    table = []
    for a in range(8):
        row = []
        for b in range(8):
            s, u = unit_mul(_Q8_UNITS[a % 4], _Q8_UNITS[b % 4])
            s *= (-1 if a >= 4 else 1) * (-1 if b >= 4 else 1)
            row.append(_Q8_UNITS.index(u) + (0 if s > 0 else 4))
        table.append(row)
    return MagmaTable("Q8", names, table)


@lru_cache(maxsize=None)
def _cd_unit_mul(i: int, j: int, level: int):
    """e_i * e_j = sign * e_k at the given doubling level."""
    if level == 0:
        return 1, 0
    h = 1 << (level - 1)
    if i < h and j < h:
        return _cd_unit_mul(i, j, level - 1)
    if i < h:
        # (p, 0)(0, q) = (0, q p)
        s, k = _cd_unit_mul(j - h, i, level - 1)
        return s, k + h
    if j < h:
        # (0, p)(q, 0) = (0, p q*)
        s, k = _cd_unit_mul(i - h, j, level - 1)
        return (s if j == 0 else -s), k + h
    # (0, p)(0, q) = (-q* p, 0)
    s, k = _cd_unit_mul(j - h, i - h, level - 1)
    return (-s if j == h else s), k


def cayley_dickson(level: int) -> MagmaTable:
    """Signed basis loop of the level-``level`` Cayley-Dickson algebra."""
    if level < 0:
        raise StructuralError("Cayley-Dickson level must be >= 0")
    dim = 1 << level
    units = ["1"] + [f"e{i}" for i in range(1, dim)]
    names = units + ["-" + u for u in units]
    n = 2 * dim
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            s, k = _cd_unit_mul(a % dim, b % dim, level)
            if (a >= dim) != (b >= dim):
                s = -s
            table[a, b] = k if s > 0 else k + dim
    label = {0: "R2", 1: "C4", 2: "Q8", 3: "O16", 4: "S32"}.get(level, f"CD{n}")
    return MagmaTable(label, names, table)


_GEN_RE = re.compile(r"^(cyclic|sym3|quaternion8|cayley[-_]dickson)(?::(\d+))?$")


def from_spec(spec: str) -> MagmaTable:
    """Parse generator ids such as ``cyclic:4``, ``sym3``, ``cayley-dickson:3``."""
    m = _GEN_RE.match(spec.strip())
    if not m:
        raise StructuralError(f"unknown generator {spec!r}")
    kind, arg = m.group(1), m.group(2)
    if kind == "cyclic":
        if arg is None:
            raise StructuralError("cyclic needs an order, e.g. cyclic:4")
        return cyclic(int(arg))
    if kind == "sym3":
        return sym3()
    if kind == "quaternion8":
        return quaternion8()
    if arg is None:
        raise StructuralError("cayley-dickson needs a level, e.g. cayley-dickson:3")
    return cayley_dickson(int(arg))
