"""Wreath products over the octonion basis loop O16.

Runs three instances and prints their reports:

1. A = <e1> (order 4), B = C2, Z = {+-1} -> B: Z_m(D) lies in Z, so C must
   be a metagroup.
2. Same A with trivial Z: the Z_m condition fails; C is reported as-is.
3. A = <e1, e2> (a Q8), B = C4, Z = {+-1} -> {0, 2}, phi inverting B on the
   cosets of e1 and e2, and xi = Z-generator whenever both B-parts are odd.
   All factor conditions hold and Z_m(D) lies in Z, yet C is not a
   metagroup: xi makes the associator vary with v, so it lands in Z^V,
   which is not central in C.
"""
import sys
import time

import numpy as np

from mgk.core import MagmaTable, classify
from mgk.generators import cayley_dickson, cyclic
from mgk.products import CentralEmbedding, from_action, validate_factors
from mgk.subquot import closure
from mgk.wreath import check_metagroup_condition, make_wreath_spec


def q8_instance(nontrivial_xi: bool):
    d = cayley_dickson(3)
    a_sub = closure(d, [d.index("e1"), d.index("e2")])
    a = a_sub.as_table("Q8<O16")
    b = cyclic(4)
    z = CentralEmbedding(cyclic(2), [a.index("1"), a.index("-1")], [0, 2])
    inv = [0, 3, 2, 1]
    phi = np.array([inv if n.lstrip("-") in ("e1", "e2") else [0, 1, 2, 3] for n in a.elem_names])
    n = a.order * b.order
    xi = np.zeros((n, n), dtype=np.int64)
    if nontrivial_xi:
        odd = np.arange(n) % 2 == 1
        xi[np.ix_(odd, odd)] = 1
    factors = from_action(a, b, z, phi, xi)
    return make_wreath_spec(d, a_sub, b, factors)


def e1_instance(with_z: bool):
    d = cayley_dickson(3)
    a_sub = closure(d, [d.index("e1")])
    a = a_sub.as_table("C4<O16")
    b = cyclic(2)
    if with_z:
        z = CentralEmbedding(cyclic(2), [a.index("1"), a.index("-1")], [0, 1])
    else:
        z = CentralEmbedding(MagmaTable("Z1", ["e"], [[0]]), [a.index("1")], [0])
    return make_wreath_spec(d, a_sub, b, from_action(a, b, z, np.tile(np.arange(2), (4, 1))))


def report(title, spec):
    t0 = time.time()
    print(f"== {title}")
    print(f"V: {[spec.d.elem_names[v] for v in spec.trans.v]}  order: {spec.order}")
    fr = validate_factors(spec.factors)
    print(f"factor conditions: {'pass' if fr.ok else 'FAIL'}")
    wr = check_metagroup_condition(spec)
    for line in wr.lines():
        print(line)
    if wr.structure.is_loop and not wr.metagroup:
        t = classify(wr.table)
        print(f"center size: {len(t.center)}")
    print(f"({time.time() - t0:.1f} s)")
    return wr


def main():
    report("O16, A=<e1>, B=C2, Z=C2", e1_instance(True))
    report("O16, A=<e1>, B=C2, Z trivial", e1_instance(False))
    report("O16, A=<e1,e2>, B=C4, Z=C2, xi trivial", q8_instance(False))
    wr = report("O16, A=<e1,e2>, B=C4, Z=C2, xi nontrivial", q8_instance(True))
    return 0 if wr.condition and not wr.metagroup else 1


if __name__ == "__main__":
    sys.exit(main())
