"""Compare a naive smashed-product associator and right inverse with the
corrected forms used by the library, on a witness where they differ.

Witness: A = C3, B = C9, Z = C3 mapped onto A and onto {0, 3, 6} in B,
trivial action, xi = generator exactly when both B-parts are 1 mod 3.

The naive associator inverts the xi/kappa/eta quotient, and the naive
right inverse reads xi at (e/a, b^(e/a)) where it needs the coset
representative (e/a, e/b^(e/a)).  The associator slip is invisible when
every xi value is an involution, hence a Z of order 3.
"""
import sys

import numpy as np

from mgk.core import classify
from mgk.generators import cyclic
from mgk.products import (CentralEmbedding, _Z, closed_form_associator, formula_inverses, from_action,
                          smashed_product)


def witness_spec():
    a, b = cyclic(3), cyclic(9)
    z = CentralEmbedding(cyclic(3), [0, 1, 2], [0, 3, 6])
    n = a.order * b.order
    bpart = np.arange(n) % b.order
    hit = bpart % 3 == 1
    xi = np.zeros((n, n), dtype=np.int64)
    xi[np.ix_(hit, hit)] = 1
    return from_action(a, b, z, np.tile(np.arange(9), (3, 1)), xi)


def naive_associator(spec, x, y, w):
    """t_A t_B xi(1,23) [xi23]^a1 kappa eta / (xi12 xi(12,3))."""
    A, B = spec.a, spec.b
    nb = B.order
    Z = _Z(spec)
    phi, xi = spec.phi, spec.xi
    a1, b1 = np.divmod(x, nb)
    a2, b2 = np.divmod(y, nb)
    a3, b3 = np.divmod(w, nb)
    a12, a23 = A.table[a1, a2], A.table[a2, a3]
    b12 = B.table[b1, phi[a1, b2]]
    b23 = B.table[b2, phi[a2, b3]]
    tB = Z.from_b[B.assoc(b1, phi[a1, b2], phi[a12, b3])]
    xi23_act = Z.from_b[phi[a1, Z.into_b[xi[y, w]]]]
    num = Z.mul(tB, xi[x, a23 * nb + b23], xi23_act, spec.kappa[a1, b2, phi[a2, b3]], spec.eta[a1, a2, b3])
    den = Z.mul(xi[x, y], xi[a12 * nb + b12, w])
    return A.assoc(a1, a2, a3) * nb + Z.into_b[Z.div(num, den)]


def naive_right_inverse(spec):
    """(e/a, e/[xi((e/a, b^(e/a)), (a, b)) b^(e/a)])."""
    A, B = spec.a, spec.b
    nb = B.order
    Z = _Z(spec)
    eA, eB = A.identity, B.identity
    out = []
    for p in range(A.order * nb):
        a, b = divmod(p, nb)
        ia = int(A.rdiv_table[eA, a])
        bb = int(spec.phi[ia, b])
        z = int(Z.into_b[spec.xi[ia * nb + bb, p]])
        out.append(ia * nb + int(B.rdiv_table[eB, B.table[z, bb]]))
    return np.array(out)


def main():
    spec = witness_spec()
    table = smashed_product(spec)
    n = table.order
    ar = np.arange(n)
    x, y, w = np.meshgrid(ar, ar, ar, indexing="ij")
    truth = table.assoc(x, y, w)
    fixed = (closed_form_associator(spec, x, y, w) == truth).sum()
    naive = (naive_associator(spec, x, y, w) == truth).sum()
    print(f"product: order {n}, metagroup {classify(table).is_metagroup}")
    print(f"associator, corrected form: {fixed}/{truth.size}")
    print(f"associator, naive form:     {naive}/{truth.size}")
    true_inv = table.rdiv_table[table.identity]
    right, _ = formula_inverses(spec)
    inv_fixed = (np.asarray(right) == true_inv).sum()
    inv_naive = (naive_right_inverse(spec) == true_inv).sum()
    print(f"right inverse, corrected:   {inv_fixed}/{n}")
    print(f"right inverse, naive:       {inv_naive}/{n}")
    return 0 if fixed == truth.size and naive < truth.size and inv_fixed == n > inv_naive else 1


if __name__ == "__main__":
    sys.exit(main())
