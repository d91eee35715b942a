"""Enumerate smashing factor sets for every (A, B, Z) with |A|, |B| <= 4.

Groups: C1, C2, C3, C4 and V4 = C2 x C2.  Z runs over the trivial group
and every cyclic Z embedded by a generator pair of equal order.  Each
emitted spec's smashed and smashed twisted products are built and checked;
the script prints one line per case and exits nonzero on any failure.
"""
import argparse
import sys
import time

from mgk.generators import cyclic
from mgk.products import (CentralEmbedding, build_and_check, direct_product, plan_search,
                          search_factors, trivial_embedding)

BUDGET = 10 ** 6


def small_groups():
    return [cyclic(1), cyclic(2), cyclic(3), cyclic(4), direct_product([cyclic(2), cyclic(2)], name="V4")]


def _order(g, x):
    e, p, k = g.identity, x, 1
    while p != e:
        p, k = int(g.table[p, x]), k + 1
    return k


def _powers(g, x, k):
    out = [g.identity]
    for _ in range(k - 1):
        out.append(int(g.table[out[-1], x]))
    return out


def embeddings(a, b):
    yield trivial_embedding(a, b)
    for k in (2, 3, 4):
        for x in range(a.order):
            if _order(a, x) != k:
                continue
            for y in range(b.order):
                if _order(b, y) == k:
                    yield CentralEmbedding(cyclic(k), _powers(a, x, k), _powers(b, y, k))


def cases():
    gs = small_groups()
    for a in gs:
        for b in gs:
            for z in embeddings(a, b):
                yield a, b, z


def run_case(a, b, z, budget=BUDGET):
    """(candidates, valid, smashed nonassociative, twisted nonassociative, failures)."""
    plan = plan_search(a, b, z)
    valid = nonassoc_s = nonassoc_t = failures = 0
    for spec in search_factors(a, b, z, budget):
        valid += 1
        for twisted in (False, True):
            rep = build_and_check(spec, twisted)
            if not rep.structure.is_group:
                if twisted:
                    nonassoc_t += 1
                else:
                    nonassoc_s += 1
            failures += not rep.ok
    return plan.size, valid, nonassoc_s, nonassoc_t, failures


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=BUDGET)
    args = ap.parse_args(argv)
    bad = 0
    t0 = time.time()
    for a, b, z in cases():
        size, valid, ns, nt, fail = run_case(a, b, z, args.budget)
        bad += fail
        print(f"{a.name}/{b.name}/Z{z.order} into_a={list(z.into_a)} into_b={list(z.into_b)}: "
              f"candidates={size} valid={valid} nonassoc smashed={ns} twisted={nt} failures={fail}")
    print(f"total failures: {bad} ({time.time() - t0:.1f} s)")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
