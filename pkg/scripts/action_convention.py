"""Left vs literal action convention for the wreath product on S3/C2/C3.

The literal reading acts by s = e/psi(v/d) and reads f at tau(v (d\\e)).
That composes as a right action, and the resulting C is not a metagroup
even with trivial factors.  The left convention s = psi(v d), read at
tau(v d), gives a group here.
"""
import sys

from mgk.core import classify
from mgk.generators import cyclic, sym3
from mgk.subquot import closure
from mgk.wreath import make_wreath_spec, wreath_product


def main():
    d = sym3()
    a_sub = closure(d, [d.index("021")])
    results = {}
    for conv in ("left", "literal"):
        spec = make_wreath_spec(d, a_sub, cyclic(3), convention=conv)
        rep = classify(wreath_product(spec))
        results[conv] = rep
        print(f"{conv}: order {rep.order}, loop {rep.is_loop}, metagroup {rep.is_metagroup}, "
              f"group {rep.is_group}")
    return 0 if results["left"].is_metagroup and not results["literal"].is_metagroup else 1


if __name__ == "__main__":
    sys.exit(main())
