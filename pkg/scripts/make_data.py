"""Regenerate the sample input files under data/."""
import json
import os

import numpy as np

from mgk import io as mio
from mgk.generators import cyclic, quaternion8
from mgk.products import from_action, trivial_factors

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def write_factors_ref(spec, path, a_ref, b_ref):
    """Factor file that names its tables by generator id."""
    obj = mio.spec_to_obj(spec)
    obj["a"], obj["b"] = a_ref, b_ref
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(mio._doc_text(obj))


def main():
    os.makedirs(HERE, exist_ok=True)
    c2, c3 = cyclic(2), cyclic(3)
    write_factors_ref(trivial_factors(c2, c3), os.path.join(HERE, "c2_c3_trivial.json"), "cyclic:2", "cyclic:3")
    inv = from_action(c2, c3, None, np.array([[0, 1, 2], [0, 2, 1]]))
    write_factors_ref(inv, os.path.join(HERE, "c2_c3_inversion.json"), "cyclic:2", "cyclic:3")
    q8 = trivial_factors(quaternion8(), cyclic(1))
    write_factors_ref(q8, os.path.join(HERE, "q8_twisted.json"), "quaternion8", "cyclic:1")
    mio.write_table(quaternion8(), os.path.join(HERE, "q8.json"))
    wreaths = {
        "s3_c2_c3.json": {"d": "sym3", "a": ["021"], "b": "cyclic:3", "convention": "left"},
        "s3_c2_c3_literal.json": {"d": "sym3", "a": ["021"], "b": "cyclic:3", "convention": "literal"},
        "o16_c2.json": {"d": "cayley-dickson:3", "a": ["e1"], "b": "cyclic:2",
                        "transversal": ["1", "e2", "e4", "e6"],
                        "factors": {"z": "cyclic:2", "into_a": ["1", "-1"], "into_b": [0, 1]},
                        "convention": "left"},
    }
    for name, doc in wreaths.items():
        with open(os.path.join(HERE, name), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
