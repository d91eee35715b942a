"""File formats: tables, factor sets and wreath specs.

All documents are JSON.  Writers emit a canonical layout (fixed key order,
one table row per line) so that ``write(read(x)) == x`` byte for byte for
canonical files.
"""
from __future__ import annotations

import json
import os
from typing import Any, Optional

import numpy as np

from .core import MagmaTable
from .errors import ParseError, StructuralError
from .generators import _GEN_RE, from_spec
from .products import CentralEmbedding, SmashedSpec, trivial_factors


def _row(xs) -> str:
    return "[" + ", ".join(str(int(x)) for x in xs) + "]"


def _matrix(rows, indent: str) -> str:
    rows = list(rows)
    if not rows:
        return "[]"
    inner = (",\n" + indent + "  ").join(_row(r) for r in rows)
    return "[\n" + indent + "  " + inner + "\n" + indent + "]"


def table_to_text(g: MagmaTable, indent: str = "") -> str:
    """Canonical JSON for a table."""
    i2 = indent + "  "
    parts = [
        f'{i2}"name": {json.dumps(g.name)}',
        f'{i2}"order": {g.order}',
        f'{i2}"elements": {json.dumps(list(g.elem_names))}',
        f'{i2}"table": {_matrix(g.table, i2)}',
    ]
    return "{\n" + ",\n".join(parts) + "\n" + indent + "}"


def write_table(g: MagmaTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(table_to_text(g) + "\n")


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def table_from_obj(obj: Any, source: str = "<table>") -> MagmaTable:
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: a table document must be an object")
    for key in ("order", "elements", "table"):
        if key not in obj:
            raise ParseError(f"{source}: missing field {key!r}")
    names, rows = obj["elements"], obj["table"]
    if not isinstance(names, list) or not isinstance(rows, list):
        raise ParseError(f"{source}: elements and table must be arrays")
    if obj["order"] != len(names):
        raise ParseError(f"{source}: order {obj['order']} but {len(names)} elements")
    for i, r in enumerate(rows):
        if not isinstance(r, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
            raise ParseError(f"{source}: row {i} must be an array of integers")
    try:
        return MagmaTable(obj.get("name", os.path.basename(source)), names, rows)
    except StructuralError as exc:
        raise ParseError(f"{source}: {exc}") from None


def read_table(path: str) -> MagmaTable:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return table_from_obj(_load_json(text, path), path)


def load_table(ref: Any, base: Optional[str] = None) -> MagmaTable:
    """A table from a generator id, a path or an inline object."""
    if isinstance(ref, MagmaTable):
        return ref
    if isinstance(ref, dict):
        return table_from_obj(ref)
    if isinstance(ref, str):
        if _GEN_RE.match(ref.strip()):
            return from_spec(ref)
        path = ref if base is None or os.path.isabs(ref) else os.path.join(base, ref)
        return read_table(path)
    raise ParseError(f"cannot interpret table reference {ref!r}")


def write_mapping(mapping, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"coset_of": [int(x) for x in mapping]}) + "\n")


# -- factor files -----------------------------------------------------------

def spec_to_obj(spec: SmashedSpec) -> dict:
    return {
        "a": spec.a, "b": spec.b, "z": spec.z.z_table,
        "into_a": list(spec.z.into_a), "into_b": list(spec.z.into_b),
        "phi": spec.phi, "eta": spec.eta, "kappa": spec.kappa, "xi": spec.xi,
        "strict_unit": spec.strict_unit,
    }


def _value_text(v, indent: str) -> str:
    if isinstance(v, MagmaTable):
        return table_to_text(v, indent)
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return _row(v)
        if v.ndim == 2:
            return _matrix(v, indent)
        return _matrix(v.reshape(v.shape[0], -1), indent)
    return json.dumps(v)


def _doc_text(obj: dict) -> str:
    parts = [f'  {json.dumps(k)}: {_value_text(v, "  ")}' for k, v in obj.items()]
    return "{\n" + ",\n".join(parts) + "\n}\n"


def spec_to_text(spec: SmashedSpec) -> str:
    """Canonical text; eta and kappa are stored flattened to 2-D (first axis kept)."""
    return _doc_text(spec_to_obj(spec))


def write_factors(spec: SmashedSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(spec_to_text(spec))


def spec_from_obj(obj: dict, base: Optional[str] = None, a: Optional[MagmaTable] = None) -> SmashedSpec:
    try:
        a = a or load_table(obj["a"], base)
        b = load_table(obj["b"], base)
        na, nb = a.order, b.order
        if "z" in obj:
            z = CentralEmbedding(load_table(obj["z"], base), obj["into_a"], obj["into_b"])
        else:
            z = CentralEmbedding(MagmaTable("Z1", ["e"], [[0]]), [a.require_identity()], [b.require_identity()])
        if "phi" not in obj:
            return trivial_factors(a, b, z)
        return SmashedSpec(
            a, b, z,
            np.asarray(obj["phi"], dtype=np.int64).reshape(na, nb),
            np.asarray(obj["eta"], dtype=np.int64).reshape(na, na, nb),
            np.asarray(obj["kappa"], dtype=np.int64).reshape(na, nb, nb),
            np.asarray(obj["xi"], dtype=np.int64).reshape(na * nb, na * nb),
            bool(obj.get("strict_unit", True)),
        )
    except KeyError as exc:
        raise ParseError(f"factor document is missing field {exc.args[0]!r}") from None
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad factor document: {exc}") from None


def read_factors(path: str) -> SmashedSpec:
    with open(path, encoding="utf-8") as fh:
        obj = _load_json(fh.read(), path)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: factor document must be an object")
    return spec_from_obj(obj, os.path.dirname(os.path.abspath(path)))


# -- wreath spec files -------------------------------------------------------

def read_wreath_spec(path: str, transversal_override: Optional[list] = None):
    """Wreath spec document::

        {"d": <table>, "a": [D indices generating A], "b": <table>,
         "transversal": [optional V, e first],
         "factors": {optional phi/eta/kappa/xi/z/into_a/into_b; into_a in D indices},
         "convention": "left"}
    """
    from .subquot import closure
    from .wreath import find_transversal, make_wreath_spec, transversal_from_list

    with open(path, encoding="utf-8") as fh:
        obj = _load_json(fh.read(), path)
    base = os.path.dirname(os.path.abspath(path))
    try:
        d = load_table(obj["d"], base)
        b = load_table(obj["b"], base)
        a_sub = closure(d, [_elem(d, x) for x in obj.get("a", [])])
    except KeyError as exc:
        raise ParseError(f"{path}: missing field {exc.args[0]!r}") from None
    a_tab = a_sub.as_table(f"{d.name}|A")
    loc = {g: i for i, g in enumerate(a_sub.members)}
    fobj = dict(obj.get("factors") or {})
    fobj["a"], fobj["b"] = a_tab, b
    if "into_a" in fobj:
        try:
            fobj["into_a"] = [loc[_elem(d, x)] for x in fobj["into_a"]]
        except KeyError as exc:
            raise ParseError(f"{path}: into_a element {exc.args[0]} is not in A") from None
    factors = spec_from_obj(fobj, base, a=a_tab)
    reps = transversal_override if transversal_override is not None else obj.get("transversal")
    if reps is not None:
        trans = transversal_from_list(d, a_sub, [_elem(d, x) for x in reps])
    else:
        trans = find_transversal(d, a_sub)
    return make_wreath_spec(d, a_sub, b, factors, trans, obj.get("convention", "left"))


def _elem(g: MagmaTable, x) -> int:
    """Element reference: a name, or an integer index."""
    if isinstance(x, int) and not isinstance(x, bool):
        g.check(x)
        return x
    s = str(x)
    if s in g.elem_names:
        return g.index(s)
    try:
        i = int(s)
    except ValueError:
        raise StructuralError(f"{s!r} is not an element of {g.name}") from None
    g.check(i)
    return i
