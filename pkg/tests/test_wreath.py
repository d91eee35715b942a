import numpy as np
import pytest

import oracles as O
from mgk.core import MagmaTable, classify
from mgk.errors import BadOrderConstraint, CentralD0, PartitionFailure, SpecMismatch, StructuralError
from mgk.generators import cayley_dickson, cyclic, sym3
from mgk.products import CentralEmbedding, from_action
from mgk.subquot import SubStructure, closure
from mgk.wreath import (build_metamorphism, build_theorem_4_14, check_action_identities,
                        check_metagroup_condition, check_transversal_laws, closed_form_associator,
                        division_formulas, embed_d, embed_f, f_act, find_transversal, make_wreath_spec,
                        split, transversal_from_list, w_factors, wreath_product)

S3 = sym3()
A_S3 = closure(S3, [S3.index("021")])


def s3_spec(reps=None, convention="left", b=None):
    trans = None if reps is None else transversal_from_list(S3, A_S3, reps)
    return make_wreath_spec(S3, A_S3, b or cyclic(3), trans=trans, convention=convention)


def o16_q8_spec(nontrivial_xi):
    d = cayley_dickson(3)
    a_sub = closure(d, [d.index("e1"), d.index("e2")])
    a = a_sub.as_table("Q8")
    z = CentralEmbedding(cyclic(2), [a.index("1"), a.index("-1")], [0, 2])
    inv = [0, 3, 2, 1]
    phi = np.array([inv if n.lstrip("-") in ("e1", "e2") else [0, 1, 2, 3] for n in a.elem_names])
    n = a.order * 4
    xi = np.zeros((n, n), dtype=np.int64)
    if nontrivial_xi:
        odd = np.arange(n) % 2 == 1
        xi[np.ix_(odd, odd)] = 1
    return make_wreath_spec(d, a_sub, cyclic(4), from_action(a, cyclic(4), z, phi, xi))


def test_transversal_s3():
    t = find_transversal(S3, A_S3)
    assert t.v[0] == S3.identity
    assert A_S3.members == (0, 1)
    assert t.v == (0, 2, 3)
    for g in range(6):
        a, v = t.decompose(g)
        assert S3.table[a, v] == g and a in A_S3 and v in t.v
    assert all(c.passed for c in check_transversal_laws(t))


def test_transversal_errors():
    with pytest.raises(PartitionFailure):
        transversal_from_list(S3, A_S3, [0, 1, 2])
    with pytest.raises(StructuralError):
        transversal_from_list(S3, A_S3, [2, 0, 3])


def test_all_s3_transversals_satisfy_laws():
    for r1 in (2, 4):
        for r2 in (3, 5):
            t = transversal_from_list(S3, A_S3, [0, r1, r2])
            assert all(c.passed for c in check_transversal_laws(t))


def test_wreath_matches_oracle_s3():
    spec = s3_spec()
    assert O.rows(wreath_product(spec)) == O.wreath(spec)


def test_wreath_matches_oracle_nontrivial_factors():
    spec = o16_q8_spec(True)
    assert O.rows(wreath_product(spec)) == O.wreath(spec)


def test_encoding_and_embeddings():
    spec = s3_spec()
    assert spec.order == 162 and spec.nf == 27
    f = spec.encode([1, 2, 0])
    assert f == 1 * 9 + 2 * 3
    assert (spec.digits[f] == [1, 2, 0]).all()
    c = wreath_product(spec)
    d, ff = split(spec, embed_d(spec, 3))
    assert (d, ff) == (3, 0)
    assert split(spec, embed_f(spec, f)) == (0, f)
    assert c.table[embed_d(spec, 3), embed_f(spec, f)] == 3 * 27 + f_act(spec, f, 3)


def test_action_is_a_left_action_on_groups():
    spec = s3_spec()
    for d in range(6):
        for d1 in range(6):
            for f in range(0, 27, 5):
                assert f_act(spec, f_act(spec, f, d1), d) == f_act(spec, f, S3.table[d, d1])


def test_left_convention_metagroup_and_closed_form():
    rep = check_metagroup_condition(s3_spec())
    assert rep.loop and rep.condition and rep.metagroup and rep.ok
    assert rep.structure.t_range == (rep.structure.identity,)
    assert {c.id for c in rep.checks} >= {"4.8-left", "4.8-right", "4.10.7", "F-almost-normal"}


def test_literal_convention_not_metagroup():
    rep = check_metagroup_condition(s3_spec(convention="literal"))
    assert rep.loop and rep.condition and not rep.metagroup and not rep.ok


def test_action_identities():
    for spec in (s3_spec(), o16_q8_spec(True)):
        checks = check_action_identities(spec)
        assert [c.id for c in checks] == ["4.6.1", "4.6.2", "4.6.5/4.6.10"]
        assert all(c.passed for c in checks), [c.line() for c in checks]


def test_w_factors_agree_with_observed():
    spec = o16_q8_spec(False)
    for d in range(0, 16, 3):
        for d1 in range(1, 16, 5):
            for v in spec.trans.v:
                w = w_factors(spec, d, d1, v, f=3)
                assert w.agree and w.w3 is not None


def test_division_formulas():
    spec = s3_spec(b=cyclic(2))
    c = wreath_product(spec)
    x, y = np.ix_(np.arange(c.order), np.arange(c.order))
    left, right = division_formulas(spec, x, y)
    assert (left == c.ldiv_table[x, y]).all()
    assert (right == c.rdiv_table[y, x]).all()


def test_closed_form_on_octonion_instance_sample():
    spec = o16_q8_spec(False)
    c = wreath_product(spec)
    rng = np.random.default_rng(1)
    x, y, w = rng.integers(0, c.order, (3, 2000))
    assert (c.assoc(x, y, w) == closed_form_associator(spec, x, y, w)).all()


def test_nontrivial_xi_counterexample():
    # factor conditions and Z_m(D) in Z hold, the closed form still matches,
    # but the associator is not central
    rep = check_metagroup_condition(o16_q8_spec(True))
    assert rep.loop and rep.condition and not rep.metagroup
    assert [c for c in rep.checks if c.id == "4.10.7"][0].passed


def test_trivial_z_reports_condition_false():
    d = cayley_dickson(3)
    a_sub = closure(d, [d.index("e1")])
    spec = make_wreath_spec(d, a_sub, cyclic(2))
    rep = check_metagroup_condition(spec)
    assert rep.loop and not rep.condition
    assert "not guaranteed" in rep.lines()[2]


def test_metamorphism_all_transversal_pairs():
    specs = [s3_spec([0, r1, r2]) for r1 in (2, 4) for r2 in (3, 5)]
    c2 = classify(wreath_product(specs[-1]))
    for s in specs[:-1]:
        m = build_metamorphism(s, specs[-1])
        assert m.bijective and m.nu_central
        assert set(m.nu_values) <= set(c2.center)


def test_metamorphism_mismatch():
    with pytest.raises(SpecMismatch):
        build_metamorphism(s3_spec(), s3_spec(b=cyclic(2)))


def test_splitting_extension_s3():
    ext = build_theorem_4_14(S3, S3.index("021"), cyclic(3), 1, d2=S3.index("120"))
    assert (ext.k, ext.l, ext.table.order) == (2, 3, 162)
    assert ext.f0_square_ok and ext.h_equality and ext.metagroup.passed
    assert ext.generator_check["generates"]


def test_splitting_extension_errors():
    with pytest.raises(CentralD0):
        build_theorem_4_14(S3, S3.identity, cyclic(3), 1)
    with pytest.raises(BadOrderConstraint):
        build_theorem_4_14(S3, S3.index("021"), cyclic(2), 1)


def test_wreath_cap(monkeypatch):
    from mgk.errors import OrderCapExceeded
    monkeypatch.setenv("MGK_ORDER_CAP", "100")
    with pytest.raises(OrderCapExceeded):
        wreath_product(s3_spec())
