import numpy as np
import pytest

import oracles as O
from mgk.core import MagmaTable, classify
from mgk.errors import InvalidFactors, SearchSpaceExceeded
from mgk.generators import cayley_dickson, cyclic, quaternion8, sym3
from mgk.products import (FACTOR_CONDITIONS, CentralEmbedding, SmashedSpec, almost_normal, b_slice,
                          build_and_check, check_closed_form, check_direct_laws, direct_product,
                          forced_eta, from_action, normal, plan_search, search_factors,
                          smashed_product, smashed_twisted_product, split_index, trivial_factors,
                          validate_factors)

C2, C3, C4 = cyclic(2), cyclic(3), cyclic(4)
INV3 = np.array([[0, 1, 2], [0, 2, 1]])


def test_direct_product_encoding():
    p = direct_product([C2, C3])
    assert p.order == 6
    # factor 0 is most significant
    assert p.table[1 * 3 + 2, 1 * 3 + 2] == 0 * 3 + 1
    a, b = split_index([C2, C3], np.array([5]))
    assert (a, b) == (1, 2)


def test_direct_laws_o16_c2():
    o = cayley_dickson(3)
    p = direct_product([o, C2])
    assert all(c.passed for c in check_direct_laws(p, [o, C2]))


def test_trivial_factors_equal_direct():
    assert smashed_product(trivial_factors(C2, C3)).same_operation(direct_product([C2, C3]))


def test_smashed_matches_definition_oracle():
    spec = from_action(C2, C3, None, INV3)
    for tw in (False, True):
        t = (smashed_twisted_product if tw else smashed_product)(spec)
        assert O.rows(t) == O.smashed(spec, tw)


def test_inversion_action_gives_s3():
    t = smashed_product(from_action(C2, C3, None, INV3))
    assert O.isomorphic(O.rows(t), O.rows(sym3()))
    assert not O.isomorphic(O.rows(t), O.rows(cyclic(6)))


def test_validate_reports_every_condition():
    rep = validate_factors(trivial_factors(C2, C3))
    assert [r.id for r in rep.results] == list(FACTOR_CONDITIONS)
    assert rep.ok and rep.first_failure() is None


def test_non_homomorphic_action_rejected():
    # an action that is not multiplicative up to Z forces eta outside Z
    phi = np.array([[0, 2, 1, 3], [0, 1, 2, 3]])  # identity on the generator, swap on e
    with pytest.raises(InvalidFactors):
        forced_eta(C2, C4, CentralEmbedding(cyclic(1), [0], [0]), phi)


def test_bad_xi_rejected_with_condition():
    spec = trivial_factors(C2, C3)
    xi = np.array(spec.xi)
    z = CentralEmbedding(C2, [0, 1], [0, 0])
    bad = SmashedSpec(C2, C3, z, spec.phi, spec.eta, spec.kappa, xi)
    rep = validate_factors(bad)
    assert not rep.ok and rep.first_failure().id == "3.2.1"
    with pytest.raises(InvalidFactors, match="3.2.1"):
        smashed_product(bad)


def test_unit_condition():
    z = CentralEmbedding(C2, [0, 1], [0, 2])
    spec = trivial_factors(C2, C4, z)
    xi = np.array(spec.xi)
    xi[0, 5] = 1
    rep = validate_factors(SmashedSpec(C2, C4, z, spec.phi, spec.eta, spec.kappa, xi))
    assert not rep.ok


@pytest.mark.parametrize("twisted", [False, True])
def test_build_and_check_nonassociative(twisted):
    z = CentralEmbedding(C2, [0, 2], [0, 2])
    specs = list(search_factors(C4, C4, z, 10 ** 6))
    nonassoc = [s for s in specs if not classify(
        (smashed_twisted_product if twisted else smashed_product)(s)).is_group]
    assert nonassoc
    rep = build_and_check(nonassoc[0], twisted)
    assert rep.ok, [c.line() for c in rep.checks]
    assert rep.structure.is_metagroup and not rep.structure.is_group


def test_closed_form_on_octonion_factor():
    o = cayley_dickson(3)
    with pytest.raises(InvalidFactors, match="3.2.1"):
        smashed_product(trivial_factors(o, C2))      # Z must contain Z_m(A) = {1, -1}
    spec = trivial_factors(o, C2, CentralEmbedding(C2, [0, 8], [0, 1]))
    t = smashed_product(spec)
    assert check_closed_form(spec, t).passed


def test_b_slice_almost_normal():
    spec = from_action(C2, C3, None, INV3)
    t = smashed_product(spec)
    assert almost_normal(t, b_slice(spec, t))
    assert normal(t, b_slice(spec, t))
    a_copy = [0, 3]
    assert not almost_normal(t, a_copy)


def test_search_counts():
    z = CentralEmbedding(C2, [0, 2], [0, 2])
    plan = plan_search(C4, C4, z)
    assert plan.size == 1024
    assert sum(1 for _ in search_factors(C4, C4, z, 10 ** 6)) == 1024
    assert sum(1 for _ in search_factors(cyclic(1), cyclic(1), CentralEmbedding(cyclic(1), [0], [0]), 1)) == 1


def test_search_budget():
    with pytest.raises(SearchSpaceExceeded):
        list(search_factors(C2, C2, CentralEmbedding(cyclic(1), [0], [0]), 0))


def test_search_deterministic():
    z = CentralEmbedding(C2, [0, 1], [0, 2])
    a = [s.key() for s in search_factors(C2, C4, z, 10 ** 6)]
    b = [s.key() for s in search_factors(C2, C4, z, 10 ** 6)]
    assert a == b and len(a) == 2


def test_c2_c4_c2_exhaustion_all_associative():
    z = CentralEmbedding(C2, [0, 1], [0, 2])
    for s in search_factors(C2, C4, z, 10 ** 6):
        for tw in (False, True):
            assert classify((smashed_twisted_product if tw else smashed_product)(s)).is_group


def test_q8_spec_twisted_is_group():
    rep = build_and_check(trivial_factors(quaternion8(), cyclic(1)), twisted=True)
    assert rep.ok and rep.structure.is_group and rep.table.order == 8
    assert [c for c in rep.checks if c.id == "3.4.2"][0].checked == 512
