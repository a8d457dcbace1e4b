import random

import pytest
from hypothesis import given, settings, strategies as st

from hnnresp import filtrations as flt
from hnnresp.groups import Filtration, NotEnumerableError, lower_central_series, make_abelian, subgroup_closure
from hnnresp.hnn import pair_from_generators, trivial_pair
from hnnresp.random_pairs import random_small_pair

from helpers import candidate_filtrations, sandwich


def mult_pair(p, k):
    G = make_abelian(p, [1])
    return pair_from_generators(G, [(1,)], [(k % p,)])


def test_multiplication_by_two_is_refuted():
    pair = mult_pair(3, 2)
    d = flt.decide_chief(pair)
    assert d.is_no and d.certificate["type"] == "exhausted"
    v = flt.obstruction_toplevel(pair)
    assert v is not None and v.order == 2


def test_trivial_pair_has_chief_certificate():
    G = make_abelian(3, [1, 1])
    pair = trivial_pair(G)
    d = flt.decide_chief(pair)
    assert d.is_yes
    ok, reason = flt.verify_chief_certificate(pair, d.filtration)
    assert ok, reason
    assert d.filtration.orders() == [9, 3, 1]


def test_unipotent_map_has_chief_certificate():
    G = make_abelian(3, [1, 1])
    pair = pair_from_generators(G, [(1, 0), (0, 1)], [(1, 0), (1, 1)])
    d = flt.decide_chief(pair)
    assert d.is_yes
    assert flt.congruence_failure(pair, d.filtration) is None


def test_certificate_checker_rejects_bad_filtrations():
    G = make_abelian(3, [1, 1])
    pair = pair_from_generators(G, [(1, 0), (0, 1)], [(1, 0), (1, 1)])
    wrong = Filtration(G, [G.whole(), subgroup_closure(G, [(0, 1)]), G.trivial()])
    assert flt.verify_chief_certificate(pair, wrong) == (False, "filtration is not compatible with φ")
    right = Filtration(G, [G.whole(), subgroup_closure(G, [(1, 0)]), G.trivial()])
    assert flt.verify_chief_certificate(pair, right) == (True, "ok")
    coarse = Filtration(G, [G.whole(), G.trivial()])
    ok, reason = flt.verify_chief_certificate(pair, coarse)
    assert not ok and "order p" in reason


def test_cap_is_enforced():
    pair = mult_pair(3, 2)
    with pytest.raises(NotEnumerableError):
        flt.decide_chief(pair, cap=2)


def test_predicates_on_lower_central_series():
    from hnnresp.groups import make_matrix_semidirect

    G = make_matrix_semidirect(3, 3, [[1, 1], [0, 1]])
    f = lower_central_series(G)
    assert flt.is_central(f)
    assert not flt.is_chief(f)
    pair = trivial_pair(G)
    assert flt.is_compatible(pair, f)
    assert flt.sufficient_layerwise(pair, f)
    assert flt.sufficient_quotient(pair, f)


def test_layer_orders_detect_bad_action():
    G = make_abelian(5, [1, 1])
    pair = pair_from_generators(G, [(1, 0), (0, 1)], [(2, 0), (0, 1)])
    f = Filtration(G, [G.whole(), subgroup_closure(G, [(1, 0)]), G.trivial()])
    assert flt.layer_core_orders(pair, f) == [1, 4]
    assert not flt.sufficient_layerwise(pair, f)
    assert flt.quotient_core_orders(pair, f) == [1, 4]


def test_preconditions_are_named():
    G = make_abelian(3, [1, 1])
    pair = pair_from_generators(G, [(1, 0)], [(0, 1)])
    f = Filtration(G, [G.whole(), subgroup_closure(G, [(1, 0)]), G.trivial()])
    with pytest.raises(flt.PreconditionError, match="compatible"):
        flt.layer_core_orders(pair, f)


def test_obstruction_full_inconclusive_on_good_pair():
    G = make_abelian(2, [1, 1])
    pair = pair_from_generators(G, [(1, 0)], [(1, 0)])
    d = flt.obstruction_full(pair)
    assert d.verdict == flt.INCONCLUSIVE
    assert d.certificate["type"] == "surviving_filtration"


def test_violation_json_shape():
    v = flt.obstruction_toplevel(mult_pair(5, 2))
    data = v.to_json()
    assert set(data) == {"i", "j", "a", "b", "order", "core"}
    assert data["order"] == 4 and data["j"] is None


def test_chief_search_without_memo_agrees():
    rng = random.Random(7)
    for _ in range(25):
        pair = random_small_pair(rng)
        assert flt.decide_chief(pair).verdict == flt.decide_chief(pair, memoize=False).verdict


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_sandwich_on_random_pairs(seed):
    pair = random_small_pair(random.Random(seed))
    chief = flt.decide_chief(pair)
    if chief.is_yes:
        assert flt.verify_chief_certificate(pair, chief.filtration)[0]
    sandwich(pair, chief)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_candidate_filtrations_are_central_and_compatible(seed):
    pair = random_small_pair(random.Random(seed))
    for f in candidate_filtrations(pair):
        assert flt.is_central(f) and flt.is_compatible(pair, f)
        assert len(flt.layer_core_orders(pair, f)) == len(f) - 1


def naive_scan(pair):
    from hnnresp.groups import is_prime_power
    from hnnresp.hnn import twisted_core

    for b in sorted(pair.B.elements):
        for a in sorted(pair.A.elements):
            tc = twisted_core(pair, a, b)
            if not is_prime_power(tc.order, pair.p):
                return a, b, tc.order
    return None


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_twist_scan_matches_naive_scan(seed):
    pair = random_small_pair(random.Random(seed))
    if len(pair.A) * len(pair.B) > 3**6:
        return
    v = flt.scan_twists(pair)
    expected = naive_scan(pair)
    assert (None if v is None else (v.a, v.b, v.order)) == expected
