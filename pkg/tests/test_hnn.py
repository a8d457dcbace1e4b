import random

import pytest
from hypothesis import given, settings, strategies as st

from hnnresp.groups import GroupMap, make_abelian, subgroup_closure
from hnnresp.hnn import (
    CompatibilityError,
    PairError,
    conjugation_pair,
    core_fixpoint,
    core_orbit,
    forward_orbit_sets,
    induced_pair,
    make_pair,
    pair_embedding_check,
    pair_from_generators,
    semidirect_wrap,
    inclusion_into_wrap,
    trivial_pair,
    twisted_core,
    twisted_pair,
)
from hnnresp.random_pairs import random_small_pair


def mult_pair(p, k):
    G = make_abelian(p, [1])
    return pair_from_generators(G, [(1,)], [(k % p,)])


def test_multiplication_core_is_everything():
    core = core_fixpoint(mult_pair(3, 2))
    assert len(core.H) == 3 and core.r == 0 and core.order == 2
    assert not core.is_p_power_order()


def test_identity_core_has_order_one():
    assert core_fixpoint(mult_pair(5, 1)).order == 1


def test_trivial_pair_core():
    G = make_abelian(2, [2, 1])
    c = core_orbit(trivial_pair(G))
    assert c.H.is_trivial() and c.order == 1


def test_shift_core_shrinks_step_by_step():
    # A = <e1, e2>, φ(e1) = e2, φ(e2) = e3: the core is trivial.
    G = make_abelian(2, [1, 1, 1])
    pair = pair_from_generators(G, [(1, 0, 0), (0, 1, 0)], [(0, 1, 0), (0, 0, 1)])
    c = core_fixpoint(pair)
    assert c.H.is_trivial()
    assert c.sizes[0] == 2 and c.r >= 1
    H, s = forward_orbit_sets(pair)
    assert H == {G.identity} and s >= 1


def test_orbit_index_is_zero_only_for_full_A():
    G = make_abelian(3, [1, 1])
    full = pair_from_generators(G, [(1, 0), (0, 1)], [(0, 1), (1, 0)])
    assert forward_orbit_sets(full)[1] == 0
    assert forward_orbit_sets(mult_pair(3, 1))[1] == 0
    part = pair_from_generators(G, [(1, 0)], [(1, 0)])
    assert forward_orbit_sets(part)[1] == 1


def test_make_pair_rejects_non_injective_maps():
    G = make_abelian(3, [1, 1])
    A = G.whole()
    B = subgroup_closure(G, [(1, 0)])
    table = {a: (a[0], 0) for a in A.elements}
    with pytest.raises(Exception):
        make_pair(G, A, B, GroupMap(A, B, table))


def test_pair_from_generators_rejects_order_mismatch():
    G = make_abelian(3, [2])
    with pytest.raises((PairError, Exception)):
        pair_from_generators(G, [(1,)], [(3,)])


def test_induced_pair_needs_compatibility():
    G = make_abelian(3, [1, 1])
    pair = pair_from_generators(G, [(1, 0)], [(0, 1)])
    N = subgroup_closure(G, [(1, 0)])
    with pytest.raises(CompatibilityError):
        induced_pair(pair, N)
    q = induced_pair(pair, subgroup_closure(G, [(1, 1)]))
    assert q.G.order == 3


def test_twist_by_identity_is_original():
    pair = mult_pair(3, 2)
    e = pair.G.identity
    assert twisted_pair(pair, e, e).phi.table == pair.phi.table
    tc = twisted_core(pair, e, e)
    assert tc.order == 2 and len(tc.core) == 3


def test_twist_elements_must_be_in_A_and_B():
    G = make_abelian(3, [1, 1])
    pair = pair_from_generators(G, [(1, 0)], [(1, 0)])
    with pytest.raises(PairError):
        twisted_pair(pair, (0, 1), G.identity)


def test_wrap_conjugation_restricts_to_gamma():
    G = make_abelian(3, [1, 1])
    W = G.whole()
    gamma = GroupMap(W, W, {x: ((x[0] + x[1]) % 3, x[1]) for x in W.elements})
    Y, y = semidirect_wrap(G, gamma)
    src = make_pair(G, W, W, gamma)
    dst = conjugation_pair(Y, y)
    assert pair_embedding_check(inclusion_into_wrap(Y, G), src, dst)


def test_embedding_check_reports_non_commuting_square():
    src = mult_pair(3, 2)
    dst = mult_pair(3, 1)
    report = pair_embedding_check(lambda g: g, src, dst)
    assert not report and report.reason == "square does not commute"


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_cores_agree_on_random_pairs(seed):
    pair = random_small_pair(random.Random(seed))
    fixed = core_fixpoint(pair)
    orbit = core_orbit(pair)
    assert fixed.H == orbit.H
    assert {pair.phi(h) for h in fixed.H} == fixed.H.set
    assert fixed.H.set <= pair.intersection()


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_core_is_largest_invariant_subgroup(seed):
    # any subgroup of A ∩ B that φ maps onto itself lies in the core
    rng = random.Random(seed)
    pair = random_small_pair(rng)
    core = core_fixpoint(pair).H.set
    for h in pair.intersection():
        orbit = {h}
        x = h
        ok = True
        for _ in range(pair.G.order):
            if x not in pair.A.set:
                ok = False
                break
            x = pair.phi(x)
            if x in orbit:
                break
            orbit.add(x)
        inv_ok = all(g in pair.B.set for g in orbit)
        if ok and inv_ok and x == h:
            S = subgroup_closure(pair.G, sorted(orbit))
            if all(s in pair.A.set for s in S) and {pair.phi(s) for s in S} == S.set:
                assert S.set <= core
