import pytest
from hypothesis import given, strategies as st

from hnnresp.groups import (
    Filtration,
    GroupError,
    GroupMap,
    GroupMapError,
    Subgroup,
    automorphism_order,
    center,
    check_group_axioms,
    extend_generator_images,
    is_normal,
    lower_central_series,
    make_abelian,
    make_cyclic_extension,
    make_group_ring_semidirect,
    make_matrix_semidirect,
    minimal_central_subgroups,
    normal_closure,
    normal_subgroups,
    quotient,
    subgroup_closure,
)

HEISENBERG = lambda: make_matrix_semidirect(3, 3, [[1, 1], [0, 1]])  # noqa: E731


@pytest.mark.parametrize("build, order", [
    (lambda: make_abelian(3, [2, 1]), 27),
    (lambda: make_abelian(2, [1, 1, 1]), 8),
    (HEISENBERG, 27),
    (lambda: make_matrix_semidirect(3, 3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]], [(1, 1, 1)]), 27),
    (lambda: make_group_ring_semidirect(2, 1), 8),
    (lambda: make_group_ring_semidirect(3, 1), 81),
])
def test_constructors_satisfy_axioms(build, order):
    G = build()
    assert G.order == order == len(G.elements())
    check_group_axioms(G)


def test_wreath_order_without_enumeration():
    G = make_group_ring_semidirect(3, 2)
    assert G.order == 3 ** 11
    assert G.width == 9


@pytest.mark.parametrize("bad", [
    lambda: make_abelian(4, [1]),
    lambda: make_abelian(3, []),
    lambda: make_abelian(3, [0]),
    lambda: make_matrix_semidirect(3, 3, [[1, 1], [1, 1]]),
    lambda: make_matrix_semidirect(3, 2, [[1, 1], [0, 1]]),
    lambda: make_matrix_semidirect(3, 3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]], [(1, 2, 0)]),
])
def test_constructor_errors(bad):
    with pytest.raises(GroupError):
        bad()


def test_closure_and_quotient():
    G = make_abelian(3, [2, 1])
    S = subgroup_closure(G, [(3, 0)])
    assert len(S) == 3
    Q, proj = quotient(G, S)
    assert Q.order == 9
    assert proj.is_homomorphism() and proj.is_surjective()
    assert set(proj.table[s] for s in S) == {Q.identity}


def test_heisenberg_structure():
    G = HEISENBERG()
    Z = center(G)
    assert len(Z) == 3
    lcs = lower_central_series(G)
    assert lcs.orders() == [27, 3, 1]
    assert lcs.term(2) == Z
    assert minimal_central_subgroups(G) == [Z]
    assert all(is_normal(G, N) for N in normal_subgroups(G))


def test_cyclic_shift_commutator_subgroup():
    G = make_matrix_semidirect(3, 3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]], [(1, 1, 1)])
    assert lower_central_series(G).orders() == [27, 3, 1]


def test_normal_closure_is_normal():
    G = make_group_ring_semidirect(2, 1)
    x = G.generators[0]
    N = normal_closure(G, [x])
    assert is_normal(G, N) and x in N


def test_group_map_validation():
    G = make_abelian(3, [1])
    W = G.whole()
    with pytest.raises(GroupMapError):
        GroupMap(W, W, {(0,): (0,)})
    f = GroupMap(W, W, {(0,): (0,), (1,): (2,), (2,): (1,)})
    assert f.is_isomorphism()
    assert automorphism_order(f) == 2
    assert f.inverse().compose(f) == GroupMap.identity_on(W)


def test_extend_generator_images_detects_conflicts():
    G = make_abelian(3, [2])
    W = G.whole()
    with pytest.raises(GroupMapError):
        extend_generator_images(subgroup_closure(G, [(3,)]), [(3,)], [(1,)], G)
    f = extend_generator_images(W, [(1,)], [(4,)], G)
    assert f.is_isomorphism() and automorphism_order(f) == 3


def test_filtration_validation():
    G = make_abelian(2, [2])
    W, T = G.whole(), G.trivial()
    S = subgroup_closure(G, [(2,)])
    assert Filtration(G, [W, S, T]).term(5) == T
    with pytest.raises(GroupError):
        Filtration(G, [S, T])
    with pytest.raises(GroupError):
        Filtration(G, [W, S, S, T])
    H = make_group_ring_semidirect(2, 1)
    non_normal = subgroup_closure(H, [H.generators[1]])
    if not is_normal(H, non_normal):
        with pytest.raises(GroupError):
            Filtration(H, [H.whole(), non_normal, H.trivial()])


def test_cyclic_extension_conjugation_is_gamma():
    X = make_abelian(3, [1, 1])
    W = X.whole()
    gamma = GroupMap(W, W, {x: ((x[0] + x[1]) % 3, x[1]) for x in W.elements})
    Y, y = make_cyclic_extension(X, gamma, 3)
    assert Y.order == 27
    for x in W.elements:
        assert Y.conj((0,) + x, y) == (0,) + gamma.table[x]


@given(st.lists(st.integers(0, 8), min_size=2, max_size=2), st.lists(st.integers(0, 8), min_size=2, max_size=2))
def test_subgroup_closure_contains_generators(g, h):
    G = make_abelian(3, [2, 2])
    S = subgroup_closure(G, [tuple(g), tuple(h)])
    assert tuple(g) in S and tuple(h) in S
    assert G.order % len(S) == 0
    assert all(G.mul(a, b) in S for a in S.elements[:5] for b in S.elements[:5])


def test_subgroup_set_semantics():
    G = make_abelian(2, [1, 1])
    a = subgroup_closure(G, [(1, 0)])
    b = Subgroup(G, ((1, 0), (0, 0)))
    assert a == b and hash(a) == hash(b)
    assert a < G.whole()
    assert (a & subgroup_closure(G, [(0, 1)])).is_trivial()
