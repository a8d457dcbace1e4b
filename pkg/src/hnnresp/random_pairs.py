"""Seeded generators of small HNN pairs for property tests and surveys."""

from __future__ import annotations

import random
from typing import Callable

from .groups import (
    Group,
    GroupMap,
    GroupMapError,
    Subgroup,
    extend_generator_images,
    make_abelian,
    make_group_ring_semidirect,
    make_matrix_semidirect,
    small_generating_set,
    subgroup_closure,
)
from .hnn import HnnPair, make_pair, pair_from_generators
from .linalg import det_mod


def random_exponents(rng: random.Random, p: int, max_order: int) -> list[int]:
    """A random partition of some n with p^n <= max_order."""
    n_max = 0
    while p ** (n_max + 1) <= max_order:
        n_max += 1
    n = rng.randint(1, max(1, n_max))
    parts = []
    while n:
        k = rng.randint(1, n)
        parts.append(k)
        n -= k
    return sorted(parts, reverse=True)


def random_subgroup(rng: random.Random, G: Group, max_gens: int = 2) -> Subgroup:
    elements = G.elements()
    gens = [rng.choice(elements) for _ in range(rng.randint(1, max_gens))]
    return subgroup_closure(G, gens)


def random_injection(rng: random.Random, G: Group, A: Subgroup, tries: int = 40) -> GroupMap | None:
    """A random injective homomorphism A → G, or None if none was hit."""
    gens = list(A.generators) or small_generating_set(A)
    if not gens:
        return GroupMap.identity_on(A)
    elements = G.elements()
    for _ in range(tries):
        images = [rng.choice(elements) for _ in gens]
        try:
            f = extend_generator_images(A, gens, images, G)
        except GroupMapError:
            continue
        if f.is_injective():
            return f
    return None


def conjugation_fallback(rng: random.Random, G: Group, A: Subgroup) -> GroupMap:
    g = rng.choice(G.elements())
    table = {a: G.conj(a, g) for a in A.elements}
    return GroupMap(A, Subgroup(G, tuple(set(table.values()))), table)


def pair_from_injection(G: Group, f: GroupMap) -> HnnPair:
    B = Subgroup(G, tuple(set(f.table.values())))
    return make_pair(G, f.domain, B, GroupMap(f.domain, B, dict(f.table)))


def random_abelian_pair(rng: random.Random, p: int | None = None, max_order: int = 81) -> HnnPair:
    """Random abelian p-group of order <= max_order with a random injection A → G."""
    if p is None:
        p = rng.choice([2, 3])
    G = make_abelian(p, random_exponents(rng, p, max_order))
    A = random_subgroup(rng, G, max_gens=3)
    f = random_injection(rng, G, A)
    if f is None:
        f = GroupMap.identity_on(A)
    return pair_from_injection(G, f)


def random_unipotent(rng: random.Random, p: int, n: int) -> list[list[int]]:
    """T U T^-1 with U upper unitriangular and T random invertible."""
    U = [[1 if i == j else (rng.randrange(p) if j > i else 0) for j in range(n)] for i in range(n)]
    T = random_invertible(rng, p, n)
    Tinv = _inverse(T, p)
    return _mul(_mul(T, U, p), Tinv, p)


def random_invertible(rng: random.Random, p: int, n: int) -> list[list[int]]:
    while True:
        M = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        if n == 0 or det_mod(M, p):
            return M


def _mul(a, b, p):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) % p for j in range(len(b[0]))] for i in range(len(a))]


def _inverse(M, p):
    from .linalg import solve

    n = len(M)
    cols = [[M[i][j] for i in range(n)] for j in range(n)]
    inv_cols = [solve(cols, [int(i == j) for i in range(n)], p) for j in range(n)]
    return [[inv_cols[j][i] for j in range(n)] for i in range(n)]


def random_elementary_pair(rng: random.Random, p: int | None = None, max_dim: int = 4) -> HnnPair:
    """Elementary abelian pair with φ(A∩B) = A∩B unipotent (so of p-power order).

    A random basis of F_p^n is split into C, P, Q, S with |P| = |Q|;
    A = C ⊕ P, B = C ⊕ Q, φ is unipotent on C and sends P_j to Q_j plus a
    random element of C.
    """
    if p is None:
        p = rng.choice([2, 3])
    n = rng.randint(1, max_dim)
    q = rng.randint(0, n // 2)
    c = rng.randint(0, n - 2 * q)
    if c + q == 0:
        c = 1 if n - 2 * q >= 1 else c
        if c + q == 0:
            q = 1
    T = random_invertible(rng, p, n)
    basis = [tuple(T[i][j] for i in range(n)) for j in range(n)]
    C, P, Q = basis[:c], basis[c:c + q], basis[c + q:c + 2 * q]
    G = make_abelian(p, [1] * n)
    u = random_unipotent(rng, p, c)

    def comb(coeffs, vecs):
        out = [0] * n
        for k, v in zip(coeffs, vecs):
            for i in range(n):
                out[i] = (out[i] + k * v[i]) % p
        return tuple(out)

    images = []
    for j in range(c):
        images.append(comb([u[i][j] for i in range(c)], C))
    for j in range(q):
        shift = comb([rng.randrange(p) for _ in range(c)], C)
        images.append(tuple((a + b) % p for a, b in zip(Q[j], shift)))
    return pair_from_generators(G, C + P, images)


def random_pipeline_pair(rng: random.Random, p: int | None = None, max_order: int = 81,
                         tries: int = 200) -> HnnPair:
    """Abelian pair with φ a p-power-order automorphism of A ∩ B.

    Rejection sampling over ``random_abelian_pair``, preferring a nontrivial
    intersection; falls back to the last valid draw.
    """
    from .abelian import check_pipeline_hypothesis
    from .filtrations import PreconditionError

    fallback = None
    for _ in range(tries):
        pair = random_abelian_pair(rng, p, max_order)
        try:
            check_pipeline_hypothesis(pair)
        except PreconditionError:
            continue
        if len(pair.intersection()) > 1:
            return pair
        fallback = fallback or pair
    if fallback is None:
        raise RuntimeError("no pair met the hypothesis")
    return fallback


SMALL_NONABELIAN: dict[int, list[Callable[[], Group]]] = {
    2: [
        lambda: make_matrix_semidirect(2, 2, [[1, 1], [0, 1]]),
        lambda: make_matrix_semidirect(2, 4, [[1, 1, 0], [0, 1, 1], [0, 0, 1]]),
        lambda: make_matrix_semidirect(2, 4, [[1, 1], [0, 1]]),
        lambda: make_group_ring_semidirect(2, 1),
    ],
    3: [
        lambda: make_matrix_semidirect(3, 3, [[1, 1], [0, 1]]),
        lambda: make_matrix_semidirect(3, 9, [[1, 1], [0, 1]]),
        lambda: make_matrix_semidirect(3, 3, [[1, 1, 0], [0, 1, 1], [0, 0, 1]]),
        lambda: make_matrix_semidirect(3, 3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]], [(1, 1, 1)]),
        lambda: make_group_ring_semidirect(3, 1),
    ],
}


def random_nonabelian_pair(rng: random.Random, p: int | None = None) -> HnnPair:
    """A random pair in a small non-abelian p-group (order <= 81)."""
    if p is None:
        p = rng.choice([2, 3])
    G = rng.choice(SMALL_NONABELIAN[p])()
    A = random_subgroup(rng, G)
    f = random_injection(rng, G, A, tries=20)
    if f is None:
        f = conjugation_fallback(rng, G, A)
    return pair_from_injection(G, f)


def random_small_pair(rng: random.Random, p: int | None = None) -> HnnPair:
    if rng.random() < 0.5:
        return random_abelian_pair(rng, p, 81)
    return random_nonabelian_pair(rng, p)
