"""HNN pairs (G, φ: A → B) and their cores.

The core H(G, φ) is the largest subgroup of A ∩ B that φ maps onto itself.
It is computed two ways: the two-sided fixpoint iteration starting from A ∩ B,
and the one-sided "forward orbit stays in A" iteration.  Neither touches the
ambient group beyond A and B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .groups import (
    Element,
    Group,
    GroupError,
    GroupMap,
    GroupMapError,
    Filtration,
    QuotientGroup,
    Subgroup,
    automorphism_order,
    extend_generator_images,
    is_normal,
    is_prime_power,
    make_cyclic_extension,
    subgroup_closure,
)


class PairError(GroupError):
    """The data does not form an HNN pair."""


class CompatibilityError(PairError):
    """φ(A ∩ N) ≠ B ∩ N; ``witness`` is an offending element."""

    def __init__(self, message: str, witness: Element | None = None):
        super().__init__(message)
        self.witness = witness


class OracleDisagreement(AssertionError):
    """Two independent computations of the same object differ."""


@dataclass(frozen=True, eq=False)
class HnnPair:
    G: Group
    A: Subgroup
    B: Subgroup
    phi: GroupMap

    def __post_init__(self):
        inv = {v: k for k, v in self.phi.table.items()}
        object.__setattr__(self, "phi_inv", inv)

    @property
    def p(self) -> int | None:
        return self.G.p

    def intersection(self) -> frozenset[Element]:
        return self.A.set & self.B.set

    def __repr__(self) -> str:
        return f"HnnPair(|G|={self.G.order}, |A|={len(self.A)}, |A∩B|={len(self.intersection())})"


def make_pair(G: Group, A: Subgroup, B: Subgroup, phi: GroupMap) -> HnnPair:
    """Validate φ: A → B as an isomorphism and package the pair."""
    if phi.domain.set != A.set:
        raise PairError("φ is not defined on all of A")
    if not all(G.contains(g) for g in A.elements) or not all(G.contains(g) for g in B.elements):
        raise PairError("A and B must be subgroups of G")
    if not phi.is_injective():
        raise PairError("φ is not injective")
    if phi.image() != B.set:
        raise PairError("the image of φ is not B")
    if not phi.is_homomorphism():
        raise PairError("φ is not multiplicative")
    return HnnPair(G, A, B, GroupMap(A, B, dict(phi.table)))


def pair_from_generators(G: Group, a_gens: Iterable[Element], images: Iterable[Element]) -> HnnPair:
    """A = <a_gens>, φ determined by generator images, B = φ(A)."""
    a_gens = list(a_gens)
    images = list(images)
    A = subgroup_closure(G, a_gens)
    if not a_gens:
        return make_pair(G, A, A, GroupMap.identity_on(A))
    try:
        phi = extend_generator_images(A, a_gens, images, G)
    except GroupMapError as exc:
        raise PairError(str(exc)) from exc
    B = subgroup_closure(G, images)
    return make_pair(G, A, B, GroupMap(A, B, dict(phi.table)))


def trivial_pair(G: Group) -> HnnPair:
    T = G.trivial()
    return HnnPair(G, T, T, GroupMap.identity_on(T))


# ---------------------------------------------------------------------------
# cores


@dataclass(frozen=True, eq=False)
class Core:
    pair: HnnPair
    H: Subgroup
    r: int
    sizes: tuple[int, ...] = ()
    orbit_index: int | None = None

    @property
    def restricted(self) -> GroupMap:
        t = self.pair.phi.table
        return GroupMap(self.H, self.H, {h: t[h] for h in self.H.elements})

    @property
    def order(self) -> int:
        """Order of φ restricted to the core."""
        return automorphism_order(self.restricted)

    def is_p_power_order(self) -> bool:
        return is_prime_power(self.order, self.pair.p)


def core_iterates(start: Iterable[Element], fwd: Callable[[Element], Element],
                  bwd: Callable[[Element], Element]) -> tuple[set[Element], int, list[int]]:
    """Iterate H_{i+1} = φ^-1(H_i) ∩ H_i ∩ φ(H_i) from H_0 = start ⊆ A ∩ B.

    Returns (H, r, sizes) with r the least i such that H_i = H_{i+1}.
    """
    H = set(start)
    sizes = [len(H)]
    r = 0
    while True:
        nxt = {h for h in H if fwd(h) in H and bwd(h) in H}
        if len(nxt) == len(H):
            return H, r, sizes
        H = nxt
        sizes.append(len(H))
        r += 1


def core_fixpoint(pair: HnnPair) -> Core:
    """H(G, φ) by the descending two-sided iteration from A ∩ B."""
    t, ti = pair.phi.table, pair.phi_inv
    H, r, sizes = core_iterates(pair.intersection(), t.__getitem__, ti.__getitem__)
    if {t[h] for h in H} != H:
        raise OracleDisagreement("fixpoint iteration ended on a set that φ does not preserve")
    return Core(pair, Subgroup(pair.G, tuple(H)), r, tuple(sizes))


def forward_orbit_sets(pair: HnnPair) -> tuple[set[Element], int]:
    """H'_s = {g : φ^j(g) defined for j = 0..s}; H'_0 = G and H'_1 = A.

    Returns the stable set and the least s >= 0 with H'_s = H'_{s+1}.
    """
    t = pair.phi.table
    A = pair.A.set
    if len(A) == pair.G.order:
        return set(A), 0
    current = set(A)
    s = 1
    while True:
        nxt = {g for g in current if t[g] in A and t[g] in current}
        if len(nxt) == len(current):
            return current, s
        current = nxt
        s += 1


def core_orbit(pair: HnnPair, check: bool = True) -> Core:
    """H(G, φ) as the set of elements whose forward φ-orbit never leaves A.

    Cross-checked against ``core_fixpoint``; a mismatch raises OracleDisagreement.
    """
    H, s = forward_orbit_sets(pair)
    fixed = core_fixpoint(pair)
    if check and H != fixed.H.set:
        raise OracleDisagreement(
            f"orbit core has {len(H)} elements, fixpoint core has {len(fixed.H)}")
    return Core(pair, Subgroup(pair.G, tuple(H)), fixed.r, fixed.sizes, s)


def orbit_order(elements: Iterable[Element], fwd: Callable[[Element], Element]) -> int:
    """Order of a permutation given as a callable on a finite set (lcm of cycles)."""
    seen: set[Element] = set()
    order = 1
    for g in sorted(elements):
        if g in seen:
            continue
        length, x = 0, g
        while True:
            seen.add(x)
            x = fwd(x)
            length += 1
            if x == g:
                break
            if length > 10**7:
                raise GroupMapError("map does not permute the set")
        order = math.lcm(order, length)
    return order


# ---------------------------------------------------------------------------
# induced pairs


def _check_compatible(pair: HnnPair, N: Subgroup) -> None:
    t, ti = pair.phi.table, pair.phi_inv
    for a in pair.A.elements:
        if a in N and t[a] not in N:
            raise CompatibilityError("φ(A ∩ N) is not contained in B ∩ N", a)
    for b in pair.B.elements:
        if b in N and ti[b] not in N:
            raise CompatibilityError("B ∩ N is not contained in φ(A ∩ N)", b)


def _induced(pair: HnnPair, Q: QuotientGroup, A_part: Iterable[Element]) -> HnnPair:
    t = pair.phi.table
    table: dict[Element, Element] = {}
    for a in A_part:
        ra, rb = Q.rep(a), Q.rep(t[a])
        old = table.setdefault(ra, rb)
        if old != rb:
            raise CompatibilityError("induced map is not well defined", a)
    A_bar = Subgroup(Q, tuple(table))
    B_bar = Subgroup(Q, tuple(set(table.values())))
    return HnnPair(Q, A_bar, B_bar, GroupMap(A_bar, B_bar, table))


def induced_pair(pair: HnnPair, N: Subgroup) -> HnnPair:
    """The pair (G/N, AN/N → BN/N) induced by φ."""
    G = pair.G
    if not is_normal(G, N):
        raise GroupError("N is not normal in G")
    _check_compatible(pair, N)
    return _induced(pair, QuotientGroup(G, N), pair.A.elements)


def induced_layer_pair(pair: HnnPair, f: Filtration, i: int, j: int) -> HnnPair:
    """(G_i/G_j, φ_ij): (A∩G_i)G_j/G_j → (B∩G_i)G_j/G_j, 1-indexed, i < j."""
    if not i < j:
        raise ValueError("layer pairs need i < j")
    return quotient_layer_pair(pair, f.term(i), f.term(j))


def quotient_layer_pair(pair: HnnPair, Gi: Subgroup, Gj: Subgroup, check: bool = True) -> HnnPair:
    """The pair on Gi/Gj induced by φ, for normal Gj ⊆ Gi compatible with φ."""
    if check:
        _check_compatible(pair, Gi)
        _check_compatible(pair, Gj)
    Q = QuotientGroup(Gi.as_group() if len(Gi) < pair.G.order else pair.G, Gj)
    return _induced(pair, Q, (a for a in pair.A.elements if a in Gi))


# ---------------------------------------------------------------------------
# twists


def twisted_maps(pair: HnnPair, a: Element, b: Element) -> tuple[Callable, Callable]:
    """c_b ∘ φ ∘ c_a and its inverse, as callables on A resp. B."""
    G = pair.G
    t, ti = pair.phi.table, pair.phi_inv
    mul, inv = G.mul, G.inv
    ai, bi = inv(a), inv(b)

    def fwd(x):
        return mul(mul(bi, t[mul(mul(ai, x), a)]), b)

    def bwd(y):
        return mul(mul(a, ti[mul(mul(b, y), bi)]), ai)

    return fwd, bwd


def twisted_pair(pair: HnnPair, a: Element, b: Element) -> HnnPair:
    """The pair with isomorphism c_b ∘ φ ∘ c_a : A → B."""
    if a not in pair.A:
        raise PairError("twist element a must lie in A")
    if b not in pair.B:
        raise PairError("twist element b must lie in B")
    fwd, _ = twisted_maps(pair, a, b)
    table = {x: fwd(x) for x in pair.A.elements}
    psi = GroupMap(pair.A, Subgroup(pair.G, tuple(set(table.values()))), table)
    if psi.codomain.set != pair.B.set or not psi.is_injective():
        raise PairError("twisted map is not an isomorphism A → B")
    return HnnPair(pair.G, pair.A, pair.B, GroupMap(pair.A, pair.B, table))


@dataclass(frozen=True)
class TwistedCore:
    a: Element
    b: Element
    core: frozenset
    order: int
    r: int


def twisted_core(pair: HnnPair, a: Element, b: Element) -> TwistedCore:
    """Core of the twisted pair and the order of the twisted map on it.

    Only A ∩ B and its images are touched, so this is cheap even when A is large.
    """
    fwd, bwd = twisted_maps(pair, a, b)
    H, r, _ = core_iterates(pair.intersection(), fwd, bwd)
    return TwistedCore(a, b, frozenset(H), orbit_order(H, fwd), r)


# ---------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class EmbeddingCheck:
    ok: bool
    reason: str = ""
    counterexample: Element | None = None

    def __bool__(self) -> bool:
        return self.ok


def pair_embedding_check(alpha: GroupMap | Callable[[Element], Element], src: HnnPair, dst: HnnPair,
                         check_cores: bool = True) -> EmbeddingCheck:
    """Is alpha an embedding of HNN pairs src → dst?

    ``alpha`` is a GroupMap defined on (at least) the elements of src needed, or
    a callable together with src enumerable.  When the square commutes, the
    monotonicity α(H(src)) ⊆ H(dst) is asserted as well.
    """
    f = alpha.table.__getitem__ if isinstance(alpha, GroupMap) else alpha
    Gs, Gd = src.G, dst.G
    domain = alpha.domain.elements if isinstance(alpha, GroupMap) else Gs.elements()
    images = {}
    for g in domain:
        images[g] = f(g)
    if len(set(images.values())) != len(images):
        seen = {}
        for g, x in images.items():
            if x in seen:
                return EmbeddingCheck(False, "not injective", g)
            seen[x] = g
    if Gs.generators and all(s in images for s in Gs.generators):
        gens = Gs.generators
    else:
        gens = tuple(domain)
    for x in domain:
        for s in gens:
            xs = Gs.mul(x, s)
            if xs in images and images[xs] != Gd.mul(images[x], images[s]):
                return EmbeddingCheck(False, "not multiplicative", x)
    for a in src.A.elements:
        if images[a] not in dst.A:
            return EmbeddingCheck(False, "α(A) ⊄ A'", a)
    for b in src.B.elements:
        if images[b] not in dst.B:
            return EmbeddingCheck(False, "α(B) ⊄ B'", b)
    t, td = src.phi.table, dst.phi.table
    for a in src.A.elements:
        if images[t[a]] != td[images[a]]:
            return EmbeddingCheck(False, "square does not commute", a)
    if check_cores:
        Hs = core_fixpoint(src).H
        if dst.A.set == dst.B.set == frozenset(td.keys()) and len(dst.A) == dst.G.order:
            Hd = dst.A.set  # φ' is an automorphism of all of G'
        else:
            Hd = core_fixpoint(dst).H.set
        for h in Hs.elements:
            if images[h] not in Hd:
                raise OracleDisagreement(f"embedding does not carry the core into the core at {h}")
    return EmbeddingCheck(True)


def semidirect_wrap(X: Group, gamma: GroupMap) -> tuple[Group, Element]:
    """Y = Z/p^k ⋉ X with the generator acting via gamma, and y = (1, 1).

    Conjugation by y restricts to gamma on X.
    """
    if X.p is None:
        raise GroupError("semidirect_wrap needs a p-group")
    return make_cyclic_extension(X, gamma, X.p)


def inclusion_into_wrap(Y: Group, X: Group) -> Callable[[Element], Element]:
    """x ↦ (0, x) for Y built by ``semidirect_wrap``."""
    prefix = Y.top.identity
    return lambda x: prefix + x


def conjugation_pair(Y: Group, y: Element, cap: int = 3**12) -> HnnPair:
    """(Y, c_y) as an HNN pair with A = B = Y."""
    W = Y.whole() if Y.is_enumerable(cap) else None
    if W is None:
        raise GroupError("conjugation pair needs an enumerable group")
    table = {g: Y.conj(g, y) for g in W.elements}
    return HnnPair(Y, W, W, GroupMap(W, W, table))
