"""Finite groups with canonical integer-tuple elements.

Every group here encodes its elements as tuples of non-negative ints, with the
identity as the all-zeros tuple, so the identity is always the lexicographic
minimum.  Subgroups are explicit sorted element sets; nothing below enumerates
an ambient group unless the operation needs it and the group is under the
enumeration cap.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from sympy import isprime

from . import linalg

Element = tuple[int, ...]

DEFAULT_CAP = 3**12
MAX_RING_WIDTH = 64


class GroupError(ValueError):
    """Invalid group data (bad parameters, non-normal subgroup, ...)."""


class NotEnumerableError(GroupError):
    """The operation needs the whole group but it is larger than the cap."""


def is_prime_power(n: int, p: int) -> bool:
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def p_valuation(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


class Group:
    """A finite group with multiplication and inverse oracles.

    Subclasses implement ``mul``, ``inv``, ``contains`` and ``_iter_elements``.
    """

    kind = "group"

    def __init__(self, params: dict, order: int, identity: Element,
                 generators: Sequence[Element], p: int | None = None):
        self.params = params
        self.order = order
        self.identity = identity
        self.generators = tuple(generators)
        self.p = p

    def mul(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inv(self, g: Element) -> Element:
        raise NotImplementedError

    def contains(self, g: Element) -> bool:
        raise NotImplementedError

    def _iter_elements(self) -> Iterator[Element]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(order={self.order}, {self.params})"

    def is_enumerable(self, cap: int = DEFAULT_CAP) -> bool:
        return self.order <= cap

    def elements(self, cap: int = DEFAULT_CAP) -> tuple[Element, ...]:
        if not self.is_enumerable(cap):
            raise NotEnumerableError(f"group of order {self.order} exceeds the cap {cap}")
        return self._elements

    @cached_property
    def _elements(self) -> tuple[Element, ...]:
        return tuple(sorted(self._iter_elements()))

    # -- codec -------------------------------------------------------------
    def encode(self, g: Element) -> list[int]:
        return list(g)

    def decode(self, data: Sequence[int]) -> Element:
        g = tuple(int(x) for x in data)
        if not self.contains(g):
            raise GroupError(f"{list(data)} is not a canonical element of {self!r}")
        return g

    # -- derived operations --------------------------------------------------
    def power(self, g: Element, n: int) -> Element:
        if n < 0:
            g, n = self.inv(g), -n
        result = self.identity
        base = g
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def element_order(self, g: Element) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def conj(self, x: Element, by: Element) -> Element:
        """c_by(x) = by^-1 x by."""
        return self.mul(self.mul(self.inv(by), x), by)

    def commutator(self, g: Element, h: Element) -> Element:
        """[g, h] = g^-1 h^-1 g h."""
        return self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def whole(self) -> "Subgroup":
        """The group itself as a Subgroup (needs enumeration)."""
        return Subgroup(self, self.elements(), self.generators)

    def trivial(self) -> "Subgroup":
        return Subgroup(self, (self.identity,), ())


class AbelianGroup(Group):
    """Direct sum of cyclic groups Z/m_1 + ... + Z/m_d, written additively."""

    kind = "abelian"

    def __init__(self, moduli: Sequence[int], p: int | None = None, params: dict | None = None):
        self.moduli = tuple(int(m) for m in moduli)
        d = len(self.moduli)
        gens = [tuple(int(i == j) % self.moduli[j] if self.moduli[j] > 1 else 0 for j in range(d))
                for i in range(d) if self.moduli[i] > 1]
        super().__init__(params if params is not None else {"moduli": list(self.moduli)},
                         math.prod(self.moduli), (0,) * d, gens, p)

    def mul(self, g, h):
        return tuple((a + b) % m for a, b, m in zip(g, h, self.moduli))

    def inv(self, g):
        return tuple((-a) % m for a, m in zip(g, self.moduli))

    def add(self, g, h):
        return self.mul(g, h)

    def scale(self, g, k: int):
        return tuple((k * a) % m for a, m in zip(g, self.moduli))

    def contains(self, g):
        return (isinstance(g, tuple) and len(g) == len(self.moduli)
                and all(isinstance(a, int) and 0 <= a < m for a, m in zip(g, self.moduli)))

    def _iter_elements(self):
        return itertools.product(*(range(m) for m in self.moduli))

    def is_abelian(self) -> bool:
        return True

    @property
    def exponents(self) -> list[int]:
        return [p_valuation(m, self.p) for m in self.moduli] if self.p else []


class VectorQuotient(Group):
    """F_p^n modulo the span of some relation vectors.

    Elements are full n-vectors reduced against the RREF of the relations, so
    pivot coordinates are always zero.
    """

    kind = "vector_quotient"

    def __init__(self, p: int, n: int, relations: Sequence[Sequence[int]] = ()):
        self.n = n
        self.p = p
        self.rel_basis, self.rel_pivots = linalg.rref([list(r) for r in relations], p, n)
        self.free = [c for c in range(n) if c not in self.rel_pivots]
        gens = [self.reduce(tuple(int(i == c) for i in range(n))) for c in self.free]
        super().__init__({"p": p, "n": n, "relations": [list(r) for r in relations]},
                         p ** len(self.free), (0,) * n, gens, p)

    def reduce(self, v: Sequence[int]) -> Element:
        return linalg.reduce_mod_span(v, self.rel_basis, self.rel_pivots, self.p)

    def mul(self, g, h):
        return tuple((a + b) % self.p for a, b in zip(g, h))

    def inv(self, g):
        return tuple((-a) % self.p for a in g)

    def contains(self, g):
        return (isinstance(g, tuple) and len(g) == self.n
                and all(0 <= a < self.p for a in g) and self.reduce(g) == g)

    def _iter_elements(self):
        for coords in itertools.product(range(self.p), repeat=len(self.free)):
            v = [0] * self.n
            for c, x in zip(self.free, coords):
                v[c] = x
            yield self.reduce(v)

    def is_abelian(self) -> bool:
        return True


class SemidirectProduct(Group):
    """top ⋉ bottom with top acting on the right: (u,x)(u',x') = (uu', x^{u'} x').

    ``action(u, x)`` must be a right action by automorphisms.  Elements are the
    concatenation of the two encodings.
    """

    kind = "semidirect"

    def __init__(self, top: Group, bottom: Group, action: Callable[[Element, Element], Element],
                 params: dict | None = None, p: int | None = None):
        self.top = top
        self.bottom = bottom
        self.action = action
        self.split = len(top.identity)
        gens = [u + bottom.identity for u in top.generators] + [top.identity + x for x in bottom.generators]
        super().__init__(params or {}, top.order * bottom.order, top.identity + bottom.identity,
                         gens, p if p is not None else top.p or bottom.p)

    def parts(self, g: Element) -> tuple[Element, Element]:
        return g[: self.split], g[self.split:]

    def mul(self, g, h):
        u, x = g[: self.split], g[self.split:]
        v, y = h[: self.split], h[self.split:]
        return self.top.mul(u, v) + self.bottom.mul(self.action(v, x), y)

    def inv(self, g):
        u, x = g[: self.split], g[self.split:]
        ui = self.top.inv(u)
        return ui + self.action(ui, self.bottom.inv(x))

    def contains(self, g):
        return (isinstance(g, tuple) and len(g) == len(self.identity)
                and self.top.contains(g[: self.split]) and self.bottom.contains(g[self.split:]))

    def _iter_elements(self):
        for u in self.top.elements(cap=math.inf):
            for x in self.bottom.elements(cap=math.inf):
                yield u + x


class SubgroupGroup(Group):
    """A subgroup viewed as a group in its own right (enumerable by construction)."""

    kind = "subgroup"

    def __init__(self, subgroup: "Subgroup"):
        self.subgroup = subgroup
        self.ambient = subgroup.ambient
        gens = subgroup.generators or small_generating_set(subgroup)
        super().__init__({"ambient": repr(self.ambient)}, len(subgroup),
                         self.ambient.identity, gens, self.ambient.p)

    def mul(self, g, h):
        return self.ambient.mul(g, h)

    def inv(self, g):
        return self.ambient.inv(g)

    def contains(self, g):
        return g in self.subgroup

    def _iter_elements(self):
        return iter(self.subgroup.elements)


class QuotientGroup(Group):
    """parent / N with each coset represented by its least element."""

    kind = "quotient"

    def __init__(self, parent: Group, normal: "Subgroup"):
        self.parent = parent
        self.normal = normal
        self._reps: dict[Element, Element] = {}
        if parent.order % len(normal):
            raise GroupError("subgroup order does not divide the group order")
        gens = sorted({self.rep(g) for g in parent.generators} - {parent.identity})
        super().__init__({"parent": repr(parent), "kernel_order": len(normal)},
                         parent.order // len(normal), parent.identity, gens, parent.p)

    def rep(self, g: Element) -> Element:
        r = self._reps.get(g)
        if r is None:
            mul = self.parent.mul
            coset = [mul(g, n) for n in self.normal.elements]
            r = min(coset)
            for c in coset:
                self._reps[c] = r
        return r

    def mul(self, g, h):
        return self.rep(self.parent.mul(g, h))

    def inv(self, g):
        return self.rep(self.parent.inv(g))

    def contains(self, g):
        return self.parent.contains(g) and self.rep(g) == g

    def _iter_elements(self):
        seen = set()
        for g in self.parent.elements(cap=math.inf):
            r = self.rep(g)
            if r not in seen:
                seen.add(r)
                yield r


# ---------------------------------------------------------------------------
# subgroups and maps


@dataclass(frozen=True, eq=False)
class Subgroup:
    """An explicitly enumerated subgroup: sorted canonical elements."""

    ambient: Group
    elements: tuple[Element, ...]
    generators: tuple[Element, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(self.elements)))

    @cached_property
    def set(self) -> frozenset[Element]:
        return frozenset(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.set == other.set

    def __hash__(self) -> int:
        return hash(self.set)

    def __le__(self, other: "Subgroup") -> bool:
        return self.set <= other.set

    def __lt__(self, other: "Subgroup") -> bool:
        return self.set < other.set

    def __repr__(self) -> str:
        return f"Subgroup(order={len(self)})"

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def as_group(self) -> SubgroupGroup:
        return SubgroupGroup(self)

    def __and__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.ambient, tuple(self.set & other.set))


def _bfs_closure(G: Group, seed: Iterable[Element], gens: Sequence[Element],
                 frontier: Iterable[Element] | None = None) -> set[Element]:
    elements = set(seed)
    queue = list(elements if frontier is None else frontier)
    if frontier is not None:
        queue = [x for x in queue if x not in elements]
        elements.update(queue)
    mul = G.mul
    while queue:
        x = queue.pop()
        for s in gens:
            y = mul(x, s)
            if y not in elements:
                elements.add(y)
                queue.append(y)
    return elements


def subgroup_closure(G: Group, gens: Iterable[Element]) -> Subgroup:
    """Smallest subgroup containing ``gens``, by breadth-first closure."""
    gens = tuple(dict.fromkeys(g for g in gens if g != G.identity))
    for g in gens:
        if not G.contains(g):
            raise GroupError(f"{g} is not an element of {G!r}")
    return Subgroup(G, tuple(_bfs_closure(G, [G.identity], gens)), gens)


def extend_subgroup(S: Subgroup, g: Element) -> Subgroup:
    """<S, g> reusing the closure of S."""
    if g in S:
        return S
    G = S.ambient
    gens = S.generators + (g,) if S.generators or S.is_trivial() else tuple(small_generating_set(S)) + (g,)
    frontier = [G.mul(s, g) for s in S.elements]
    return Subgroup(G, tuple(_bfs_closure(G, S.elements, gens, frontier)), gens)


def join(S: Subgroup, T: Subgroup) -> Subgroup:
    result = S
    for g in (T.generators or small_generating_set(T)):
        result = extend_subgroup(result, g)
    return result


def small_generating_set(S: Subgroup) -> list[Element]:
    """A generating set picked greedily in element order."""
    G = S.ambient
    current = {G.identity}
    gens: list[Element] = []
    for g in S.elements:
        if g not in current:
            frontier = [G.mul(x, g) for x in current]
            current = _bfs_closure(G, current, gens + [g], frontier)
            gens.append(g)
            if len(current) == len(S):
                break
    return gens


def _conjugators(G: Group, cap: int) -> Sequence[Element]:
    if G.generators:
        return G.generators
    return G.elements(cap)


def is_normal(G: Group, S: Subgroup, cap: int = DEFAULT_CAP) -> bool:
    """Normality via conjugation by the generators of G."""
    conj = G.conj
    gens = S.generators or small_generating_set(S)
    return all(conj(s, g) in S for g in _conjugators(G, cap) for s in gens)


def normal_closure(G: Group, gens: Iterable[Element], cap: int = DEFAULT_CAP) -> Subgroup:
    S = subgroup_closure(G, gens)
    conjugators = _conjugators(G, cap)
    changed = True
    while changed:
        changed = False
        for s in list(S.generators):
            for g in conjugators:
                c = G.conj(s, g)
                if c not in S:
                    S = extend_subgroup(S, c)
                    changed = True
    return S


def commutator_subgroup(G: Group, N: Subgroup, cap: int = DEFAULT_CAP) -> Subgroup:
    """[G, N] for N normal in G: normal closure of generator commutators."""
    ngens = N.generators or small_generating_set(N)
    comms = [G.commutator(g, n) for g in _conjugators(G, cap) for n in ngens]
    return normal_closure(G, comms, cap)


def center(G: Group, cap: int = DEFAULT_CAP) -> Subgroup:
    gens = _conjugators(G, cap)
    mul = G.mul
    els = [z for z in G.elements(cap) if all(mul(z, g) == mul(g, z) for g in gens)]
    return Subgroup(G, tuple(els))


def minimal_central_subgroups(G: Group, cap: int = DEFAULT_CAP) -> list[Subgroup]:
    """All subgroups of order p of Z(G), sorted by their element lists."""
    if G.p is None:
        raise GroupError("minimal central subgroups need a declared prime")
    Z = center(G, cap)
    found: dict[frozenset, Subgroup] = {}
    for z in Z.elements:
        if z != G.identity and G.power(z, G.p) == G.identity:
            S = subgroup_closure(G, [z])
            found.setdefault(S.set, S)
    return sorted(found.values(), key=lambda S: S.elements)


def cosets_of(G: Group, N: Subgroup, cap: int = DEFAULT_CAP) -> QuotientGroup:
    return QuotientGroup(G, N)


def quotient(G: Group, N: Subgroup, cap: int = DEFAULT_CAP) -> tuple[QuotientGroup, "GroupMap"]:
    """G/N with least-element coset representatives, plus the projection."""
    if not G.is_enumerable(cap):
        raise NotEnumerableError(f"group of order {G.order} exceeds the cap {cap}")
    if not is_normal(G, N, cap):
        raise GroupError("quotient by a non-normal subgroup")
    Q = QuotientGroup(G, N)
    whole = G.whole()
    proj = GroupMap(whole, Q.whole(), {g: Q.rep(g) for g in whole.elements})
    return Q, proj


def normal_subgroups(G: Group, cap: int = DEFAULT_CAP) -> list[Subgroup]:
    """Every normal subgroup, as joins of normal closures of single elements."""
    elements = G.elements(cap)
    found: dict[frozenset, Subgroup] = {}
    for g in elements:
        N = normal_closure(G, [g], cap)
        found.setdefault(N.set, N)
    atoms = list(found.values())
    frontier = list(atoms)
    while frontier:
        new = []
        for N in frontier:
            for M in atoms:
                if not M <= N:
                    J = join(N, M)
                    if J.set not in found:
                        found[J.set] = J
                        new.append(J)
        frontier = new
    return sorted(found.values(), key=lambda S: (len(S), S.elements))


# ---------------------------------------------------------------------------


class GroupMapError(GroupError):
    pass


@dataclass(frozen=True, eq=False)
class GroupMap:
    """An explicit map between subgroups, given by its table."""

    domain: Subgroup
    codomain: Subgroup
    table: Mapping[Element, Element]

    def __post_init__(self):
        if set(self.table) != self.domain.set:
            raise GroupMapError("map table is not total on its domain")
        if not all(v in self.codomain for v in self.table.values()):
            raise GroupMapError("map table leaves its codomain")

    def __call__(self, g: Element) -> Element:
        return self.table[g]

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupMap) and dict(self.table) == dict(other.table)

    def __hash__(self):
        return hash(frozenset(self.table.items()))

    @classmethod
    def from_function(cls, domain: Subgroup, codomain: Subgroup, fn: Callable[[Element], Element]) -> "GroupMap":
        return cls(domain, codomain, {g: fn(g) for g in domain.elements})

    @classmethod
    def identity_on(cls, S: Subgroup) -> "GroupMap":
        return cls(S, S, {g: g for g in S.elements})

    def is_homomorphism(self) -> bool:
        mul_d = self.domain.ambient.mul
        mul_c = self.codomain.ambient.mul
        t = self.table
        gens = self.domain.generators or small_generating_set(self.domain)
        # a map on a finite group that respects right multiplication by generators
        # and sends 1 to 1 is a homomorphism
        if t[self.domain.ambient.identity] != self.codomain.ambient.identity:
            return False
        return all(t[mul_d(x, s)] == mul_c(t[x], t[s]) for x in self.domain.elements for s in gens)

    def is_injective(self) -> bool:
        return len(set(self.table.values())) == len(self.table)

    def is_surjective(self) -> bool:
        return set(self.table.values()) == self.codomain.set

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective() and self.is_homomorphism()

    def image(self, S: Iterable[Element] | None = None) -> frozenset[Element]:
        if S is None:
            return frozenset(self.table.values())
        return frozenset(self.table[g] for g in S)

    def inverse(self) -> "GroupMap":
        if not (self.is_injective() and self.is_surjective()):
            raise GroupMapError("only bijections can be inverted")
        return GroupMap(self.codomain, self.domain, {v: k for k, v in self.table.items()})

    def compose(self, inner: "GroupMap") -> "GroupMap":
        """self ∘ inner."""
        return GroupMap(inner.domain, self.codomain, {g: self.table[inner.table[g]] for g in inner.domain.elements})

    def restrict(self, S: Subgroup, codomain: Subgroup | None = None) -> "GroupMap":
        cod = codomain if codomain is not None else Subgroup(
            self.codomain.ambient, tuple({self.table[g] for g in S.elements}))
        return GroupMap(S, cod, {g: self.table[g] for g in S.elements})


def extend_generator_images(domain: Subgroup, gens: Sequence[Element], images: Sequence[Element],
                            codomain_group: Group) -> GroupMap:
    """The homomorphism <gens> -> codomain_group sending gens[i] to images[i].

    Builds the table along the Cayley graph of the domain and fails if two paths
    disagree (the images do not satisfy the relations of the domain).
    """
    if len(gens) != len(images):
        raise GroupMapError("generator and image lists differ in length")
    G = domain.ambient
    H = codomain_group
    table = {G.identity: H.identity}
    queue = [G.identity]
    while queue:
        x = queue.pop()
        fx = table[x]
        for g, b in zip(gens, images):
            y = G.mul(x, g)
            fy = H.mul(fx, b)
            old = table.get(y)
            if old is None:
                table[y] = fy
                queue.append(y)
            elif old != fy:
                raise GroupMapError(f"generator images do not define a homomorphism (conflict at {y})")
    if set(table) != domain.set:
        raise GroupMapError("generators do not generate the domain")
    image = Subgroup(H, tuple(set(table.values())))
    return GroupMap(domain, image, table)


def automorphism_order(f: GroupMap) -> int:
    """Least k >= 1 with f^k = id; f must permute its domain."""
    if f.domain.set != f.codomain.set or not f.is_injective():
        raise GroupMapError("automorphism_order needs a bijection of the domain onto itself")
    seen: set[Element] = set()
    order = 1
    for g in f.domain.elements:
        if g in seen:
            continue
        length, x = 0, g
        while True:
            seen.add(x)
            x = f.table[x]
            length += 1
            if x == g:
                break
        order = math.lcm(order, length)
    return order


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Filtration:
    """G = G_1 ⊋ G_2 ⊋ ... ⊋ G_n = {1}, each term normal in G."""

    group: Group
    terms: tuple[Subgroup, ...]
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.check:
            return
        G = self.group
        if not self.terms:
            raise GroupError("empty filtration")
        if len(self.terms[0]) != G.order:
            raise GroupError("a filtration must start at the whole group")
        if not self.terms[-1].is_trivial():
            raise GroupError("a filtration must end at the trivial subgroup")
        for upper, lower in zip(self.terms, self.terms[1:]):
            if not lower < upper:
                raise GroupError("filtration terms must be strictly descending")
        for S in self.terms[1:-1]:
            if not is_normal(G, S):
                raise GroupError("filtration term is not normal")

    def __len__(self) -> int:
        return len(self.terms)

    def term(self, i: int) -> Subgroup:
        """G_i, 1-indexed; G_i = {1} for i > n."""
        if i < 1:
            raise IndexError(i)
        if i > len(self.terms):
            return self.terms[-1]
        return self.terms[i - 1]

    def orders(self) -> list[int]:
        return [len(S) for S in self.terms]

    def __eq__(self, other) -> bool:
        return isinstance(other, Filtration) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)


def lower_central_series(G: Group, cap: int = DEFAULT_CAP) -> Filtration:
    """(γ_1, ..., γ_n) with γ_n = {1} and n minimal."""
    if not G.is_enumerable(cap):
        raise NotEnumerableError(f"group of order {G.order} exceeds the cap {cap}")
    whole = Subgroup(G, G.elements(cap), G.generators)
    terms = [whole]
    for _ in range(G.order.bit_length() + 1):
        if terms[-1].is_trivial():
            return Filtration(G, terms)
        nxt = commutator_subgroup(G, terms[-1], cap)
        if nxt == terms[-1]:
            break
        terms.append(nxt)
    raise GroupError("lower central series does not reach {1}: group is not nilpotent")


# ---------------------------------------------------------------------------
# constructors


def make_abelian(p: int, exponents: Sequence[int]) -> AbelianGroup:
    """⊕ Z/p^e_i with componentwise addition."""
    if not isprime(p):
        raise GroupError(f"{p} is not prime")
    if not exponents:
        raise GroupError("empty exponent list")
    if any(int(e) < 1 for e in exponents):
        raise GroupError("exponents must be positive")
    return AbelianGroup([p ** int(e) for e in exponents], p,
                        {"p": p, "exponents": [int(e) for e in exponents]})


def cyclic_top(p: int, m: int) -> AbelianGroup:
    """Z/m for m a power of p; Z/1 has the empty encoding."""
    if not is_prime_power(m, p):
        raise GroupError(f"{m} is not a power of {p}")
    return AbelianGroup([m] if m > 1 else [], p)


class MatrixSemidirect(SemidirectProduct):
    kind = "matrix_semidirect"


def make_matrix_semidirect(p: int, m: int, action_matrix: Sequence[Sequence[int]],
                           relations: Sequence[Sequence[int]] = ()) -> MatrixSemidirect:
    """Z/m ⋉ V, V = F_p^n / span(relations), generator of Z/m acting by the matrix.

    Elements are (k, v) with v the reduced vector; (x^k, u)(x^l, v) = (x^{k+l}, X^l u + v).
    """
    if not isprime(p):
        raise GroupError(f"{p} is not prime")
    X = [[int(a) % p for a in row] for row in action_matrix]
    n = len(X)
    if any(len(row) != n for row in X):
        raise GroupError("action matrix must be square")
    if linalg.det_mod(X, p) == 0:
        raise GroupError("action matrix is not invertible mod p")
    V = VectorQuotient(p, n, relations)
    for r in relations:
        if not linalg.in_span(linalg.mat_vec(X, r, p), V.rel_basis, V.rel_pivots, p):
            raise GroupError("action does not preserve the relation span")
    top = cyclic_top(p, m)
    Xm = linalg.mat_pow(X, m, p)
    for g in V.generators:
        if V.reduce(linalg.mat_vec(Xm, g, p)) != g:
            raise GroupError("the m-th power of the action is not the identity on V")
    powers = [linalg.mat_pow(X, k, p) for k in range(m)]

    def action(u, v):
        k = u[0] if u else 0
        return V.reduce(linalg.mat_vec(powers[k], v, p))

    params = {"p": p, "m": m, "matrix": X, "relations": [list(r) for r in relations]}
    return MatrixSemidirect(top, V, action, params, p)


class GroupRingSemidirect(SemidirectProduct):
    """P ⋉ F_p[P] with P = (Z/p)^rank acting on its group ring by multiplication.

    Encoding: (u_1..u_rank, f_0..f_{p^rank - 1}); coefficient f_j belongs to the
    monomial whose exponent vector is the j-th element of P in lex order.
    """

    kind = "group_ring_semidirect"

    def monomial_index(self, exps: Sequence[int]) -> int:
        return self._index[tuple(e % self.p for e in exps)]

    def ring_element(self, coeffs: Mapping[tuple, int]) -> Element:
        f = [0] * self.width
        for exps, c in coeffs.items():
            j = self.monomial_index(exps)
            f[j] = (f[j] + c) % self.p
        return tuple(f)


def make_group_ring_semidirect(p: int, rank: int) -> GroupRingSemidirect:
    if not isprime(p):
        raise GroupError(f"{p} is not prime")
    if rank < 1:
        raise GroupError("rank must be positive")
    width = p ** rank
    if width > MAX_RING_WIDTH:
        raise GroupError(f"group ring of width {width} exceeds the encoding width {MAX_RING_WIDTH}")
    P = AbelianGroup([p] * rank, p)
    ring = AbelianGroup([p] * width, p)
    monomials = list(itertools.product(range(p), repeat=rank))
    index = {m: j for j, m in enumerate(monomials)}
    # perms[u][j] = index of the monomial that u·m_j lands on
    perms = {u: [index[tuple((a + b) % p for a, b in zip(m, u))] for m in monomials] for u in monomials}

    def action(u, f):
        out = [0] * width
        for j, target in enumerate(perms[u]):
            out[target] = f[j]
        return tuple(out)

    G = GroupRingSemidirect(P, ring, action, {"p": p, "rank": rank}, p)
    G.width = width
    G._index = index
    return G


def make_cyclic_extension(X: Group, gamma: GroupMap, p: int) -> tuple[SemidirectProduct, Element]:
    """Z/p^k ⋉ X with 1 acting on the right via gamma, and y = (1, 1)."""
    k_order = automorphism_order(gamma)
    if not is_prime_power(k_order, p):
        raise GroupError(f"automorphism order {k_order} is not a power of {p}")
    top = cyclic_top(p, k_order)
    powers = [dict((g, g) for g in gamma.table)]
    for _ in range(1, k_order):
        prev = powers[-1]
        powers.append({g: gamma.table[prev[g]] for g in gamma.table})

    def action(u, x):
        return powers[u[0] if u else 0][x]

    Y = SemidirectProduct(top, X, action, {"cyclic": k_order, "base": repr(X)}, p)
    y = ((1,) if k_order > 1 else ()) + X.identity
    return Y, y


# ---------------------------------------------------------------------------


def check_group_axioms(G: Group, cap: int = 2**10, samples: int = 2000, seed: int = 0) -> None:
    """Identity/inverse exhaustively; associativity exhaustively at small order, else sampled."""
    els = G.elements(cap)
    e = G.identity
    if not G.contains(e):
        raise GroupError("identity is not an element")
    for g in els:
        if G.mul(g, e) != g or G.mul(e, g) != g:
            raise GroupError(f"identity law fails at {g}")
        if G.mul(g, G.inv(g)) != e or G.mul(G.inv(g), g) != e:
            raise GroupError(f"inverse law fails at {g}")
        if not G.contains(G.inv(g)):
            raise GroupError(f"inverse of {g} is not canonical")
    if len(els) ** 3 <= 2 * 10**6:
        triples: Iterable = itertools.product(els, repeat=3)
    else:
        rng = random.Random(seed)
        triples = ((rng.choice(els), rng.choice(els), rng.choice(els)) for _ in range(samples))
    for a, b, c in triples:
        if G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)):
            raise GroupError(f"associativity fails at {(a, b, c)}")
