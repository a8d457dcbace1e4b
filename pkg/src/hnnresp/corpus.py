"""Concrete HNN pairs with machine-checked facts.

* ``fp3_pair(p, x, y, z)``: F_p^3 with A = <e1, e2>, B = <e1, e3> and
  φ(a1, a2, 0) = (x a1, 0, y a1 + z a2).  Trivial core, but the quotient by
  K = {(0, k1, k2)} has a full core.
* ``fp4_pair(p, a, b, c)``: the four-dimensional variant,
  φ(a1, a2, a3, 0) = (a a1, 0, b a1 + a2, c a1 + a3).
* ``wreath_pair()``: F_3 ≀ (Z/3)^2 with A = <x> ⋉ F_3[<x>],
  B = <y> ⋉ F_3[<y>], φ(x^n, f(x)) = (y^n, 2 y^-1 f(y)).  Trivial core, yet
  the twist by (x, 0) has a core automorphism of order 2.
* ``cyclic_shift_pair()``: Z/3 ⋉ V with V = F_3^3/<(1,1,1)> permuted
  cyclically, A = <(1,0,0)>, B = <(1,1,-1)>, φ(a) = 2b.  Trivial core,
  compatible with the lower central series, and not residually 3.

Each fixture rebuilds its pair from scratch and re-verifies every fact.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

from . import filtrations as flt
from .groups import (
    GroupMap,
    Subgroup,
    lower_central_series,
    make_abelian,
    make_group_ring_semidirect,
    make_matrix_semidirect,
    subgroup_closure,
)
from .hnn import (
    HnnPair,
    core_fixpoint,
    core_orbit,
    induced_pair,
    make_pair,
    pair_from_generators,
    twisted_pair,
)
from .words import core_britton_oracle


@dataclass
class Fact:
    name: str
    claim: str
    compute: Callable[[], Any]
    expected: Any = True
    asserted: bool = True


@dataclass
class FactResult:
    fixture: str
    name: str
    claim: str
    expected: Any
    actual: Any
    passed: bool
    asserted: bool
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else ("FAIL" if self.asserted else "NOTE")
        return f"[{status}] {self.fixture}: {self.name}: {self.claim} (got {self.actual!r})"


@dataclass
class Fixture:
    name: str
    build: Callable[[], HnnPair]
    facts: list[Fact] = field(default_factory=list)

    @cached_property
    def pair(self) -> HnnPair:
        return self.build()

    def verify(self) -> list[FactResult]:
        out = []
        for fact in self.facts:
            start = time.perf_counter()
            actual = fact.compute()
            seconds = time.perf_counter() - start
            passed = actual == fact.expected if fact.asserted else True
            out.append(FactResult(self.name, fact.name, fact.claim, fact.expected, actual,
                                  passed, fact.asserted, seconds))
        return out


# ---------------------------------------------------------------------------
# F_p^3 and F_p^4 pairs


def build_fp3_pair(p: int, x: int, y: int, z: int) -> HnnPair:
    if x % p == 0 or z % p == 0:
        raise ValueError("x and z must be nonzero mod p")
    G = make_abelian(p, [1, 1, 1])
    e1, e2 = (1, 0, 0), (0, 1, 0)
    return pair_from_generators(G, [e1, e2], [(x % p, 0, y % p), (0, 0, z % p)])


def build_fp4_pair(p: int, a: int, b: int, c: int) -> HnnPair:
    if a % p == 0:
        raise ValueError("a must be nonzero mod p")
    G = make_abelian(p, [1, 1, 1, 1])
    gens = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)]
    images = [(a % p, 0, b % p, c % p), (0, 0, 1, 0), (0, 0, 0, 1)]
    return pair_from_generators(G, gens, images)


def kernel_fp3(pair: HnnPair) -> Subgroup:
    """K = {(0, k1, k2)}."""
    return subgroup_closure(pair.G, [(0, 1, 0), (0, 0, 1)])


def kernel_fp4(pair: HnnPair) -> Subgroup:
    """L = {(0, d1, d2, d3)}."""
    return subgroup_closure(pair.G, [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])


def fp3_pair(p: int = 3, x: int = 1, y: int = 1, z: int = 1) -> Fixture:
    name = f"fp3_pair(p={p}, x={x}, y={y}, z={z})"
    fx = Fixture(name, lambda: build_fp3_pair(p, x, y, z))

    def core():
        return core_fixpoint(fx.pair)

    def quotient_core():
        q = induced_pair(fx.pair, kernel_fp3(fx.pair))
        return core_fixpoint(q)

    def induced_is_mult_by_x():
        q = induced_pair(fx.pair, kernel_fp3(fx.pair))
        c = core_fixpoint(q)
        Q = q.G
        return all(c.restricted(h) == Q.rep(tuple((x * v) % p for v in h)) for h in c.H.elements)

    def intersection_meets_image():
        ab = fx.pair.intersection()
        return len({fx.pair.phi(h) for h in ab} & ab)

    fx.facts.append(Fact("intersection", "A ∩ B = {(c, 0, 0)} has order p",
                         lambda: len(fx.pair.intersection()), p))
    if y % p:
        fx.facts += [
            Fact("image_meets_intersection", "φ(A∩B) ∩ (A∩B) is trivial when y ≠ 0",
                 intersection_meets_image, 1),
            Fact("core_trivial", "H(G, φ) = 0 when y ≠ 0", lambda: len(core().H), 1),
        ]
    else:
        fx.facts += [
            Fact("image_meets_intersection", "φ(A∩B) ∩ (A∩B) = A∩B when y = 0",
                 intersection_meets_image, p),
            Fact("core_is_intersection", "H(G, φ) = A ∩ B when y = 0",
                 lambda: core().H.set == fx.pair.intersection()),
        ]
    fx.facts += [
        Fact("kernel_compatible", "φ(A ∩ K) = B ∩ K for K = {(0, k1, k2)}",
             lambda: {fx.pair.phi(a) for a in fx.pair.A if a in kernel_fp3(fx.pair)}
             == {b for b in fx.pair.B if b in kernel_fp3(fx.pair)}),
        Fact("quotient_core_full", "H(G/K, φ̄) = G/K, of order p",
             lambda: (len(quotient_core().H), quotient_core().pair.G.order), (p, p)),
        Fact("induced_is_multiplication", "the induced automorphism of G/K is multiplication by x",
             induced_is_mult_by_x),
        Fact("induced_order", "order of the induced automorphism = multiplicative order of x mod p",
             lambda: quotient_core().order, _mult_order(x, p)),
    ]
    return fx


def fp4_pair(p: int = 3, a: int = 1, b: int = 0, c: int = 1) -> Fixture:
    name = f"fp4_pair(p={p}, a={a}, b={b}, c={c})"
    fx = Fixture(name, lambda: build_fp4_pair(p, a, b, c))

    def quotient_core_size():
        q = induced_pair(fx.pair, kernel_fp4(fx.pair))
        return len(core_fixpoint(q).H)

    fx.facts.append(Fact("intersection", "A ∩ B = {(c1, 0, c2, 0)} has order p^2",
                         lambda: len(fx.pair.intersection()), p * p))
    if c % p:
        fx.facts.append(Fact("core_trivial", "H(G, φ) = 0 when c ≠ 0",
                             lambda: len(core_fixpoint(fx.pair).H), 1))
        fx.facts.append(Fact("quotient_core_nontrivial",
                             "H(G/L, φ̄) ≠ 0 for L = {(0, d1, d2, d3)}",
                             lambda: quotient_core_size() > 1))
    else:
        fx.facts.append(Fact("core_size", "|H(G, φ)| when c = 0 (recorded only)",
                             lambda: len(core_fixpoint(fx.pair).H), None, asserted=False))
    fx.facts.append(Fact("x_in_intersection", "(0, 0, 1, 0) lies in A ∩ B",
                         lambda: (0, 0, 1, 0) in fx.pair.intersection()))
    return fx


def _mult_order(x: int, p: int) -> int:
    k, v = 1, x % p
    while v != 1:
        v = (v * x) % p
        k += 1
    return k


# ---------------------------------------------------------------------------
# wreath product pair


def build_wreath_pair() -> HnnPair:
    G = make_group_ring_semidirect(3, 2)
    zero_f = (0,) * G.width

    def elem(n, m, coeffs=None):
        f = G.ring_element(coeffs) if coeffs else zero_f
        return (n % 3, m % 3) + f

    A_gens = [elem(1, 0)] + [elem(0, 0, {(i, 0): 1}) for i in range(3)]
    A = subgroup_closure(G, A_gens)

    def phi(g):
        n, m = g[0], g[1]
        assert m == 0
        f = g[2:]
        # f(x) = sum c_i x^i  ->  2 y^-1 f(y) = sum 2 c_i y^(i-1)
        coeffs = {(0, i - 1): 2 * f[G.monomial_index((i, 0))] for i in range(3)}
        return elem(0, n, coeffs)

    table = {g: phi(g) for g in A.elements}
    B = subgroup_closure(G, [phi(g) for g in A_gens])
    return make_pair(G, A, B, GroupMap(A, B, table))


def wreath_x(pair: HnnPair):
    return (1, 0) + (0,) * pair.G.width


def wreath_constant(pair: HnnPair, v: int):
    G = pair.G
    return (0, 0) + G.ring_element({(0, 0): v})


def wreath_pair() -> Fixture:
    fx = Fixture("wreath_pair", build_wreath_pair)
    one = lambda: fx.pair.G.identity  # noqa: E731

    def psi_pair():
        return twisted_pair(fx.pair, wreath_x(fx.pair), one())

    def psi_on_constants():
        psi = psi_pair().phi
        return all(psi(wreath_constant(fx.pair, v)) == wreath_constant(fx.pair, 2 * v) for v in range(3))

    def lcs_compatible():
        f = lower_central_series(fx.pair.G)
        return flt.is_compatible(fx.pair, f)

    def violation():
        v = flt.obstruction_toplevel(fx.pair)
        return None if v is None else (v.a == wreath_x(fx.pair), v.b == one(), v.order)

    fx.facts += [
        Fact("order", "|G| = 3^11", lambda: fx.pair.G.order, 3**11),
        Fact("subgroup_orders", "|A| = |B| = 81 and |A ∩ B| = 3",
             lambda: (len(fx.pair.A), len(fx.pair.B), len(fx.pair.intersection())), (81, 81, 3)),
        Fact("intersection_constants", "A ∩ B = {(1, v) : v ∈ F_3}",
             lambda: fx.pair.intersection() == {wreath_constant(fx.pair, v) for v in range(3)}),
        Fact("phi_on_x", "φ(x, 0) = (y, 0)",
             lambda: fx.pair.phi(wreath_x(fx.pair)) == (0, 1) + (0,) * fx.pair.G.width),
        Fact("lcs_compatible", "the pair is compatible with the lower central series", lcs_compatible),
        Fact("core_trivial", "H(G, φ) is trivial", lambda: len(core_fixpoint(fx.pair).H), 1),
        Fact("twist_on_constants", "ψ = φ ∘ c_(x,0) sends (1, v) to (1, 2v)", psi_on_constants),
        Fact("twisted_core", "H(G, ψ) has 3 elements and ψ has order 2 on it",
             lambda: (len(core_fixpoint(psi_pair()).H), core_fixpoint(psi_pair()).order), (3, 2)),
        Fact("obstruction", "the first twist violation is a = (x, 0), b = 1 with order 2",
             violation, (True, True, 2)),
    ]
    return fx


# ---------------------------------------------------------------------------
# cyclic shift pair


SHIFT = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]


def build_cyclic_shift_pair() -> HnnPair:
    G = make_matrix_semidirect(3, 3, SHIFT, [(1, 1, 1)])
    a = shift_vector(G, (1, 0, 0))
    b = shift_vector(G, (1, 1, -1))
    two_b = G.power(b, 2)
    return pair_from_generators(G, [a], [two_b])


def shift_vector(G, v):
    """(1, v̄) ∈ Z/3 ⋉ V."""
    return (0,) + G.bottom.reduce(v)


def sum_zero_subgroup(G) -> frozenset:
    """{(1, w̄) : w1 + w2 + w3 = 0}."""
    out = set()
    for w1 in range(3):
        for w2 in range(3):
            out.add(shift_vector(G, (w1, w2, (-w1 - w2) % 3)))
    return frozenset(out)


def shift_commutator_formula_holds(G) -> bool:
    """[(x^m,u),(x^n,v)] = g h g^-1 h^-1 equals (1, X^-n(X^-m v - v) - X^-m(X^-n u - u))."""
    from .linalg import mat_pow, mat_vec

    V = G.bottom
    p = 3
    for g in G.elements():
        for h in G.elements():
            m, u = g[0], g[1:]
            n, v = h[0], h[1:]
            lhs = G.mul(G.mul(g, h), G.mul(G.inv(g), G.inv(h)))
            Xm = mat_pow(SHIFT, (-m) % 3, p)
            Xn = mat_pow(SHIFT, (-n) % 3, p)
            t1 = [(x - y) % p for x, y in zip(mat_vec(Xm, v, p), v)]
            t2 = [(x - y) % p for x, y in zip(mat_vec(Xn, u, p), u)]
            w = [(x - y) % p for x, y in zip(mat_vec(Xn, t1, p), mat_vec(Xm, t2, p))]
            if lhs != (0,) + V.reduce(w):
                return False
    return True


def cyclic_shift_pair() -> Fixture:
    fx = Fixture("cyclic_shift_pair", build_cyclic_shift_pair)

    def lcs():
        return lower_central_series(fx.pair.G)

    def same_abelianisation():
        G = fx.pair.G
        g2 = lcs().term(2)
        a = fx.pair.A.generators[0]
        b = shift_vector(G, (1, 1, -1))
        return G.mul(G.inv(a), b) in g2

    fx.facts += [
        Fact("order", "|G| = 27", lambda: fx.pair.G.order, 27),
        Fact("commutator_formula", "the commutator formula for the semidirect law holds",
             lambda: shift_commutator_formula_holds(fx.pair.G)),
        Fact("gamma2", "γ_2(G) = {(1, w̄) : w1 + w2 + w3 = 0}, of order 3",
             lambda: (lcs().term(2).set == sum_zero_subgroup(fx.pair.G), len(lcs().term(2))), (True, 3)),
        Fact("gamma3", "γ_3(G) = {1}, so the series has length 3", lambda: len(lcs()), 3),
        Fact("same_abelianisation", "a and b agree modulo [G, G]", same_abelianisation),
        Fact("trivial_meets", "A ∩ γ_2(G) = B ∩ γ_2(G) = {1}",
             lambda: (len(fx.pair.A.set & lcs().term(2).set), len(fx.pair.B.set & lcs().term(2).set)), (1, 1)),
        Fact("lcs_compatible", "the pair is compatible with the lower central series",
             lambda: flt.is_compatible(fx.pair, lcs())),
        Fact("intersection_trivial", "A ∩ B = {1}", lambda: len(fx.pair.intersection()), 1),
        Fact("core_trivial", "H(G, φ) = {1}", lambda: len(core_fixpoint(fx.pair).H), 1),
        Fact("obstruction_full", "no compatible central filtration passes the twisted-core test",
             lambda: flt.obstruction_full(fx.pair).verdict, flt.NOT_RESIDUALLY_P),
        Fact("decide_chief", "no chief filtration meets the congruence condition",
             lambda: flt.decide_chief(fx.pair).verdict, flt.NOT_RESIDUALLY_P),
    ]
    return fx


def oracle_facts(fx: Fixture) -> Fixture:
    """Append the three-way core agreement to a fixture."""

    def triangle():
        c = core_fixpoint(fx.pair)
        o = core_orbit(fx.pair)
        b = core_britton_oracle(fx.pair, c.r + 2)
        return c.H.set == o.H.set == b.set

    fx.facts.append(Fact("core_oracles", "fixpoint, orbit and Britton cores agree", triangle))
    return fx


def all_fixtures() -> list[Fixture]:
    return [
        oracle_facts(fp3_pair(3, 1, 1, 1)),
        oracle_facts(fp3_pair(3, 2, 1, 1)),
        oracle_facts(fp3_pair(3, 1, 0, 1)),
        oracle_facts(fp3_pair(5, 2, 3, 1)),
        oracle_facts(fp4_pair(3, 1, 0, 1)),
        oracle_facts(fp4_pair(3, 1, 1, 1)),
        oracle_facts(fp4_pair(3, 1, 0, 0)),
        oracle_facts(wreath_pair()),
        oracle_facts(cyclic_shift_pair()),
    ]


def verify_all() -> list[FactResult]:
    results = []
    for fx in all_fixtures():
        results.extend(fx.verify())
    return results
