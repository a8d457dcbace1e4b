"""Filtration predicates and the residual-p decision procedures for HNN pairs.

Three tools with different costs:

* ``decide_chief`` searches for a chief filtration along which φ acts trivially
  on every factor; it needs the whole group enumerated and is exact.
* ``obstruction_toplevel`` looks for a twist c_b ∘ φ ∘ c_a whose core
  automorphism has order prime to p.  It only touches A and B.
* ``obstruction_full`` runs the twisted-core test on every layer of every
  compatible central filtration (small groups only).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .groups import (
    DEFAULT_CAP,
    Element,
    Filtration,
    GroupError,
    NotEnumerableError,
    Subgroup,
    extend_subgroup,
    is_normal,
    is_prime_power,
    normal_subgroups,
    small_generating_set,
)
from .hnn import (
    CompatibilityError,
    HnnPair,
    OracleDisagreement,
    core_fixpoint,
    quotient_layer_pair,
    twisted_core,
)

RESIDUALLY_P = "residually_p"
NOT_RESIDUALLY_P = "not_residually_p"
INCONCLUSIVE = "inconclusive"

OBSTRUCTION_CAP = 3**4
CHIEF_CAP = 3**7  # default ceiling for the exhaustive chief search


@dataclass(frozen=True)
class Violation:
    """A twist whose core automorphism has order prime to p.

    ``i``/``j`` index the layer G_i/G_j (1-based); ``j is None`` means the
    whole group.
    """

    a: Element
    b: Element
    order: int
    core: tuple[Element, ...]
    i: int = 1
    j: int | None = None

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "a": list(self.a), "b": list(self.b),
                "order": self.order, "core": [list(h) for h in self.core]}


@dataclass
class Decision:
    verdict: str
    route: str
    certificate: dict
    stats: dict = field(default_factory=dict)
    filtration: Filtration | None = None
    violation: Violation | None = None

    @property
    def is_yes(self) -> bool:
        return self.verdict == RESIDUALLY_P

    @property
    def is_no(self) -> bool:
        return self.verdict == NOT_RESIDUALLY_P

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "route": self.route,
                "certificate": self.certificate, "stats": self.stats}


# ---------------------------------------------------------------------------
# predicates


def is_central(f: Filtration) -> bool:
    """Each G_i/G_{i+1} central in G/G_{i+1}: [G, G_i] ⊆ G_{i+1}."""
    G = f.group
    gens = G.generators or G.elements()
    for upper, lower in zip(f.terms, f.terms[1:]):
        ugens = upper.generators or small_generating_set(upper)
        for h in ugens:
            for g in gens:
                if G.commutator(g, h) not in lower:
                    return False
    return True


def is_chief(f: Filtration) -> bool:
    """All factors of order p (the group must be a p-group)."""
    p = f.group.p
    chief = all(len(u) == p * len(l) for u, l in zip(f.terms, f.terms[1:]))
    if chief and not is_central(f):
        raise OracleDisagreement("a chief filtration of a p-group must be central")
    return chief


def is_compatible(pair: HnnPair, f: Filtration) -> bool:
    """φ(A ∩ G_i) = B ∩ G_i for every term."""
    return all(_compatible_with(pair, S) for S in f.terms)


def _compatible_with(pair: HnnPair, S: Subgroup) -> bool:
    t = pair.phi.table
    image = {t[a] for a in pair.A.elements if a in S}
    return image == {b for b in pair.B.elements if b in S}


def congruence_failure(pair: HnnPair, f: Filtration) -> tuple[int, Element] | None:
    """First (i, a) with a ∈ A ∩ G_i but a^-1 φ(a) ∉ G_{i+1}, or None."""
    G = pair.G
    t = pair.phi.table
    for i, (upper, lower) in enumerate(zip(f.terms, f.terms[1:]), start=1):
        for a in pair.A.elements:
            if a in upper and G.mul(G.inv(a), t[a]) not in lower:
                return i, a
    return None


def verify_chief_certificate(pair: HnnPair, f: Filtration) -> tuple[bool, str]:
    """Re-check a chief-filtration certificate from scratch."""
    G = pair.G
    if f.group is not G and f.group.order != G.order:
        return False, "filtration lives on a different group"
    if len(f.terms[0]) != G.order or not f.terms[-1].is_trivial():
        return False, "filtration does not run from G to {1}"
    for u, l in zip(f.terms, f.terms[1:]):
        if not l < u:
            return False, "terms are not strictly descending"
    for S in f.terms:
        if not is_normal(G, S):
            return False, "a term is not normal"
    if not is_chief(f):
        return False, "a factor does not have order p"
    if not is_compatible(pair, f):
        return False, "filtration is not compatible with φ"
    bad = congruence_failure(pair, f)
    if bad is not None:
        return False, f"φ(a) ≢ a mod G_{bad[0] + 1} for a = {list(bad[1])}"
    return True, "ok"


# ---------------------------------------------------------------------------
# exact decision


def decide_chief(pair: HnnPair, cap: int = DEFAULT_CAP, memoize: bool = True) -> Decision:
    """Search bottom-up for a chief filtration meeting the congruence condition.

    The state is the current kernel N (a normal subgroup of G).  A step adds an
    element g, central modulo N with g^p ∈ N, such that N' = <N, g> is
    compatible with φ and φ acts trivially on A ∩ N' modulo N.  Branches are
    visited in lexicographic order of the sorted elements of N'.
    """
    G = pair.G
    if not G.is_enumerable(cap):
        raise NotEnumerableError(f"group of order {G.order} exceeds the cap {cap}")
    p = G.p
    elements = G.elements(cap)
    gens = G.generators or elements
    t = pair.phi.table
    A_elems = pair.A.elements
    B_elems = pair.B.elements
    mul, inv, comm, power = G.mul, G.inv, G.commutator, G.power
    memo: dict[frozenset, list[Subgroup] | None] = {}
    stats = {"states": 0, "candidates": 0}

    def candidates(N: Subgroup) -> list[Subgroup]:
        found: dict[frozenset, Subgroup] = {}
        covered: set[Element] = set(N.set)
        for g in elements:
            if g in covered:
                continue
            if power(g, p) not in N or any(comm(g, s) not in N for s in gens):
                continue
            M = extend_subgroup(N, g)
            covered |= M.set
            found.setdefault(M.set, M)
        return sorted(found.values(), key=lambda S: S.elements)

    def admissible(N: Subgroup, M: Subgroup) -> bool:
        A_M = [a for a in A_elems if a in M]
        if {t[a] for a in A_M} != {b for b in B_elems if b in M}:
            return False
        return all(mul(inv(a), t[a]) in N for a in A_M)

    def search(N: Subgroup) -> list[Subgroup] | None:
        if len(N) == G.order:
            return []
        key = N.set
        if memoize and key in memo:
            return memo[key]
        stats["states"] += 1
        result = None
        for M in candidates(N):
            stats["candidates"] += 1
            if not admissible(N, M):
                continue
            rest = search(M)
            if rest is not None:
                result = rest + [M]
                break
        if memoize:
            memo[key] = result
        return result

    bottom = G.trivial()
    chain = search(bottom)
    if chain is None:
        return Decision(NOT_RESIDUALLY_P, "chief_search",
                        {"type": "exhausted", "states": stats["states"]}, stats)
    # search returns [G, ..., N_1]; make it descending and close at {1}
    terms = []
    for S in chain:
        terms.append(Subgroup(G, S.elements, tuple(small_generating_set(S))))
    terms.append(bottom)
    f = Filtration(G, terms)
    ok, reason = verify_chief_certificate(pair, f)
    if not ok:
        raise OracleDisagreement(f"chief search produced an invalid certificate: {reason}")
    cert = {"type": "chief_filtration",
            "terms": [[list(g) for g in S.generators] for S in f.terms],
            "orders": f.orders()}
    return Decision(RESIDUALLY_P, "chief_search", cert, stats, filtration=f)


# ---------------------------------------------------------------------------
# obstructions


def scan_twists(pair: HnnPair) -> Violation | None:
    """First twist (b outer, a inner, both in element order) whose core order is not a p-power.

    c_b ∘ φ ∘ c_a = c_{φ(a)b} ∘ φ, so a twist only depends on φ(a)b; repeats
    are skipped without changing which twist is reported first.
    """
    p = pair.p
    G = pair.G
    t = pair.phi.table
    A = sorted(pair.A.elements)
    seen: set[Element] = set()
    for b in sorted(pair.B.elements):
        for a in A:
            u = G.mul(t[a], b)
            if u in seen:
                continue
            seen.add(u)
            tc = twisted_core(pair, a, b)
            if not is_prime_power(tc.order, p):
                return Violation(a, b, tc.order, tuple(sorted(tc.core)))
    return None


def obstruction_toplevel(pair: HnnPair) -> Violation | None:
    """Twisted-core test on G itself; a violation proves G* is not residually p.

    G = G_1/G_n sits in every filtration, so no ambient enumeration is needed.
    """
    return scan_twists(pair)


def layer_violation(pair: HnnPair, Gi: Subgroup, Gj: Subgroup, i: int, j: int) -> Violation | None:
    """Twisted-core test on the layer Gi/Gj."""
    layer = quotient_layer_pair(pair, Gi, Gj, check=False)
    v = scan_twists(layer)
    if v is None:
        return None
    return Violation(v.a, v.b, v.order, v.core, i, j)


def central_compatible_successors(pair: HnnPair, current: Subgroup,
                                  normals: list[Subgroup]) -> list[Subgroup]:
    """Normal N ⊊ current with current/N central in G/N and φ(A∩N) = B∩N."""
    G = pair.G
    gens = G.generators or G.elements()
    cgens = current.generators or small_generating_set(current)
    out = []
    for N in normals:
        if not N < current:
            continue
        if any(G.commutator(g, h) not in N for h in cgens for g in gens):
            continue
        if not _compatible_with(pair, N):
            continue
        out.append(N)
    return sorted(out, key=lambda S: (-len(S), S.elements))


def obstruction_full(pair: HnnPair, cap: int = OBSTRUCTION_CAP) -> Decision:
    """Try every compatible central filtration against the twisted-core test.

    Filtrations are grown from the top; a prefix is abandoned as soon as some
    layer G_i/G_j of it fails, since every extension contains that layer.  If no
    filtration survives, G* is not residually p.  If one survives the result is
    inconclusive, since the test is only a necessary condition.
    """
    G = pair.G
    if G.order > cap:
        raise NotEnumerableError(f"group of order {G.order} exceeds the obstruction cap {cap}")
    normals = normal_subgroups(G, cap)
    whole = Subgroup(G, G.elements(cap), G.generators)
    failures: list[dict] = []
    stats = {"prefixes": 0, "complete": 0}
    survivor: list[Subgroup] | None = None

    def dfs(prefix: list[Subgroup]) -> bool:
        nonlocal survivor
        last = prefix[-1]
        if last.is_trivial():
            stats["complete"] += 1
            survivor = list(prefix)
            return True
        for N in central_compatible_successors(pair, last, normals):
            stats["prefixes"] += 1
            j = len(prefix) + 1
            bad = None
            for i, Gi in enumerate(prefix, start=1):
                bad = layer_violation(pair, Gi, N, i, j)
                if bad is not None:
                    break
            if bad is not None:
                failures.append({"orders": [len(S) for S in prefix] + [len(N)], **bad.to_json()})
                continue
            if dfs(prefix + [N]):
                return True
        return False

    if not _compatible_with(pair, whole):
        raise CompatibilityError("G itself is not compatible with φ")
    found = dfs([whole])
    if found:
        f = Filtration(G, survivor)
        cert = {"type": "surviving_filtration", "orders": f.orders(),
                "terms": [[list(g) for g in (S.generators or small_generating_set(S))] for S in f.terms]}
        return Decision(INCONCLUSIVE, "obstruction_full", cert, stats, filtration=f)
    cert = {"type": "no_filtration_survives", "failures": failures}
    return Decision(NOT_RESIDUALLY_P, "obstruction_full", cert, stats)


# ---------------------------------------------------------------------------
# sufficient conditions


class PreconditionError(GroupError):
    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


def _require_central_compatible(pair: HnnPair, f: Filtration) -> None:
    if not is_central(f):
        raise PreconditionError("filtration is not central")
    for i, S in enumerate(f.terms, start=1):
        if not _compatible_with(pair, S):
            raise PreconditionError(f"filtration term {i} is not compatible with φ", i)


def layer_core_orders(pair: HnnPair, f: Filtration) -> list[int]:
    """Order of φ_{i,i+1} on H(G_i/G_{i+1}, φ_{i,i+1}) for each layer."""
    _require_central_compatible(pair, f)
    out = []
    for i in range(1, len(f)):
        layer = quotient_layer_pair(pair, f.term(i), f.term(i + 1))
        out.append(core_fixpoint(layer).order)
    return out


def quotient_core_orders(pair: HnnPair, f: Filtration) -> list[int]:
    """Order of φ_i on H(G/G_i, φ_i) for i = 2..n."""
    _require_central_compatible(pair, f)
    whole = f.term(1)
    out = []
    for i in range(2, len(f) + 1):
        q = quotient_layer_pair(pair, whole, f.term(i))
        out.append(core_fixpoint(q).order)
    return out


def sufficient_layerwise(pair: HnnPair, f: Filtration) -> bool:
    """Every layer core automorphism has p-power order (then G* is residually p)."""
    return all(is_prime_power(k, pair.p) for k in layer_core_orders(pair, f))


def sufficient_quotient(pair: HnnPair, f: Filtration) -> bool:
    """Every quotient core automorphism has p-power order (then G* is residually p).

    Also checks that each layer core sits inside the matching quotient core and
    that the quotient condition implies the layer condition.
    """
    _require_central_compatible(pair, f)
    whole = f.term(1)
    ok = True
    for i in range(1, len(f)):
        q = core_fixpoint(quotient_layer_pair(pair, whole, f.term(i + 1)))
        layer = core_fixpoint(quotient_layer_pair(pair, f.term(i), f.term(i + 1)))
        if not layer.H.set <= q.H.set:
            raise OracleDisagreement(f"layer core {i} is not inside the quotient core")
        q_ok = is_prime_power(q.order, pair.p)
        if q_ok and not is_prime_power(layer.order, pair.p):
            raise OracleDisagreement(f"quotient condition holds but layer condition fails at {i}")
        ok = ok and q_ok
    return ok
