"""Acceptance criteria 1-9, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` or directly as a script.
"""

from __future__ import annotations

import os
import random
import sys
import time
import traceback

sys.path.insert(0, os.path.dirname(__file__))

from acceptance_log import record  # noqa: E402
from helpers import sandwich  # noqa: E402

from hnnresp import abelian as ab  # noqa: E402
from hnnresp import corpus  # noqa: E402
from hnnresp import filtrations as flt  # noqa: E402
from hnnresp.cli import verify_certificate  # noqa: E402
from hnnresp.groups import lower_central_series  # noqa: E402
from hnnresp.hnn import core_fixpoint, core_orbit, twisted_pair  # noqa: E402
from hnnresp.random_pairs import (  # noqa: E402
    random_abelian_pair,
    random_elementary_pair,
    random_pipeline_pair,
    random_small_pair,
)
from hnnresp.words import core_britton_oracle  # noqa: E402

RANDOM_TRIANGLE = 240
RANDOM_ABELIAN = 240
RANDOM_WITNESS = 120
RANDOM_COVER = 120
RANDOM_PIPELINE = 60
RANDOM_SANDWICH = 240


def timed(limit: float):
    def wrap(fn):
        def run():
            start = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failed criterion, reported with its cause
                ok, detail = False, f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}"
            elapsed = time.perf_counter() - start
            if elapsed >= limit:
                ok, detail = False, f"{detail}; took {elapsed:.1f}s, limit {limit:.0f}s"
            return ok, f"{detail} ({elapsed:.1f}s < {limit:.0f}s)" if ok else detail
        run.limit = limit
        return run
    return wrap


@timed(60)
def criterion_1():
    pair = corpus.build_wreath_pair()
    x, one = corpus.wreath_x(pair), pair.G.identity
    core = core_fixpoint(pair)
    twisted = core_fixpoint(twisted_pair(pair, x, one))
    v = flt.obstruction_toplevel(pair)
    checks = {
        "core trivial": len(core.H) == 1,
        "twisted core of size 3": len(twisted.H) == 3,
        "twisted order 2": twisted.order == 2,
        "violation at a=(x,0), b=1": v is not None and v.a == x and v.b == one,
    }
    bad = [k for k, ok in checks.items() if not ok]
    return not bad, "failed: " + ", ".join(bad) if bad else "core {1}; twisted core 3 elements, order 2; violation at (x,0), 1"


@timed(60)
def criterion_2():
    pair = corpus.build_cyclic_shift_pair()
    G = pair.G
    lcs = lower_central_series(G)
    full = flt.obstruction_full(pair)
    chief = flt.decide_chief(pair)
    checks = {
        "|G| = 27": G.order == 27,
        "gamma_2 is the sum-zero subgroup": lcs.term(2).set == corpus.sum_zero_subgroup(G),
        "|gamma_2| = 3": len(lcs.term(2)) == 3,
        "gamma_3 trivial": lcs.term(3).is_trivial() and len(lcs) == 3,
        "core trivial": len(core_fixpoint(pair).H) == 1,
        "obstruction_full refutes": full.is_no and full.certificate["type"] == "no_filtration_survives",
        "decide_chief NO": chief.is_no,
    }
    bad = [k for k, ok in checks.items() if not ok]
    detail = (f"all {len(checks)} facts hold; {len(full.certificate['failures'])} filtration prefixes refuted, "
              f"{chief.stats['states']} chief states exhausted")
    return not bad, "failed: " + ", ".join(bad) if bad else detail


@timed(60)
def criterion_3():
    fixtures = [corpus.fp3_pair(3, 1, 1, 1), corpus.fp3_pair(3, 2, 1, 1), corpus.fp3_pair(3, 1, 0, 1),
                corpus.fp3_pair(5, 2, 3, 1), corpus.fp4_pair(3, 1, 0, 1), corpus.fp4_pair(3, 1, 1, 1)]
    results = [r for fx in fixtures for r in fx.verify()]
    failed = [r.line() for r in results if not r.passed]
    needed = {"core_trivial", "quotient_core_full", "induced_is_multiplication", "quotient_core_nontrivial"}
    missing = needed - {r.name for r in results}
    if missing:
        return False, f"facts not exercised: {sorted(missing)}"
    return not failed, "; ".join(failed) if failed else f"{len(results)} facts over {len(fixtures)} fixtures hold"


def triangle(pair) -> bool:
    fixed = core_fixpoint(pair)
    orbit = core_orbit(pair, check=False)
    britton = core_britton_oracle(pair, fixed.r + 2, check=False)
    return fixed.H.set == orbit.H.set == britton.set


@timed(120)
def criterion_4():
    disagreements = []
    fixtures = corpus.all_fixtures()
    for fx in fixtures:
        if not triangle(fx.pair):
            disagreements.append(fx.name)
    rng = random.Random(4004)
    orders = set()
    for n in range(RANDOM_TRIANGLE):
        pair = random_small_pair(rng)
        orders.add(pair.G.order)
        assert pair.G.order <= 81
        if not triangle(pair):
            disagreements.append(f"random #{n}")
    detail = f"{len(fixtures)} fixtures + {RANDOM_TRIANGLE} random pairs (orders {sorted(orders)}), 0 disagreements"
    return not disagreements, f"disagreements: {disagreements}" if disagreements else detail


@timed(600)
def criterion_5():
    rng = random.Random(5005)
    bad, yes = [], 0
    for n in range(RANDOM_ABELIAN):
        pair = random_abelian_pair(rng, max_order=81)
        a = ab.decide_abelian(pair)
        c = flt.decide_chief(pair)
        yes += a.is_yes
        if a.verdict != c.verdict:
            bad.append(n)
    detail = f"{RANDOM_ABELIAN} pairs agree ({yes} yes, {RANDOM_ABELIAN - yes} no)"
    return not bad, f"disagreements at {bad}" if bad else detail


@timed(300)
def criterion_6():
    rng = random.Random(6006)
    bad = []
    for n in range(RANDOM_WITNESS):
        pair = random_elementary_pair(rng)
        w = ab.build_witness_elementary(pair)
        report = ab.check_witness(w, wrap=True)
        q, s = len(w.complements["Q"]), len(w.complements["S"])
        formula = w.X.order == len(pair.A) * (w.p ** q) ** (w.p - 1) * w.p ** s
        if not (report.ok and formula):
            bad.append((n, report.reasons))
    detail = f"{RANDOM_WITNESS} witnesses: γ extends φ, p-power order, |X| formula, both embeddings"
    return not bad, f"failures: {bad[:5]}" if bad else detail


@timed(600)
def criterion_7():
    rng = random.Random(7007)
    bad = []
    largest = 0
    for n in range(RANDOM_COVER):
        pair = random_abelian_pair(rng, max_order=81)
        data = ab.cyclic_cover(pair)
        largest = max(largest, data.s)
        rep = ab.check_abprime(data)
        fields = [rep.beta_injective, rep.order_formula, all(rep.blocks_injective), rep.I_equals_core,
                  rep.core_is_intersection, rep.psi_onto_core, rep.square_commutes]
        if not (rep.ok and all(fields)):
            bad.append((n, rep.failures))
    detail = f"{RANDOM_COVER} covers (s up to {largest}): β injective, |G'| formula, blocks injective, both core statements"
    return not bad, f"failures: {bad[:5]}" if bad else detail


@timed(600)
def criterion_8():
    rng = random.Random(8008)
    bad, nontrivial = [], 0
    for n in range(RANDOM_PIPELINE):
        pair = random_pipeline_pair(rng)
        nontrivial += len(pair.intersection()) > 1
        res = ab.abelian_chief_pipeline(pair)
        ok, reason = flt.verify_chief_certificate(pair, res.filtration)
        G = pair.G
        doc = {"problem": {"schema": 1, "group": {"kind": "abelian", "p": G.p, "exponents": list(G.exponents)},
                           "A": [list(a) for a in pair.A.generators],
                           "phi": [list(pair.phi(a)) for a in pair.A.generators]},
               "decision": {"verdict": flt.RESIDUALLY_P, "certificate": res.certificate()}}
        json_ok, json_reason = verify_certificate(doc)
        if not (ok and json_ok):
            bad.append((n, reason, json_reason))
    detail = f"{RANDOM_PIPELINE} pipelines re-checked ({nontrivial} with nontrivial A ∩ B)"
    return not bad, f"failures: {bad[:5]}" if bad else detail


@timed(600)
def criterion_9():
    totals = {"pairs": 0, "sufficient": 0, "obstructed": 0}
    rng = random.Random(9009)
    pairs = [fx.pair for fx in corpus.all_fixtures() if fx.pair.G.order <= flt.CHIEF_CAP]
    pairs += [random_small_pair(rng) for _ in range(RANDOM_SANDWICH)]
    for pair in pairs:
        counts = sandwich(pair)
        totals["pairs"] += 1
        totals["sufficient"] += counts["sufficient"]
        totals["obstructed"] += counts["obstructed"]
    return True, (f"{totals['pairs']} pairs, {totals['sufficient']} sufficient filtrations, "
                  f"{totals['obstructed']} obstructions, no contradiction")


CRITERIA = [
    (1, "wreath fixture", criterion_1),
    (2, "cyclic shift fixture", criterion_2),
    (3, "small elementary fixtures", criterion_3),
    (4, "core oracle triangle", criterion_4),
    (5, "abelian decision equals chief search", criterion_5),
    (6, "explicit elementary witness", criterion_6),
    (7, "cyclic cover checks", criterion_7),
    (8, "assembled chief filtrations re-check", criterion_8),
    (9, "consistency sandwich", criterion_9),
]


def _check(number: int):
    _, title, fn = CRITERIA[number - 1]
    ok, detail = fn()
    record(number, title, ok, detail)
    assert ok, detail


def test_criterion_1_wreath_fixture():
    _check(1)


def test_criterion_2_cyclic_shift_fixture():
    _check(2)


def test_criterion_3_small_elementary_fixtures():
    _check(3)


def test_criterion_4_core_oracle_triangle():
    _check(4)


def test_criterion_5_abelian_decision_matches_chief_search():
    _check(5)


def test_criterion_6_elementary_witness():
    _check(6)


def test_criterion_7_cyclic_cover():
    _check(7)


def test_criterion_8_assembled_chief_filtrations():
    _check(8)


def test_criterion_9_consistency_sandwich():
    _check(9)


def main() -> int:
    failures = 0
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        record(number, title, ok, detail)
        failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
