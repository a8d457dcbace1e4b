"""Command-line front end.

    hnnresp core|decide|obstruct|witness|reduce|verify-cert [--file F] [--json] ...
    hnnresp verify-paper [--json]
    hnnresp enumerate --p 2 --cap 8 [--samples N --seed S]

Problems are JSON objects read from ``--file`` or stdin::

    {"schema": 1,
     "group": {"kind": "abelian", "p": 3, "exponents": [1, 1, 1]},
     "A": [[1, 0, 0], [0, 1, 0]],
     "phi": [[1, 0, 1], [0, 0, 1]],
     "B": [[1, 0, 0], [0, 0, 1]],          # optional, checked against φ(A)
     "twist": {"a": [...], "b": [...]},     # optional
     "word": ["T", [1, 0, 0], "t"],         # for `reduce`
     "options": {"cap": 531441, "s": 3}}

Group kinds: ``abelian`` (p, exponents), ``matrix_semidirect`` (p, m, matrix,
relations), ``group_ring_semidirect`` (p, rank) and ``fixture`` (name, params).

Exit codes: 0 decided or constructed, 1 inconclusive, 2 invalid input,
3 internal oracle disagreement.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Any

from . import abelian as ab
from . import corpus
from . import filtrations as flt
from .groups import (
    AbelianGroup,
    Filtration,
    Group,
    GroupError,
    GroupMap,
    GroupMapError,
    Subgroup,
    extend_generator_images,
    is_prime_power,
    make_abelian,
    make_group_ring_semidirect,
    make_matrix_semidirect,
    small_generating_set,
    subgroup_closure,
)
from .hnn import (
    HnnPair,
    OracleDisagreement,
    PairError,
    core_fixpoint,
    core_orbit,
    pair_from_generators,
    twisted_core,
    twisted_pair,
)
from .words import WordError, base_element, britton_reduce, parse_word

SCHEMA = 1
EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_ORACLE = 0, 1, 2, 3


class InputError(ValueError):
    """Invalid problem description; ``where`` locates the offending field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(message)
        self.where = where


@dataclass
class ProblemSpec:
    raw: dict
    group: Group
    pair: HnnPair
    options: dict = field(default_factory=dict)


FIXTURES = {
    "fp3_pair": lambda **kw: corpus.build_fp3_pair(**{"p": 3, "x": 1, "y": 1, "z": 1, **kw}),
    "fp4_pair": lambda **kw: corpus.build_fp4_pair(**{"p": 3, "a": 1, "b": 0, "c": 1, **kw}),
    "wreath_pair": lambda **kw: corpus.build_wreath_pair(),
    "cyclic_shift_pair": lambda **kw: corpus.build_cyclic_shift_pair(),
}


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise InputError(f"missing field {key!r}", where)
    return d[key]


def build_group(desc: dict) -> Group | HnnPair:
    if not isinstance(desc, dict):
        raise InputError("group must be an object", "group")
    kind = _require(desc, "kind", "group")
    try:
        if kind == "abelian":
            return make_abelian(int(_require(desc, "p", "group")), _require(desc, "exponents", "group"))
        if kind == "matrix_semidirect":
            return make_matrix_semidirect(int(_require(desc, "p", "group")), int(_require(desc, "m", "group")),
                                          _require(desc, "matrix", "group"), desc.get("relations", []))
        if kind == "group_ring_semidirect":
            return make_group_ring_semidirect(int(_require(desc, "p", "group")),
                                              int(_require(desc, "rank", "group")))
        if kind == "fixture":
            name = _require(desc, "name", "group")
            if name not in FIXTURES:
                raise InputError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}", "group.name")
            return FIXTURES[name](**desc.get("params", {}))
    except (GroupError, ValueError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc), "group") from exc
    raise InputError(f"unknown group kind {kind!r}", "group.kind")


def _decode(G: Group, data, where: str):
    if not isinstance(data, (list, tuple)):
        raise InputError("element must be a list of integers", where)
    try:
        return G.decode(data)
    except (GroupError, ValueError, TypeError) as exc:
        raise InputError(str(exc), where) from exc


def parse_problem(raw: dict, args: argparse.Namespace | None = None) -> ProblemSpec:
    if not isinstance(raw, dict):
        raise InputError("problem must be a JSON object")
    if raw.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"unsupported schema {raw.get('schema')!r}", "schema")
    built = build_group(_require(raw, "group", ""))
    if isinstance(built, HnnPair):
        pair = built
        G = pair.G
    else:
        G = built
        a_gens = [_decode(G, g, f"A[{i}]") for i, g in enumerate(raw.get("A", []))]
        images = [_decode(G, g, f"phi[{i}]") for i, g in enumerate(raw.get("phi", []))]
        if len(a_gens) != len(images):
            raise InputError("A and phi must have the same length", "phi")
        try:
            pair = pair_from_generators(G, a_gens, images)
        except (PairError, GroupError) as exc:
            raise InputError(str(exc), "phi") from exc
        if "B" in raw:
            B = subgroup_closure(G, [_decode(G, g, f"B[{i}]") for i, g in enumerate(raw["B"])])
            if B != pair.B:
                raise InputError("B is not the image of A under phi", "B")
    if "twist" in raw:
        tw = raw["twist"]
        a = _decode(G, _require(tw, "a", "twist"), "twist.a")
        b = _decode(G, _require(tw, "b", "twist"), "twist.b")
        try:
            pair = twisted_pair(pair, a, b)
        except PairError as exc:
            raise InputError(str(exc), "twist") from exc
    options = dict(raw.get("options", {}))
    if args is not None:
        if getattr(args, "cap", None) is not None:
            options["cap"] = args.cap
        if getattr(args, "s", None) is not None:
            options["s"] = args.s
        if getattr(args, "p", None) is not None and args.p != G.p:
            raise InputError(f"--p {args.p} does not match the group prime {G.p}", "group.p")
    return ProblemSpec(raw, G, pair, options)


def elements_json(elements) -> list:
    return [list(g) for g in sorted(elements)]


# ---------------------------------------------------------------------------
# commands


def cmd_core(problem: ProblemSpec) -> tuple[dict, int]:
    core = core_orbit(problem.pair)
    return {"core": elements_json(core.H.elements), "size": len(core.H), "r": core.r,
            "orbit_index": core.orbit_index, "order": core.order}, EXIT_OK


def is_abelian_pair(pair: HnnPair) -> bool:
    return isinstance(pair.G, AbelianGroup) and pair.G.is_abelian()


def cmd_decide(problem: ProblemSpec) -> tuple[dict, int]:
    pair = problem.pair
    cap = int(problem.options.get("cap", flt.CHIEF_CAP))
    if is_abelian_pair(pair):
        d = ab.decide_abelian(pair)
    elif pair.G.order <= cap:
        d = flt.decide_chief(pair, cap)
    else:
        v = flt.obstruction_toplevel(pair)
        if v is None:
            d = flt.Decision(flt.INCONCLUSIVE, "obstruction_toplevel",
                             {"type": "no_violation", "reason": f"|G| = {pair.G.order} exceeds cap {cap}"})
        else:
            d = flt.Decision(flt.NOT_RESIDUALLY_P, "obstruction_toplevel",
                             {"type": "twist_violation", **v.to_json()}, violation=v)
    out = {"decision": d.to_json(), "problem": problem.raw}
    return out, EXIT_INCONCLUSIVE if d.verdict == flt.INCONCLUSIVE else EXIT_OK


def cmd_obstruct(problem: ProblemSpec) -> tuple[dict, int]:
    pair = problem.pair
    v = flt.obstruction_toplevel(pair)
    if v is not None:
        d = flt.Decision(flt.NOT_RESIDUALLY_P, "obstruction_toplevel",
                         {"type": "twist_violation", **v.to_json()}, violation=v)
    elif pair.G.order <= int(problem.options.get("obstruction_cap", flt.OBSTRUCTION_CAP)):
        d = flt.obstruction_full(pair, int(problem.options.get("obstruction_cap", flt.OBSTRUCTION_CAP)))
    else:
        d = flt.Decision(flt.INCONCLUSIVE, "obstruction_toplevel", {"type": "no_violation"})
    out = {"decision": d.to_json(), "problem": problem.raw}
    return out, EXIT_OK if d.is_no else EXIT_INCONCLUSIVE


def cmd_witness(problem: ProblemSpec) -> tuple[dict, int]:
    pair = problem.pair
    if not is_abelian_pair(pair):
        return {"error": "witnesses are only built for abelian groups", "missing_condition": "G abelian"}, \
            EXIT_INCONCLUSIVE
    G = pair.G
    elementary = all(m == G.p for m in G.moduli)
    try:
        if elementary:
            w = ab.build_witness_elementary(pair)
            report = ab.check_witness(w)
            Y, y = w.wrap()
            out = {"route": "elementary", "witness": w.to_json(),
                   "Y": {"order": Y.order, "cyclic_order": w.gamma_order}, "y": list(y),
                   "checks": {"extends_phi": report.extends_phi, "p_power_order": report.p_power_order,
                              "order_formula": report.order_formula, "embeds_in_X": report.embeds_in_X,
                              "embeds_in_Y": report.embeds_in_Y}}
            if not report.ok:
                raise OracleDisagreement("; ".join(report.reasons) or "witness check failed")
        else:
            res = ab.abelian_chief_pipeline(pair)
            if not res.verified:
                raise OracleDisagreement(res.reason)
            out = {"route": "power_filtration", "k": res.power.k,
                   "homocyclic_exponents": list(res.homocyclic.pair.G.exponents),
                   "layer_flag_lengths": [len(f) for f in res.layer_flags],
                   "top_layer_witness": res.witness.to_json(),
                   "certificate": res.certificate()}
    except flt.PreconditionError as exc:
        return {"error": str(exc), "missing_condition": "φ restricts to a p-power-order automorphism of A ∩ B"}, \
            EXIT_INCONCLUSIVE
    s = problem.options.get("s")
    try:
        data = ab.cyclic_cover(pair, int(s) if s is not None else None)
    except GroupError as exc:
        raise InputError(str(exc), "options.s") from exc
    rep = ab.check_abprime(data)
    out["cover"] = data.to_json() | {"checks_ok": rep.ok, "failures": rep.failures}
    if not rep.ok:
        raise OracleDisagreement("; ".join(rep.failures))
    return out, EXIT_OK


def cmd_reduce(problem: ProblemSpec) -> tuple[dict, int]:
    data = _require(problem.raw, "word", "")
    try:
        w = parse_word(problem.pair.G, data)
    except (WordError, GroupError) as exc:
        raise InputError(str(exc), "word") from exc
    r = britton_reduce(problem.pair, w)
    g = base_element(r, problem.pair.G)
    return {"input": w.to_json(), "reduced": r.to_json(), "t_length": r.t_length(),
            "in_base": g is not None, "element": list(g) if g is not None else None}, EXIT_OK


def cmd_verify_paper(_: Any = None) -> tuple[dict, int]:
    results = corpus.verify_all()
    facts = [{"fixture": r.fixture, "fact": r.name, "claim": r.claim, "passed": r.passed,
              "asserted": r.asserted, "actual": _jsonable(r.actual), "seconds": round(r.seconds, 3)}
             for r in results]
    ok = all(r.passed for r in results)
    return {"facts": facts, "all_passed": ok}, EXIT_OK if ok else EXIT_ORACLE


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str, float)) or x is None:
        return x
    return str(x)


def _filtration_from_json(G: Group, terms: list) -> Filtration:
    subs = [subgroup_closure(G, [G.decode(g) for g in gens]) for gens in terms]
    return Filtration(G, subs)


def verify_certificate(doc: dict) -> tuple[bool, str]:
    """Re-run every condition of a certificate emitted by `decide` or `obstruct`."""
    problem = parse_problem(_require(doc, "problem", ""))
    dec = _require(doc, "decision", "")
    cert = _require(dec, "certificate", "decision")
    verdict = _require(dec, "verdict", "decision")
    pair = problem.pair
    kind = cert.get("type")
    p = pair.p
    if kind == "chief_filtration":
        try:
            f = _filtration_from_json(pair.G, cert["terms"])
        except GroupError as exc:
            return False, f"terms do not form a filtration: {exc}"
        ok, reason = flt.verify_chief_certificate(pair, f)
        return ok and verdict == flt.RESIDUALLY_P, reason
    if kind == "abelian_core_order":
        core = core_orbit(pair)
        if elements_json(core.H.elements) != sorted(cert["core"]):
            return False, "core does not match"
        if core.order != cert["order"]:
            return False, "order does not match"
        expected = flt.RESIDUALLY_P if is_prime_power(core.order, p) else flt.NOT_RESIDUALLY_P
        return verdict == expected, "ok" if verdict == expected else "verdict does not follow from the order"
    if kind == "twist_violation":
        a, b = pair.G.decode(cert["a"]), pair.G.decode(cert["b"])
        if cert.get("j") is not None:
            return False, "layer violations are re-checked through obstruction_full"
        tc = twisted_core(pair, a, b)
        if is_prime_power(tc.order, p) or tc.order != cert["order"]:
            return False, "twisted core order is a power of p or differs"
        return verdict == flt.NOT_RESIDUALLY_P, "ok"
    if kind == "exhausted":
        d = flt.decide_chief(pair, int(problem.options.get("cap", flt.CHIEF_CAP)), memoize=False)
        return d.is_no and verdict == flt.NOT_RESIDUALLY_P, "exhaustive search repeated without memo"
    if kind == "no_filtration_survives":
        d = flt.obstruction_full(pair)
        return d.is_no and verdict == flt.NOT_RESIDUALLY_P, "filtration enumeration repeated"
    if kind == "surviving_filtration":
        return verdict == flt.INCONCLUSIVE, "an inconclusive result needs no certificate"
    if kind == "no_violation":
        return verdict == flt.INCONCLUSIVE, "an inconclusive result needs no certificate"
    return False, f"unknown certificate type {kind!r}"


def cmd_verify_cert(doc: dict) -> tuple[dict, int]:
    ok, reason = verify_certificate(doc)
    return {"valid": ok, "reason": reason}, EXIT_OK if ok else EXIT_INVALID


def enumerate_abelian_pairs(p: int, max_order: int):
    """All (G, A, φ) with G abelian of order <= max_order, A cyclic or 2-generated."""
    n_max = 0
    while p ** (n_max + 1) <= max_order:
        n_max += 1
    for n in range(1, n_max + 1):
        for exps in _partitions(n):
            G = make_abelian(p, exps)
            els = G.elements()
            subgroups = {}
            for g, h in itertools.combinations_with_replacement(els, 2):
                S = subgroup_closure(G, [g, h])
                subgroups.setdefault(S.set, S)
            for S in sorted(subgroups.values(), key=lambda S: (len(S), S.elements)):
                gens = small_generating_set(S)
                for images in itertools.product(els, repeat=len(gens)):
                    try:
                        f = extend_generator_images(S, gens, list(images), G)
                    except GroupMapError:
                        continue
                    if not f.is_injective():
                        continue
                    B = Subgroup(G, tuple(set(f.table.values())))
                    yield HnnPair(G, S, B, GroupMap(S, B, dict(f.table)))


def _partitions(n: int, largest: int | None = None):
    if n == 0:
        yield []
        return
    largest = n if largest is None else largest
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


def cmd_enumerate(args: argparse.Namespace) -> tuple[dict, int]:
    from .random_pairs import random_small_pair

    p = args.p or 2
    cap = args.cap or p ** 3
    if args.samples:
        rng = random.Random(args.seed)
        pairs = (random_small_pair(rng, p) for _ in range(args.samples))
        mode = "random"
    else:
        pairs = enumerate_abelian_pairs(p, cap)
        mode = "exhaustive_abelian"
    counts: dict[str, int] = {}
    disagreements = []
    total = 0
    trivial_core = 0
    for pair in pairs:
        total += 1
        chief = flt.decide_chief(pair)
        counts[chief.verdict] = counts.get(chief.verdict, 0) + 1
        trivial_core += len(core_fixpoint(pair).H) == 1
        if is_abelian_pair(pair):
            if ab.decide_abelian(pair).verdict != chief.verdict:
                disagreements.append({"group": pair.G.params, "A": elements_json(pair.A.generators)})
        v = flt.obstruction_toplevel(pair)
        if v is not None and chief.is_yes:
            disagreements.append({"group": pair.G.params, "obstruction_vs_chief": True})
    out = {"mode": mode, "p": p, "max_order": cap, "pairs": total, "verdicts": counts,
           "trivial_core": trivial_core, "disagreements": disagreements}
    return out, EXIT_ORACLE if disagreements else EXIT_OK


# ---------------------------------------------------------------------------
# driver


def _read_problem(args: argparse.Namespace) -> dict:
    text = open(args.file).read() if args.file else sys.stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}", "input") from exc


def _human(command: str, out: dict) -> str:
    if command == "verify-paper":
        lines = []
        for f in out["facts"]:
            status = "PASS" if f["passed"] and f["asserted"] else ("NOTE" if f["passed"] else "FAIL")
            lines.append(f"[{status}] {f['fixture']}: {f['fact']}: {f['claim']} -> {f['actual']}")
        lines.append("all facts hold" if out["all_passed"] else "SOME FACTS FAILED")
        return "\n".join(lines)
    if "decision" in out:
        d = out["decision"]
        return f"{d['verdict']} (route: {d['route']}, certificate: {d['certificate'].get('type')})"
    if command == "core":
        return f"core of order {out['size']}, r = {out['r']}, φ has order {out['order']} on it"
    return json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hnnresp", description="Residual p-ness of HNN extensions of finite p-groups.")
    parser.add_argument("command", choices=["core", "decide", "obstruct", "witness", "reduce",
                                            "verify-paper", "verify-cert", "enumerate"])
    parser.add_argument("--file", help="problem JSON (default: stdin)")
    parser.add_argument("--json", action="store_true", help="print JSON instead of a summary")
    parser.add_argument("--p", type=int, help="prime (checked against the group; used by enumerate)")
    parser.add_argument("--cap", type=int, help="enumeration cap (max group order)")
    parser.add_argument("--s", type=int, help="cover degree for the cyclic cover")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized runs")
    parser.add_argument("--samples", type=int, default=0, help="random pairs for enumerate (0: exhaustive)")
    return parser


COMMANDS = {"core": cmd_core, "decide": cmd_decide, "obstruct": cmd_obstruct,
            "witness": cmd_witness, "reduce": cmd_reduce}


def run(argv: list[str] | None = None) -> tuple[dict, int, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify-paper":
            out, code = cmd_verify_paper()
        elif args.command == "enumerate":
            out, code = cmd_enumerate(args)
        elif args.command == "verify-cert":
            out, code = cmd_verify_cert(_read_problem(args))
        else:
            problem = parse_problem(_read_problem(args), args)
            out, code = COMMANDS[args.command](problem)
    except InputError as exc:
        out, code = {"error": str(exc), "where": exc.where}, EXIT_INVALID
    except OracleDisagreement as exc:
        out, code = {"error": f"oracle disagreement: {exc}"}, EXIT_ORACLE
    except (GroupError, WordError, KeyError, TypeError, ValueError) as exc:
        out, code = {"error": f"{type(exc).__name__}: {exc}"}, EXIT_INVALID
    out = {"schema": SCHEMA, "command": args.command} | out
    return out, code, args


def main(argv: list[str] | None = None) -> int:
    out, code, args = run(argv)
    if args.json or "error" in out:
        print(json.dumps(out, sort_keys=True, ensure_ascii=False))
    else:
        print(_human(args.command, out))
    return code


if __name__ == "__main__":
    sys.exit(main())
