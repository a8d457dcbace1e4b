"""Survey random small pairs: verdict counts and cross-checks between the deciders.

    python3 scripts/survey.py --samples 300 --seed 1 --p 3
"""

from __future__ import annotations

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from hnnresp import abelian as ab
from hnnresp import filtrations as flt
from hnnresp.hnn import core_fixpoint
from hnnresp.random_pairs import random_abelian_pair, random_small_pair


@dataclass
class SurveyConfig:
    samples: int = 200
    seed: int = 0
    p: int | None = None
    abelian_only: bool = False


def survey(cfg: SurveyConfig) -> dict:
    rng = random.Random(cfg.seed)
    verdicts: Counter = Counter()
    features: Counter = Counter()
    conflicts = []
    for n in range(cfg.samples):
        pair = random_abelian_pair(rng, cfg.p) if cfg.abelian_only else random_small_pair(rng, cfg.p)
        chief = flt.decide_chief(pair)
        verdicts[chief.verdict] += 1
        core = core_fixpoint(pair)
        features["trivial core" if len(core.H) == 1 else "nontrivial core"] += 1
        if pair.G.is_abelian() and hasattr(pair.G, "exponents"):
            if ab.decide_abelian(pair).verdict != chief.verdict:
                conflicts.append((n, "abelian"))
        if flt.obstruction_toplevel(pair) is not None:
            features["top-level obstruction"] += 1
            if chief.is_yes:
                conflicts.append((n, "obstruction"))
    return {"verdicts": dict(verdicts), "features": dict(features), "conflicts": conflicts}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--samples", type=int, default=SurveyConfig.samples)
    parser.add_argument("--seed", type=int, default=SurveyConfig.seed)
    parser.add_argument("--p", type=int, default=None)
    parser.add_argument("--abelian-only", action="store_true")
    args = parser.parse_args()
    cfg = SurveyConfig(args.samples, args.seed, args.p, args.abelian_only)
    result = survey(cfg)
    print(f"{cfg.samples} pairs (seed {cfg.seed})")
    for k, v in sorted(result["verdicts"].items()):
        print(f"  {k}: {v}")
    for k, v in sorted(result["features"].items()):
        print(f"  {k}: {v}")
    print(f"  conflicts: {len(result['conflicts'])}")
    if result["conflicts"]:
        raise SystemExit(3)


if __name__ == "__main__":
    main()
