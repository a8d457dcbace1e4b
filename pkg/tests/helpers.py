"""Shared checks for the test modules."""

from hnnresp import filtrations as flt
from hnnresp.groups import Filtration, GroupError, lower_central_series
from hnnresp.hnn import HnnPair


def candidate_filtrations(pair: HnnPair) -> list[Filtration]:
    """Central filtrations compatible with the pair: (G, {1}) when abelian, and the lower central series."""
    G = pair.G
    out = []
    if G.is_abelian() and G.order > 1:
        out.append(Filtration(G, [G.whole(), G.trivial()]))
    try:
        lcs = lower_central_series(G)
    except GroupError:
        lcs = None
    if lcs is not None and lcs not in out:
        out.append(lcs)
    return [f for f in out if flt.is_central(f) and flt.is_compatible(pair, f)]


def sandwich(pair: HnnPair, chief: flt.Decision | None = None) -> dict:
    """sufficient_layerwise ⇒ chief YES; any obstruction ⇒ chief NO.  Returns counts."""
    if chief is None:
        chief = flt.decide_chief(pair)
    counts = {"sufficient": 0, "obstructed": 0}
    for f in candidate_filtrations(pair):
        if flt.sufficient_layerwise(pair, f):
            counts["sufficient"] += 1
            assert chief.is_yes, "sufficient condition holds but the chief search says NO"
        if flt.sufficient_quotient(pair, f):
            assert chief.is_yes, "quotient condition holds but the chief search says NO"
    if flt.obstruction_toplevel(pair) is not None:
        counts["obstructed"] += 1
        assert chief.is_no, "obstruction found but the chief search says YES"
    if pair.G.order <= flt.OBSTRUCTION_CAP:
        full = flt.obstruction_full(pair)
        if full.is_no:
            counts["obstructed"] += 1
            assert chief.is_no, "no filtration survives but the chief search says YES"
    return counts
