"""Average repair costs and local-repair portions by exhaustive enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .construct import StripeLayout
from .planner import decodable, local_plan, plan_multi


def _single_costs(layout: StripeLayout) -> list[int]:
    return [plan_multi(layout, {i}, coefficients=False).cost for i in range(layout.n)]


def adrc(layout: StripeLayout) -> Fraction:
    costs = _single_costs(layout)
    return Fraction(sum(costs[i] for i in layout.data_indices), layout.k)


def arc1(layout: StripeLayout) -> Fraction:
    costs = _single_costs(layout)
    return Fraction(sum(costs), layout.n)


@dataclass(frozen=True)
class PairSummary:
    pairs: int          # decodable pairs enumerated
    undecodable: int
    total_cost: int
    local_feasible: int
    local_cheaper: int

    @property
    def arc2(self) -> Fraction:
        return Fraction(self.total_cost, self.pairs) if self.pairs else Fraction(0)

    @property
    def local_portion(self) -> Fraction:
        return Fraction(self.local_feasible, self.pairs) if self.pairs else Fraction(0)

    @property
    def effective_portion(self) -> Fraction:
        return Fraction(self.local_cheaper, self.pairs) if self.pairs else Fraction(0)


_PAIR_CACHE: dict = {}


def pair_summary(layout: StripeLayout) -> PairSummary:
    """One pass over all block pairs. Undecodable pairs are counted apart."""
    key = id(layout)
    hit = _PAIR_CACHE.get(key)
    if hit is not None and hit[0] is layout:
        return hit[1]
    pairs = bad = total = feas = cheaper = 0
    for pair in itertools.combinations(range(layout.n), 2):
        if not decodable(layout, pair):
            bad += 1
            continue
        pairs += 1
        # A global plan always reads exactly k blocks, so it is not built here.
        loc = local_plan(layout, pair)
        if loc is None:
            total += layout.k
            continue
        feas += 1
        total += min(loc.cost, layout.k)
        if loc.cost < layout.k:
            cheaper += 1
    out = PairSummary(pairs, bad, total, feas, cheaper)
    _PAIR_CACHE[key] = (layout, out)
    return out


def arc2(layout: StripeLayout) -> Fraction:
    return pair_summary(layout).arc2


def local_repair_portion(layout: StripeLayout) -> Fraction:
    """Share of block pairs repairable through group equations alone."""
    return pair_summary(layout).local_portion


def effective_local_portion(layout: StripeLayout) -> Fraction:
    """Share of block pairs whose local plan reads fewer blocks than the global plan."""
    return pair_summary(layout).effective_portion


@dataclass(frozen=True)
class MetricReport:
    scheme: str
    params: tuple
    adrc: Fraction
    arc1: Fraction
    arc2: Fraction
    local_portion2: Fraction
    effective_local_portion2: Fraction

    def rounded(self, digits: int = 2) -> dict:
        return {
            "scheme": self.scheme,
            "k": self.params[0], "r": self.params[1], "p": self.params[2],
            "adrc": round(float(self.adrc), digits),
            "arc1": round(float(self.arc1), digits),
            "arc2": round(float(self.arc2), digits),
            "local_portion": round(float(self.local_portion2), digits),
            "effective_local_portion": round(float(self.effective_local_portion2), digits),
        }


METRIC_NAMES = ("adrc", "arc1", "arc2", "local_portion2", "effective_local_portion2")


def report(layout: StripeLayout, pairs: bool = True) -> MetricReport:
    costs = _single_costs(layout)
    ad = Fraction(sum(costs[i] for i in layout.data_indices), layout.k)
    a1 = Fraction(sum(costs), layout.n)
    if pairs:
        ps = pair_summary(layout)
        a2, lp, ep = ps.arc2, ps.local_portion, ps.effective_portion
    else:
        a2 = lp = ep = Fraction(0)
    s = layout.spec
    return MetricReport(s.scheme.value, (s.k, s.r, s.p), ad, a1, a2, lp, ep)
