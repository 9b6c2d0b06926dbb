"""Mean time to data loss from a birth-death failure/repair chain.

State f means f blocks of the stripe are down. A failure in state f happens
at rate (n - f) * lambda and is fatal with probability p_{f+1}; repairs move
f -> f-1 at rate mu_f. Expected absorption time is solved exactly with
rationals, which keeps the very stiff systems (mu/lambda ~ 1e6) well behaved.

Two loss models are available:

* ``"mds"`` - every scheme loses data once more than r blocks are down
  (p_f = 0 for f <= r, 1 beyond). Schemes then differ only through their
  repair rates.
* ``"profile"`` - p_f is the measured share of undecodable f-subsets.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from .construct import StripeLayout
from .metrics import arc1, arc2
from .planner import decodable, local_plan

SECONDS_PER_YEAR = 365.25 * 24 * 3600


@dataclass(frozen=True)
class ReliabilityParams:
    lambda_per_node: float = 0.25          # failures per node-year
    bandwidth: float = 125_000_000.0       # bytes/s (1 Gb/s)
    block_size: int = 64 * 1024 * 1024     # bytes
    detection_delay: float = 30.0          # seconds
    loss_model: str = "mds"                # "mds" or "profile"
    conditional: bool = False              # use P(undecodable at f+1 | decodable at f)
    mu: tuple | None = None                # explicit repair rates per year, overrides derivation
    exhaustive_limit: int = 1_000_000      # profile: enumerate when C(n, f) is at most this
    samples: int = 100_000                 # profile: sample size otherwise
    cost_exhaustive_limit: int = 20_000    # repair-cost averages for f >= 3
    cost_samples: int = 2_000
    seed: int = 0

    def __post_init__(self):
        if self.lambda_per_node <= 0 or self.bandwidth <= 0 or self.block_size <= 0:
            raise ValueError("rates and sizes must be positive")
        if self.detection_delay < 0:
            raise ValueError("detection delay cannot be negative")
        if self.loss_model not in ("mds", "profile"):
            raise ValueError(f"unknown loss model {self.loss_model!r}")
        if self.mu is not None:
            object.__setattr__(self, "mu", tuple(float(m) for m in self.mu))
            if any(m < 0 for m in self.mu):
                raise ValueError("repair rates cannot be negative")

    @classmethod
    def from_dict(cls, data: dict) -> "ReliabilityParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown reliability settings: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ReliabilityParams":
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError("reliability config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MttdlResult:
    years: float
    states_used: int
    p_fail: tuple     # p_1 .. p_{depth+1}
    mu: tuple         # mu_1 .. mu_depth, per year
    loss_model: str


def _subsets(n: int, f: int, limit: int, samples: int, rng: random.Random):
    """All f-subsets when few enough, else ``samples`` uniform random ones."""
    if math.comb(n, f) <= limit:
        return itertools.combinations(range(n), f), True
    return (tuple(sorted(rng.sample(range(n), f))) for _ in range(samples)), False


def survival_profile(layout: StripeLayout, exhaustive_limit: int = 1_000_000,
                     samples: int = 100_000, seed: int = 0, max_failures: int | None = None) -> list[float]:
    """p_f = share of f-subsets that are NOT decodable, for f = 1..r+p+1."""
    s = layout.spec
    top = s.r + s.p + 1 if max_failures is None else max_failures
    rng = random.Random(seed)
    out = []
    for f in range(1, top + 1):
        if f <= s.r:
            out.append(0.0)  # any r erasures are decodable for every scheme here
            continue
        if f > layout.n - layout.k:
            out.append(1.0)  # fewer than k survivors
            continue
        it, _ = _subsets(layout.n, f, exhaustive_limit, samples, rng)
        total = bad = 0
        for sub in it:
            total += 1
            if not decodable(layout, sub):
                bad += 1
        out.append(bad / total)
    return out


def average_repair_cost(layout: StripeLayout, f: int, exhaustive_limit: int = 20_000,
                        samples: int = 2_000, seed: int = 0) -> float | None:
    """Mean blocks read to repair f simultaneous failures (decodable sets only)."""
    if f == 1:
        return float(arc1(layout))
    if f == 2:
        return float(arc2(layout))
    rng = random.Random(seed + f)
    it, _ = _subsets(layout.n, f, exhaustive_limit, samples, rng)
    total = count = 0
    for sub in it:
        if not decodable(layout, sub):
            continue
        loc = local_plan(layout, sub)
        total += layout.k if loc is None else min(loc.cost, layout.k)
        count += 1
    return total / count if count else None


def repair_rate(cost_blocks: float, bandwidth: float, block_size: float, detection_delay: float) -> float:
    """Repairs per year for one repair reading ``cost_blocks`` blocks."""
    seconds = detection_delay + cost_blocks * block_size / bandwidth
    return SECONDS_PER_YEAR / seconds


def derive_mu(layout: StripeLayout, bandwidth: float, block_size: float, detection_delay: float,
              depth: int | None = None, exhaustive_limit: int = 20_000, samples: int = 2_000,
              seed: int = 0) -> list[float]:
    """Per-state repair rates (per year) for states 1..depth."""
    if bandwidth <= 0 or block_size <= 0 or detection_delay < 0:
        raise ValueError("bandwidth and block size must be positive")
    depth = layout.spec.r if depth is None else depth
    rates: list[float] = []
    for f in range(1, depth + 1):
        cost = average_repair_cost(layout, f, exhaustive_limit, samples, seed)
        if cost is None:
            rates.append(rates[-1] if rates else 0.0)
        else:
            rates.append(repair_rate(cost, bandwidth, block_size, detection_delay))
    return rates


def chain_mttdl(n: int, lam: float, mu, p_fail, conditional: bool = False) -> float:
    """Expected time to absorption from the healthy state.

    ``mu[i]`` is the repair rate out of state i+1; ``p_fail[i]`` the loss
    probability of failure number i+1. The deepest state is len(mu); a
    failure from there is always fatal.
    """
    depth = len(mu)
    if depth > n:
        raise ValueError("more degraded states than nodes")
    lam_q = Fraction(lam)
    mus = [Fraction(m) for m in mu[:depth]]
    ps = [Fraction(p) for p in p_fail]
    while len(ps) < depth + 1:
        ps.append(Fraction(1))

    def loss_prob(f: int) -> Fraction:
        """Probability that the failure taking state f to f+1 is fatal."""
        if f >= depth:
            return Fraction(1)
        nxt = ps[f]
        if conditional:
            prev = ps[f - 1] if f > 0 else Fraction(0)
            if prev >= 1:
                return Fraction(1)
            return (nxt - prev) / (1 - prev)
        return nxt

    size = depth + 1
    a = [[Fraction(0)] * size for _ in range(size)]
    b = [Fraction(-1)] * size
    for f in range(size):
        fail = (n - f) * lam_q
        rep = mus[f - 1] if f > 0 else Fraction(0)
        out = fail + rep
        if out == 0:
            raise ArithmeticError(f"state {f} has no outgoing transitions; the chain is singular")
        a[f][f] = -out
        q = loss_prob(f)
        if f + 1 < size:
            a[f][f + 1] += fail * (1 - q)
        if f > 0:
            a[f][f - 1] += rep
    t = _solve(a, b)
    return float(t[0])


def _solve(a, b):
    size = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for c in range(size):
        piv = next((r for r in range(c, size) if m[r][c] != 0), None)
        if piv is None:
            raise ArithmeticError("singular chain")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(size):
            if r != c and m[r][c] != 0:
                fct = m[r][c]
                m[r] = [vr - fct * vc for vr, vc in zip(m[r], m[c])]
    return [m[i][size] for i in range(size)]


def mttdl(layout: StripeLayout, params: ReliabilityParams | None = None) -> MttdlResult:
    params = params or ReliabilityParams()
    s = layout.spec
    if params.loss_model == "mds":
        depth = s.r
        p_fail = [0.0] * s.r + [1.0]
    else:
        depth = s.r + s.p
        p_fail = survival_profile(layout, params.exhaustive_limit, params.samples, params.seed)
    if params.mu is not None:
        mu = list(params.mu)[:depth]
        if len(mu) < depth:
            raise ValueError(f"need {depth} repair rates, got {len(params.mu)}")
    else:
        mu = derive_mu(layout, params.bandwidth, params.block_size, params.detection_delay,
                       depth, params.cost_exhaustive_limit, params.cost_samples, params.seed)
    years = chain_mttdl(layout.n, params.lambda_per_node, mu, p_fail, params.conditional)
    return MttdlResult(years, depth + 1, tuple(p_fail), tuple(mu), params.loss_model)
