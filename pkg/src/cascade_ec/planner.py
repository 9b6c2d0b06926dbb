"""Repair planning: decodability, local (group-equation) repair and global repair.

A local plan repairs failures one at a time, each from a group equation in
which it is the only missing member; an earlier repaired block may serve as a
source for a later step. Its cost is the number of distinct surviving blocks
read. A global plan reads k surviving blocks that span the code and derives
everything else from them. ``plan_multi`` returns the cheaper of the two and
prefers the local plan on ties.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .construct import Role, StripeLayout
from .errors import Undecodable
from .gf import field

LOCAL, GLOBAL, MIXED = "Local", "Global", "Mixed"

# Above this many failures the local search stops at the first complete plan.
EXACT_SEARCH_LIMIT = 6


@dataclass(frozen=True)
class RepairStep:
    target: int
    sources: tuple
    kind: str                     # "local" or "decode"
    group: int | None = None      # equation used by a local step
    coefficients: tuple | None = None


@dataclass(frozen=True)
class RepairPlan:
    failed: frozenset
    steps: tuple
    accessed: frozenset
    mode: str

    @property
    def cost(self) -> int:
        return len(self.accessed)

    @property
    def targets(self) -> tuple:
        return tuple(s.target for s in self.steps)

    def restrict(self, wanted) -> "RepairPlan":
        """Only the steps needed to produce ``wanted`` (plus their inputs)."""
        need = set(wanted)
        keep = []
        for step in reversed(self.steps):
            if step.target in need:
                keep.append(step)
                need.update(s for s in step.sources if s in self.failed)
        keep.reverse()
        accessed = frozenset(s for st in keep for s in st.sources if s not in self.failed)
        return RepairPlan(self.failed, tuple(keep), accessed, self.mode)

    def to_dict(self, layout: StripeLayout) -> dict:
        lab = layout.label
        return {
            "failed": sorted(lab(i) for i in self.failed),
            "mode": self.mode,
            "cost": self.cost,
            "accessed": sorted(lab(i) for i in self.accessed),
            "steps": [
                {
                    "target": lab(s.target),
                    "kind": s.kind,
                    "sources": [lab(i) for i in s.sources],
                    "coefficients": None if s.coefficients is None else list(s.coefficients),
                }
                for s in self.steps
            ],
        }


def _indices(layout: StripeLayout, failed) -> frozenset:
    if isinstance(failed, (int, str)) or hasattr(failed, "role"):
        failed = [failed]
    return frozenset(layout.index(b) for b in failed)


def decodable(layout: StripeLayout, failed) -> bool:
    """True iff the surviving generator rows have rank k.

    Surviving data rows are unit vectors, so only the surviving parity rows
    restricted to the lost data columns need checking.
    """
    lost = _indices(layout, failed)
    lost_data = [i for i in layout.data_indices if i in lost]
    if not lost_data:
        return True
    # Every square submatrix of a Cauchy matrix is invertible, so enough
    # surviving global parities settle the question without elimination.
    if len(lost_data) <= sum(1 for g in layout.global_indices if g not in lost):
        return True
    parities = [i for i in range(layout.k, layout.n) if i not in lost]
    if len(parities) < len(lost_data):
        return False
    sub = layout.generator_array[np.ix_(parities, lost_data)]
    return field(layout.spec.w).rank(sub) == len(lost_data)


def local_plan(layout: StripeLayout, failed) -> RepairPlan | None:
    """Cheapest all-local plan, or None when some failure cannot be reached."""
    lost = _indices(layout, failed)
    if not lost:
        return RepairPlan(lost, (), frozenset(), LOCAL)
    groups = layout.groups
    groups_of = layout.groups_of
    if any(not groups_of[x] for x in lost):
        return None
    exact = len(lost) <= EXACT_SEARCH_LIMIT
    best: list = [None, None]  # steps, reads
    seen: set = set()

    def search(done: frozenset, reads: frozenset, steps: tuple) -> None:
        if best[1] is not None and len(reads) >= len(best[1]):
            return
        if done == lost:
            best[0], best[1] = steps, reads
            return
        key = (done, reads)
        if key in seen:
            return
        seen.add(key)
        options = []
        for x in sorted(lost - done):
            for gi in groups_of[x]:
                others = groups[gi] - {x}
                if (others & lost) <= done:
                    fresh = others - lost
                    options.append((len(fresh - reads), x, gi, others, fresh))
        options.sort(key=lambda o: (o[0], o[1], o[2]))
        for _, x, gi, others, fresh in options:
            search(done | {x}, reads | fresh, steps + ((x, gi, others),))
            if not exact and best[0] is not None:
                return

    search(frozenset(), frozenset(), ())
    if best[0] is None:
        return None
    steps = tuple(
        RepairStep(x, tuple(sorted(others)), "local", gi) for x, gi, others in best[0]
    )
    return RepairPlan(lost, steps, frozenset(best[1]), LOCAL)


def _basis_selection(layout: StripeLayout, lost: frozenset) -> list[int]:
    """k surviving blocks of full rank: data first, then globals, then locals."""
    gf = field(layout.spec.w)
    gen = layout.generator_array
    chosen = [i for i in layout.data_indices if i not in lost]
    lost_data = [i for i in layout.data_indices if i in lost]
    need = len(lost_data)
    if need == 0:
        return chosen
    order = [i for i in layout.global_indices if i not in lost]
    order += [i for i in layout.local_indices if i not in lost]
    picked: list[int] = []
    for i in order:
        trial = picked + [i]
        if gf.rank(gen[np.ix_(trial, lost_data)]) == len(trial):
            picked = trial
            if len(picked) == need:
                break
    if len(picked) < need:
        raise Undecodable(f"surviving blocks have rank {len(chosen) + len(picked)} < {layout.k}")
    return chosen + picked


def global_plan(layout: StripeLayout, failed) -> RepairPlan:
    """Read k spanning survivors; failures covered by a group equation over
    those blocks are rebuilt from it, the rest are decoded."""
    lost = _indices(layout, failed)
    if not lost:
        return RepairPlan(lost, (), frozenset(), GLOBAL)
    basis = _basis_selection(layout, lost)
    basis_set = frozenset(basis)
    groups = layout.groups
    steps: list[RepairStep] = []
    done: set = set()

    def sweep_local() -> None:
        progress = True
        while progress:
            progress = False
            for x in sorted(lost - done):
                for gi in layout.groups_of[x]:
                    others = groups[gi] - {x}
                    if all(o in done or o in basis_set for o in others):
                        steps.append(RepairStep(x, tuple(sorted(others)), "local", gi))
                        done.add(x)
                        progress = True
                        break

    sweep_local()
    roles = layout.blocks
    pending = [x for x in sorted(lost - done) if roles[x].role is not Role.LOCAL]
    for x in pending:
        steps.append(RepairStep(x, tuple(basis), "decode"))
        done.add(x)
    sweep_local()
    for x in sorted(lost - done):
        steps.append(RepairStep(x, tuple(basis), "decode"))
        done.add(x)
    mode = GLOBAL if all(s.kind == "decode" for s in steps) else MIXED
    return RepairPlan(lost, tuple(steps), basis_set, mode)


def attach_coefficients(layout: StripeLayout, plan: RepairPlan) -> RepairPlan:
    """Fill each step's coefficient vector so that coeffs @ rows(sources) = row(target)."""
    gf = field(layout.spec.w)
    gen = layout.generator_array
    cache: dict = {}
    steps = []
    for st in plan.steps:
        if st.coefficients is None:
            if st.kind == "decode" and len(st.sources) == layout.k:
                if st.sources not in cache:
                    cache[st.sources] = gf.inverse(gen[list(st.sources)])
                coeffs = gf.matmul(gen[st.target][None, :], cache[st.sources])[0]
            else:
                coeffs = gf.express(gen[list(st.sources)], gen[st.target])[0]
            st = replace(st, coefficients=tuple(int(c) for c in coeffs))
        steps.append(st)
    return replace(plan, steps=tuple(steps))


def plan_options(layout: StripeLayout, failed) -> tuple[RepairPlan | None, RepairPlan]:
    """(best local plan or None, global plan); raises Undecodable first."""
    lost = _indices(layout, failed)
    if not decodable(layout, lost):
        raise Undecodable("failure set {" + ", ".join(sorted(layout.label(i) for i in lost)) + "} is not decodable")
    return local_plan(layout, lost), global_plan(layout, lost)


def choose(local: RepairPlan | None, glob: RepairPlan) -> RepairPlan:
    if local is not None and local.cost <= glob.cost:
        return local
    return glob


def plan_multi(layout: StripeLayout, failed, coefficients: bool = True) -> RepairPlan:
    plan = choose(*plan_options(layout, failed))
    return attach_coefficients(layout, plan) if coefficients else plan


def plan_single(layout: StripeLayout, failed, coefficients: bool = True) -> RepairPlan:
    lost = _indices(layout, failed)
    if len(lost) != 1:
        raise ValueError("plan_single takes exactly one block")
    return plan_multi(layout, lost, coefficients)


def failure_sets(n: int, size: int):
    return itertools.combinations(range(n), size)
