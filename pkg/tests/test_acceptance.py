"""Acceptance checks. Each criterion prints one PASS/FAIL line (plus the
offending cells when it fails) and asserts.

Run directly with ``python tests/test_acceptance.py`` for the summary alone.
"""
import itertools
import os
import random
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from published_values import (ADRC, ARC1, ARC2, ARC2_SUMMARY, EFFECTIVE_PORTION, LOCAL_PORTION, PRESET_ORDER,
                              SCHEME_ORDER)

from cascade_ec.codec import encode, reconstruct
from cascade_ec.coeffs import cauchy_array, combination_coefficients, default_points, identity_residuals
from cascade_ec.construct import CodeSpec, build_layout, layout_for
from cascade_ec.gf import field
from cascade_ec.metrics import adrc, arc1, pair_summary
from cascade_ec.planner import decodable, plan_multi
from cascade_ec.presets import PRESETS
from cascade_ec.reliability import ReliabilityParams, mttdl
from cascade_ec.simstore import MIB, degraded_read, pack_files, synthetic_workload

CP = ["cp-azure", "cp-uniform"]


def fresh_layouts():
    """Uncached layouts so timings include construction."""
    return {(s, p): build_layout(CodeSpec(s, PRESETS[p].k, PRESETS[p].r, PRESETS[p].p))
            for s in SCHEME_ORDER for p in PRESET_ORDER}


def grid_check(values, published, tol, alternates=None):
    bad = []
    for (s, p), v in values.items():
        want = [published[s][p]]
        if alternates and alternates.get(s, {}).get(p, want[0]) != want[0]:
            want.append(alternates[s][p])
        if not any(abs(v - w) <= tol + 1e-9 for w in want):
            bad.append(f"{s} {p}: got {v:.4f}, published {' or '.join(f'{w:.2f}' for w in want)}")
    return bad


def crit_adrc():
    t = time.perf_counter()
    lays = fresh_layouts()
    vals = {key: float(adrc(lay)) for key, lay in lays.items()}
    secs = time.perf_counter() - t
    bad = grid_check(vals, ADRC, 0.01)
    if secs >= 1:
        bad.append(f"runtime {secs:.2f} s >= 1 s")
    return f"ADRC grid within 0.01 ({48 - len(bad)}/48 cells ok, {secs:.2f} s)", bad


def crit_arc1():
    t = time.perf_counter()
    lays = fresh_layouts()
    vals = {key: float(arc1(lay)) for key, lay in lays.items()}
    secs = time.perf_counter() - t
    bad = grid_check(vals, ARC1, 0.01)
    if secs >= 1:
        bad.append(f"runtime {secs:.2f} s >= 1 s")
    return f"ARC1 grid within 0.01 ({48 - len(bad)}/48 cells ok, {secs:.2f} s)", bad


_PAIR_RESULTS = {}


def pair_grid():
    if not _PAIR_RESULTS:
        t = time.perf_counter()
        lays = fresh_layouts()
        _PAIR_RESULTS["summaries"] = {key: pair_summary(lay) for key, lay in lays.items()}
        _PAIR_RESULTS["secs"] = time.perf_counter() - t
    return _PAIR_RESULTS["summaries"], _PAIR_RESULTS["secs"]


def crit_arc2():
    summ, secs = pair_grid()
    vals = {key: float(s.arc2) for key, s in summ.items()}
    bad = grid_check(vals, ARC2, 0.05, alternates=ARC2_SUMMARY)
    if secs >= 5:
        bad.append(f"runtime {secs:.2f} s >= 5 s")
    return f"ARC2 grid within 0.05, CP cells against either published figure ({48 - len(bad)}/48 ok, {secs:.2f} s)", bad


def crit_portions():
    summ, secs = pair_grid()
    loc = {key: float(s.local_portion) for key, s in summ.items()}
    eff = {key: float(s.effective_portion) for key, s in summ.items()}
    bad = ["local " + b for b in grid_check(loc, LOCAL_PORTION, 0.01)]
    bad += ["effective " + b for b in grid_check(eff, EFFECTIVE_PORTION, 0.01)]
    if secs >= 5:
        bad.append(f"runtime {secs:.2f} s >= 5 s")
    return f"local and effective portions within 0.01 ({96 - len(bad)}/96 cells ok, {secs:.2f} s)", bad


def crit_cascade():
    rng = np.random.default_rng(5)
    stripes, size = 1000, 1024
    bad = []
    for s in CP:
        for p in PRESET_ORDER:
            lay = layout_for(s, PRESETS[p].k, PRESETS[p].r, PRESETS[p].p)
            # 1000 stripes side by side: encoding acts column by column
            data = [rng.integers(0, 256, stripes * size, dtype=np.uint8) for _ in range(lay.k)]
            blocks = encode(lay, data).blocks
            acc = np.zeros_like(blocks[0])
            for i in lay.local_indices:
                acc ^= blocks[i]
            diff = (acc != blocks[lay.global_indices[-1]]).reshape(stripes, size)
            if diff.any():
                bad.append(f"{s} {p}: {int(diff.sum())} mismatched bytes in {int(diff.any(1).sum())} stripes")
    return f"local parities sum to the last global parity ({stripes} stripes x 16 layouts)", bad


def crit_coefficient_identity():
    gf = field(8)
    rng = np.random.default_rng(6)
    bad = []
    for p in PRESET_ORDER:
        k, r = PRESETS[p].k, PRESETS[p].r
        a, b = default_points(k, r)
        res = identity_residuals(a, b)
        if any(res):
            bad.append(f"{p}: {sum(1 for x in res if x)} nonzero residuals")
        cc = combination_coefficients(a, b)
        alpha = cauchy_array(a, b)
        weights = list(cc.bar_gamma) + list(cc.bar_eta)
        for _ in range(100):
            data = list(rng.integers(0, 256, (k, 256), dtype=np.uint8))
            parity = [gf.combine(alpha[:, j], data) for j in range(r)]
            if gf.combine(weights, data + parity).any():
                bad.append(f"{p}: weighted zero-sum fails")
                break
    return "coefficient identity and zero-sum over 100 random stripes per preset", bad


def _distinct_group_sets(lay, i):
    """Sets of r+i failures: i in i distinct local groups, r elsewhere."""
    r = lay.spec.r
    groups = [g for gi, g in enumerate(lay.groups) if gi != lay.cascade_group]
    for chosen in itertools.combinations(groups, i):
        covered = set().union(*chosen)
        rest = [x for x in range(lay.n) if x not in covered]
        for picks in itertools.product(*[sorted(g) for g in chosen]):
            for others in itertools.combinations(rest, r):
                yield set(picks) | set(others)


def crit_fault_tolerance():
    bad = []
    for p in ("P1", "P2", "P3"):
        k, r, pp = PRESETS[p].k, PRESETS[p].r, PRESETS[p].p
        for s in SCHEME_ORDER:
            lay = layout_for(s, k, r, pp)
            for f in range(1, r + 1):
                if not all(decodable(lay, c) for c in itertools.combinations(range(lay.n), f)):
                    bad.append(f"{s} {p}: some {f}-failure pattern undecodable")
            undec = sum(1 for c in itertools.combinations(range(lay.n), r + 1) if not decodable(lay, c))
            if s in ("azure", "azure+1", "optimal") and undec:
                bad.append(f"{s} {p}: {undec} undecodable r+1 patterns")
            if s in CP:
                if undec == 0:
                    bad.append(f"{s} {p}: no undecodable r+1 pattern")
                for i in range(1, pp + 1):
                    fails = sum(1 for c in _distinct_group_sets(lay, i) if not decodable(lay, c))
                    if fails:
                        bad.append(f"{s} {p}: {fails} undecodable r+{i} patterns spread over {i} groups")
    return "fault tolerance at P1-P3 (any r, baselines r+1, CP distance r+1 and spread r+i)", bad


def crit_anchors():
    checks = [
        ("cp-azure", (24, 2, 2), ["G2"], 2),
        ("cp-azure", (24, 2, 2), ["D1", "L1"], 13),
        ("azure", (24, 2, 2), ["D1", "L1"], 24),
        ("cp-azure", (6, 2, 2), ["D1", "G2"], 4),
        ("cp-azure", (6, 2, 2), ["D1", "D2", "L2"], 6),
    ]
    bad = []
    for s, kpr, failed, want in checks:
        got = plan_multi(layout_for(s, *kpr), failed).cost
        if got != want:
            bad.append(f"{s} {kpr} {failed}: cost {got}, expected {want}")
    return "repair-plan anchor costs (2, 13 vs 24, 4, 6)", bad


def crit_mttdl():
    bad = []
    for p in ("P1", "P5"):
        k, r, pp = PRESETS[p].k, PRESETS[p].r, PRESETS[p].p
        years = {s: mttdl(layout_for(s, k, r, pp)).years for s in SCHEME_ORDER}
        top = sorted(years, key=years.get, reverse=True)[:2]
        if set(top) != set(CP):
            bad.append(f"{p}: top two are {top} ({', '.join(f'{s}={v:.3g}' for s, v in years.items())})")
    for p in PRESET_ORDER:
        k, r, pp = PRESETS[p].k, PRESETS[p].r, PRESETS[p].p
        for s in SCHEME_ORDER:
            lay = layout_for(s, k, r, pp)
            base = mttdl(lay)
            worse = mttdl(lay, ReliabilityParams(lambda_per_node=0.5, mu=base.mu)).years
            better = mttdl(lay, ReliabilityParams(mu=tuple(2 * m for m in base.mu))).years
            if not worse < base.years < better:
                bad.append(f"{s} {p}: perturbation order broken ({worse:.3g}, {base.years:.3g}, {better:.3g})")
    return "MTTDL: CP schemes top two at P1 and P5; lambda/mu perturbations monotone at every preset", bad


def crit_degraded_read():
    lay = layout_for("azure", 24, 2, 2)
    block = 16 * MIB
    files = synthetic_workload(100, seed=7)
    store = pack_files(files, lay, block, seed=7)
    bad = []
    small_cuts = []
    avoided = 0
    for fid, size in files:
        first = store.objects[fid][0]
        down = [store.node_of(first.stripe, first.block)]
        data, acct = degraded_read(store, fid, down)
        if data != store.original_file(fid):
            bad.append(f"{fid}: wrong bytes")
        _, base = degraded_read(store, fid, down, mode="block")
        if size < block and not acct.bytes_read < base.bytes_read:
            bad.append(f"{fid} ({size} B): {acct.bytes_read} B not below baseline {base.bytes_read} B")
        if size < 1_000_000:
            small_cuts.append(1 - acct.bytes_read / base.bytes_read)
        if len({(e.stripe, e.block) for e in store.objects[fid]}) > 1:
            avoided += acct.repeated_bytes_avoided > 0
    mean_cut = sum(small_cuts) / len(small_cuts) if small_cuts else 0.0
    if not small_cuts or mean_cut < 0.40:
        bad.append(f"mean reduction for files < 1 MB is {mean_cut:.1%}")
    if avoided == 0:
        bad.append("no spanning file avoided a repeated read")
    return (f"degraded reads: {len(small_cuts)} files < 1 MB cut bytes by {mean_cut:.1%}, "
            f"{avoided} spanning files skipped repeated reads"), bad


def crit_codec():
    bad = []
    for s in SCHEME_ORDER:
        for p in ("P1", "P5"):
            k, r, pp = PRESETS[p].k, PRESETS[p].r, PRESETS[p].p
            lay = layout_for(s, k, r, pp)
            rng = random.Random(f"{s}-{p}")
            done = 0
            while done < 1000:
                lost = rng.sample(range(lay.n), rng.randint(1, r + 1))
                if not decodable(lay, lost):
                    continue
                done += 1
                data = [np.frombuffer(rng.randbytes(64), dtype=np.uint8) for _ in range(k)]
                stripe = encode(lay, data)
                plan = plan_multi(lay, lost)
                erased = stripe.erase(lost)
                out = reconstruct(erased, plan)
                if not erased.blocks_read <= set(plan.accessed):
                    bad.append(f"{s} {p} {sorted(lost)}: read outside plan")
                elif any(not np.array_equal(out[i], stripe.blocks[i]) for i in lost):
                    bad.append(f"{s} {p} {sorted(lost)}: wrong bytes")
                if len(bad) > 10:
                    return "codec roundtrips", bad
    return "codec: 1000 random erase/reconstruct roundtrips per scheme at P1 and P5", bad


CRITERIA = [
    (1, crit_adrc), (2, crit_arc1), (3, crit_arc2), (4, crit_portions), (5, crit_cascade),
    (6, crit_coefficient_identity), (7, crit_fault_tolerance), (8, crit_anchors), (9, crit_mttdl),
    (10, crit_degraded_read), (11, crit_codec),
]


def format_result(num, title, bad):
    lines = [f"[{'PASS' if not bad else 'FAIL'}] criterion {num}: {title}"]
    lines += [f"         {b}" for b in bad]
    return "\n".join(lines)


@pytest.mark.acceptance
@pytest.mark.parametrize("num,check", CRITERIA, ids=[f"criterion_{n}" for n, _ in CRITERIA])
def test_criterion(num, check, capsys):
    title, bad = check()
    with capsys.disabled():
        print("\n" + format_result(num, title, bad))
    assert not bad, f"criterion {num}: {len(bad)} problem(s)"


if __name__ == "__main__":
    failed = 0
    for num, check in CRITERIA:
        title, bad = check()
        failed += bool(bad)
        print(format_result(num, title, bad), flush=True)
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria pass")
    sys.exit(1 if failed else 0)
