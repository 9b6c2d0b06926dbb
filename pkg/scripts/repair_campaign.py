"""Single- and two-failure repair campaigns across all schemes, reported as total bytes read."""
import argparse

from cascade_ec.construct import LRC_SCHEMES, layout_for
from cascade_ec.presets import parse_presets
from cascade_ec.simstore import KIB, all_pair_patterns, pack_files, run_repair_campaign, single_patterns, \
    synthetic_workload


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="P1")
    ap.add_argument("--files", type=int, default=20)
    ap.add_argument("--block-kib", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pr = parse_presets(args.preset)[0]
    base = layout_for("azure", pr.k, pr.r, pr.p)
    store = pack_files(synthetic_workload(args.files, 5 * KIB, 256 * KIB, seed=args.seed), base,
                       args.block_kib * KIB, seed=args.seed)
    schemes = [s.value for s in LRC_SCHEMES]
    for title, patterns in (("single failures", single_patterns(base)), ("pairs", all_pair_patterns(base))):
        res = run_repair_campaign(store, patterns, schemes)
        print(f"{title} ({len(patterns)} patterns x {len(store.stripes)} stripes)")
        for name, acct in sorted(res.totals.items(), key=lambda kv: kv[1].bytes_read):
            print(f"  {name:<11} {acct.bytes_read / KIB:12.0f} KiB  {acct.blocks_accessed} block reads")


if __name__ == "__main__":
    run()
