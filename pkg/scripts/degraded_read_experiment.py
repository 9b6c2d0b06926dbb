"""File-level versus whole-block degraded reads over a synthetic small-file workload."""
import argparse
import statistics

from cascade_ec.construct import layout_for
from cascade_ec.simstore import MIB, degraded_read, pack_files, synthetic_workload


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scheme", default="azure")
    ap.add_argument("--files", type=int, default=100)
    ap.add_argument("--block-mib", type=int, default=16)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    lay = layout_for(args.scheme, 24, 2, 2)
    block = args.block_mib * MIB
    files = synthetic_workload(args.files, seed=args.seed)
    store = pack_files(files, lay, block, seed=args.seed)
    buckets = {"< 1 MB": [], "1 MB .. block": [], ">= block": []}
    avoided = 0
    for fid, size in files:
        first = store.objects[fid][0]
        down = [store.node_of(first.stripe, first.block)]
        _, acct = degraded_read(store, fid, down)
        _, base = degraded_read(store, fid, down, mode="block")
        key = "< 1 MB" if size < 1_000_000 else ("1 MB .. block" if size < block else ">= block")
        buckets[key].append(1 - acct.bytes_read / base.bytes_read)
        avoided += acct.repeated_bytes_avoided
    print(f"{len(files)} files, {sum(s for _, s in files) / MIB:.1f} MiB, {len(store.stripes)} stripes")
    for key, cuts in buckets.items():
        if cuts:
            print(f"  {key:<14} {len(cuts):3d} files  mean byte reduction {statistics.mean(cuts):6.1%}")
    print(f"  repeated bytes avoided: {avoided}")


if __name__ == "__main__":
    run()
