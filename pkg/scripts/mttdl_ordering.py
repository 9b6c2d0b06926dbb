"""Rank the schemes by MTTDL at each preset under the default reliability settings."""
import argparse

from cascade_ec.construct import LRC_SCHEMES, layout_for
from cascade_ec.presets import parse_presets
from cascade_ec.reliability import ReliabilityParams, mttdl


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--presets", default="P1,P5")
    ap.add_argument("--config", help="reliability settings JSON")
    args = ap.parse_args()
    params = ReliabilityParams.load(args.config) if args.config else ReliabilityParams()
    for pr in parse_presets(args.presets):
        years = {s.value: mttdl(layout_for(s, pr.k, pr.r, pr.p), params).years for s in LRC_SCHEMES}
        print(f"{pr.label} (k={pr.k}, r={pr.r}, p={pr.p})")
        for rank, (name, y) in enumerate(sorted(years.items(), key=lambda kv: -kv[1]), start=1):
            print(f"  {rank}. {name:<11} {y:.3e} years")


if __name__ == "__main__":
    run()
