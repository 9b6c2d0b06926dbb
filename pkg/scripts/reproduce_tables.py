"""Print the ADRC / ARC1 / ARC2 / portion grids for every scheme and preset."""
import argparse
import time

from cascade_ec.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--format", choices=["table", "csv", "json"], default="table")
    args = ap.parse_args()
    t = time.perf_counter()
    main(["analyze", "--presets", "all", "--schemes", "all", "--format", args.format])
    print(f"# computed in {time.perf_counter() - t:.2f} s")


if __name__ == "__main__":
    run()
