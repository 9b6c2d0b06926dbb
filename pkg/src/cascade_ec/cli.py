"""Command-line front end.

Exit status: 0 on success, 2 for usage or configuration errors, 3 when a
failure set cannot be decoded.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from .codec import as_buffer, block_filename, encode, read_manifest, reconstruct, write_stripe, ErasedStripe
from .construct import LRC_SCHEMES, Scheme, layout_for
from .errors import Undecodable
from .gf import default_width
from .metrics import report
from .planner import plan_multi
from .presets import PRESETS, parse_presets
from .reliability import ReliabilityParams, mttdl, survival_profile
from . import simstore

EXIT_USAGE = 2
EXIT_UNDECODABLE = 3

METRIC_SECTIONS = [
    ("adrc", "ADRC"),
    ("arc1", "ARC1"),
    ("arc2", "ARC2"),
    ("local_portion", "Local repair portion (two failures)"),
    ("effective_local_portion", "Effective local repair portion (two failures)"),
]


class UsageError(Exception):
    pass


def _schemes(text: str) -> list[Scheme]:
    if text.strip().lower() == "all":
        return list(LRC_SCHEMES)
    try:
        return [Scheme.parse(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _presets(text: str):
    try:
        return parse_presets(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _grid_table(title: str, rows: dict, columns: list[str], fmt: str) -> str:
    width = max(12, max((len(r) for r in rows), default=0) + 2)
    out = [title, "".join(["scheme".ljust(width)] + [c.rjust(10) for c in columns])]
    for name, vals in rows.items():
        out.append("".join([name.ljust(width)] + [fmt.format(v).rjust(10) for v in vals]))
    return "\n".join(out)


def _emit_rows(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(records, indent=2) + "\n")
        return
    if not records:
        return
    w = csv.DictWriter(out, fieldnames=list(records[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(records)


def cmd_analyze(args, out) -> int:
    presets = _presets(args.presets)
    schemes = _schemes(args.schemes)
    records = []
    for sch in schemes:
        for pr in presets:
            rep = report(layout_for(sch, pr.k, pr.r, pr.p))
            rec = {"preset": pr.label}
            rec.update(rep.rounded(4 if args.format != "table" else 2))
            records.append(rec)
    if args.format != "table":
        _emit_rows(records, args.format, out)
        return 0
    cols = [p.label for p in presets]
    for key, title in METRIC_SECTIONS:
        rows = {}
        for rec in records:
            rows.setdefault(rec["scheme"], []).append(rec[key])
        out.write(_grid_table(title, rows, cols, "{:.2f}") + "\n\n")
    return 0


def _layout_from_args(args):
    if args.preset:
        pr = _presets(args.preset)[0]
        k, r, p = pr.k, pr.r, pr.p
    else:
        if None in (args.k, args.r, args.p):
            raise UsageError("give --preset or all of --k/--r/--p")
        k, r, p = args.k, args.r, args.p
    try:
        return layout_for(_schemes(args.scheme)[0], k, r, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_encode(args, out) -> int:
    layout = _layout_from_args(args)
    if args.dump_layout:
        out.write(layout.to_json(indent=2) + "\n")
        return 0
    if not args.inputs:
        raise UsageError("encode needs input files (or --dump-layout)")
    if args.out is None:
        raise UsageError("encode needs --out")
    stream = bytearray()
    sources = []
    for name in args.inputs:
        path = Path(name)
        if not path.is_file():
            raise UsageError(f"no such input file: {name}")
        data = path.read_bytes()
        sources.append({"name": path.name, "size": len(data), "offset": len(stream)})
        stream += data
    B = args.block_size
    per_stripe = layout.k * B
    n_stripes = max(1, -(-len(stream) // per_stripe))
    stream += bytes(n_stripes * per_stripe - len(stream))
    written = []
    for s in range(n_stripes):
        chunk = bytes(stream[s * per_stripe:(s + 1) * per_stripe])
        data = [as_buffer(chunk[i * B:(i + 1) * B], layout.spec.w) for i in range(layout.k)]
        stripe = encode(layout, data)
        sid = f"{args.stripe_prefix}{s:04d}"
        path = write_stripe(stripe, args.out, sid, {"inputs": sources, "stripe_index": s})
        written.append(str(path))
    out.write(json.dumps({"stripes": written}) + "\n")
    return 0


def cmd_repair(args, out) -> int:
    status = 0
    reports = []
    for mpath in args.manifests:
        mpath = Path(mpath)
        if not mpath.is_file():
            raise UsageError(f"no such manifest: {mpath}")
        try:
            manifest, layout = read_manifest(mpath)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad manifest {mpath}: {exc}") from exc
        base = mpath.parent
        sid = manifest["stripe_id"]
        avail, missing = {}, []
        for entry in manifest["blocks"]:
            f = base / entry["file"]
            if f.is_file():
                avail[entry["index"]] = as_buffer(f.read_bytes(), layout.spec.w)
            else:
                missing.append(entry["index"])
        if not missing:
            reports.append({"stripe": sid, "repaired": []})
            continue
        try:
            plan = plan_multi(layout, missing)
        except Undecodable as exc:
            sys.stderr.write(f"{sid}: {exc}\n")
            status = EXIT_UNDECODABLE
            continue
        if args.explain:
            out.write(json.dumps({"stripe": sid, "plan": plan.to_dict(layout)}, indent=2) + "\n")
        es = ErasedStripe(layout, avail)
        rebuilt = reconstruct(es, plan)
        done = []
        for idx in sorted(rebuilt):
            entry = manifest["blocks"][idx]
            raw = rebuilt[idx].astype(rebuilt[idx].dtype.newbyteorder("<"), copy=False).tobytes()
            if hashlib.sha256(raw).hexdigest() != entry["sha256"]:
                sys.stderr.write(f"{sid}: checksum mismatch rebuilding {entry['label']}\n")
                return 1
            (base / block_filename(sid, entry["label"])).write_bytes(raw)
            done.append(entry["label"])
        reports.append({"stripe": sid, "repaired": done, "blocks_read": plan.cost, "mode": plan.mode})
    if not args.explain:
        out.write(json.dumps(reports) + "\n")
    return status


def _reliability_params(args) -> ReliabilityParams:
    if not args.config:
        return ReliabilityParams()
    try:
        return ReliabilityParams.load(args.config)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad reliability config: {exc}") from exc


def cmd_mttdl(args, out) -> int:
    params = _reliability_params(args)
    records = []
    for sch in _schemes(args.schemes):
        for pr in _presets(args.presets):
            layout = layout_for(sch, pr.k, pr.r, pr.p)
            rec = {"scheme": sch.value, "preset": pr.label}
            if args.profile_only:
                prof = survival_profile(layout, params.exhaustive_limit, params.samples, params.seed)
                rec["p_fail"] = [round(x, 6) for x in prof]
            else:
                res = mttdl(layout, params)
                rec.update({"mttdl_years": res.years, "loss_model": res.loss_model,
                            "p_fail": list(res.p_fail), "mu_per_year": list(res.mu)})
            records.append(rec)
    if args.format == "json":
        out.write(json.dumps(records, indent=2) + "\n")
    elif args.format == "csv":
        flat = [{k: (";".join(f"{x:.6g}" for x in v) if isinstance(v, list) else v) for k, v in r.items()}
                for r in records]
        _emit_rows(flat, "csv", out)
    else:
        for r in records:
            head = f"{r['scheme']:<12}{r['preset']:<4}"
            pf = " ".join(f"{x:.4g}" for x in r["p_fail"])
            if "mttdl_years" in r:
                out.write(f"{head} MTTDL {r['mttdl_years']:.3e} years  p_f [{pf}]\n")
            else:
                out.write(f"{head} p_f [{pf}]\n")
    return 0


def _load_json(path, what: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad {what} file {path}: {exc}") from exc


def _workload(spec, seed: int) -> list:
    if isinstance(spec, list):
        spec = {"files": spec}
    if "files" in spec:
        return [(str(f["id"]), int(f["size"])) for f in spec["files"]]
    if "synthetic" in spec:
        syn = dict(spec["synthetic"])
        syn.setdefault("seed", seed)
        return simstore.synthetic_workload(**syn)
    raise UsageError("workload needs 'files' or 'synthetic'")


def _patterns(spec, layout, seed: int) -> list:
    if isinstance(spec, list):
        spec = {"patterns": spec}
    if "patterns" in spec:
        return [tuple(p) for p in spec["patterns"]]
    if spec.get("single"):
        return simstore.single_patterns(layout)
    if spec.get("all_pairs"):
        return simstore.all_pair_patterns(layout)
    if "random" in spec:
        rnd = dict(spec["random"])
        rnd.setdefault("seed", seed)
        return simstore.random_patterns(layout, **rnd)
    raise UsageError("pattern spec needs 'patterns', 'single', 'all_pairs' or 'random'")


def cmd_simulate(args, out) -> int:
    pr = _presets(args.preset)[0]
    schemes = _schemes(args.schemes)
    files = _workload(_load_json(args.workload, "workload"), args.seed)
    base = layout_for(schemes[0], pr.k, pr.r, pr.p)
    patterns = _patterns(_load_json(args.patterns, "pattern"), base, args.seed)
    if not files:
        result = simstore.CampaignResult([], {})
    else:
        try:
            store = simstore.pack_files(files, base, args.block_size, seed=args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        result = simstore.run_repair_campaign(store, patterns, schemes)
    if args.format == "json":
        out.write(json.dumps([r.__dict__ for r in result.rows], indent=2) + "\n")
    else:
        out.write(result.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cascade-ec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version="cascade-ec 0.1.0")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="repair-cost metrics per scheme and preset")
    a.add_argument("--presets", "--params", default="all")
    a.add_argument("--schemes", "--scheme", default="all")
    a.add_argument("--format", choices=["table", "csv", "json"], default="table")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("encode", help="encode files into stripe block files")
    e.add_argument("inputs", nargs="*")
    e.add_argument("--scheme", default="cp-azure")
    e.add_argument("--preset")
    e.add_argument("--k", type=int)
    e.add_argument("--r", type=int)
    e.add_argument("--p", type=int)
    e.add_argument("--block-size", type=int, default=4096)
    e.add_argument("--out")
    e.add_argument("--stripe-prefix", default="s")
    e.add_argument("--dump-layout", action="store_true", help="print the layout JSON and exit")
    e.set_defaults(func=cmd_encode)

    r = sub.add_parser("repair", help="rebuild missing block files of encoded stripes")
    r.add_argument("manifests", nargs="+")
    r.add_argument("--explain", action="store_true", help="print the repair plan as JSON")
    r.set_defaults(func=cmd_repair)

    m = sub.add_parser("mttdl", help="mean time to data loss")
    m.add_argument("--presets", "--params", default="P1")
    m.add_argument("--schemes", "--scheme", default="all")
    m.add_argument("--config")
    m.add_argument("--profile-only", action="store_true", help="print p_f without solving the chain")
    m.add_argument("--format", choices=["table", "csv", "json"], default="table")
    m.set_defaults(func=cmd_mttdl)

    s = sub.add_parser("simulate", help="repair campaign over a packed workload")
    s.add_argument("--workload", required=True)
    s.add_argument("--patterns", required=True)
    s.add_argument("--schemes", "--scheme", default="all")
    s.add_argument("--preset", "--presets", default="P1")
    s.add_argument("--block-size", type=int, default=64 * 1024)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        default_width()
    except ValueError as exc:
        sys.stderr.write(f"cascade-ec: {exc}\n")
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"cascade-ec: {exc}\n")
        return EXIT_USAGE
    except Undecodable as exc:
        sys.stderr.write(f"cascade-ec: {exc}\n")
        return EXIT_UNDECODABLE


if __name__ == "__main__":
    sys.exit(main())
