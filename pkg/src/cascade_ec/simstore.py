"""In-process object store: small files packed into stripes, failure
injection, plan-driven repair with byte accounting, and file-level degraded
reads that fetch only the byte ranges a lost file actually needs."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .codec import ErasedStripe, encode, reconstruct
from .construct import StripeLayout, layout_for
from .errors import NotFound, Undecodable
from .gf import field
from .planner import attach_coefficients, plan_multi

KIB = 1024
MIB = 1024 * 1024

# Per-entry metadata footprint used by the index-size estimate.
STRIPE_ENTRY_BYTES = 128
BLOCK_ENTRY_BYTES = 64
OBJECT_ENTRY_BYTES = 32


@dataclass(frozen=True)
class Extent:
    stripe: int
    block: int
    offset: int
    length: int


@dataclass(frozen=True)
class StripeRecord:
    stripe_id: int
    layout: StripeLayout
    nodes: tuple  # node id per block index


@dataclass
class IoAccounting:
    bytes_read: int = 0             # read from storage nodes
    bytes_transferred: int = 0      # shipped from storage nodes to the reader
    blocks_accessed: int = 0
    repeated_bytes_avoided: int = 0

    def add(self, other: "IoAccounting") -> None:
        self.bytes_read += other.bytes_read
        self.bytes_transferred += other.bytes_transferred
        self.blocks_accessed += other.blocks_accessed
        self.repeated_bytes_avoided += other.repeated_bytes_avoided


@dataclass
class StripeStoreMap:
    layout: StripeLayout
    block_size: int
    stripes: list = dc_field(default_factory=list)
    objects: dict = dc_field(default_factory=dict)   # file id -> [Extent]
    sizes: dict = dc_field(default_factory=dict)     # file id -> bytes
    nodes: dict = dc_field(default_factory=dict)     # node id -> "alive" | "failed"
    blocks: dict = dc_field(default_factory=dict)    # (stripe, block) -> uint8 array
    files: list = dc_field(default_factory=list)     # packing order, (id, size)

    def fail(self, node_ids) -> None:
        for nid in node_ids:
            if nid not in self.nodes:
                raise NotFound(f"unknown node {nid}")
            self.nodes[nid] = "failed"

    def heal_all(self) -> None:
        for nid in self.nodes:
            self.nodes[nid] = "alive"

    def node_of(self, stripe: int, block: int):
        return self.stripes[stripe].nodes[block]

    def failed_blocks(self, stripe: int, extra_failed=()) -> frozenset:
        down = {n for n, st in self.nodes.items() if st == "failed"} | set(extra_failed)
        return frozenset(i for i, nid in enumerate(self.stripes[stripe].nodes) if nid in down)

    def original_file(self, file_id) -> bytes:
        """Direct read of the stored bytes, ignoring failures."""
        if file_id not in self.objects:
            raise NotFound(f"unknown file {file_id!r}")
        parts = [self.blocks[(e.stripe, e.block)][e.offset:e.offset + e.length] for e in self.objects[file_id]]
        return b"".join(p.tobytes() for p in parts)

    def index_size_estimate(self) -> dict:
        """Metadata bytes for the stripe, block and object indexes."""
        n_stripes = len(self.stripes)
        out = {
            "stripe_index": n_stripes * STRIPE_ENTRY_BYTES,
            "block_index": n_stripes * self.layout.n * BLOCK_ENTRY_BYTES,
            "object_index": len(self.objects) * OBJECT_ENTRY_BYTES,
            "nodes": len(self.nodes),
        }
        out["total"] = out["stripe_index"] + out["block_index"] + out["object_index"]
        return out


def synthetic_workload(count: int, min_size: int = 5 * KIB, max_size: int = 30 * MIB,
                       seed: int = 0) -> list[tuple[str, int]]:
    """File sizes drawn log-uniformly from [min_size, max_size]."""
    if count < 0 or min_size <= 0 or max_size < min_size:
        raise ValueError("bad workload bounds")
    rng = np.random.default_rng(seed)
    logs = rng.uniform(math.log(min_size), math.log(max_size), size=count)
    sizes = np.clip(np.rint(np.exp(logs)).astype(np.int64), min_size, max_size)
    return [(f"f{i:05d}", int(s)) for i, s in enumerate(sizes)]


def pack_files(files, layout: StripeLayout, block_size: int, payload: dict | None = None,
               seed: int = 0, num_nodes: int | None = None) -> StripeStoreMap:
    """Append files back to back across data blocks and encode every stripe.

    Files may cross block and stripe boundaries; the tail of the last stripe
    is zero padded. Contents come from ``payload`` or a seeded generator.
    """
    if block_size <= 0:
        raise ValueError("block size must be positive")
    sym = 2 if field(layout.spec.w).dtype == np.uint16 else 1
    if block_size % sym:
        raise ValueError("block size must be a whole number of field symbols")
    files = [(fid, int(size)) for fid, size in files]
    n_nodes = layout.n if num_nodes is None else num_nodes
    if n_nodes < layout.n:
        raise ValueError("need at least n nodes to place a stripe")
    store = StripeStoreMap(layout, block_size, nodes={i: "alive" for i in range(n_nodes)}, files=files)
    total = sum(size for _, size in files)
    if not files:
        return store
    stripe_bytes = layout.k * block_size
    n_stripes = max(1, -(-total // stripe_bytes))
    area = np.zeros(n_stripes * stripe_bytes, dtype=np.uint8)
    rng = np.random.default_rng(seed)
    pos = 0
    for fid, size in files:
        if fid in store.objects:
            raise ValueError(f"duplicate file id {fid!r}")
        if payload is not None and fid in payload:
            content = np.frombuffer(bytes(payload[fid]), dtype=np.uint8)
            if len(content) != size:
                raise ValueError(f"payload for {fid!r} has {len(content)} bytes, expected {size}")
        else:
            content = np.frombuffer(rng.bytes(size), dtype=np.uint8)
        area[pos:pos + size] = content
        extents = []
        left, cur = size, pos
        while left > 0:
            stripe, rest = divmod(cur, stripe_bytes)
            block, off = divmod(rest, block_size)
            take = min(left, block_size - off)
            extents.append(Extent(stripe, block, off, take))
            cur += take
            left -= take
        store.objects[fid] = extents
        store.sizes[fid] = size
        pos += size
    for s in range(n_stripes):
        chunk = area[s * stripe_bytes:(s + 1) * stripe_bytes]
        data = [chunk[i * block_size:(i + 1) * block_size] for i in range(layout.k)]
        stripe = encode(layout, [d.view(field(layout.spec.w).dtype) for d in data])
        for i, buf in enumerate(stripe.blocks):
            store.blocks[(s, i)] = buf.view(np.uint8)
        nodes = tuple((i + s) % n_nodes for i in range(layout.n))
        store.stripes.append(StripeRecord(s, layout, nodes))
    return store


# byte-range helpers; ranges are sorted, disjoint half-open (start, end) pairs

def _merge(ranges) -> list:
    out: list = []
    for a, b in sorted(ranges):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _size(ranges) -> int:
    return sum(b - a for a, b in ranges)


def _intersect(x, y) -> list:
    out, i, j = [], 0, 0
    while i < len(x) and j < len(y):
        a, b = max(x[i][0], y[j][0]), min(x[i][1], y[j][1])
        if a < b:
            out.append((a, b))
        if x[i][1] < y[j][1]:
            i += 1
        else:
            j += 1
    return out


def _align(ranges, sym: int) -> list:
    if sym == 1:
        return ranges
    return _merge((a - a % sym, b + (-b) % sym) for a, b in ranges)


def degraded_read(store: StripeStoreMap, file_id, failed_nodes=(), mode: str = "file",
                  skip_repeated: bool = True) -> tuple[bytes, IoAccounting]:
    """Read a file while some nodes are down.

    ``mode="file"`` fetches, from each repair source, only the byte ranges
    aligned with the file's lost extents; ranges already read as part of the
    file itself are not fetched twice when ``skip_repeated`` is set.
    ``mode="block"`` is the whole-block baseline.
    """
    if file_id not in store.objects:
        raise NotFound(f"unknown file {file_id!r}")
    if mode not in ("file", "block"):
        raise ValueError(f"unknown read mode {mode!r}")
    layout = store.layout
    gf = field(layout.spec.w)
    sym = 2 if gf.dtype == np.uint16 else 1
    B = store.block_size
    extents = store.objects[file_id]
    acct = IoAccounting()
    pieces: list = []

    by_stripe: dict = {}
    for e in extents:
        by_stripe.setdefault(e.stripe, []).append(e)

    for s, exts in by_stripe.items():
        lost = store.failed_blocks(s, failed_nodes)
        own: dict = {}       # surviving block -> ranges read as file data
        missing: dict = {}   # lost block -> ranges needed
        for e in exts:
            rng_ = (e.offset, e.offset + e.length)
            (missing if e.block in lost else own).setdefault(e.block, []).append(rng_)
        own = {b: _merge(r) for b, r in own.items()}
        rebuilt: dict = {}
        source_ranges: dict = {}
        if missing:
            plan = plan_multi(layout, lost, coefficients=False)  # raises Undecodable
            plan = attach_coefficients(layout, plan.restrict(missing))
            need = {b: _align(_merge(r), sym) for b, r in missing.items()}
            for st in reversed(plan.steps):
                for src in st.sources:
                    if src in lost:
                        need[src] = _merge(need.get(src, []) + need.get(st.target, []))
            for st in plan.steps:
                for src in st.sources:
                    if src not in lost:
                        source_ranges[src] = _merge(source_ranges.get(src, []) + need[st.target])
            for st in plan.steps:
                out = np.zeros(B, dtype=np.uint8)
                for a, b in need[st.target]:
                    segs = []
                    for src in st.sources:
                        buf = rebuilt[src] if src in rebuilt else store.blocks[(s, src)]
                        segs.append(buf[a:b].view(gf.dtype))
                    out[a:b] = gf.combine(st.coefficients, segs).view(np.uint8)
                rebuilt[st.target] = out
        touched = set(own) | set(source_ranges)
        acct.blocks_accessed += len(touched)
        if mode == "block":
            acct.bytes_read += len(touched) * B
        else:
            acct.bytes_read += sum(_size(r) for r in own.values())
            for src, r in source_ranges.items():
                overlap = _size(_intersect(r, own.get(src, [])))
                if skip_repeated:
                    acct.bytes_read += _size(r) - overlap
                    acct.repeated_bytes_avoided += overlap
                else:
                    acct.bytes_read += _size(r)
        for e in exts:
            buf = rebuilt[e.block] if e.block in lost else store.blocks[(s, e.block)]
            pieces.append((e, buf[e.offset:e.offset + e.length].tobytes()))
    acct.bytes_transferred = acct.bytes_read
    order = {e: i for i, e in enumerate(extents)}
    pieces.sort(key=lambda t: order[t[0]])
    return b"".join(p for _, p in pieces), acct


# repair campaigns

def single_patterns(layout: StripeLayout) -> list[tuple]:
    return [(b.label,) for b in layout.blocks]


def all_pair_patterns(layout: StripeLayout) -> list[tuple]:
    return [(a.label, b.label) for a, b in itertools.combinations(layout.blocks, 2)]


def random_patterns(layout: StripeLayout, count: int, size: int = 2, seed: int = 0) -> list[tuple]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        pick = sorted(rng.choice(layout.n, size=size, replace=False))
        out.append(tuple(layout.label(int(i)) for i in pick))
    return out


@dataclass
class CampaignRow:
    scheme: str
    pattern: str
    bytes_read: int
    blocks_accessed: int
    status: str = "ok"


@dataclass
class CampaignResult:
    rows: list
    totals: dict  # scheme -> IoAccounting

    CSV_HEADER = ("scheme", "pattern", "bytesRead", "blocksAccessed", "status")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for r in self.rows:
            w.writerow((r.scheme, r.pattern, r.bytes_read, r.blocks_accessed, r.status))
        return buf.getvalue()


def repack(store: StripeStoreMap, scheme) -> StripeStoreMap:
    """Same files and bytes laid out under another scheme with the same (k, r, p)."""
    s = store.layout.spec
    lay = layout_for(scheme, s.k, s.r, s.p, s.w)
    if lay is store.layout:
        return store
    payload = {fid: store.original_file(fid) for fid, _ in store.files}
    return pack_files(store.files, lay, store.block_size, payload=payload, num_nodes=len(store.nodes))


def run_repair_campaign(store: StripeStoreMap, patterns, schemes) -> CampaignResult:
    """Apply each failure pattern (block labels) to every stripe under every scheme.

    Every plan is executed through the codec; the reads it performs are
    tracked and checked against the plan, and the rebuilt blocks against the
    stored originals.
    """
    rows, totals = [], {}
    for scheme in schemes:
        sub = repack(store, scheme)
        lay = sub.layout
        name = lay.spec.scheme.value
        tot = IoAccounting()
        for pat in patterns:
            label = "+".join(pat)
            try:
                lost = frozenset(lay.index(x) for x in pat)
                plan = plan_multi(lay, lost) if lost else None
            except Undecodable:
                rows.append(CampaignRow(name, label, 0, 0, "undecodable"))
                continue
            acct = IoAccounting()
            for rec in sub.stripes:
                if plan is None:
                    continue
                avail = {i: sub.blocks[(rec.stripe_id, i)].view(field(lay.spec.w).dtype)
                         for i in range(lay.n) if i not in lost}
                es = ErasedStripe(lay, avail)
                out = reconstruct(es, plan)
                if not es.blocks_read <= set(plan.accessed):
                    raise AssertionError("reconstruct read a block outside the plan")
                for i in lost:
                    if not np.array_equal(out[i].view(np.uint8), sub.blocks[(rec.stripe_id, i)]):
                        raise AssertionError(f"block {lay.label(i)} rebuilt incorrectly")
                acct.blocks_accessed += plan.cost
                acct.bytes_read += plan.cost * sub.block_size
            acct.bytes_transferred = acct.bytes_read
            tot.add(acct)
            rows.append(CampaignRow(name, label, acct.bytes_read, acct.blocks_accessed))
        totals[name] = tot
    return CampaignResult(rows, totals)
