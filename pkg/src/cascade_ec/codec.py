"""Byte-level encoding, full decode and plan-driven reconstruction."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .construct import CodeSpec, StripeLayout, build_layout
from .errors import NotInvertible, PlanSourceUnavailable, Undecodable
from .gf import field
from .planner import RepairPlan, attach_coefficients


def as_buffer(data, w: int) -> np.ndarray:
    """View bytes (or an array) as field symbols; 16-bit fields use 2-byte symbols."""
    dtype = field(w).dtype
    if isinstance(data, np.ndarray):
        if data.dtype == dtype:
            return data
        data = data.tobytes()
    raw = bytes(data)
    if dtype == np.uint16:
        if len(raw) % 2:
            raise ValueError("16-bit fields need an even block length")
        return np.frombuffer(raw, dtype="<u2").copy()
    return np.frombuffer(raw, dtype=np.uint8).copy()


@dataclass
class Stripe:
    layout: StripeLayout
    blocks: list  # n symbol buffers

    @property
    def block_size(self) -> int:
        return int(self.blocks[0].nbytes)

    def erase(self, failed) -> "ErasedStripe":
        lost = {self.layout.index(b) for b in failed}
        avail = {i: b for i, b in enumerate(self.blocks) if i not in lost}
        return ErasedStripe(self.layout, avail)


@dataclass
class ErasedStripe:
    """Surviving buffers with a log of which indices were read."""

    layout: StripeLayout
    available: dict
    reads: list = dc_field(default_factory=list)

    def read(self, idx: int) -> np.ndarray:
        if idx not in self.available:
            raise PlanSourceUnavailable(f"block {self.layout.label(idx)} is not available")
        self.reads.append(idx)
        return self.available[idx]

    @property
    def blocks_read(self) -> set:
        return set(self.reads)


def encode(layout: StripeLayout, data) -> Stripe:
    k = layout.k
    if len(data) != k:
        raise ValueError(f"expected {k} data buffers, got {len(data)}")
    bufs = [as_buffer(d, layout.spec.w) for d in data]
    size = len(bufs[0])
    if any(len(b) != size for b in bufs):
        raise ValueError("data buffers differ in length")
    gf = field(layout.spec.w)
    gen = layout.generator_array
    parity = gf.matmul(gen[k:], np.stack(bufs)) if layout.n > k else np.zeros((0, size), gf.dtype)
    return Stripe(layout, bufs + [parity[i].copy() for i in range(parity.shape[0])])


def reconstruct(stripe: ErasedStripe, plan: RepairPlan) -> dict:
    """Run a plan against the surviving buffers; returns {index: buffer}."""
    layout = stripe.layout
    if any(st.coefficients is None for st in plan.steps):
        plan = attach_coefficients(layout, plan)
    gf = field(layout.spec.w)
    rebuilt: dict = {}
    fetched: dict = {}
    for st in plan.steps:
        srcs = []
        for s in st.sources:
            if s in rebuilt:
                srcs.append(rebuilt[s])
            else:
                if s not in fetched:
                    fetched[s] = stripe.read(s)
                srcs.append(fetched[s])
        rebuilt[st.target] = gf.combine(st.coefficients, srcs)
    return rebuilt


def decode_full(layout: StripeLayout, available: dict) -> list:
    """Recover the k data buffers from any available blocks of rank k."""
    gf = field(layout.spec.w)
    gen = layout.generator_array
    k = layout.k
    idx = sorted(available)
    if all(i in available for i in layout.data_indices):
        return [available[i] for i in layout.data_indices]
    # data first, then globals, then locals, adding rows that raise the rank
    order = [i for i in layout.data_indices if i in available]
    order += [i for i in layout.global_indices if i in available]
    order += [i for i in layout.local_indices if i in available]
    chosen: list[int] = []
    for i in order:
        if gf.rank(gen[chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == k:
                break
    if len(chosen) < k:
        raise Undecodable(f"available blocks {idx} have rank {len(chosen)} < {k}")
    try:
        inv = gf.inverse(gen[chosen])
    except NotInvertible as exc:  # cannot happen after the rank check
        raise Undecodable(str(exc)) from exc
    rhs = [available[i] for i in chosen]
    return [gf.combine(inv[d], rhs) for d in range(k)]


# on-disk format

def block_filename(stripe_id: str, label: str) -> str:
    return f"{stripe_id}_{label}.bin"


def write_stripe(stripe: Stripe, directory, stripe_id: str, extra: dict | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    layout = stripe.layout
    entries = []
    for b, buf in zip(layout.blocks, stripe.blocks):
        name = block_filename(stripe_id, b.label)
        raw = buf.astype(buf.dtype.newbyteorder("<"), copy=False).tobytes()
        (directory / name).write_bytes(raw)
        entries.append({"index": b.index, "label": b.label, "role": b.role.value,
                        "file": name, "sha256": hashlib.sha256(raw).hexdigest()})
    s = layout.spec
    manifest = {
        "stripe_id": stripe_id,
        "scheme": s.scheme.value, "k": s.k, "r": s.r, "p": s.p, "w": s.w,
        "block_size": stripe.block_size,
        "blocks": entries,
    }
    if extra:
        manifest.update(extra)
    path = directory / f"{stripe_id}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


def read_manifest(path) -> tuple[dict, StripeLayout]:
    manifest = json.loads(Path(path).read_text())
    spec = CodeSpec(manifest["scheme"], manifest["k"], manifest["r"], manifest["p"], manifest.get("w", 8))
    return manifest, build_layout(spec)
