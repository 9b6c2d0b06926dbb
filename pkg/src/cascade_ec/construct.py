"""Stripe layouts and generator matrices for the supported LRC families.

Blocks are indexed D1..Dk, then L1..Lp, then G1..Gr. Each local repair
group is stored as the set of block indices whose generator rows sum (with
nonzero weights) to zero, so any single member is recoverable from the rest.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .coeffs import cauchy_array, combination_coefficients, default_points
from .errors import InvalidSpec, NotFound
from .gf import FieldMatrix, default_width, field


class Scheme(enum.Enum):
    BASE_MDS = "base-mds"
    AZURE = "azure"
    AZURE_PLUS1 = "azure+1"
    OPTIMAL = "optimal"
    UNIFORM = "uniform"
    CP_AZURE = "cp-azure"
    CP_UNIFORM = "cp-uniform"

    @property
    def is_cascaded(self) -> bool:
        return self in (Scheme.CP_AZURE, Scheme.CP_UNIFORM)

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        key = name.strip().lower().replace("_", "-")
        aliases = {
            "azure-plus1": "azure+1", "azureplus1": "azure+1", "azure-lrc+1": "azure+1",
            "optimal-cauchy": "optimal", "uniform-cauchy": "uniform",
            "cpazure": "cp-azure", "cpuniform": "cp-uniform", "mds": "base-mds",
            "rs": "base-mds",
        }
        key = aliases.get(key, key)
        for s in cls:
            if s.value == key:
                return s
        raise ValueError(f"unknown scheme {name!r}")


LRC_SCHEMES = [Scheme.AZURE, Scheme.AZURE_PLUS1, Scheme.OPTIMAL, Scheme.UNIFORM,
               Scheme.CP_AZURE, Scheme.CP_UNIFORM]


class Role(enum.Enum):
    DATA = "data"
    LOCAL = "local"
    GLOBAL = "global"


class _Cascaded:
    """Marker returned by ``group_of`` for members of the cascaded group."""

    def __repr__(self) -> str:
        return "CASCADED"


CASCADED = _Cascaded()


@dataclass(frozen=True)
class CodeSpec:
    scheme: Scheme
    k: int
    r: int
    p: int
    w: int = dc_field(default_factory=default_width)

    def __post_init__(self):
        if isinstance(self.scheme, str):
            object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        k, r, p = self.k, self.r, self.p
        if k < 1 or r < 1:
            raise InvalidSpec("k and r must be positive")
        if self.scheme is Scheme.BASE_MDS:
            if p != 0:
                raise InvalidSpec("the base MDS stripe has no local parities (p = 0)")
        elif p < 1:
            raise InvalidSpec("p must be positive")
        if k + r > (1 << self.w):
            raise InvalidSpec(f"k + r = {k + r} exceeds the {1 << self.w} points of GF(2^{self.w})")
        if self.scheme is Scheme.AZURE_PLUS1 and p < 2:
            raise InvalidSpec("azure+1 needs p >= 2")
        data_groups = {Scheme.AZURE: p, Scheme.CP_AZURE: p, Scheme.OPTIMAL: p,
                       Scheme.AZURE_PLUS1: p - 1}
        if self.scheme in data_groups and data_groups[self.scheme] > k:
            raise InvalidSpec("more data groups than data blocks")
        if self.scheme is Scheme.UNIFORM and p > k + r:
            raise InvalidSpec("more groups than blocks")
        if self.scheme is Scheme.CP_UNIFORM and p > k + r - 1:
            raise InvalidSpec("more groups than blocks")

    @property
    def n(self) -> int:
        return self.k + self.r + self.p


@dataclass(frozen=True)
class BlockId:
    index: int
    role: Role
    label: str

    def __str__(self) -> str:
        return self.label


def split_even(items, parts: int) -> list[list]:
    """Contiguous split into ``parts`` runs whose sizes differ by at most one.

    Shorter runs come first, so the block left over from an uneven division
    lands in the trailing groups.
    """
    items = list(items)
    base, extra = divmod(len(items), parts)
    out, pos = [], 0
    for g in range(parts):
        size = base + (1 if g >= parts - extra else 0)
        out.append(items[pos:pos + size])
        pos += size
    return out


@dataclass(frozen=True, eq=False)
class StripeLayout:
    spec: CodeSpec
    blocks: tuple
    groups: tuple          # tuple of frozensets of block indices
    generator: FieldMatrix
    cascade_group: int | None = None
    home: tuple = ()       # per block: group index, CASCADED or None
    point_set: tuple = ()  # (data points, parity points)

    # convenience views
    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def k(self) -> int:
        return self.spec.k

    @cached_property
    def generator_array(self) -> np.ndarray:
        arr = self.generator.to_array()
        arr.setflags(write=False)
        return arr

    @cached_property
    def data_indices(self) -> tuple:
        return tuple(b.index for b in self.blocks if b.role is Role.DATA)

    @cached_property
    def local_indices(self) -> tuple:
        return tuple(b.index for b in self.blocks if b.role is Role.LOCAL)

    @cached_property
    def global_indices(self) -> tuple:
        return tuple(b.index for b in self.blocks if b.role is Role.GLOBAL)

    @cached_property
    def by_label(self) -> dict:
        return {b.label: b.index for b in self.blocks}

    @cached_property
    def groups_of(self) -> tuple:
        """For each block, the indices of every group that contains it."""
        out = [[] for _ in self.blocks]
        for gi, g in enumerate(self.groups):
            for b in g:
                out[b].append(gi)
        return tuple(tuple(x) for x in out)

    def index(self, block) -> int:
        """Resolve a BlockId, label or index to an index."""
        if isinstance(block, BlockId):
            idx = block.index
        elif isinstance(block, str):
            if block not in self.by_label:
                raise NotFound(f"no block labelled {block!r}")
            idx = self.by_label[block]
        else:
            idx = int(block)
        if not 0 <= idx < self.n:
            raise NotFound(f"block index {idx} outside stripe of {self.n}")
        return idx

    def label(self, idx: int) -> str:
        return self.blocks[idx].label

    def to_dict(self) -> dict:
        return {
            "scheme": self.spec.scheme.value,
            "k": self.spec.k, "r": self.spec.r, "p": self.spec.p, "w": self.spec.w,
            "base_code": "cauchy",
            "points": {"data": list(self.point_set[0]), "parity": list(self.point_set[1])},
            "blocks": [{"index": b.index, "label": b.label, "role": b.role.value} for b in self.blocks],
            "groups": [sorted(self.label(i) for i in g) for g in self.groups],
            "cascade_group": self.cascade_group,
            "generator": self.generator.to_lists(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def build_layout(spec: CodeSpec) -> StripeLayout:
    k, r, p = spec.k, spec.r, spec.p
    gf = field(spec.w)
    a_pts, b_pts = default_points(k, r)
    alpha = cauchy_array(a_pts, b_pts, spec.w)  # k x r

    D = list(range(k))
    L = list(range(k, k + p))
    G = list(range(k + p, k + p + r))
    blocks = [BlockId(i, Role.DATA, f"D{i + 1}") for i in D]
    blocks += [BlockId(L[j], Role.LOCAL, f"L{j + 1}") for j in range(p)]
    blocks += [BlockId(G[j], Role.GLOBAL, f"G{j + 1}") for j in range(r)]

    gen = np.zeros((k + p + r, k), dtype=gf.dtype)
    gen[:k] = np.eye(k, dtype=gf.dtype)
    for j in range(r):
        gen[G[j]] = alpha[:, j]

    groups: list[set] = []
    home: list = [None] * len(blocks)
    cascade = None
    s = spec.scheme

    def add_group(members, local_idx, weights):
        """Local row = sum weight * member row; group = members + the local parity."""
        row = np.zeros(k, dtype=gf.dtype)
        for m, wgt in zip(members, weights):
            row ^= gf.scale(wgt, gen[m]) if wgt != 1 else gen[m]
        gen[local_idx] = row
        gi = len(groups)
        groups.append(set(members) | {local_idx})
        for m in members:
            if home[m] is None:
                home[m] = gi
        home[local_idx] = gi
        return gi

    if s is Scheme.AZURE or s is Scheme.CP_AZURE:
        for a, grp in enumerate(split_even(D, p)):
            wts = [1] * len(grp) if s is Scheme.AZURE else [int(alpha[i, r - 1]) for i in grp]
            add_group(grp, L[a], wts)
    elif s is Scheme.AZURE_PLUS1:
        for a, grp in enumerate(split_even(D, p - 1)):
            add_group(grp, L[a], [1] * len(grp))
        add_group(G, L[p - 1], [1] * r)
    elif s is Scheme.OPTIMAL:
        for a, grp in enumerate(split_even(D, p)):
            add_group(grp + G, L[a], [1] * (len(grp) + r))
        for g in G:
            home[g] = None
    elif s is Scheme.UNIFORM:
        for a, grp in enumerate(split_even(D + G, p)):
            add_group(grp, L[a], [1] * len(grp))
    elif s is Scheme.CP_UNIFORM:
        if r >= 2:
            cc = combination_coefficients(a_pts, b_pts, spec.w)
            weight = {D[i]: cc.gamma[i] for i in range(k)}
            weight.update({G[j]: cc.eta[j] for j in range(r - 1)})
            items = D + G[:r - 1]
        else:
            weight = {D[i]: int(alpha[i, 0]) for i in range(k)}
            items = D
        for a, grp in enumerate(split_even(items, p)):
            add_group(grp, L[a], [weight[m] for m in grp])

    if s.is_cascaded:
        cascade = len(groups)
        groups.append(set(L) | {G[-1]})
        for idx in L + [G[-1]]:
            home[idx] = CASCADED

    generator = FieldMatrix.from_array(gen, spec.w)
    return StripeLayout(
        spec=spec,
        blocks=tuple(blocks),
        groups=tuple(frozenset(g) for g in groups),
        generator=generator,
        cascade_group=cascade,
        home=tuple(home),
        point_set=(tuple(a_pts), tuple(b_pts)),
    )


def group_of(layout: StripeLayout, block):
    """Home group of a block: an index, ``CASCADED`` or None (ungrouped)."""
    return layout.home[layout.index(block)]


_LAYOUT_CACHE: dict = {}


def layout_for(scheme, k: int, r: int, p: int, w: int | None = None) -> StripeLayout:
    """Cached ``build_layout`` keyed by parameters."""
    scheme = Scheme.parse(scheme) if isinstance(scheme, str) else scheme
    w = default_width() if w is None else w
    key = (scheme, k, r, p, w)
    if key not in _LAYOUT_CACHE:
        _LAYOUT_CACHE[key] = build_layout(CodeSpec(scheme, k, r, p, w))
    return _LAYOUT_CACHE[key]
