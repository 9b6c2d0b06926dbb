"""Cauchy coefficients and the weights that express the last global parity
through the data blocks and the other global parities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DistinctnessViolated, InvalidSpec, NotApplicable
from .gf import FieldMatrix, field


def default_points(k: int, r: int) -> tuple[list[int], list[int]]:
    """Data points 0..k-1 and parity points k..k+r-1."""
    return list(range(k)), list(range(k, k + r))


def _check_distinct(a, b, w: int) -> None:
    pts = list(a) + list(b)
    if len(set(pts)) != len(pts):
        raise DistinctnessViolated("Cauchy points must be pairwise distinct")
    if any(not 0 <= x < (1 << w) for x in pts):
        raise DistinctnessViolated(f"points must lie in GF(2^{w})")


def cauchy_array(a, b, w: int | None = None) -> np.ndarray:
    """k x r array with entry (i, j) = 1 / (b_j - a_i)."""
    gf = field(w)
    _check_distinct(a, b, gf.w)
    out = np.zeros((len(a), len(b)), dtype=gf.dtype)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i, j] = gf.inv(bj ^ ai)
    return out


def cauchy_alpha(a, b, w: int | None = None) -> FieldMatrix:
    gf = field(w)
    return FieldMatrix.from_array(cauchy_array(a, b, gf.w), gf.w)


@dataclass(frozen=True)
class CombinationCoeffs:
    gamma: tuple   # weight of each data block
    eta: tuple     # weight of G_1..G_{r-1}
    bar_gamma: tuple
    bar_eta: tuple


def combination_coefficients(a, b, w: int | None = None) -> CombinationCoeffs:
    """Nonzero weights with G_r = sum gamma_i D_i + sum_{j<r} eta_j G_j.

    The unnormalised pair satisfies bar_gamma_i + sum_j bar_eta_j alpha_ij = 0,
    which makes sum bar_gamma D + sum bar_eta G vanish; dividing by
    bar_eta_r isolates G_r.
    """
    gf = field(w)
    if len(b) < 2:
        raise InvalidSpec("need at least two global parities")
    _check_distinct(a, b, gf.w)
    bar_gamma = []
    for ai in a:
        acc = 1
        for bz in b:
            acc = gf.mul(acc, gf.inv(ai ^ bz))
        bar_gamma.append(acc)
    bar_eta = []
    for j, bj in enumerate(b):
        acc = 1
        for z, bz in enumerate(b):
            if z != j:
                acc = gf.mul(acc, gf.inv(bj ^ bz))
        bar_eta.append(acc)
    last = bar_eta[-1]
    gamma = tuple(gf.div(g, last) for g in bar_gamma)
    eta = tuple(gf.div(e, last) for e in bar_eta[:-1])
    return CombinationCoeffs(gamma, eta, tuple(bar_gamma), tuple(bar_eta))


def identity_residuals(a, b, w: int | None = None) -> list[int]:
    """bar_gamma_i + sum_j bar_eta_j alpha_ij for each i; all zero when the identity holds."""
    gf = field(w)
    cc = combination_coefficients(a, b, gf.w)
    alpha = cauchy_array(a, b, gf.w)
    out = []
    for i in range(len(a)):
        acc = cc.bar_gamma[i]
        for j in range(len(b)):
            acc ^= gf.mul(cc.bar_eta[j], int(alpha[i, j]))
        out.append(acc)
    return out


def verify_cascade(layout) -> bool:
    """True iff the local parity rows sum to the last global parity row."""
    if not layout.spec.scheme.is_cascaded:
        raise NotApplicable(f"{layout.spec.scheme.value} has no cascaded group")
    gen = layout.generator_array
    acc = np.zeros(gen.shape[1], dtype=gen.dtype)
    for idx in layout.local_indices:
        acc ^= gen[idx]
    return bool(np.array_equal(acc, gen[layout.global_indices[-1]]))
