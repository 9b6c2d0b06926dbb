"""Arithmetic over GF(2^w) with log/antilog tables, plus small matrix routines.

Scalars are plain ints inside the hot paths; ``FieldElem`` is the checked
wrapper used at API boundaries. Matrices are numpy integer arrays so that
elimination steps run as whole-row table lookups.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FieldWidthMismatch, NotInvertible

# Primitive polynomials per width (bit w set). 0x11D for w=8.
PRIMITIVE_POLY = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11D,
    9: 0x211, 10: 0x409, 11: 0x805, 12: 0x1053, 13: 0x201B, 14: 0x4443,
    15: 0x8003, 16: 0x1100B,
}

DEFAULT_W = 8


def default_width() -> int:
    """Field width from ``CASCADE_EC_W`` if set, else 8."""
    raw = os.environ.get("CASCADE_EC_W")
    if not raw:
        return DEFAULT_W
    w = int(raw)
    if w not in PRIMITIVE_POLY:
        raise ValueError(f"CASCADE_EC_W must be in 1..16, got {w}")
    return w


def carryless_mul(a: int, b: int, w: int, poly: int | None = None) -> int:
    """Shift-and-add multiply, reducing as it goes. Slow; used as an oracle."""
    poly = PRIMITIVE_POLY[w] if poly is None else poly
    top = 1 << w
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


class GF:
    """Tables and vectorised kernels for one field width."""

    def __init__(self, w: int = DEFAULT_W):
        if w not in PRIMITIVE_POLY:
            raise ValueError(f"unsupported field width {w}")
        self.w = w
        self.poly = PRIMITIVE_POLY[w]
        self.size = 1 << w
        order = self.size - 1
        exp = [0] * (2 * order + 1)
        log = [0] * self.size
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = carryless_mul(x, 2, w, self.poly)
        if x != 1 or (order > 1 and len(set(exp[:order])) != order):
            raise ValueError(f"polynomial {self.poly:#x} is not primitive")
        for i in range(order, len(exp)):
            exp[i] = exp[i - order]
        self.exp = exp
        self.log = log
        self.dtype = np.uint8 if w <= 8 else np.uint16
        self.exp_np = np.array(exp, dtype=np.int64)
        self.log_np = np.array(log, dtype=np.int64)
        if w <= 8:
            idx = np.arange(self.size)
            lg = self.log_np[idx]
            table = self.exp_np[lg[:, None] + lg[None, :]]
            table[0, :] = 0
            table[:, 0] = 0
            self.mul_table = table.astype(self.dtype)
        else:
            self.mul_table = None

    # scalar ops on ints
    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^w)")
        return self.exp[(self.size - 1) - self.log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # array ops
    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Element-wise product with broadcasting."""
        a = np.asarray(a)
        b = np.asarray(b)
        if self.mul_table is not None:
            return self.mul_table[a, b]
        a64 = a.astype(np.int64)
        b64 = b.astype(np.int64)
        out = self.exp_np[self.log_np[a64] + self.log_np[b64]]
        out = np.where((a64 == 0) | (b64 == 0), 0, out)
        return out.astype(self.dtype)

    def scale(self, c: int, buf: np.ndarray) -> np.ndarray:
        if c == 0:
            return np.zeros_like(buf)
        if c == 1:
            return buf.copy()
        if self.mul_table is not None:
            return self.mul_table[c][buf]
        return self.mul_arrays(np.full(buf.shape, c, dtype=self.dtype), buf)

    def combine(self, coeffs, bufs) -> np.ndarray:
        """Sum of c_i * buf_i over the field."""
        bufs = list(bufs)
        if not bufs:
            raise ValueError("no buffers to combine")
        out = np.zeros_like(bufs[0])
        for c, buf in zip(coeffs, bufs):
            if c == 0:
                continue
            if c == 1:
                out ^= buf
            else:
                out ^= self.scale(int(c), buf)
        return out

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product over the field; ``b`` may hold symbol buffers as rows."""
        a = np.asarray(a)
        b = np.asarray(b)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=self.dtype)
        for j in range(a.shape[1]):
            col = a[:, j]
            if not col.any():
                continue
            out ^= self.mul_arrays(col[:, None].astype(self.dtype), b[j][None, :].astype(self.dtype))
        return out

    # elimination
    def row_reduce(self, m: np.ndarray, ncols: int | None = None):
        """Reduced row echelon form over the first ``ncols`` columns.

        Pivot is the first nonzero entry at or below the current row, so the
        result is deterministic. Returns (reduced copy, pivot column list).
        """
        m = np.array(m, dtype=self.dtype, copy=True)
        rows, cols = m.shape
        ncols = cols if ncols is None else ncols
        pivots = []
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            nz = np.nonzero(m[r:, c])[0]
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                m[[r, piv]] = m[[piv, r]]
            inv = self.inv(int(m[r, c]))
            if inv != 1:
                m[r] = self.scale(inv, m[r])
            factors = m[:, c].copy()
            factors[r] = 0
            hit = np.nonzero(factors)[0]
            if hit.size:
                m[hit] ^= self.mul_arrays(factors[hit][:, None], m[r][None, :])
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self, m: np.ndarray) -> int:
        m = np.asarray(m)
        if m.size == 0:
            return 0
        return len(self.row_reduce(m)[1])

    def inverse(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("inverse needs a square matrix")
        aug = np.concatenate([m.astype(self.dtype), np.eye(n, dtype=self.dtype)], axis=1)
        red, piv = self.row_reduce(aug, ncols=n)
        if len(piv) < n:
            raise NotInvertible("matrix is singular over the field")
        return red[:, n:]

    def express(self, rows: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """Coefficients C with C @ rows == targets.

        ``rows`` must have full row rank. Raises NotInvertible if some target
        lies outside their span.
        """
        rows = np.asarray(rows, dtype=self.dtype)
        targets = np.atleast_2d(np.asarray(targets, dtype=self.dtype))
        m = rows.shape[0]
        # Solve rows^T x = target^T for every target at once.
        aug = np.concatenate([rows.T, targets.T], axis=1)
        red, piv = self.row_reduce(aug, ncols=m)
        if len(piv) < m:
            raise NotInvertible("source rows are linearly dependent")
        if red[m:, m:].any():
            raise NotInvertible("target is not in the span of the source rows")
        return red[:m, m:].T.copy()


@lru_cache(maxsize=None)
def field(w: int | None = None) -> GF:
    return GF(default_width() if w is None else w)


@dataclass(frozen=True)
class FieldElem:
    value: int
    w: int = DEFAULT_W

    def __post_init__(self):
        if not 0 <= self.value < (1 << self.w):
            raise ValueError(f"{self.value} is outside GF(2^{self.w})")

    def _check(self, other: "FieldElem") -> None:
        if self.w != other.w:
            raise FieldWidthMismatch(f"GF(2^{self.w}) vs GF(2^{other.w})")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        return gf_add(self, other)

    __sub__ = __add__

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        return gf_mul(self, other)

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        return gf_mul(self, gf_inv(other))

    def inverse(self) -> "FieldElem":
        return gf_inv(self)


def gf_add(a: FieldElem, b: FieldElem) -> FieldElem:
    a._check(b)
    return FieldElem(a.value ^ b.value, a.w)


def gf_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    a._check(b)
    return FieldElem(field(a.w).mul(a.value, b.value), a.w)


def gf_inv(a: FieldElem) -> FieldElem:
    return FieldElem(field(a.w).inv(a.value), a.w)


@dataclass(frozen=True)
class FieldMatrix:
    """Immutable row-major matrix over GF(2^w)."""

    rows: int
    cols: int
    entries: tuple
    w: int = DEFAULT_W

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length does not match shape")

    @classmethod
    def from_array(cls, arr, w: int = DEFAULT_W) -> "FieldMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(arr.shape[0], arr.shape[1], tuple(int(v) for v in arr.ravel()), w)

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=field(self.w).dtype).reshape(self.rows, self.cols)

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_lists(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]


def mat_rank(m: FieldMatrix) -> int:
    return field(m.w).rank(m.to_array())


def mat_solve(m: FieldMatrix, rhs) -> list:
    """Solve m @ x = rhs where rhs is a list of equal-length symbol buffers."""
    if m.rows != m.cols:
        raise ValueError("mat_solve needs a square matrix")
    if len(rhs) != m.rows:
        raise ValueError("one right-hand buffer per row is required")
    gf = field(m.w)
    inv = gf.inverse(m.to_array())
    return [gf.combine(inv[i], rhs) for i in range(m.rows)]
