"""Normalized fast Walsh-Hadamard transform.

The transform is orthonormal, so inner products (and hence empirical
correlations) are preserved exactly, while each output coordinate is a
signed sum of all inputs and tends to a Gaussian by the central limit theorem.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateInputError
from .sampling import SampleBatch


def is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def fwht(v) -> np.ndarray:
    """Orthonormal WHT along the last axis (natural/Hadamard ordering)."""
    a = np.array(v, dtype=float, copy=True)
    if a.ndim == 0:
        raise DegenerateInputError("fwht needs at least a 1-D array")
    n = a.shape[-1]
    if not is_pow2(n):
        raise DegenerateInputError(f"fwht length must be a power of two, got {n}")
    lead = a.shape[:-1]
    h = 1
    while h < n:
        b = a.reshape(*lead, n // (2 * h), 2, h)
        lo = b[..., 0, :].copy()
        hi = b[..., 1, :]
        b[..., 0, :] += hi
        b[..., 1, :] = lo - hi
        h *= 2
    a *= 1.0 / np.sqrt(n)
    return a


@dataclass(frozen=True)
class WhtVector:
    data: np.ndarray
    original_len: int

    @property
    def padded(self) -> bool:
        return self.data.shape[-1] != self.original_len


def next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def pad_pow2(v) -> WhtVector:
    """Zero-pad the last axis to the next power of two."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] == 0:
        raise DegenerateInputError("cannot pad an empty vector")
    n = v.shape[-1]
    m = next_pow2(n)
    if m == n:
        return WhtVector(v.copy(), n)
    pad = [(0, 0)] * (v.ndim - 1) + [(0, m - n)]
    return WhtVector(np.pad(v, pad), n)


def transform_pairs(xs, ys):
    """Pad and transform paired arrays; returns ``(xs', ys', original_len)``."""
    px, py = pad_pow2(xs), pad_pow2(ys)
    return fwht(px.data), fwht(py.data), px.original_len


def transform_batch(b: SampleBatch) -> SampleBatch:
    xs, ys, n = transform_pairs(b.xs, b.ys)
    meta = dict(b.meta, wht=True, padded=xs.size != n)
    return replace(b, xs=xs, ys=ys, original_len=n if xs.size != n else b.original_len, meta=meta)
