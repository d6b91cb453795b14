"""Empirical k-block statistics over non-overlapping blocks.

A sample ``x`` of length ``n`` is cut into ``floor(n/k)`` blocks
``x[(i-1)k : ik]``; the tail ``x[k*floor(n/k):]`` is ignored. Counts stay
integers; probabilities are formed only when an entropy or distance is
evaluated.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

INT64_CODE_LIMIT = 2**62


def as_symbols(x) -> np.ndarray:
    """Symbol array from a :class:`~blockentropy.models.Sample` or array-like."""
    arr = np.asarray(getattr(x, "symbols", x))
    if arr.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    return arr


def infer_alphabet_size(x) -> int:
    size = getattr(x, "alphabet_size", None)
    if size is not None:
        return int(size)
    arr = as_symbols(x)
    return max(2, int(arr.max()) + 1) if arr.size else 2


def _check_k(n, k):
    if k < 1:
        raise ValueError(f"block length must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"block length {k} exceeds sample length {n}")


def block_matrix(x, k: int) -> np.ndarray:
    """``(floor(n/k), k)`` view of the non-overlapping blocks."""
    arr = as_symbols(x)
    _check_k(arr.size, k)
    b = arr.size // k
    return arr[: b * k].reshape(b, k)


def radix_codes(blocks: np.ndarray, alphabet_size: int) -> np.ndarray:
    """Mixed-radix integer per block, first symbol most significant.

    int64 when ``alphabet_size**k`` fits, Python ints (object array) otherwise.
    Integer order coincides with lexicographic block order.
    """
    k = blocks.shape[1]
    if alphabet_size**k < INT64_CODE_LIMIT:
        powers = alphabet_size ** np.arange(k - 1, -1, -1, dtype=np.int64)
        return blocks.astype(np.int64) @ powers
    out = np.empty(blocks.shape[0], dtype=object)
    for i, row in enumerate(blocks.tolist()):
        v = 0
        for s in row:
            v = v * alphabet_size + s
        out[i] = v
    return out


def digits_from_codes(codes, k: int, alphabet_size: int, dtype=np.int64) -> np.ndarray:
    """Inverse of :func:`radix_codes`: ``(len(codes), k)`` symbol matrix."""
    codes = np.asarray(codes)
    out = np.empty((codes.size, k), dtype=dtype)
    if codes.dtype != object:
        rem = codes.astype(np.int64).copy()
        for j in range(k - 1, -1, -1):
            out[:, j] = rem % alphabet_size
            rem //= alphabet_size
        return out
    for i, c in enumerate(codes.tolist()):
        for j in range(k - 1, -1, -1):
            c, out[i, j] = divmod(c, alphabet_size)
    return out


@dataclass(frozen=True, eq=False)
class EmpiricalBlockDistribution:
    """Counts of distinct k-blocks.

    ``blocks`` holds the distinct blocks in lexicographic order, ``counts``
    their occurrence counts and ``index`` maps each block position to its row
    in ``blocks``.
    """

    k: int
    block_count: int
    alphabet_size: int
    blocks: np.ndarray
    counts: np.ndarray
    codes: np.ndarray
    index: np.ndarray

    @property
    def distinct(self) -> int:
        return int(self.counts.size)

    def probabilities(self) -> np.ndarray:
        return self.counts / self.block_count

    def as_dict(self) -> dict[tuple, int]:
        return {tuple(b): int(c) for b, c in zip(self.blocks.tolist(), self.counts.tolist())}

    def to_csv(self, path) -> None:
        sep = "" if self.alphabet_size <= 10 else "."
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["block", "count"])
            for b, c in zip(self.blocks.tolist(), self.counts.tolist()):
                w.writerow([sep.join(map(str, b)), c])


def empirical_distribution(x, k: int, alphabet_size: int | None = None) -> EmpiricalBlockDistribution:
    """Count the non-overlapping k-blocks of ``x``."""
    size = infer_alphabet_size(x) if alphabet_size is None else int(alphabet_size)
    blocks = block_matrix(x, k)
    codes = radix_codes(blocks, size)
    if codes.dtype == object:
        uniq, first, index, counts = np.unique(blocks, axis=0, return_index=True, return_inverse=True, return_counts=True)
        ucodes = codes[first]
    else:
        ucodes, first, index, counts = np.unique(codes, return_index=True, return_inverse=True, return_counts=True)
        uniq = blocks[first]
    return EmpiricalBlockDistribution(
        k=k,
        block_count=blocks.shape[0],
        alphabet_size=size,
        blocks=np.ascontiguousarray(uniq),
        counts=counts.astype(np.int64),
        codes=ucodes,
        index=np.asarray(index, dtype=np.int64).ravel(),
    )


def plug_in_entropy(d: EmpiricalBlockDistribution) -> float:
    """Entropy in bits of the relative block frequencies.

    Evaluated as ``log2(B) - sum(c log2 c) / B`` with ``B`` blocks, which makes
    the cardinality bound ``H <= log2(B)`` hold exactly in floating point.
    """
    b = d.block_count
    if b < 1:
        raise ValueError("no complete blocks")
    c = d.counts[d.counts > 1].astype(np.float64)
    s = math.fsum(c * np.log2(c))
    h = max(0.0, math.log2(b) - s / b)
    if h > math.log2(b):
        raise AssertionError(f"plug-in entropy {h} exceeds log2 {b}")
    return h


def distinct_blocks(x, k: int) -> int:
    """Number of distinct blocks among the non-overlapping k-blocks of ``x``."""
    blocks = block_matrix(x, k)
    if blocks.shape[0] == 0:
        return 0
    return int(np.unique(blocks, axis=0).shape[0])


def variational_distance(p, q) -> float:
    """L1 distance ``sum |p(w) - q(w)|``.

    Accepts two mappings (missing outcomes count as 0) or two equal-length
    arrays over the same outcome space.
    """
    if isinstance(p, Mapping) or isinstance(q, Mapping):
        keys = set(p) | set(q)
        return math.fsum(abs(p.get(w, 0.0) - q.get(w, 0.0)) for w in keys)
    a = np.asarray(p, dtype=np.float64)
    b = np.asarray(q, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("distributions over different outcome spaces")
    return math.fsum(np.abs(a - b))


def distance_to_law(d: EmpiricalBlockDistribution, law: np.ndarray) -> float:
    """Variational distance between ``d`` and a full block law indexed by radix code."""
    law = np.asarray(law, dtype=np.float64)
    if law.size != d.alphabet_size**d.k:
        raise ValueError("block law does not cover the k-block space")
    idx = np.asarray(d.codes, dtype=np.int64)
    p_obs = law[idx]
    observed = math.fsum(np.abs(d.probabilities() - p_obs))
    unobserved = max(0.0, 1.0 - math.fsum(p_obs))
    return observed + unobserved
