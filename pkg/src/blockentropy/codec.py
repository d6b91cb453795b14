"""The modified k-block code: flagged Shannon-Fano coding of non-overlapping blocks.

Payload layout (all fields MSB-first)::

    gamma(k)                          Elias-gamma block length
    coded-count                       R bits, R = ceil(k log2 |X|)
    codebook entries                  per coded block: R-bit block code + L-bit length,
                                      L = ceil(log2(k * ceil(log2 |X|)))
    body                              per block: 0 + canonical codeword, or 1 + R-bit raw block
    tail                              leftover n mod k symbols, ceil(log2 |X|) bits each

A block is coded iff its Shannon-Fano length ``ceil(-log2 p)`` (clamped to at
least 1) is strictly below ``k log2 |X|``. Codewords are canonical, so the
codebook stores lengths only. ``n`` and ``|X|`` travel out of band.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .bitio import BitReader, BitWriter
from .empirical import (
    EmpiricalBlockDistribution,
    as_symbols,
    digits_from_codes,
    empirical_distribution,
    infer_alphabet_size,
    plug_in_entropy,
)
from .errors import DecodeError
from .kernels import decode_body

MAGIC = b"KBC1"


def symbol_width(alphabet_size: int) -> int:
    """ceil(log2 |X|)."""
    return (alphabet_size - 1).bit_length()


def raw_width(k: int, alphabet_size: int) -> int:
    """ceil(k log2 |X|): bits of a raw block as a mixed-radix integer."""
    return (alphabet_size**k - 1).bit_length()


def length_width(k: int, alphabet_size: int) -> int:
    """ceil(log2(k ceil(log2 |X|))): bits of a codebook length field."""
    return (k * symbol_width(alphabet_size) - 1).bit_length()


def shannon_fano_length(count: int, total: int) -> int:
    """ceil(-log2(count/total)) in exact integer arithmetic, clamped to >= 1."""
    ratio = -(-total // count)
    return max(1, (ratio - 1).bit_length())


def canonical_codewords(lengths) -> list[int]:
    """Canonical prefix code for lengths given in nondecreasing order."""
    codes = []
    code = 0
    prev = None
    for length in lengths:
        if prev is not None:
            code = (code + 1) << (length - prev)
        else:
            code = 0
        codes.append(code)
        prev = length
    return codes


def is_prefix_free(codewords, lengths) -> bool:
    """Exhaustive check: in sorted bit-string order no word prefixes its successor."""
    words = sorted(format(c, f"0{l}b") for c, l in zip(codewords, lengths))
    return all(not b.startswith(a) for a, b in zip(words, words[1:]))


@dataclass(frozen=True, eq=False)
class Codebook:
    """Coded blocks in canonical order (by length, then lexicographically)."""

    k: int
    alphabet_size: int
    codes: list  # mixed-radix block codes
    lengths: list
    codewords: list

    @property
    def threshold(self) -> float:
        return self.k * math.log2(self.alphabet_size)

    def __len__(self):
        return len(self.codes)

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2**l) for l in self.lengths), Fraction(0))

    def is_prefix_free(self) -> bool:
        return is_prefix_free(self.codewords, self.lengths)

    def blocks(self) -> np.ndarray:
        return digits_from_codes(np.array(self.codes, dtype=object), self.k, self.alphabet_size)

    @classmethod
    def from_lengths(cls, k, alphabet_size, codes, lengths):
        return cls(k, alphabet_size, list(codes), list(lengths), canonical_codewords(lengths))


def _coded_lengths(d: EmpiricalBlockDistribution):
    """Shannon-Fano length per distinct block and the coded mask."""
    limit = d.alphabet_size**d.k
    lengths = [shannon_fano_length(c, d.block_count) for c in d.counts.tolist()]
    coded = [(1 << l) < limit for l in lengths]
    return lengths, coded


def build_codebook(d: EmpiricalBlockDistribution, alphabet_size: int | None = None) -> Codebook:
    """Codebook of the blocks whose Shannon-Fano word is shorter than ``k log2 |X|``."""
    if alphabet_size is not None and alphabet_size != d.alphabet_size:
        d = EmpiricalBlockDistribution(d.k, d.block_count, alphabet_size, d.blocks, d.counts, d.codes, d.index)
    if d.block_count < 1:
        raise ValueError("no complete blocks")
    lengths, coded = _coded_lengths(d)
    entries = sorted((l, int(c)) for l, c, ok in zip(lengths, d.codes.tolist(), coded) if ok)
    return Codebook.from_lengths(d.k, d.alphabet_size, [c for _, c in entries], [l for l, _ in entries])


@dataclass(frozen=True, eq=False)
class EncodedStream:
    payload: bytes
    nbits: int
    k: int
    n: int
    alphabet_size: int

    @property
    def measured_bits(self) -> int:
        return self.nbits


class CodeLengthBound(NamedTuple):
    k: int
    n: int
    h_plugin: float
    distinct: int
    bound_bits: float


def encode(x, k: int, alphabet_size: int | None = None) -> EncodedStream:
    """Encode ``x`` with the modified k-block code."""
    size = max(2, infer_alphabet_size(x) if alphabet_size is None else int(alphabet_size))
    arr = as_symbols(x)
    n = arr.size
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise ValueError(f"symbols outside alphabet of size {size}")
    d = empirical_distribution(arr, k, size)
    R = raw_width(k, size)
    L = length_width(k, size)
    book = build_codebook(d)

    w = BitWriter()
    w.write_gamma(k)
    w.write(len(book), R)
    if R <= 63 and L <= 63:
        vals = np.empty(2 * len(book), dtype=np.uint64)
        vals[0::2] = np.array(book.codes, dtype=np.uint64)
        vals[1::2] = np.array(book.lengths, dtype=np.uint64)
        widths = np.tile(np.array([R, L], dtype=np.uint8), len(book))
        w.write_fields(vals, widths)
    else:
        for c, l in zip(book.codes, book.lengths):
            w.write(c, R)
            w.write(l, L)

    # per-distinct-block (value, width) table, then gathered along the block index
    slot = {c: i for i, c in enumerate(book.codes)}
    ucodes = d.codes.tolist()
    if R <= 63:
        table_v = np.empty(d.distinct, dtype=np.uint64)
        table_w = np.empty(d.distinct, dtype=np.uint8)
        for j, c in enumerate(ucodes):
            i = slot.get(c)
            if i is None:
                table_v[j] = (1 << R) | c
                table_w[j] = 1 + R
            else:
                table_v[j] = book.codewords[i]
                table_w[j] = 1 + book.lengths[i]
        w.write_fields(table_v[d.index], table_w[d.index])
    else:
        nchunks = -(-R // 32)
        table_v = np.zeros((d.distinct, nchunks + 1), dtype=np.uint64)
        table_w = np.zeros((d.distinct, nchunks + 1), dtype=np.uint8)
        for j, c in enumerate(ucodes):
            i = slot.get(c)
            if i is None:
                table_v[j, 0], table_w[j, 0] = 1, 1
                rem = R
                for col in range(1, nchunks + 1):
                    width = min(32, rem - 32 * (nchunks - col))
                    rem -= width
                    table_v[j, col] = (c >> rem) & ((1 << width) - 1)
                    table_w[j, col] = width
            else:
                table_v[j, 0] = book.codewords[i]
                table_w[j, 0] = 1 + book.lengths[i]
        w.write_fields(table_v[d.index].ravel(), table_w[d.index].ravel())

    sw = symbol_width(size)
    tail = arr[d.block_count * k:]
    if tail.size:
        w.write_fields(tail.astype(np.uint64), np.full(tail.size, sw, dtype=np.uint8))
    payload, nbits = w.getvalue()
    return EncodedStream(payload, nbits, k, n, size)


def _canonical_tables(lengths):
    maxlen = max(lengths, default=0)
    counts = [0] * (maxlen + 1)
    for l in lengths:
        counts[l] += 1
    first = [0] * (maxlen + 1)
    offsets = [0] * (maxlen + 1)
    code = 0
    off = 0
    for l in range(1, maxlen + 1):
        code = (code + counts[l - 1]) << 1 if l > 1 else 0
        first[l] = code
        offsets[l] = off
        off += counts[l]
    return first, counts, offsets, maxlen


def decode(s: EncodedStream) -> np.ndarray:
    """Invert :func:`encode`; raises :class:`DecodeError` naming the failing section."""
    size, n = s.alphabet_size, s.n
    r = BitReader(s.payload, s.nbits)
    try:
        k = r.read_gamma()
    except (EOFError, ValueError) as exc:
        raise DecodeError("header", str(exc)) from None
    if k > n:
        raise DecodeError("header", f"block length {k} exceeds n={n}")
    R = raw_width(k, size)
    L = length_width(k, size)
    limit = size**k
    try:
        ncoded = r.read(R)
        codes, lengths = [], []
        for _ in range(ncoded):
            codes.append(r.read(R))
            lengths.append(r.read(L))
    except EOFError as exc:
        raise DecodeError("codebook", str(exc)) from None
    for i, (c, l) in enumerate(zip(codes, lengths)):
        if c >= limit or l < 1 or (1 << l) >= limit:
            raise DecodeError("codebook", f"entry {i} out of range")
        if i and (lengths[i - 1], codes[i - 1]) >= (l, c):
            raise DecodeError("codebook", f"entry {i} breaks canonical order")
    if sum(Fraction(1, 2**l) for l in lengths) > 1:
        raise DecodeError("codebook", "lengths violate the Kraft inequality")

    nblocks = n // k
    first, counts, offsets, maxlen = _canonical_tables(lengths)
    try:
        kind, vals, pos = decode_body(s.payload, r.pos, s.nbits, nblocks, R, first, counts, offsets, maxlen)
    except ValueError as exc:
        raise DecodeError("body", str(exc)) from None
    if R <= 63:
        book = np.array(codes, dtype=np.int64) if codes else np.zeros(0, dtype=np.int64)
        raw = kind.astype(bool)
        block_codes = np.where(raw, vals, book[np.where(raw, 0, vals)] if book.size else vals)
        if np.any(block_codes[raw] >= limit):
            raise DecodeError("body", "raw block out of range")
    else:
        block_codes = np.array([v if kd else codes[v] for kd, v in zip(kind.tolist(), vals.tolist())], dtype=object)
        if any(c >= limit for c in block_codes.tolist()):
            raise DecodeError("body", "raw block out of range")
    out = np.empty(n, dtype=np.int64)
    out[: nblocks * k] = digits_from_codes(block_codes, k, size).ravel()

    r.pos = pos
    sw = symbol_width(size)
    try:
        for i in range(nblocks * k, n):
            out[i] = r.read(sw)
    except EOFError as exc:
        raise DecodeError("tail", str(exc)) from None
    if n > nblocks * k and out[nblocks * k:].max() >= size:
        raise DecodeError("tail", "symbol out of range")
    return out


def code_length_bound(x, k: int, alphabet_size: int | None = None) -> CodeLengthBound:
    """K(k, x) = 2 log k + (n/k)(H + 2) + 3 k log|X| (D + 1), with real-valued n/k."""
    size = infer_alphabet_size(x) if alphabet_size is None else int(alphabet_size)
    arr = as_symbols(x)
    n = arr.size
    d = empirical_distribution(arr, k, size)
    h = plug_in_entropy(d)
    return CodeLengthBound(k, n, h, d.distinct, k_block_bound(n, k, size, h, d.distinct))


def k_block_bound(n: int, k: int, alphabet_size: int, h_plugin: float, distinct: int) -> float:
    return 2 * math.log2(k) + (n / k) * (h_plugin + 2) + 3 * k * math.log2(alphabet_size) * (distinct + 1)


class MinCodeLength(NamedTuple):
    k: int
    bits: float


def min_code_length(x, alphabet_size: int | None = None, range_factor: int = 4, k_max: int | None = None) -> MinCodeLength:
    """Universal code length min_k K(k, x) over ``k = 1 .. range_factor * floor(log2 n)``.

    ``k_max`` further caps the search range.
    """
    arr = as_symbols(x)
    n = arr.size
    if n < 1:
        raise ValueError("empty sample")
    size = infer_alphabet_size(x) if alphabet_size is None else int(alphabet_size)
    top = max(1, min(n, range_factor * int(math.floor(math.log2(n)))))
    k_max = top if k_max is None else max(1, min(top, k_max))
    best = None
    for k in range(1, k_max + 1):
        bits = code_length_bound(arr, k, size).bound_bits
        if best is None or bits < best.bits:
            best = MinCodeLength(k, bits)
    return best


# -- container ---------------------------------------------------------------

def to_container(s: EncodedStream) -> bytes:
    """``KBC1`` | n (u64 LE) | alphabet size (u16 LE) | payload padded with zero bits."""
    if not 2 <= s.alphabet_size <= 0xFFFF:
        raise ValueError("container alphabet size must fit in 16 bits")
    return MAGIC + struct.pack("<QH", s.n, s.alphabet_size) + s.payload


def from_container(blob: bytes) -> EncodedStream:
    if len(blob) < 14 or blob[:4] != MAGIC:
        raise DecodeError("header", "not a KBC1 container")
    n, size = struct.unpack("<QH", blob[4:14])
    payload = blob[14:]
    try:
        k = BitReader(payload).read_gamma()
    except (EOFError, ValueError) as exc:
        raise DecodeError("header", str(exc)) from None
    return EncodedStream(payload, 8 * len(payload), k, n, size)
