"""Pure-Python/numpy versions of the compiled kernels, same signatures and outputs."""
import math

import numpy as np


def markov_walk(u, cum_init, cum_trans):
    s = len(cum_init)
    rows = [list(r) for r in np.asarray(cum_trans)]
    out = np.empty(len(u), dtype=np.int64)
    if len(u) == 0:
        return out
    uu = np.asarray(u).tolist()
    j = 0
    while j < s - 1 and cum_init[j] <= uu[0]:
        j += 1
    x = [j]
    append = x.append
    for t in range(1, len(uu)):
        row = rows[j]
        v = uu[t]
        j = 0
        while j < s - 1 and row[j] <= v:
            j += 1
        append(j)
    out[:] = x
    return out


def pack_bits(values, widths):
    values = np.asarray(values, dtype=np.uint64)
    widths = np.asarray(widths, dtype=np.int64)
    total = int(widths.sum())
    if total == 0:
        return b"", 0
    owner = np.repeat(np.arange(widths.size), widths)
    starts = np.cumsum(widths) - widths
    shift = (widths[owner] - 1 - (np.arange(total) - starts[owner])).astype(np.uint64)
    bits = ((values[owner] >> shift) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits).tobytes(), total


def decode_body(buf, start, nbits, nblocks, raw_width, first, counts, offsets, maxlen):
    bits = np.unpackbits(np.frombuffer(bytes(buf), dtype=np.uint8)).tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode()
    first = [int(v) for v in first]
    counts = [int(v) for v in counts]
    offsets = [int(v) for v in offsets]
    kind = np.zeros(nblocks, dtype=np.uint8)
    vals = [0] * nblocks
    pos = start
    for i in range(nblocks):
        if pos >= nbits:
            raise ValueError(f"payload ends inside block {i}")
        if bits[pos] == "1":
            pos += 1
            if pos + raw_width > nbits:
                raise ValueError(f"payload ends inside raw block {i}")
            vals[i] = int(bits[pos:pos + raw_width], 2) if raw_width else 0
            kind[i] = 1
            pos += raw_width
        else:
            pos += 1
            code = 0
            for l in range(1, maxlen + 1):
                if pos >= nbits:
                    raise ValueError(f"payload ends inside codeword {i}")
                code = (code << 1) | (bits[pos] == "1")
                pos += 1
                if counts[l] and first[l] <= code < first[l] + counts[l]:
                    vals[i] = offsets[l] + code - first[l]
                    break
            else:
                raise ValueError(f"invalid codeword in block {i}")
    return kind, np.array(vals, dtype=object if raw_width > 63 else np.int64), pos


def hmm_forward_log2(obs, init, trans, output_map):
    obs = np.asarray(obs)
    if obs.size == 0:
        return 0.0
    g = np.asarray(output_map)
    P = np.asarray(trans)
    alpha = np.where(g == obs[0], init, 0.0)
    c = alpha.sum()
    if c <= 0:
        return -math.inf
    total = math.log2(c)
    alpha = alpha / c
    for y in obs[1:]:
        alpha = np.where(g == y, alpha @ P, 0.0)
        c = alpha.sum()
        if c <= 0:
            return -math.inf
        total += math.log2(c)
        alpha = alpha / c
    return total
