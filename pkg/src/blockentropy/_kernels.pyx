# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Must stay bit-for-bit equivalent to ``_fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2, INFINITY
from libc.stdint cimport int64_t, uint64_t, uint8_t

cnp.import_array()


def markov_walk(const double[::1] u, const double[::1] cum_init, const double[:, ::1] cum_trans):
    cdef Py_ssize_t n = u.shape[0], s = cum_init.shape[0], t, j
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] x = out
    if n == 0:
        return out
    j = 0
    while j < s - 1 and cum_init[j] <= u[0]:
        j += 1
    x[0] = j
    for t in range(1, n):
        j = 0
        while j < s - 1 and cum_trans[x[t - 1], j] <= u[t]:
            j += 1
        x[t] = j
    return out


def pack_bits(const uint64_t[::1] values, const uint8_t[::1] widths):
    """Concatenate ``values[i]`` as ``widths[i]``-bit MSB-first fields."""
    cdef Py_ssize_t m = values.shape[0], i
    cdef int64_t total = 0, pos = 0
    cdef int b
    cdef uint64_t v
    for i in range(m):
        total += widths[i]
    out = np.zeros((total + 7) // 8, dtype=np.uint8)
    cdef uint8_t[::1] buf = out
    for i in range(m):
        v = values[i]
        for b in range(widths[i] - 1, -1, -1):
            if (v >> b) & 1:
                buf[pos >> 3] |= <uint8_t>(0x80 >> (pos & 7))
            pos += 1
    return out.tobytes(), int(total)


cdef inline int _bit(const uint8_t[::1] buf, int64_t pos) nogil:
    return (buf[pos >> 3] >> (7 - (pos & 7))) & 1


def decode_body(const uint8_t[::1] buf, int64_t start, int64_t nbits, int64_t nblocks, int raw_width,
                const int64_t[::1] first, const int64_t[::1] counts, const int64_t[::1] offsets, int maxlen):
    """Decode ``nblocks`` flagged blocks; returns (is_raw, values, end_bit).

    Coded blocks yield their canonical index, raw blocks their integer value.
    """
    out_kind = np.zeros(nblocks, dtype=np.uint8)
    out_val = np.zeros(nblocks, dtype=np.int64)
    cdef uint8_t[::1] kind = out_kind
    cdef int64_t[::1] val = out_val
    cdef int64_t pos = start, code, i
    cdef int l, b
    cdef bint found
    for i in range(nblocks):
        if pos >= nbits:
            raise ValueError(f"payload ends inside block {i}")
        if _bit(buf, pos):
            pos += 1
            if pos + raw_width > nbits:
                raise ValueError(f"payload ends inside raw block {i}")
            code = 0
            for b in range(raw_width):
                code = (code << 1) | _bit(buf, pos)
                pos += 1
            kind[i] = 1
            val[i] = code
        else:
            pos += 1
            code = 0
            found = False
            for l in range(1, maxlen + 1):
                if pos >= nbits:
                    raise ValueError(f"payload ends inside codeword {i}")
                code = (code << 1) | _bit(buf, pos)
                pos += 1
                if counts[l] > 0 and code >= first[l] and code - first[l] < counts[l]:
                    val[i] = offsets[l] + code - first[l]
                    found = True
                    break
            if not found:
                raise ValueError(f"invalid codeword in block {i}")
    return out_kind, out_val, int(pos)


def hmm_forward_log2(const int64_t[::1] obs, const double[::1] init, const double[:, ::1] trans,
                     const int64_t[::1] output_map):
    """log2 P(obs) for a deterministic-output hidden Markov chain (scaled forward pass)."""
    cdef Py_ssize_t n = obs.shape[0], s = init.shape[0], t, i, j
    cdef double c, acc, total = 0.0
    alpha_arr = np.zeros(s)
    nxt_arr = np.zeros(s)
    cdef double[::1] alpha = alpha_arr, nxt = nxt_arr, tmp
    if n == 0:
        return 0.0
    c = 0.0
    for i in range(s):
        alpha[i] = init[i] if output_map[i] == obs[0] else 0.0
        c += alpha[i]
    if c <= 0.0:
        return -INFINITY
    total += log2(c)
    for i in range(s):
        alpha[i] /= c
    for t in range(1, n):
        c = 0.0
        for j in range(s):
            if output_map[j] != obs[t]:
                nxt[j] = 0.0
                continue
            acc = 0.0
            for i in range(s):
                acc += alpha[i] * trans[i, j]
            nxt[j] = acc
            c += acc
        if c <= 0.0:
            return -INFINITY
        total += log2(c)
        for j in range(s):
            nxt[j] /= c
        tmp = alpha
        alpha = nxt
        nxt = tmp
    return total
