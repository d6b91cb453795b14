"""Kernel selection: compiled Cython core when importable, pure Python otherwise.

Set ``BLOCKENTROPY_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _fallback as python_kernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("BLOCKENTROPY_PURE_PYTHON", "") in ("", "0"):
    _impl = compiled_kernels
    BACKEND = "cython"
else:
    _impl = python_kernels
    BACKEND = "python"


def markov_walk(u, cum_init, cum_trans):
    return _impl.markov_walk(
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(cum_init, dtype=np.float64),
        np.ascontiguousarray(cum_trans, dtype=np.float64),
    )


def pack_bits(values, widths):
    """Pack ``(value, width)`` fields MSB-first; returns ``(bytes, nbits)``."""
    return _impl.pack_bits(
        np.ascontiguousarray(values, dtype=np.uint64),
        np.ascontiguousarray(widths, dtype=np.uint8),
    )


def decode_body(buf, start, nbits, nblocks, raw_width, first, counts, offsets, maxlen):
    impl = _impl if raw_width <= 63 else python_kernels
    return impl.decode_body(
        np.frombuffer(buf, dtype=np.uint8), int(start), int(nbits), int(nblocks), int(raw_width),
        np.ascontiguousarray(first, dtype=np.int64),
        np.ascontiguousarray(counts, dtype=np.int64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        int(maxlen),
    )


def hmm_forward_log2(obs, init, trans, output_map):
    return _impl.hmm_forward_log2(
        np.ascontiguousarray(obs, dtype=np.int64),
        np.ascontiguousarray(init, dtype=np.float64),
        np.ascontiguousarray(trans, dtype=np.float64),
        np.ascontiguousarray(output_map, dtype=np.int64),
    )
