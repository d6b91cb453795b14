"""MSB-first bit fields: a field-list writer and a bounded reader."""
from __future__ import annotations

import numpy as np

from .kernels import pack_bits

CHUNK = 32


class BitWriter:
    """Collects ``(value, width)`` fields and packs them in one pass."""

    def __init__(self):
        self._values = []
        self._widths = []
        self._pending_v = []
        self._pending_w = []

    def _flush(self):
        if self._pending_v:
            self._values.append(np.array(self._pending_v, dtype=np.uint64))
            self._widths.append(np.array(self._pending_w, dtype=np.uint8))
            self._pending_v, self._pending_w = [], []

    def write(self, value: int, width: int) -> None:
        if width < 0 or value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        # wide fields go out as 32-bit chunks, most significant first
        while width > CHUNK:
            width -= CHUNK
            self._pending_v.append((value >> width) & 0xFFFFFFFF)
            self._pending_w.append(CHUNK)
        self._pending_v.append(value & ((1 << width) - 1))
        self._pending_w.append(width)

    def write_gamma(self, value: int) -> None:
        """Elias-gamma code of ``value >= 1``: 2*floor(log2 v)+1 bits."""
        if value < 1:
            raise ValueError("Elias gamma needs a positive integer")
        nbits = value.bit_length()
        self.write(0, nbits - 1)
        self.write(value, nbits)

    def write_fields(self, values: np.ndarray, widths: np.ndarray) -> None:
        """Append many fields at once (each at most 64 bits wide)."""
        self._flush()
        self._values.append(np.asarray(values, dtype=np.uint64).ravel())
        self._widths.append(np.asarray(widths, dtype=np.uint8).ravel())

    def getvalue(self) -> tuple[bytes, int]:
        self._flush()
        if not self._values:
            return b"", 0
        return pack_bits(np.concatenate(self._values), np.concatenate(self._widths))


class BitReader:
    """Reads fields from the first ``nbits`` bits of ``data``."""

    def __init__(self, data: bytes, nbits: int | None = None, pos: int = 0):
        self.data = bytes(data)
        self.nbits = 8 * len(self.data) if nbits is None else nbits
        self.pos = pos

    def read(self, width: int) -> int:
        if width == 0:
            return 0
        end = self.pos + width
        if end > self.nbits:
            raise EOFError(f"need {width} bits at offset {self.pos}, only {self.nbits - self.pos} left")
        lo, hi = self.pos >> 3, (end + 7) >> 3
        chunk = int.from_bytes(self.data[lo:hi], "big")
        value = (chunk >> (8 * hi - end)) & ((1 << width) - 1)
        self.pos = end
        return value

    def read_gamma(self) -> int:
        zeros = 0
        while self.read(1) == 0:
            zeros += 1
            if zeros > 64:
                raise ValueError("Elias gamma prefix too long")
        return (1 << zeros) | self.read(zeros)
