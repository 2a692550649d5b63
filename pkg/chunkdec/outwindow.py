# SPDX-License-Identifier: LGPL-2.1+

"""Per-chunk output buffer with the three writing primitives

Decoders emit literals, runs and back-reference copies. The buffer is sized
from the chunk index up front, bytes before write_pos are final and form the
dictionary for copy_within().
"""

from __future__ import annotations

import dataclasses
from typing import Sequence, Union

import numpy as np

from .backend import CodecError, CodecErrorKind

WORD = 4
LANES = 32

ByteView = Union[bytes, bytearray, memoryview]


def roundup(x: int, step: int) -> int:
    return ((x + step - 1) // step) * step


@dataclasses.dataclass
class CopyStats:
    overlap_copies: int = 0
    aligned_word_iterations: int = 0
    head_pad_bytes: int = 0

    def add(self, other: CopyStats) -> None:
        self.overlap_copies += other.overlap_copies
        self.aligned_word_iterations += other.aligned_word_iterations
        self.head_pad_bytes += other.head_pad_bytes


class OutputWindow:
    def __init__(self, expected_length: int, element_width: int = 1, fill: int = 0) -> None:
        if element_width not in (1, 2, 4, 8):
            raise ValueError(f"element width must be 1, 2, 4 or 8, got {element_width}")
        if expected_length < 0:
            raise ValueError(f"expected length must not be negative, got {expected_length}")

        self.expected_length = expected_length
        self.element_width = element_width
        self.write_pos = 0

        # One spare word past the end so the funnel shift may always load word q+1.
        self._buffer = bytearray([fill & 0xFF]) * (roundup(expected_length, WORD) + WORD)
        self._bytes = np.frombuffer(self._buffer, dtype=np.uint8)
        self._words = self._bytes.view("<u4")

        self.stats = CopyStats()
        self.runs_written = 0
        self.literals_written = 0

    @property
    def remaining(self) -> int:
        return self.expected_length - self.write_pos

    def is_full(self) -> bool:
        return self.write_pos == self.expected_length

    def _reserve(self, nbytes: int) -> int:
        if nbytes > self.remaining:
            raise CodecError(
                CodecErrorKind.output_overflow,
                f"writing {nbytes} bytes at {self.write_pos} exceeds the expected {self.expected_length}",
            )
        pos = self.write_pos
        self.write_pos += nbytes
        return pos

    def write_byte(self, b: int) -> None:
        pos = self._reserve(1)
        self._buffer[pos] = b & 0xFF
        self.literals_written += 1

    def write_bytes(self, data: ByteView) -> None:
        n = len(data)
        pos = self._reserve(n)
        self._buffer[pos : pos + n] = data
        self.literals_written += n

    def write_literal(self, value: int) -> None:
        "One element, little-endian, wrapping at element_width"
        w = self.element_width
        pos = self._reserve(w)
        self._buffer[pos : pos + w] = (value & ((1 << (8 * w)) - 1)).to_bytes(w, "little")
        self.literals_written += 1

    def write_elements(self, values: Sequence[int]) -> None:
        "A group of literal elements, same layout as repeated write_literal()"
        if not values:
            return
        w = self.element_width
        pos = self._reserve(len(values) * w)
        mask = (1 << 64) - 1
        packed = np.array([v & mask for v in values], dtype=np.uint64).astype(f"<u{w}")
        self._bytes[pos : pos + len(values) * w] = packed.view(np.uint8)
        self.literals_written += len(values)

    def write_run(self, init: int, length: int, delta: int) -> None:
        "Elements init, init+delta, init+2*delta, ... in two's complement at element_width"
        if length == 0:
            return
        w = self.element_width
        pos = self._reserve(length * w)

        mask = (1 << 64) - 1
        steps = np.arange(length, dtype=np.uint64)
        values = np.multiply(steps, np.uint64(delta & mask)) + np.uint64(init & mask)
        self._bytes[pos : pos + length * w] = values.astype(f"<u{w}").view(np.uint8)
        self.runs_written += 1

    def copy_within(self, offset: int, length: int) -> None:
        """Append length bytes copied from offset bytes back

        Byte-for-byte equal to the naive forward loop, so a length larger than
        offset replicates the last offset bytes circularly.
        """
        if not 1 <= offset <= self.write_pos:
            raise CodecError(CodecErrorKind.bad_offset, f"offset {offset} with {self.write_pos} bytes written")
        if length > self.remaining:
            raise CodecError(
                CodecErrorKind.output_overflow,
                f"copy of {length} bytes at {self.write_pos} exceeds the expected {self.expected_length}",
            )
        if length == 0:
            return

        buf = self._buffer
        pos = self.write_pos
        overlap = length > offset

        # Byte writes until the destination is word aligned.
        pad = min(-pos % WORD, length)
        for k in range(pad):
            buf[pos + k] = buf[pos + k - offset]
        self.stats.head_pad_bytes += pad
        pos += pad
        left = length - pad

        nwords = left // WORD
        tail = left % WORD
        q = pos // WORD

        if overlap:
            self.stats.overlap_copies += 1
            # The last offset bytes repeat with period offset from here on.
            window = np.resize(self._bytes[pos - offset : pos], nwords * WORD + tail)
            if nwords:
                self._words[q : q + nwords] = window[: nwords * WORD].view("<u4")
            if tail:
                self._bytes[pos + nwords * WORD : pos + left] = window[nwords * WORD :]
        else:
            src = pos - offset
            if nwords:
                sq, shift = divmod(src, WORD)
                if shift == 0:
                    self._words[q : q + nwords] = self._words[sq : sq + nwords]
                else:
                    lo = self._words[sq : sq + nwords].astype(np.uint64)
                    hi = self._words[sq + 1 : sq + nwords + 1].astype(np.uint64)
                    joined = (lo | (hi << np.uint64(32))) >> np.uint64(8 * shift)
                    self._words[q : q + nwords] = (joined & np.uint64(0xFFFFFFFF)).astype("<u4")
            for k in range(nwords * WORD, left):
                buf[pos + k] = buf[src + k]

        self.stats.aligned_word_iterations += (nwords + LANES - 1) // LANES
        self.write_pos += length

    def view(self) -> memoryview:
        "The bytes written so far"
        return memoryview(self._buffer)[: self.write_pos]

    def finish(self, strict: bool = False) -> bytes:
        if strict and self.write_pos < self.expected_length:
            raise CodecError(
                CodecErrorKind.under_run, f"{self.write_pos} bytes written, {self.expected_length} expected"
            )
        return bytes(self._buffer[: self.write_pos])
