# SPDX-License-Identifier: LGPL-2.1+

"""Bit-granular access to one chunk's compressed bytes

InputBitStream reads a chunk through a ring buffer that is refilled one
block (128 bytes by default, one cache line) at a time, and only when a
request cannot be served from what is already buffered. Decoders never
touch the chunk bytes directly.
"""

from __future__ import annotations

from typing import Optional, Union

from .backend import BitOrder, BitReadError, BitReadErrorKind, CodecError, CodecErrorKind

MAX_FETCH_BITS = 57
DEFAULT_BLOCK_SIZE = 128
MAX_VARINT_BYTES = 10
U64_MASK = (1 << 64) - 1

ByteView = Union[bytes, bytearray, memoryview]


class InputBitStream:
    """Reads bits from a chunk, refilling a ring buffer block by block

    With lsb_first the first bit read is the least significant bit of the
    result (RFC 1951 packing); with msb_first it is the most significant one
    (ORC bit-packed integers).
    """

    def __init__(
        self,
        chunk: ByteView,
        bit_order: BitOrder = BitOrder.lsb_first,
        block_size: int = DEFAULT_BLOCK_SIZE,
    ) -> None:
        if block_size <= 0:
            raise ValueError(f"block size must be positive, got {block_size}")

        self._source = memoryview(chunk).cast("B")
        self._source_offset = 0
        self.bit_order = bit_order
        self.block_size = block_size

        # Twice the block size, and always room for one full block on top of
        # the 8 bytes a 57 bit request may need.
        self._capacity = max(2 * block_size, block_size + 8)
        self._ring = bytearray(self._capacity)
        self._head = 0
        self._buffered = 0
        self._bit_pos = 0

        self.refill_count = 0
        self.sync_points = 0

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def source_offset(self) -> int:
        return self._source_offset

    @property
    def bit_pos(self) -> int:
        return self._bit_pos

    @property
    def buffered(self) -> int:
        return self._buffered

    @property
    def bits_consumed(self) -> int:
        return (self._source_offset - self._buffered) * 8 + self._bit_pos

    @property
    def bits_remaining(self) -> int:
        return len(self._source) * 8 - self.bits_consumed

    def at_end(self) -> bool:
        return self.bits_remaining == 0

    def _refill(self) -> None:
        n = min(self.block_size, len(self._source) - self._source_offset)
        assert n > 0 and self._capacity - self._buffered >= self.block_size

        # barrier
        self.sync_points += 1

        tail = (self._head + self._buffered) % self._capacity
        first = min(n, self._capacity - tail)
        src = self._source_offset
        self._ring[tail : tail + first] = self._source[src : src + first]
        if first < n:
            self._ring[0 : n - first] = self._source[src + first : src + n]

        self._source_offset += n
        self._buffered += n
        self.refill_count += 1

        # barrier
        self.sync_points += 1

    def _ensure(self, nbits: int) -> int:
        "Refill until nbits are buffered or the source is exhausted, return the buffered bit count"
        available = self._buffered * 8 - self._bit_pos
        while available < nbits and self._source_offset < len(self._source):
            self._refill()
            available = self._buffered * 8 - self._bit_pos
        return available

    def _window(self, nbytes: int) -> int:
        head = self._head
        end = head + nbytes
        if end <= self._capacity:
            raw = self._ring[head:end]
        else:
            raw = self._ring[head:] + self._ring[: end - self._capacity]
        byteorder = "little" if self.bit_order == BitOrder.lsb_first else "big"
        return int.from_bytes(raw, byteorder)

    def _extract(self, n: int) -> int:
        nbytes = (self._bit_pos + n + 7) // 8
        window = self._window(nbytes)
        if self.bit_order == BitOrder.lsb_first:
            return (window >> self._bit_pos) & ((1 << n) - 1)
        return (window >> (nbytes * 8 - self._bit_pos - n)) & ((1 << n) - 1)

    def _advance(self, n: int) -> None:
        total = self._bit_pos + n
        whole = total >> 3
        self._head = (self._head + whole) % self._capacity
        self._buffered -= whole
        self._bit_pos = total & 7

    @staticmethod
    def _check_width(n: int) -> None:
        if n < 1:
            raise ValueError(f"bit count must be at least 1, got {n}")
        if n > MAX_FETCH_BITS:
            raise BitReadError(BitReadErrorKind.width_too_large, f"{n} bits requested, at most {MAX_FETCH_BITS}")

    def fetch_bits(self, n: int) -> int:
        "Fetch the next n bits in the compressed stream."
        self._check_width(n)
        if self._ensure(n) < n:
            raise BitReadError(BitReadErrorKind.past_end, f"{n} bits requested, {self.bits_remaining} left")
        value = self._extract(n)
        self._advance(n)
        return value

    def peek_bits(self, n: int) -> int:
        """Peek at the next n bits in the compressed stream.

        Bits past the end of the chunk read as zero, as long as at least one
        bit is left.
        """
        self._check_width(n)
        available = self._ensure(n)
        if available >= n:
            return self._extract(n)
        if available == 0:
            raise BitReadError(BitReadErrorKind.past_end, "no bits left to peek at")
        value = self._extract(available)
        if self.bit_order == BitOrder.msb_first:
            value <<= n - available
        return value

    def align_to_byte(self) -> None:
        if self._bit_pos:
            self._advance(8 - self._bit_pos)

    def read_byte(self) -> int:
        if self._bit_pos:
            raise ValueError("stream is not byte aligned")
        if not self._buffered:
            if self._source_offset >= len(self._source):
                raise BitReadError(BitReadErrorKind.past_end, "1 byte requested, none left")
            self._refill()
        b = self._ring[self._head]
        self._head = (self._head + 1) % self._capacity
        self._buffered -= 1
        return b

    def read_bytes(self, n: int, dst: Optional[bytearray] = None) -> bytes:
        "Consume n whole bytes, through the ring buffer; extend dst with them when given"
        if self._bit_pos:
            raise ValueError("stream is not byte aligned")
        if n * 8 > self.bits_remaining:
            raise BitReadError(BitReadErrorKind.past_end, f"{n} bytes requested, {self.bits_remaining // 8} left")

        parts = []
        left = n
        while left:
            if not self._buffered:
                self._refill()
            take = min(left, self._buffered, self._capacity - self._head)
            parts.append(bytes(self._ring[self._head : self._head + take]))
            self._head = (self._head + take) % self._capacity
            self._buffered -= take
            left -= take

        data = b"".join(parts)
        if dst is not None:
            dst += data
        return data

    def read_varint_u64(self) -> int:
        "Base-128 varint, low groups first, continuation bit 0x80"
        result = 0
        for i in range(MAX_VARINT_BYTES):
            b = self.read_byte()
            result |= (b & 0x7F) << (7 * i)
            if not b & 0x80:
                if result > U64_MASK:
                    raise CodecError(CodecErrorKind.varint_overflow, f"varint value {result} exceeds 64 bits")
                return result
        raise CodecError(CodecErrorKind.varint_overflow, f"varint longer than {MAX_VARINT_BYTES} bytes")

    def read_varint_s64(self) -> int:
        return zigzag_decode(self.read_varint_u64())


class OutputBitStream:
    """Accumulates bits for the encoders, in either bit order"""

    def __init__(self, bit_order: BitOrder = BitOrder.lsb_first) -> None:
        self.bit_order = bit_order
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write_bits(self, value: int, n: int) -> None:
        if n == 0:
            return
        value &= (1 << n) - 1
        if self.bit_order == BitOrder.lsb_first:
            self._acc |= value << self._nbits
            self._nbits += n
            while self._nbits >= 8:
                self._out.append(self._acc & 0xFF)
                self._acc >>= 8
                self._nbits -= 8
        else:
            self._acc = (self._acc << n) | value
            self._nbits += n
            while self._nbits >= 8:
                self._nbits -= 8
                self._out.append((self._acc >> self._nbits) & 0xFF)
            self._acc &= (1 << self._nbits) - 1

    def align_to_byte(self) -> None:
        if self._nbits:
            self.write_bits(0, 8 - self._nbits)

    def write_bytes(self, data: ByteView) -> None:
        if self._nbits:
            raise ValueError("stream is not byte aligned")
        self._out += data

    def __len__(self) -> int:
        return len(self._out)

    def getvalue(self) -> bytes:
        "Everything written so far, the last partial byte padded with zero bits"
        self.align_to_byte()
        return bytes(self._out)


def zigzag_encode(value: int) -> int:
    return ((value << 1) ^ (value >> 63)) & U64_MASK


def zigzag_decode(value: int) -> int:
    return (value >> 1) ^ -(value & 1)


def encode_varint_u64(value: int) -> bytes:
    if not 0 <= value <= U64_MASK:
        raise ValueError(f"{value} does not fit an unsigned 64 bit varint")
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def encode_varint_s64(value: int) -> bytes:
    return encode_varint_u64(zigzag_encode(value))
