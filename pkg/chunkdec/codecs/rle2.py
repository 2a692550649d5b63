# SPDX-License-Identifier: LGPL-2.1+

"""ORC run length encoding, version 2

The top two bits of each header byte select one of four sub-encodings.
Bit-packed fields are read most significant bit first and every sub-encoding
ends on a byte boundary.
"""

from __future__ import annotations

import enum
import itertools
from typing import List, Sequence, Tuple

from ..backend import BitOrder, CodecError, CodecErrorKind
from ..bitstream import (
    InputBitStream,
    OutputBitStream,
    encode_varint_s64,
    encode_varint_u64,
    zigzag_decode,
    zigzag_encode,
)
from ..outwindow import OutputWindow

MAX_RUN = 512
MIN_REPEAT = 3
MAX_SHORT_REPEAT = 10
MIN_DELTA_RUN = 8

# 5 bit width codes; 0..23 stand for 1..24 bits
WIDTHS = list(range(1, 25)) + [26, 28, 30, 32, 40, 48, 56, 64]


class Rle2SubEncoding(enum.Enum):
    short_repeat = 0
    direct = 1
    patched_base = 2
    delta = 3

    @classmethod
    def from_header(cls, header: int) -> Rle2SubEncoding:
        return cls(header >> 6)


def decode_width(code: int) -> int:
    return WIDTHS[code]


def encode_width(width: int) -> int:
    return WIDTHS.index(closest_fixed_bits(width))


def closest_fixed_bits(n: int) -> int:
    "The smallest encodable width that holds n bits"
    if n == 0:
        return 1
    for w in WIDTHS:
        if w >= n:
            return w
    return 64


def _read_packed(stream: InputBitStream, width: int) -> int:
    if width <= 32:
        return stream.fetch_bits(width)
    high = stream.fetch_bits(width - 32)
    return (high << 32) | stream.fetch_bits(32)


def _read_packed_list(stream: InputBitStream, width: int, count: int) -> List[int]:
    values = [_read_packed(stream, width) for _ in range(count)]
    stream.align_to_byte()
    return values


def _read_big_endian(stream: InputBitStream, nbytes: int) -> int:
    return int.from_bytes(stream.read_bytes(nbytes), "big")


def _check_width(width: int, out: OutputWindow, what: str) -> None:
    if width > 8 * out.element_width:
        raise CodecError(
            CodecErrorKind.invalid_width_code, f"{what} width {width} bits exceeds {out.element_width} byte elements"
        )


def _run_length(stream: InputBitStream, header: int) -> int:
    return (((header & 0x01) << 8) | stream.read_byte()) + 1


def _decode_short_repeat(stream: InputBitStream, out: OutputWindow, header: int, signed: bool) -> None:
    nbytes = ((header >> 3) & 0x07) + 1
    count = (header & 0x07) + MIN_REPEAT
    if nbytes > out.element_width:
        raise CodecError(
            CodecErrorKind.invalid_width_code, f"repeat of {nbytes} byte values into {out.element_width} byte elements"
        )
    value = _read_big_endian(stream, nbytes)
    if signed:
        value = zigzag_decode(value)
    out.write_run(value, count, 0)


def _decode_direct(stream: InputBitStream, out: OutputWindow, header: int, signed: bool) -> None:
    width = decode_width((header >> 1) & 0x1F)
    length = _run_length(stream, header)
    _check_width(width, out, "direct")
    values = _read_packed_list(stream, width, length)
    if signed:
        values = [zigzag_decode(v) for v in values]
    out.write_elements(values)


def _decode_patched_base(stream: InputBitStream, out: OutputWindow, header: int) -> None:
    width = decode_width((header >> 1) & 0x1F)
    length = _run_length(stream, header)

    third = stream.read_byte()
    base_bytes = ((third >> 5) & 0x07) + 1
    patch_width = decode_width(third & 0x1F)

    fourth = stream.read_byte()
    gap_width = ((fourth >> 5) & 0x07) + 1
    patch_count = fourth & 0x1F

    if width + patch_width > 64:
        raise CodecError(CodecErrorKind.patch_overflow, f"{width} bit values patched with {patch_width} more bits")
    if gap_width + patch_width > 64:
        raise CodecError(CodecErrorKind.patch_overflow, f"patch entries of {gap_width + patch_width} bits")

    # The base is sign-magnitude, the sign in the top bit of its first byte.
    base = _read_big_endian(stream, base_bytes)
    sign_bit = 1 << (8 * base_bytes - 1)
    if base & sign_bit:
        base = -(base & ~sign_bit)

    _check_width(width, out, "patched")
    values = _read_packed_list(stream, width, length)
    entries = _read_packed_list(stream, closest_fixed_bits(gap_width + patch_width), patch_count)

    patch_mask = (1 << patch_width) - 1
    position = 0
    for entry in entries:
        gap = entry >> patch_width
        patch = entry & patch_mask
        position += gap
        if gap == 255 and patch == 0:
            continue
        if position >= length:
            raise CodecError(CodecErrorKind.patch_overflow, f"patch at position {position} of a {length} value run")
        values[position] |= patch << width

    patched = [base + v for v in values]
    _check_width(max(v.bit_length() for v in patched), out, "patched")
    out.write_elements(patched)


def _decode_delta(stream: InputBitStream, out: OutputWindow, header: int, signed: bool) -> None:
    code = (header >> 1) & 0x1F
    width = decode_width(code) if code else 0
    length = _run_length(stream, header)

    base = stream.read_varint_s64() if signed else stream.read_varint_u64()
    delta_base = stream.read_varint_s64()

    if length == 1:
        out.write_literal(base)
        return

    if width == 0:
        out.write_run(base, length, delta_base)
        return

    magnitudes = _read_packed_list(stream, width, length - 2)
    steps = [delta_base] + [-m if delta_base < 0 else m for m in magnitudes]

    out.write_literal(base)
    value = base
    for step, group in itertools.groupby(steps):
        count = sum(1 for _ in group)
        if count == 1:
            value += step
            out.write_literal(value)
        else:
            out.write_run(value + step, count, step)
            value += step * count


def decode_rle_v2(stream: InputBitStream, out: OutputWindow, signed: bool = False) -> None:
    while not out.is_full() and not stream.at_end():
        header = stream.read_byte()
        encoding = Rle2SubEncoding.from_header(header)
        if encoding == Rle2SubEncoding.short_repeat:
            _decode_short_repeat(stream, out, header, signed)
        elif encoding == Rle2SubEncoding.direct:
            _decode_direct(stream, out, header, signed)
        elif encoding == Rle2SubEncoding.patched_base:
            _decode_patched_base(stream, out, header)
        else:
            _decode_delta(stream, out, header, signed)


def _equal_run(values: Sequence[int], i: int) -> int:
    n = min(len(values), i + MAX_RUN)
    j = i + 1
    while j < n and values[j] == values[i]:
        j += 1
    return j - i


def _monotone_run(values: Sequence[int], i: int, limit: int = MAX_RUN) -> Tuple[int, int]:
    "Length of the stretch from i whose steps share the sign of the first step, and the first step"
    n = min(len(values), i + limit)
    if i + 1 >= n:
        return 1, 0
    first = values[i + 1] - values[i]
    if abs(first) >= 1 << 63:
        return 1, 0
    j = i + 1
    while j < n:
        step = values[j] - values[j - 1]
        if abs(step) >= 1 << 63 or (step != 0 and (step < 0) != (first < 0)):
            break
        j += 1
    return j - i, first


def _header(encoding: Rle2SubEncoding, width_code: int, length: int) -> bytes:
    return bytes([(encoding.value << 6) | (width_code << 1) | ((length - 1) >> 8), (length - 1) & 0xFF])


def _encode_repeat(value: int, count: int, signed: bool) -> bytes:
    if signed:
        value = zigzag_encode(value)
    nbytes = max(1, (value.bit_length() + 7) // 8)
    head = (Rle2SubEncoding.short_repeat.value << 6) | ((nbytes - 1) << 3) | (count - MIN_REPEAT)
    return bytes([head]) + value.to_bytes(nbytes, "big")


def _encode_delta(values: Sequence[int], signed: bool) -> bytes:
    steps = [b - a for a, b in zip(values, values[1:])]
    base = encode_varint_s64(values[0]) if signed else encode_varint_u64(values[0])

    if all(s == steps[0] for s in steps):
        return _header(Rle2SubEncoding.delta, 0, len(values)) + base + encode_varint_s64(steps[0])

    magnitudes = [abs(s) for s in steps[1:]]
    # width code 0 marks a fixed delta, so packed deltas are at least 2 bits wide
    width = max(2, closest_fixed_bits(max(m.bit_length() for m in magnitudes)))
    packed = OutputBitStream(BitOrder.msb_first)
    for m in magnitudes:
        packed.write_bits(m, width)
    return (
        _header(Rle2SubEncoding.delta, encode_width(width), len(values))
        + base
        + encode_varint_s64(steps[0])
        + packed.getvalue()
    )


def _encode_direct(values: Sequence[int], signed: bool) -> bytes:
    if signed:
        values = [zigzag_encode(v) for v in values]
    width = closest_fixed_bits(max(v.bit_length() for v in values))
    packed = OutputBitStream(BitOrder.msb_first)
    for v in values:
        packed.write_bits(v, width)
    return _header(Rle2SubEncoding.direct, encode_width(width), len(values)) + packed.getvalue()


def encode_rle_v2(values: Sequence[int], signed: bool = False) -> bytes:
    """Short repeats for constant runs of 3 to 10, fixed deltas for longer ones,
    deltas for monotone stretches and direct groups for everything else"""
    out = bytearray()
    direct: List[int] = []

    def flush() -> None:
        if direct:
            out.extend(_encode_direct(direct, signed))
            direct.clear()

    n = len(values)
    i = 0
    while i < n:
        repeat = _equal_run(values, i)
        if repeat >= MIN_REPEAT:
            flush()
            if repeat <= MAX_SHORT_REPEAT:
                out.extend(_encode_repeat(values[i], repeat, signed))
            else:
                out.extend(_encode_delta(values[i : i + repeat], signed))
            i += repeat
            continue

        run, _ = _monotone_run(values, i)
        if run >= MIN_DELTA_RUN:
            flush()
            out.extend(_encode_delta(values[i : i + run], signed))
            i += run
            continue

        direct.append(values[i])
        if len(direct) == MAX_RUN:
            flush()
        i += 1

    flush()
    return bytes(out)
