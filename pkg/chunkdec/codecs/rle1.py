# SPDX-License-Identifier: LGPL-2.1+

"""ORC run length encoding, version 1

Element width 1 uses the ORC byte RLE: a control byte c in 0..127 introduces a
run of c+3 copies of the following byte, a negative control byte -n introduces
n raw bytes. Wider elements use the ORC integer RLE: runs carry a signed delta
byte and a varint base, literals are varints.
"""

from __future__ import annotations

from typing import List, Sequence

from ..bitstream import InputBitStream, encode_varint_s64, encode_varint_u64
from ..outwindow import OutputWindow

MIN_RUN = 3
MAX_RUN = 127 + MIN_RUN
MAX_LITERALS = 128
MIN_DELTA = -128
MAX_DELTA = 127


def _signed_byte(b: int) -> int:
    return b - 256 if b >= 128 else b


def decode_rle_v1(stream: InputBitStream, out: OutputWindow, signed: bool = False) -> None:
    if out.element_width == 1:
        _decode_byte_rle(stream, out)
        return

    read_value = stream.read_varint_s64 if signed else stream.read_varint_u64

    while not out.is_full() and not stream.at_end():
        control = _signed_byte(stream.read_byte())
        if control >= 0:
            length = control + MIN_RUN
            delta = _signed_byte(stream.read_byte())
            base = read_value()
            out.write_run(base, length, delta)
        else:
            out.write_elements([read_value() for _ in range(-control)])


def _decode_byte_rle(stream: InputBitStream, out: OutputWindow) -> None:
    while not out.is_full() and not stream.at_end():
        control = _signed_byte(stream.read_byte())
        if control >= 0:
            out.write_run(stream.read_byte(), control + MIN_RUN, 0)
        else:
            out.write_bytes(stream.read_bytes(-control))


def encode_rle_v1(values: Sequence[int], element_width: int = 8, signed: bool = False) -> bytes:
    """Greedy encoder: runs of at least three where possible, literal groups otherwise"""
    if element_width == 1:
        return _encode_byte_rle(values)

    write_value = encode_varint_s64 if signed else encode_varint_u64
    out = bytearray()
    literals: List[int] = []

    def flush() -> None:
        if literals:
            out.append(256 - len(literals))
            for v in literals:
                out.extend(write_value(v))
            literals.clear()

    n = len(values)
    i = 0
    while i < n:
        if i + 2 < n:
            delta = values[i + 1] - values[i]
            if MIN_DELTA <= delta <= MAX_DELTA and values[i + 2] - values[i + 1] == delta:
                length = 3
                while i + length < n and length < MAX_RUN and values[i + length] - values[i + length - 1] == delta:
                    length += 1
                flush()
                out.append(length - MIN_RUN)
                out.append(delta & 0xFF)
                out.extend(write_value(values[i]))
                i += length
                continue

        literals.append(values[i])
        if len(literals) == MAX_LITERALS:
            flush()
        i += 1

    flush()
    return bytes(out)


def _encode_byte_rle(values: Sequence[int]) -> bytes:
    out = bytearray()
    literals = bytearray()

    def flush() -> None:
        if literals:
            out.append(256 - len(literals))
            out.extend(literals)
            literals.clear()

    n = len(values)
    i = 0
    while i < n:
        v = values[i] & 0xFF
        length = 1
        while i + length < n and length < MAX_RUN and values[i + length] & 0xFF == v:
            length += 1

        if length >= MIN_RUN:
            flush()
            out.append(length - MIN_RUN)
            out.append(v)
        else:
            for _ in range(length):
                literals.append(v)
                if len(literals) == MAX_LITERALS:
                    flush()
        i += length

    flush()
    return bytes(out)
