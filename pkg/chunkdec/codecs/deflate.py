# SPDX-License-Identifier: LGPL-2.1+

"""Raw deflate streams (RFC 1951), without zlib or gzip wrapping

Every chunk is a self-contained stream: back references never reach before
the start of the chunk.
"""

from __future__ import annotations

import bisect
import enum
import zlib
from typing import Dict, List, Optional, Tuple

from ..backend import BitOrder, CodecError, CodecErrorKind
from ..bitstream import InputBitStream, OutputBitStream
from ..outwindow import OutputWindow
from .huffman import (
    FIXED_DISTANCE_TABLE,
    FIXED_LITERAL_TABLE,
    HuffmanTable,
    build_huffman_table,
    decode_symbol,
    reverse_bits,
)

END_OF_BLOCK = 256
MAX_STORED = 0xFFFF
WINDOW_SIZE = 32 * 1024
MIN_MATCH = 3
MAX_MATCH = 258
MAX_CHAIN = 16

LENGTH_BASE = [
    3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31,
    35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258,
]  # fmt: skip
LENGTH_EXTRA = [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0]
DISTANCE_BASE = [
    1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193,
    257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097, 6145, 8193, 12289, 16385, 24577,
]  # fmt: skip
DISTANCE_EXTRA = [0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13]

# Order in which the code length code lengths are stored
CODE_LENGTH_ORDER = [16, 17, 18, 0, 8, 7, 9, 6, 10, 5, 11, 4, 12, 3, 13, 2, 14, 1, 15]


class BlockType(enum.IntEnum):
    stored = 0
    fixed = 1
    dynamic = 2


def _read_dynamic_tables(stream: InputBitStream) -> Tuple[HuffmanTable, HuffmanTable]:
    nlen = stream.fetch_bits(5) + 257
    ndist = stream.fetch_bits(5) + 1
    ncode = stream.fetch_bits(4) + 4
    if nlen > 286 or ndist > 30:
        raise CodecError(CodecErrorKind.invalid_code, f"{nlen} length and {ndist} distance codes declared")

    code_length_lengths = [0] * 19
    for i in range(ncode):
        code_length_lengths[CODE_LENGTH_ORDER[i]] = stream.fetch_bits(3)
    code_length_table = build_huffman_table(code_length_lengths, require_complete=True)

    lengths: List[int] = []
    while len(lengths) < nlen + ndist:
        symbol = decode_symbol(stream, code_length_table)
        if symbol < 16:
            lengths.append(symbol)
            continue
        if symbol == 16:
            if not lengths:
                raise CodecError(CodecErrorKind.invalid_code, "repeat of a code length before the first one")
            value = lengths[-1]
            repeat = 3 + stream.fetch_bits(2)
        elif symbol == 17:
            value = 0
            repeat = 3 + stream.fetch_bits(3)
        else:
            value = 0
            repeat = 11 + stream.fetch_bits(7)
        if len(lengths) + repeat > nlen + ndist:
            raise CodecError(CodecErrorKind.invalid_code, "code length repeat runs past the declared codes")
        lengths += [value] * repeat

    if lengths[END_OF_BLOCK] == 0:
        raise CodecError(CodecErrorKind.invalid_code, "no code for the end of block symbol")

    literal_table = build_huffman_table(lengths[:nlen], require_complete=True)
    # An empty distance code is fine as long as no match refers to it.
    distance_table = build_huffman_table(lengths[nlen:], require_complete=True, allow_single=True)
    return literal_table, distance_table


def _inflate_block(stream: InputBitStream, out: OutputWindow, literals: HuffmanTable, distances: HuffmanTable) -> None:
    while True:
        symbol = decode_symbol(stream, literals)
        if symbol < 256:
            out.write_byte(symbol)
            continue
        if symbol == END_OF_BLOCK:
            return

        symbol -= 257
        if symbol >= len(LENGTH_BASE):
            raise CodecError(CodecErrorKind.invalid_code, f"length symbol {symbol + 257}")
        length = LENGTH_BASE[symbol]
        if LENGTH_EXTRA[symbol]:
            length += stream.fetch_bits(LENGTH_EXTRA[symbol])

        if distances.is_empty():
            raise CodecError(CodecErrorKind.invalid_code, "match in a block without distance codes")
        symbol = decode_symbol(stream, distances)
        if symbol >= len(DISTANCE_BASE):
            raise CodecError(CodecErrorKind.invalid_code, f"distance symbol {symbol}")
        distance = DISTANCE_BASE[symbol]
        if DISTANCE_EXTRA[symbol]:
            distance += stream.fetch_bits(DISTANCE_EXTRA[symbol])

        if distance > out.write_pos:
            raise CodecError(
                CodecErrorKind.distance_too_far, f"distance {distance} with {out.write_pos} bytes decoded"
            )
        out.copy_within(distance, length)


def _copy_stored(stream: InputBitStream, out: OutputWindow) -> None:
    stream.align_to_byte()
    length = stream.fetch_bits(16)
    nlength = stream.fetch_bits(16)
    if length ^ 0xFFFF != nlength:
        raise CodecError(CodecErrorKind.len_nlen_mismatch, f"LEN {length:04x} does not match NLEN {nlength:04x}")
    out.write_bytes(stream.read_bytes(length))


def decode_deflate(stream: InputBitStream, out: OutputWindow) -> None:
    if stream.bit_order != BitOrder.lsb_first:
        raise ValueError("deflate streams are read lsb first")

    final = False
    while not final:
        final = bool(stream.fetch_bits(1))
        block_type = stream.fetch_bits(2)
        if block_type == BlockType.stored:
            _copy_stored(stream, out)
        elif block_type == BlockType.fixed:
            _inflate_block(stream, out, FIXED_LITERAL_TABLE, FIXED_DISTANCE_TABLE)
        elif block_type == BlockType.dynamic:
            _inflate_block(stream, out, *_read_dynamic_tables(stream))
        else:
            raise CodecError(CodecErrorKind.bad_block_type, "reserved block type 3")


def encode_deflate_stored(data: bytes) -> bytes:
    out = OutputBitStream(BitOrder.lsb_first)
    blocks = [data[i : i + MAX_STORED] for i in range(0, len(data), MAX_STORED)] or [b""]
    for i, block in enumerate(blocks):
        out.write_bits(1 if i == len(blocks) - 1 else 0, 1)
        out.write_bits(BlockType.stored, 2)
        out.align_to_byte()
        out.write_bits(len(block), 16)
        out.write_bits(len(block) ^ 0xFFFF, 16)
        out.write_bytes(block)
    return out.getvalue()


def _fixed_literal_code(symbol: int) -> Tuple[int, int]:
    if symbol < 144:
        return 0x30 + symbol, 8
    if symbol < 256:
        return 0x190 + symbol - 144, 9
    if symbol < 280:
        return symbol - 256, 7
    return 0xC0 + symbol - 280, 8


# Bit-reversed (code, length) pairs, ready for an lsb_first writer
FIXED_LITERAL_CODES = [(reverse_bits(c, n), n) for c, n in map(_fixed_literal_code, range(288))]
FIXED_DISTANCE_CODES = [(reverse_bits(d, 5), 5) for d in range(30)]


def _write_match(out: OutputBitStream, length: int, distance: int) -> None:
    i = bisect.bisect_right(LENGTH_BASE, length) - 1
    code, n = FIXED_LITERAL_CODES[257 + i]
    out.write_bits(code, n)
    out.write_bits(length - LENGTH_BASE[i], LENGTH_EXTRA[i])

    j = bisect.bisect_right(DISTANCE_BASE, distance) - 1
    code, n = FIXED_DISTANCE_CODES[j]
    out.write_bits(code, n)
    out.write_bits(distance - DISTANCE_BASE[j], DISTANCE_EXTRA[j])


def _longest_match(data: bytes, pos: int, candidates: List[int]) -> Tuple[int, int]:
    limit = min(MAX_MATCH, len(data) - pos)
    best_length = 0
    best_distance = 0
    for candidate in reversed(candidates[-MAX_CHAIN:]):
        distance = pos - candidate
        if distance > WINDOW_SIZE:
            break
        length = MIN_MATCH
        while length < limit and data[candidate + length] == data[pos + length]:
            length += 1
        if length > best_length:
            best_length, best_distance = length, distance
            if length == limit:
                break
    return best_length, best_distance


def encode_deflate_fixed(data: bytes) -> bytes:
    """One final fixed Huffman block, greedy LZ77 matching over hash chains of 3 byte prefixes"""
    out = OutputBitStream(BitOrder.lsb_first)
    out.write_bits(1, 1)
    out.write_bits(BlockType.fixed, 2)

    chains: Dict[bytes, List[int]] = {}
    n = len(data)
    pos = 0
    while pos < n:
        length = distance = 0
        if pos + MIN_MATCH <= n:
            key = data[pos : pos + MIN_MATCH]
            candidates = chains.setdefault(key, [])
            if candidates:
                length, distance = _longest_match(data, pos, candidates)
            candidates.append(pos)

        if length >= MIN_MATCH:
            _write_match(out, length, distance)
            pos += length
        else:
            code, nbits = FIXED_LITERAL_CODES[data[pos]]
            out.write_bits(code, nbits)
            pos += 1

    code, nbits = FIXED_LITERAL_CODES[END_OF_BLOCK]
    out.write_bits(code, nbits)
    return out.getvalue()


def encode_deflate(data: bytes) -> bytes:
    "The smaller of the stored and the fixed Huffman encoding"
    fixed = encode_deflate_fixed(data)
    stored = encode_deflate_stored(data)
    return fixed if len(fixed) <= len(stored) else stored


def encode_deflate_zlib(data: bytes, level: Optional[int] = 9) -> bytes:
    "Raw deflate as produced by the zlib library"
    compressor = zlib.compressobj(9 if level is None else level, zlib.DEFLATED, -15)
    return compressor.compress(data) + compressor.flush()
