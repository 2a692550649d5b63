# SPDX-License-Identifier: LGPL-2.1+

"""Canonical Huffman codes as used by deflate

Codes are assigned in order of (length, symbol) and read from an lsb_first
stream one bit at a time, first bit being the most significant code bit. A
2**FAST_BITS entry table, indexed by the next FAST_BITS stream bits, resolves
all codes up to FAST_BITS long in a single peek.
"""

from __future__ import annotations

import dataclasses
from typing import List, Sequence, Tuple

from ..backend import CodecError, CodecErrorKind
from ..bitstream import InputBitStream

MAX_BITS = 15
FAST_BITS = 9


def reverse_bits(code: int, length: int) -> int:
    result = 0
    for _ in range(length):
        result = (result << 1) | (code & 1)
        code >>= 1
    return result


@dataclasses.dataclass(frozen=True)
class HuffmanTable:
    counts: Tuple[int, ...]  # symbols per code length, index 0 unused
    symbols: Tuple[int, ...]  # ordered by code length, then symbol
    fast_table: Tuple[int, ...]  # (symbol << 4) | length, 0 where a longer code starts

    def codes(self) -> List[Tuple[int, int, int]]:
        "(symbol, code, length) for every coded symbol, in canonical order"
        result = []
        code = 0
        index = 0
        for length in range(1, MAX_BITS + 1):
            for _ in range(self.counts[length]):
                result.append((self.symbols[index], code, length))
                code += 1
                index += 1
            code <<= 1
        return result

    def is_empty(self) -> bool:
        return not self.symbols


def build_huffman_table(
    code_lengths: Sequence[int],
    require_complete: bool = False,
    allow_single: bool = False,
) -> HuffmanTable:
    """Build the canonical code for the given per-symbol code lengths

    With require_complete an incomplete code is refused, except for a lone
    one bit code when allow_single is set.
    """
    counts = [0] * (MAX_BITS + 1)
    for length in code_lengths:
        if not 0 <= length <= MAX_BITS:
            raise ValueError(f"code length {length} out of range")
        counts[length] += 1
    counts[0] = 0

    left = 1
    for length in range(1, MAX_BITS + 1):
        left <<= 1
        left -= counts[length]
        if left < 0:
            raise CodecError(CodecErrorKind.over_subscribed, f"more codes than fit {length} bits")

    coded = sum(counts)
    if require_complete and left > 0 and coded > 0:
        if not (allow_single and coded == 1 and counts[1] == 1):
            raise CodecError(CodecErrorKind.incomplete_tree, f"{coded} codes leave the code space incomplete")

    symbols = tuple(sorted((s for s, length in enumerate(code_lengths) if length), key=lambda s: code_lengths[s]))

    fast = [0] * (1 << FAST_BITS)
    table = HuffmanTable(tuple(counts), symbols, ())
    for symbol, code, length in table.codes():
        if length > FAST_BITS:
            break
        entry = (symbol << 4) | length
        for i in range(reverse_bits(code, length), 1 << FAST_BITS, 1 << length):
            fast[i] = entry

    return dataclasses.replace(table, fast_table=tuple(fast))


def decode_symbol_slow(stream: InputBitStream, table: HuffmanTable) -> int:
    "Extend the code one bit at a time until it falls inside the codes of that length"
    code = 0
    first = 0
    index = 0
    for length in range(1, MAX_BITS + 1):
        code |= stream.fetch_bits(1)
        count = table.counts[length]
        if code - first < count:
            return table.symbols[index + code - first]
        index += count
        first += count
        first <<= 1
        code <<= 1
    raise CodecError(CodecErrorKind.invalid_code, "bit sequence matches no code")


def decode_symbol(stream: InputBitStream, table: HuffmanTable) -> int:
    entry = table.fast_table[stream.peek_bits(FAST_BITS)]
    if entry:
        stream.fetch_bits(entry & 0x0F)
        return entry >> 4
    return decode_symbol_slow(stream, table)


# Fixed tables of block type 1. Literal/length symbols 286, 287 and distance
# symbols 30, 31 take part in the code but are invalid in a stream.
FIXED_LITERAL_LENGTHS = [8] * 144 + [9] * 112 + [7] * 24 + [8] * 8
FIXED_DISTANCE_LENGTHS = [5] * 32

FIXED_LITERAL_TABLE = build_huffman_table(FIXED_LITERAL_LENGTHS)
FIXED_DISTANCE_TABLE = build_huffman_table(FIXED_DISTANCE_LENGTHS)
