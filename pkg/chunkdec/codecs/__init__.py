# SPDX-License-Identifier: LGPL-2.1+

"""Chunk decoders and the encoders that produce their fixtures

A decoder is a function decode(stream, window) that reads compressed bits only
through an InputBitStream and writes output only through an OutputWindow. It
stops once the window is full or the stream is exhausted.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Dict, List, Tuple, cast

import numpy as np

from ..backend import BitOrder, CodecId
from ..bitstream import DEFAULT_BLOCK_SIZE, InputBitStream
from ..outwindow import OutputWindow
from .deflate import decode_deflate, encode_deflate, encode_deflate_stored, encode_deflate_zlib
from .rle1 import decode_rle_v1, encode_rle_v1
from .rle2 import decode_rle_v2, encode_rle_v2

Decoder = Callable[[InputBitStream, OutputWindow], None]
Encoder = Callable[[bytes, int], bytes]


@dataclasses.dataclass(frozen=True)
class Codec:
    codec_id: CodecId
    bit_order: BitOrder
    decode: Decoder
    encode: Encoder  # (chunk bytes, element width) -> payload


def element_values(data: bytes, element_width: int, signed: bool = False) -> List[int]:
    "Little-endian elements of a chunk as Python ints"
    dtype = f"<{'i' if signed else 'u'}{element_width}"
    return cast(List[int], np.frombuffer(data, dtype=dtype).tolist())


def _encode_rle_v1(data: bytes, element_width: int) -> bytes:
    return encode_rle_v1(element_values(data, element_width), element_width)


def _encode_rle_v2(data: bytes, element_width: int) -> bytes:
    return encode_rle_v2(element_values(data, element_width))


def _encode_deflate(data: bytes, element_width: int) -> bytes:
    return encode_deflate(data)


CODECS: Dict[CodecId, Codec] = {
    CodecId.rle_v1: Codec(CodecId.rle_v1, BitOrder.msb_first, decode_rle_v1, _encode_rle_v1),
    CodecId.rle_v2: Codec(CodecId.rle_v2, BitOrder.msb_first, decode_rle_v2, _encode_rle_v2),
    CodecId.deflate: Codec(CodecId.deflate, BitOrder.lsb_first, decode_deflate, _encode_deflate),
}


@dataclasses.dataclass
class DecodeCounters:
    refill_count: int = 0
    sync_points: int = 0
    overlap_copies: int = 0
    aligned_word_iterations: int = 0
    head_pad_bytes: int = 0
    runs_written: int = 0
    literals_written: int = 0
    bytes_in: int = 0
    bytes_out: int = 0

    def add(self, other: DecodeCounters) -> None:
        for field in dataclasses.fields(other):
            setattr(self, field.name, getattr(self, field.name) + getattr(other, field.name))


def decode_chunk(
    codec_id: CodecId,
    payload: bytes,
    uncompressed_length: int,
    element_width: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    strict: bool = False,
) -> Tuple[bytes, DecodeCounters]:
    codec = CODECS[codec_id]
    stream = InputBitStream(payload, codec.bit_order, block_size)
    window = OutputWindow(uncompressed_length, element_width)
    codec.decode(stream, window)
    data = window.finish(strict)

    counters = DecodeCounters(
        refill_count=stream.refill_count,
        sync_points=stream.sync_points,
        overlap_copies=window.stats.overlap_copies,
        aligned_word_iterations=window.stats.aligned_word_iterations,
        head_pad_bytes=window.stats.head_pad_bytes,
        runs_written=window.runs_written,
        literals_written=window.literals_written,
        bytes_in=len(payload),
        bytes_out=len(data),
    )
    return data, counters


def encode_chunk(codec_id: CodecId, data: bytes, element_width: int = 1) -> bytes:
    return CODECS[codec_id].encode(data, element_width)


__all__ = [
    "CODECS",
    "Codec",
    "DecodeCounters",
    "Decoder",
    "Encoder",
    "decode_chunk",
    "decode_deflate",
    "decode_rle_v1",
    "decode_rle_v2",
    "element_values",
    "encode_chunk",
    "encode_deflate",
    "encode_deflate_stored",
    "encode_deflate_zlib",
    "encode_rle_v1",
    "encode_rle_v2",
]
