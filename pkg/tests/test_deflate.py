# SPDX-License-Identifier: LGPL-2.1+

import random
import zlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkdec.backend import BitOrder, CodecError, CodecErrorKind, CodecId, CorpusKind
from chunkdec.bitstream import InputBitStream, OutputBitStream
from chunkdec.codecs import decode_chunk, encode_chunk
from chunkdec.codecs.deflate import (
    FIXED_DISTANCE_CODES,
    FIXED_LITERAL_CODES,
    MAX_STORED,
    BlockType,
    decode_deflate,
    encode_deflate,
    encode_deflate_fixed,
    encode_deflate_stored,
    encode_deflate_zlib,
)
from chunkdec.codecs.huffman import reverse_bits
from chunkdec.corpus import generate_corpus
from chunkdec.outwindow import OutputWindow

WORDS = [b"chunk", b"stream", b"window", b"archive", b"the", b"of", b"huffman", b"deflate", b" ", b"\n"]


def inflate(payload, length):
    window = OutputWindow(length)
    decode_deflate(InputBitStream(payload, BitOrder.lsb_first), window)
    return window.finish(strict=True)


def inflate_error(payload, length):
    with pytest.raises(CodecError) as e:
        inflate(payload, length)
    return e.value.kind


def text(rnd, size):
    out = bytearray()
    while len(out) < size:
        out += rnd.choice(WORDS)
    return bytes(out[:size])


def mixed_chunk(rnd, size):
    "Text, runs and noise, glued in random order"
    out = bytearray()
    while len(out) < size:
        kind = rnd.randrange(3)
        n = rnd.randrange(1, 5000)
        if kind == 0:
            out += text(rnd, n)
        elif kind == 1:
            out += bytes([rnd.randrange(256)]) * n
        else:
            out += bytes(rnd.randrange(256) for _ in range(min(n, 300)))
    return bytes(out[:size])


def fixed_block(*codes):
    "A final fixed Huffman block holding the given bit-reversed (code, length) pairs"
    out = OutputBitStream(BitOrder.lsb_first)
    out.write_bits(1, 1)
    out.write_bits(BlockType.fixed, 2)
    for code, length in codes:
        out.write_bits(code, length)
    return out.getvalue()


def test_stored_block():
    payload = bytes([0x01, 0x05, 0x00, 0xFA, 0xFF]) + b"hello"
    assert inflate(payload, 5) == b"hello"
    assert encode_deflate_stored(b"hello") == payload

    empty = bytes([0x01, 0x00, 0x00, 0xFF, 0xFF])
    assert inflate(empty, 0) == b""
    assert encode_deflate_stored(b"") == empty


def test_stored_multi_block():
    data = bytes(random.Random(3).randrange(256) for _ in range(MAX_STORED + 100))
    payload = encode_deflate_stored(data)
    assert len(payload) == len(data) + 2 * 5
    assert inflate(payload, len(data)) == data
    assert zlib.decompress(payload, -15) == data


def test_run_of_a():
    payload = encode_deflate_fixed(b"aaaaaa")
    assert zlib.decompress(payload, -15) == b"aaaaaa"
    data, counters = decode_chunk(CodecId.deflate, payload, 6, strict=True)
    assert data == b"aaaaaa"
    assert counters.literals_written == 1
    assert counters.overlap_copies == 1


def test_zlib_fixed_block():
    # zlib uses a fixed Huffman block for short inputs
    payload = encode_deflate_zlib(b"aaaaaa")
    assert (payload[0] >> 1) & 3 == BlockType.fixed
    assert inflate(payload, 6) == b"aaaaaa"


def test_zlib_dynamic_block():
    data = text(random.Random(11), 20000)
    payload = encode_deflate_zlib(data, 9)
    assert (payload[0] >> 1) & 3 == BlockType.dynamic
    assert inflate(payload, len(data)) == data


@pytest.mark.parametrize("level", [0, 1, 6, 9])
def test_zlib_levels(level):
    data = mixed_chunk(random.Random(level), 40000)
    assert inflate(encode_deflate_zlib(data, level), len(data)) == data


def test_zlib_conformance():
    rnd = random.Random(1951)
    for _ in range(10):
        data = mixed_chunk(rnd, rnd.randrange(1, 32 * 1024))
        payload = encode_deflate_zlib(data, rnd.randrange(10))
        assert inflate(payload, len(data)) == data


@pytest.mark.slow
def test_zlib_conformance_full_chunks():
    rnd = random.Random(1952)
    for i in range(100):
        data = mixed_chunk(rnd, 128 * 1024)
        payload = encode_deflate_zlib(data, rnd.randrange(10))
        assert inflate(payload, len(data)) == data, i


@pytest.mark.parametrize("kind", list(CorpusKind))
def test_corpora(kind):
    data = generate_corpus(kind, 32 * 1024, seed=5)
    for payload in (encode_deflate_zlib(data), encode_chunk(CodecId.deflate, data)):
        assert inflate(payload, len(data)) == data


RUNS = st.builds(lambda n, b: bytes([b]) * n, st.integers(0, 3000), st.integers(0, 255))


@settings(max_examples=200)
@given(st.one_of(st.binary(max_size=3000), RUNS))
def test_encoders(data):
    for payload in (encode_deflate_fixed(data), encode_deflate(data)):
        assert zlib.decompress(payload, -15) == data
        assert inflate(payload, len(data)) == data


def test_encode_deflate_picks_smaller():
    noise = np.random.default_rng(0).integers(0, 256, size=5000, dtype=np.uint8).tobytes()
    assert encode_deflate(noise) == encode_deflate_stored(noise)
    assert len(encode_deflate(b"x" * 5000)) < 50


def test_reserved_block_type():
    assert inflate_error(bytes([0x07]), 0) == CodecErrorKind.bad_block_type


def test_len_nlen_mismatch():
    assert inflate_error(bytes([0x01, 0x05, 0x00, 0x00, 0x00]) + b"hello", 5) == CodecErrorKind.len_nlen_mismatch


def test_distance_too_far():
    # a match of 3 at distance 1 before any byte was decoded
    payload = fixed_block(FIXED_LITERAL_CODES[257], FIXED_DISTANCE_CODES[0], FIXED_LITERAL_CODES[256])
    assert inflate_error(payload, 3) == CodecErrorKind.distance_too_far


def test_invalid_symbols():
    # length symbol 286
    payload = fixed_block(FIXED_LITERAL_CODES[ord("a")], FIXED_LITERAL_CODES[286])
    assert inflate_error(payload, 4) == CodecErrorKind.invalid_code

    # distance symbol 30
    payload = fixed_block(FIXED_LITERAL_CODES[ord("a")], FIXED_LITERAL_CODES[257], (reverse_bits(30, 5), 5))
    assert inflate_error(payload, 4) == CodecErrorKind.invalid_code


def dynamic_header(hlit, hdist, code_length_lengths):
    out = OutputBitStream(BitOrder.lsb_first)
    out.write_bits(1, 1)
    out.write_bits(BlockType.dynamic, 2)
    out.write_bits(hlit, 5)
    out.write_bits(hdist, 5)
    out.write_bits(len(code_length_lengths) - 4, 4)
    for n in code_length_lengths:
        out.write_bits(n, 3)
    return out


def test_dynamic_header_errors():
    out = dynamic_header(30, 0, [0, 0, 0, 0])
    assert inflate_error(out.getvalue(), 1) == CodecErrorKind.invalid_code

    # one code of length 1 for symbol 16
    out = dynamic_header(0, 0, [1, 0, 0, 0])
    out.write_bits(0, 16)
    assert inflate_error(out.getvalue(), 1) == CodecErrorKind.incomplete_tree

    out = dynamic_header(0, 0, [1, 1, 1, 0])
    out.write_bits(0, 16)
    assert inflate_error(out.getvalue(), 1) == CodecErrorKind.over_subscribed

    # symbols 16 and 0 get one bit each, then a repeat comes first
    out = dynamic_header(0, 0, [1, 0, 0, 1])
    out.write_bits(1, 1)
    out.write_bits(0, 16)
    assert inflate_error(out.getvalue(), 1) == CodecErrorKind.invalid_code


def test_truncated():
    data = b"hello world, " * 50
    payload = encode_deflate_fixed(data)
    assert inflate_error(payload[: len(payload) // 2], len(data)) == CodecErrorKind.truncated_stream
    assert inflate_error(b"", 0) == CodecErrorKind.truncated_stream


def test_output_overflow():
    payload = encode_deflate_stored(b"hello")
    assert inflate_error(payload, 4) == CodecErrorKind.output_overflow


def test_wrong_bit_order():
    with pytest.raises(ValueError):
        decode_deflate(InputBitStream(b"\x03\x00", BitOrder.msb_first), OutputWindow(0))
