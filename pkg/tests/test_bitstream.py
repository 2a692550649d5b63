# SPDX-License-Identifier: LGPL-2.1+

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkdec.backend import BitOrder, BitReadError, BitReadErrorKind, CodecError, CodecErrorKind
from chunkdec.bitstream import (
    MAX_FETCH_BITS,
    InputBitStream,
    OutputBitStream,
    encode_varint_s64,
    encode_varint_u64,
    zigzag_decode,
    zigzag_encode,
)


def source_bits(data, bit_order):
    "The source as a list of bits in consumption order"
    bits = []
    for b in data:
        if bit_order == BitOrder.lsb_first:
            bits += [(b >> i) & 1 for i in range(8)]
        else:
            bits += [(b >> (7 - i)) & 1 for i in range(8)]
    return bits


def bits_value(bits, n, bit_order):
    "Value of the first n bits, bits past the end of the list read as zero"
    bits = bits[:n] + [0] * (n - len(bits[:n]))
    if bit_order == BitOrder.lsb_first:
        return sum(bit << i for i, bit in enumerate(bits))
    return sum(bit << (n - 1 - i) for i, bit in enumerate(bits))


def ceil_div(x, step):
    return (x + step - 1) // step


def test_empty_chunk():
    s = InputBitStream(b"")
    assert s.at_end()
    with pytest.raises(BitReadError) as e:
        s.fetch_bits(1)
    assert e.value.reason == BitReadErrorKind.past_end
    assert e.value.kind == CodecErrorKind.truncated_stream
    with pytest.raises(BitReadError):
        s.peek_bits(8)
    assert s.refill_count == 0


def test_single_byte():
    s = InputBitStream(b"\xa7")
    assert s.fetch_bits(8) == 0xA7
    assert s.at_end()
    assert s.refill_count == 1


def test_b5_lsb_first():
    s = InputBitStream(b"\xb5", BitOrder.lsb_first)
    assert s.peek_bits(4) == 5
    assert s.fetch_bits(3) == 5
    assert s.fetch_bits(5) == 22


def test_b5_msb_first():
    s = InputBitStream(b"\xb5", BitOrder.msb_first)
    assert s.fetch_bits(3) == 5
    assert s.fetch_bits(5) == 21


def test_cross_byte():
    s = InputBitStream(b"\xff\x01", BitOrder.lsb_first)
    assert s.fetch_bits(9) == 511
    assert s.bits_remaining == 7


def test_peek_zero_fills_tail():
    s = InputBitStream(bytes([0b10100000]), BitOrder.lsb_first)
    s.fetch_bits(5)
    assert s.peek_bits(8) == 0b101
    assert s.bits_remaining == 3
    with pytest.raises(BitReadError):
        s.fetch_bits(8)

    s = InputBitStream(bytes([0b00000101]), BitOrder.msb_first)
    s.fetch_bits(5)
    assert s.peek_bits(8) == 0b10100000


def test_width_limits():
    s = InputBitStream(bytes(16))
    with pytest.raises(BitReadError) as e:
        s.fetch_bits(MAX_FETCH_BITS + 1)
    assert e.value.reason == BitReadErrorKind.width_too_large
    with pytest.raises(BitReadError):
        s.peek_bits(64)
    with pytest.raises(ValueError):
        s.fetch_bits(0)
    assert s.fetch_bits(MAX_FETCH_BITS) == 0
    # 57 bits from any bit position
    s = InputBitStream(b"\xff" * 80)
    for pos in range(8):
        s.align_to_byte()
        if pos:
            s.fetch_bits(pos)
        assert s.fetch_bits(MAX_FETCH_BITS) == (1 << MAX_FETCH_BITS) - 1


def test_bad_block_size():
    with pytest.raises(ValueError):
        InputBitStream(b"abc", block_size=0)


def test_capacity():
    assert InputBitStream(b"", block_size=128).capacity == 256
    assert InputBitStream(b"", block_size=4).capacity == 12


def test_refills_256_bytes():
    s = InputBitStream(bytes(range(256)), block_size=128)
    assert [s.fetch_bits(8) for _ in range(256)] == list(range(256))
    assert s.refill_count == 2
    assert s.sync_points == 4
    assert s.at_end()


def test_align_to_byte():
    s = InputBitStream(b"\xff\x0f")
    s.align_to_byte()
    assert s.bits_consumed == 0
    s.fetch_bits(3)
    s.align_to_byte()
    assert s.bits_consumed == 8
    s.align_to_byte()
    assert s.bits_consumed == 8
    assert s.bit_pos == 0
    assert s.fetch_bits(8) == 0x0F


def test_read_bytes():
    s = InputBitStream(bytes([1, 2, 3]))
    assert s.read_bytes(0) == b""
    assert s.refill_count == 0
    dst = bytearray(b"x")
    assert s.read_bytes(3, dst) == bytes([1, 2, 3])
    assert dst == bytearray(b"x\x01\x02\x03")
    with pytest.raises(BitReadError):
        s.read_bytes(1)

    s = InputBitStream(b"\xff\xff")
    s.fetch_bits(1)
    with pytest.raises(ValueError):
        s.read_bytes(1)


def test_read_bytes_interleaved():
    data = bytes(random.Random(5).randrange(256) for _ in range(1000))
    s = InputBitStream(data, block_size=16)
    out = bytearray()
    n = 1
    while len(out) < len(data):
        out.append(s.fetch_bits(8))
        n = min(n * 2 + 1, len(data) - len(out))
        s.read_bytes(n, out)
    assert out == data
    assert s.refill_count == ceil_div(len(data), 16)


@pytest.mark.parametrize(
    "data,value",
    [
        (b"\x00", 0),
        (b"\x7f", 127),
        (b"\x80\x01", 128),
        (b"\x90\x4e", 10000),
        (b"\xff" * 9 + b"\x01", (1 << 64) - 1),
    ],
)
def test_varint_u64(data, value):
    assert InputBitStream(data).read_varint_u64() == value
    assert encode_varint_u64(value) == data


def test_varint_overflow():
    with pytest.raises(CodecError) as e:
        InputBitStream(b"\xff" * 10 + b"\x01").read_varint_u64()
    assert e.value.kind == CodecErrorKind.varint_overflow

    with pytest.raises(CodecError) as e:
        InputBitStream(b"\xff" * 9 + b"\x02").read_varint_u64()
    assert e.value.kind == CodecErrorKind.varint_overflow

    with pytest.raises(BitReadError):
        InputBitStream(b"\x80\x80").read_varint_u64()


def test_zigzag():
    assert [zigzag_decode(z) for z in range(4)] == [0, -1, 1, -2]
    assert [zigzag_encode(v) for v in (0, -1, 1, -2)] == [0, 1, 2, 3]
    assert zigzag_encode(-(1 << 63)) == (1 << 64) - 1
    assert InputBitStream(encode_varint_s64(-10000)).read_varint_s64() == -10000


@given(st.integers(min_value=-(1 << 63), max_value=(1 << 63) - 1))
def test_zigzag_inverse(value):
    assert zigzag_decode(zigzag_encode(value)) == value


@given(
    st.sampled_from(list(BitOrder)),
    st.lists(st.integers(min_value=1, max_value=MAX_FETCH_BITS), min_size=1, max_size=40),
    st.randoms(use_true_random=False),
)
def test_output_bitstream(bit_order, widths, rnd):
    values = [rnd.getrandbits(n) for n in widths]
    out = OutputBitStream(bit_order)
    for v, n in zip(values, widths):
        out.write_bits(v, n)
    data = out.getvalue()
    assert len(data) == ceil_div(sum(widths), 8)

    s = InputBitStream(data, bit_order, block_size=8)
    assert [s.fetch_bits(n) for n in widths] == values


def test_fetch_split():
    data = bytes(random.Random(1).randrange(256) for _ in range(64))
    for a in range(1, 30):
        b = MAX_FETCH_BITS - a
        s1 = InputBitStream(data, BitOrder.lsb_first)
        s2 = InputBitStream(data, BitOrder.lsb_first)
        v1 = s1.fetch_bits(a)
        v2 = s1.fetch_bits(b)
        assert s2.fetch_bits(a + b) == v1 | (v2 << a)


def state(s):
    return (s.bits_consumed, s.bits_remaining)


def check_interleaving(data, bit_order, block_size, ops):
    """Run ops against a stream and against the plain bit list of data

    Every value read must equal the corresponding source bits, and the whole
    chunk is consumed by the end.
    """
    bits = source_bits(data, bit_order)
    total = len(bits)
    s = InputBitStream(data, bit_order, block_size)
    pos = 0

    for op, n in ops:
        if op == "fetch":
            if pos + n > total:
                with pytest.raises(BitReadError):
                    s.fetch_bits(n)
                break
            assert s.fetch_bits(n) == bits_value(bits[pos:], n, bit_order)
            pos += n
        elif op == "peek":
            before = state(s)
            if pos == total:
                with pytest.raises(BitReadError):
                    s.peek_bits(n)
                break
            assert s.peek_bits(n) == bits_value(bits[pos:], n, bit_order)
            assert state(s) == before
        elif op == "align":
            s.align_to_byte()
            pos = ceil_div(pos, 8) * 8
        elif op == "bytes":
            s.align_to_byte()
            pos = ceil_div(pos, 8) * 8
            if pos + 8 * n > total:
                with pytest.raises(BitReadError):
                    s.read_bytes(n)
                break
            assert s.read_bytes(n) == data[pos // 8 : pos // 8 + n]
            pos += 8 * n

        assert s.bits_consumed == pos
        assert s.bits_consumed + s.bits_remaining == total
        assert 0 <= s.buffered <= s.capacity
        assert 0 <= s.bit_pos <= 7

    s.align_to_byte()
    rest = s.read_bytes(s.bits_remaining // 8)
    assert rest == data[ceil_div(pos, 8) :]
    assert s.at_end()
    assert s.refill_count == ceil_div(len(data), block_size)


OPS = st.one_of(
    st.tuples(st.just("fetch"), st.integers(min_value=1, max_value=MAX_FETCH_BITS)),
    st.tuples(st.just("peek"), st.integers(min_value=1, max_value=MAX_FETCH_BITS)),
    st.tuples(st.just("align"), st.just(0)),
    st.tuples(st.just("bytes"), st.integers(min_value=0, max_value=40)),
)


@settings(max_examples=500)
@given(
    st.binary(max_size=300),
    st.sampled_from(list(BitOrder)),
    st.sampled_from([1, 2, 3, 8, 16, 128]),
    st.lists(OPS, max_size=60),
)
def test_interleavings(data, bit_order, block_size, ops):
    check_interleaving(data, bit_order, block_size, ops)


def test_many_interleavings():
    rnd = random.Random(2021)
    for _ in range(10_000):
        data = bytes(rnd.randrange(256) for _ in range(rnd.randrange(0, 48)))
        ops = []
        for _ in range(rnd.randrange(1, 12)):
            op = rnd.choice(["fetch", "fetch", "peek", "align", "bytes"])
            ops.append((op, rnd.randrange(0, 6) if op == "bytes" else rnd.randrange(1, MAX_FETCH_BITS + 1)))
        check_interleaving(data, rnd.choice(list(BitOrder)), rnd.choice([1, 4, 16, 128]), ops)
