# SPDX-License-Identifier: LGPL-2.1+

import argparse
import pickle

import pytest

from chunkdec.backend import (
    ArchiveError,
    ArchiveErrorKind,
    BitReadError,
    BitReadErrorKind,
    ChunkdecException,
    CodecError,
    CodecErrorKind,
    CodecId,
    CorpusKind,
    CrcMismatchError,
    Executor,
    FormatError,
    UsageError,
    VerificationError,
    die,
    format_bytes,
    parse_boolean,
    parse_bytes,
)


def test_codec_id():
    assert CodecId.rle_v1.value == 1
    assert CodecId.rle_v2.value == 2
    assert CodecId.deflate.value == 3
    assert str(CodecId.rle_v2) == "rle2"
    assert CodecId.from_string("rle1") is CodecId.rle_v1
    assert CodecId.from_string("rle_v2") is CodecId.rle_v2
    with pytest.raises(argparse.ArgumentTypeError):
        CodecId.from_string("zstd")


def test_parseable():
    assert Executor.from_string("thread") is Executor.thread
    assert CorpusKind.from_string("power-law") is CorpusKind.power_law
    assert str(CorpusKind.uniform_random) == "uniform-random"
    assert set(CorpusKind.doc()) == set(CorpusKind)
    with pytest.raises(argparse.ArgumentTypeError):
        Executor.from_string("fiber")


def test_exit_codes():
    assert ChunkdecException.exit_code == 1
    assert UsageError.exit_code == 2
    assert FormatError.exit_code == 3
    assert VerificationError.exit_code == 4
    assert issubclass(ArchiveError, FormatError)
    assert issubclass(BitReadError, CodecError)
    assert issubclass(CrcMismatchError, FormatError)


def test_codec_error_message():
    e = CodecError(CodecErrorKind.bad_offset, "offset 9 with 4 bytes written")
    assert str(e) == "bad-offset: offset 9 with 4 bytes written"
    e.chunk = 7
    assert str(e) == "chunk 7: bad-offset: offset 9 with 4 bytes written"


def test_bit_read_error_kind():
    assert BitReadError(BitReadErrorKind.past_end, "x").kind == CodecErrorKind.truncated_stream
    assert BitReadError(BitReadErrorKind.width_too_large, "x").kind == CodecErrorKind.width_too_large


@pytest.mark.parametrize(
    "error",
    [
        ArchiveError(ArchiveErrorKind.bad_magic, "bad magic b'XXXXXXXX'"),
        CodecError(CodecErrorKind.invalid_code, "no such code", 3),
        BitReadError(BitReadErrorKind.past_end, "need 5 bits", 12),
        CrcMismatchError(4, 0xDEADBEEF, 0x12345678),
    ],
)
def test_errors_pickle(error):
    copy = pickle.loads(pickle.dumps(error))
    assert type(copy) is type(error)
    assert str(copy) == str(error)
    assert getattr(copy, "chunk", None) == getattr(error, "chunk", None)


def test_die():
    with pytest.raises(UsageError, match="nope"):
        die("nope", UsageError)
    with pytest.raises(ChunkdecException):
        die("generic")


def test_bytes():
    assert parse_bytes("128") == 128
    assert parse_bytes("64K") == 64 * 1024
    assert parse_bytes("16M") == 16 * 1024 * 1024
    assert parse_bytes("1G") == 1024 ** 3
    assert parse_bytes("0") == 0
    with pytest.raises(ValueError):
        parse_bytes("-1K")
    with pytest.raises(ValueError):
        parse_bytes("lots")

    assert format_bytes(100) == "100B"
    assert format_bytes(128 * 1024) == "128.0K"
    assert format_bytes(3 * 1024 * 1024 // 2) == "1.5M"


def test_parse_boolean():
    for s in ("1", "true", "YES"):
        assert parse_boolean(s) is True
    for s in ("0", "False", "no"):
        assert parse_boolean(s) is False
    with pytest.raises(ValueError):
        parse_boolean("maybe")
