# SPDX-License-Identifier: LGPL-2.1+

"""The chunked archive format

An archive is a fixed header, an index with one entry per chunk, and the
concatenated compressed chunk payloads. All integers are little-endian:

    magic "CODAGAR\\0" | version u32 | codec_id u32 | element_width u32 |
    chunk_size u64 | total_uncompressed u64 | chunk_count u64 |
    (compressed_offset u64, compressed_length u64, uncompressed_length u64, crc32 u32, pad u32) * chunk_count |
    payload

Every chunk except the last holds exactly chunk_size uncompressed bytes, so
chunk i always decompresses to the output offset i * chunk_size.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import struct
import zlib
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .backend import ArchiveError, ArchiveErrorKind, CodecId, die

MAGIC = b"CODAGAR\0"
VERSION = 1
DEFAULT_CHUNK_SIZE = 128 * 1024
ELEMENT_WIDTHS = (1, 2, 4, 8)

HEADER = struct.Struct("<8sIIIQQQ")
INDEX_ENTRY = struct.Struct("<QQQII")

ByteView = Union[bytes, bytearray, memoryview]


def ceil_div(x: int, step: int) -> int:
    return (x + step - 1) // step


@dataclasses.dataclass(frozen=True)
class ArchiveHeader:
    codec_id: CodecId
    element_width: int
    chunk_size: int
    total_uncompressed: int
    chunk_count: int
    version: int = VERSION

    def validate(self) -> None:
        if self.element_width not in ELEMENT_WIDTHS:
            raise ArchiveError(
                ArchiveErrorKind.invariant_violation, f"element width {self.element_width} not in {ELEMENT_WIDTHS}"
            )
        if self.codec_id == CodecId.deflate and self.element_width != 1:
            raise ArchiveError(ArchiveErrorKind.invariant_violation, "deflate archives use element width 1")
        if self.chunk_size <= 0 or self.chunk_size % self.element_width != 0:
            raise ArchiveError(
                ArchiveErrorKind.invariant_violation,
                f"chunk size {self.chunk_size} is not a positive multiple of {self.element_width}",
            )
        if self.chunk_count != ceil_div(self.total_uncompressed, self.chunk_size):
            raise ArchiveError(
                ArchiveErrorKind.invariant_violation,
                f"{self.chunk_count} chunks do not cover {self.total_uncompressed} bytes in {self.chunk_size} byte chunks",
            )

    def pack(self) -> bytes:
        return HEADER.pack(
            MAGIC,
            self.version,
            self.codec_id.value,
            self.element_width,
            self.chunk_size,
            self.total_uncompressed,
            self.chunk_count,
        )


@dataclasses.dataclass(frozen=True)
class ChunkIndexEntry:
    compressed_offset: int
    compressed_length: int
    uncompressed_length: int
    checksum: int

    @property
    def compressed_end(self) -> int:
        return self.compressed_offset + self.compressed_length


def _pack_entry(entry: ChunkIndexEntry) -> bytes:
    return INDEX_ENTRY.pack(
        entry.compressed_offset, entry.compressed_length, entry.uncompressed_length, entry.checksum, 0
    )


@dataclasses.dataclass(frozen=True)
class PackedChunk:
    """One compressed chunk as handed to write_archive()"""

    payload: bytes
    uncompressed_length: int
    checksum: int


@dataclasses.dataclass(frozen=True)
class ChunkedArchive:
    header: ArchiveHeader
    index: List[ChunkIndexEntry]
    payload: ByteView

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChunkedArchive):
            return NotImplemented
        return self.header == other.header and self.index == other.index and bytes(self.payload) == bytes(other.payload)

    @property
    def chunk_count(self) -> int:
        return self.header.chunk_count

    @property
    def compressed_size(self) -> int:
        return HEADER.size + INDEX_ENTRY.size * len(self.index) + len(self.payload)

    def to_bytes(self) -> bytes:
        parts = [self.header.pack()]
        parts += [_pack_entry(e) for e in self.index]
        parts += [bytes(self.payload)]
        return b"".join(parts)

    def ratio(self) -> Optional[float]:
        "compressed/uncompressed, smaller is better; None for empty archives"
        if self.header.total_uncompressed == 0:
            return None
        return self.compressed_size / self.header.total_uncompressed


def _check_index(header: ArchiveHeader, index: Sequence[ChunkIndexEntry], payload_length: int) -> None:
    if len(index) != header.chunk_count:
        raise ArchiveError(
            ArchiveErrorKind.invariant_violation, f"index has {len(index)} entries, header says {header.chunk_count}"
        )

    position = 0
    for i, entry in enumerate(index):
        if entry.compressed_offset > payload_length or entry.compressed_end > payload_length:
            raise ArchiveError(
                ArchiveErrorKind.truncated_payload,
                f"chunk {i} spans {entry.compressed_offset}..{entry.compressed_end}, "
                f"payload has {payload_length} bytes",
            )
        if entry.compressed_offset != position:
            raise ArchiveError(
                ArchiveErrorKind.invariant_violation,
                f"chunk {i} starts at {entry.compressed_offset}, expected contiguous offset {position}",
            )
        expected = header.chunk_size if i < len(index) - 1 else header.total_uncompressed - i * header.chunk_size
        if entry.uncompressed_length != expected:
            raise ArchiveError(
                ArchiveErrorKind.invariant_violation,
                f"chunk {i} claims {entry.uncompressed_length} uncompressed bytes, expected {expected}",
            )
        position = entry.compressed_end

    if position != payload_length:
        raise ArchiveError(
            ArchiveErrorKind.invariant_violation, f"{payload_length - position} payload bytes not covered by the index"
        )


def write_archive(header: ArchiveHeader, chunks: Sequence[PackedChunk]) -> bytes:
    if len(chunks) != header.chunk_count:
        raise ArchiveError(
            ArchiveErrorKind.inconsistent_lengths, f"{len(chunks)} chunks given, header says {header.chunk_count}"
        )
    if sum(c.uncompressed_length for c in chunks) != header.total_uncompressed:
        raise ArchiveError(
            ArchiveErrorKind.inconsistent_lengths,
            f"chunks hold {sum(c.uncompressed_length for c in chunks)} bytes, header says {header.total_uncompressed}",
        )

    index = []
    offset = 0
    for chunk in chunks:
        index.append(ChunkIndexEntry(offset, len(chunk.payload), chunk.uncompressed_length, chunk.checksum))
        offset += len(chunk.payload)

    try:
        header.validate()
        _check_index(header, index, offset)
    except ArchiveError as e:
        raise ArchiveError(ArchiveErrorKind.inconsistent_lengths, e.message)

    parts = [header.pack()]
    parts += [_pack_entry(e) for e in index]
    parts += [c.payload for c in chunks]
    return b"".join(parts)


def read_archive(data: ByteView) -> ChunkedArchive:
    view = memoryview(data).cast("B")

    if len(view) < HEADER.size:
        raise ArchiveError(ArchiveErrorKind.truncated_header, f"{len(view)} bytes is shorter than the header")

    magic, version, codec, width, chunk_size, total, count = HEADER.unpack_from(view, 0)
    if magic != MAGIC:
        raise ArchiveError(ArchiveErrorKind.bad_magic, f"bad magic {magic!r}")
    if version != VERSION:
        raise ArchiveError(ArchiveErrorKind.bad_version, f"unsupported version {version}")
    try:
        codec_id = CodecId(codec)
    except ValueError:
        raise ArchiveError(ArchiveErrorKind.unknown_codec, f"unknown codec id {codec}")

    header = ArchiveHeader(codec_id, width, chunk_size, total, count, version)
    header.validate()

    index_end = HEADER.size + INDEX_ENTRY.size * count
    if len(view) < index_end:
        raise ArchiveError(
            ArchiveErrorKind.truncated_index, f"index of {count} entries needs {index_end} bytes, have {len(view)}"
        )

    index = []
    for offset in range(HEADER.size, index_end, INDEX_ENTRY.size):
        c_offset, c_length, u_length, crc, _ = INDEX_ENTRY.unpack_from(view, offset)
        index.append(ChunkIndexEntry(c_offset, c_length, u_length, crc))

    payload = view[index_end:]
    _check_index(header, index, len(payload))

    return ChunkedArchive(header, index, payload)


def chunk_slice(archive: ChunkedArchive, i: int) -> Tuple[memoryview, int]:
    if not 0 <= i < archive.chunk_count:
        raise ArchiveError(ArchiveErrorKind.index_out_of_range, f"chunk {i} of {archive.chunk_count}")
    entry = archive.index[i]
    view = memoryview(archive.payload)
    return view[entry.compressed_offset : entry.compressed_end], entry.uncompressed_length


def chunk_uncompressed_offset(archive: ChunkedArchive, i: int) -> int:
    return i * archive.header.chunk_size


def _pack_header(data: ByteView, codec: CodecId, element_width: int, chunk_size: int) -> ArchiveHeader:
    total = len(data)
    header = ArchiveHeader(codec, element_width, chunk_size, total, ceil_div(total, chunk_size))
    header.validate()
    if total % element_width != 0:
        raise ArchiveError(
            ArchiveErrorKind.inconsistent_lengths, f"{total} bytes is not a multiple of element width {element_width}"
        )
    return header


def split_chunks(data: ByteView, chunk_size: int) -> List[bytes]:
    view = memoryview(data).cast("B")
    return [bytes(view[start : start + chunk_size]) for start in range(0, len(view), chunk_size)]


def pack_payloads(
    data: ByteView,
    codec: CodecId,
    element_width: int,
    chunk_size: int,
    payloads: Sequence[bytes],
) -> bytes:
    """Build an archive from data and the already compressed payload of each of its chunks

    Lengths and checksums in the index come from data, so payloads produced
    by other tools can be packed as long as they follow the chunking.
    """
    header = _pack_header(data, codec, element_width, chunk_size)
    if len(payloads) != header.chunk_count:
        raise ArchiveError(
            ArchiveErrorKind.inconsistent_lengths,
            f"{len(payloads)} payloads given, {len(data)} bytes in {chunk_size} byte chunks "
            f"make {header.chunk_count}",
        )

    chunks = [
        PackedChunk(bytes(payload), len(raw), zlib.crc32(raw))
        for raw, payload in zip(split_chunks(data, chunk_size), payloads)
    ]
    return write_archive(header, chunks)


def pack_chunks(
    data: ByteView,
    codec: CodecId,
    element_width: int,
    chunk_size: int,
    encode: Callable[[bytes], bytes],
    pool: Optional[concurrent.futures.Executor] = None,
) -> bytes:
    """Split data into chunk_size pieces, compress each with encode() and build an archive

    With a pool the chunks are compressed concurrently; encode has to be
    picklable for process pools.
    """
    _pack_header(data, codec, element_width, chunk_size)
    raws = split_chunks(data, chunk_size)
    payloads = list(pool.map(encode, raws)) if pool is not None else [encode(raw) for raw in raws]
    return pack_payloads(data, codec, element_width, chunk_size, payloads)


def read_archive_file(path: Path) -> ChunkedArchive:
    try:
        data = path.read_bytes()
    except OSError as e:
        die(f"Cannot read archive {path}: {e.strerror}")
    return read_archive(data)


def write_archive_file(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as e:
        die(f"Cannot write archive {path}: {e.strerror}")
