# SPDX-License-Identifier: LGPL-2.1+

"""Chunk-parallel decompression

Workers pull units of unit_chunks consecutive chunks from a shared cursor
until the archive is drained, so slow chunks never hold up a fixed share of
the work. Every chunk lands at its own offset in one pre-allocated output.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import multiprocessing
import os
import statistics
import time
import zlib
from multiprocessing import shared_memory
from types import TracebackType
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, Union

from .backend import CodecError, CrcMismatchError, Executor, FormatError
from .bitstream import DEFAULT_BLOCK_SIZE
from .codecs import DecodeCounters, decode_chunk
from .container import ChunkedArchive, chunk_slice, chunk_uncompressed_offset, read_archive
from .report import BenchReport, BenchRow

OutputBuffer = Union[bytearray, memoryview]


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclasses.dataclass(frozen=True)
class EngineConfig:
    workers: int = dataclasses.field(default_factory=default_workers)
    unit_chunks: int = 1
    strict_length: bool = False
    collect_stats: bool = False
    executor: Executor = Executor.process
    block_size: int = DEFAULT_BLOCK_SIZE

    def validate(self) -> None:
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.unit_chunks < 1:
            raise ValueError(f"unit_chunks must be at least 1, got {self.unit_chunks}")
        if self.block_size < 1:
            raise ValueError(f"block_size must be positive, got {self.block_size}")


@dataclasses.dataclass(frozen=True)
class ChunkRecord:
    index: int
    bytes_in: int
    bytes_out: int
    refill_count: int
    duration: float


@dataclasses.dataclass
class EngineStats(DecodeCounters):
    wall_time: float = 0.0
    chunks: List[ChunkRecord] = dataclasses.field(default_factory=list)

    def deterministic_counters(self) -> Dict[str, int]:
        "Counters that only depend on the archive, never on scheduling"
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(DecodeCounters)}

    @property
    def throughput_bps(self) -> float:
        return self.bytes_out / self.wall_time if self.wall_time > 0 else 0.0


class ChunkCursor:
    """Shared next-chunk counter, usable from threads and processes alike"""

    def __init__(self, count: int, value: Optional[Any] = None) -> None:
        self.count = count
        self.value = value if value is not None else multiprocessing.Value("q", 0)

    def claim(self, n: int) -> Optional[int]:
        "Reserve the next n chunks, return the first index or None once drained or aborted"
        with self.value.get_lock():
            start = int(self.value.value)
            if start >= self.count:
                return None
            self.value.value = start + n
            return start

    def abort(self) -> None:
        with self.value.get_lock():
            self.value.value = self.count

    def reset(self) -> None:
        with self.value.get_lock():
            self.value.value = 0


@dataclasses.dataclass
class UnitResult:
    chunks: List[Tuple[int, DecodeCounters, float]] = dataclasses.field(default_factory=list)
    failure: Optional[FormatError] = None


@dataclasses.dataclass
class WorkerContext:
    archive: ChunkedArchive
    cursor: ChunkCursor
    config: EngineConfig


def _decode_one(context: WorkerContext, i: int) -> Tuple[bytes, DecodeCounters]:
    archive = context.archive
    payload, uncompressed_length = chunk_slice(archive, i)
    try:
        data, counters = decode_chunk(
            archive.header.codec_id,
            payload,
            uncompressed_length,
            archive.header.element_width,
            context.config.block_size,
            context.config.strict_length,
        )
    except CodecError as e:
        e.chunk = i
        raise

    crc = zlib.crc32(data)
    if crc != archive.index[i].checksum:
        raise CrcMismatchError(i, archive.index[i].checksum, crc)
    return data, counters


def _drain(context: WorkerContext, output: OutputBuffer) -> UnitResult:
    "Decode units into output until the cursor runs dry"
    result = UnitResult()
    unit = context.config.unit_chunks
    count = context.archive.chunk_count

    while True:
        start = context.cursor.claim(unit)
        if start is None:
            return result

        for i in range(start, min(start + unit, count)):
            begin = time.perf_counter()
            try:
                data, counters = _decode_one(context, i)
            except (CodecError, CrcMismatchError) as e:
                context.cursor.abort()
                result.failure = e
                return result

            offset = chunk_uncompressed_offset(context.archive, i)
            output[offset : offset + len(data)] = data
            result.chunks.append((i, counters, time.perf_counter() - begin))


_PROCESS_CONTEXT: Optional[WorkerContext] = None
_PROCESS_OUTPUT: Optional[shared_memory.SharedMemory] = None


def _init_process(cursor_value: Any, archive_bytes: bytes, config: EngineConfig, output_name: str) -> None:
    global _PROCESS_CONTEXT, _PROCESS_OUTPUT
    archive = read_archive(archive_bytes)
    _PROCESS_CONTEXT = WorkerContext(archive, ChunkCursor(archive.chunk_count, cursor_value), config)
    _PROCESS_OUTPUT = shared_memory.SharedMemory(name=output_name)


def _drain_in_process() -> UnitResult:
    assert _PROCESS_CONTEXT is not None and _PROCESS_OUTPUT is not None
    return _drain(_PROCESS_CONTEXT, _PROCESS_OUTPUT.buf)


class Engine:
    """Decompresses one archive, possibly many times, on a pool that outlives the runs

    Thread workers write into a bytearray, process workers into a shared
    memory block mapped by every worker; either way each chunk is written
    once, at its own offset.
    """

    def __init__(self, archive: ChunkedArchive, config: EngineConfig) -> None:
        config.validate()
        self.archive = archive
        self.config = config
        self.cursor = ChunkCursor(archive.chunk_count)
        self._pool: Optional[concurrent.futures.Executor] = None
        self._shared: Optional[shared_memory.SharedMemory] = None

    def __enter__(self) -> Engine:
        if self.config.executor == Executor.process:
            # zero sized blocks are refused
            self._shared = shared_memory.SharedMemory(
                create=True, size=max(1, self.archive.header.total_uncompressed)
            )
            self._pool = concurrent.futures.ProcessPoolExecutor(
                max_workers=self.config.workers,
                initializer=_init_process,
                initargs=(self.cursor.value, self.archive.to_bytes(), self.config, self._shared.name),
            )
        else:
            self._pool = concurrent.futures.ThreadPoolExecutor(max_workers=self.config.workers)
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None
        if self._shared is not None:
            self._shared.close()
            self._shared.unlink()
            self._shared = None

    def run(self) -> Tuple[bytes, EngineStats]:
        if self._pool is None:
            raise RuntimeError("Engine.run() outside of a with block")

        total = self.archive.header.total_uncompressed
        stats = EngineStats()
        self.cursor.reset()

        begin = time.perf_counter()
        output: OutputBuffer
        if self._shared is not None:
            output = self._shared.buf
            futures = [self._pool.submit(_drain_in_process) for _ in range(self.config.workers)]
        else:
            output = bytearray(total)
            context = WorkerContext(self.archive, self.cursor, self.config)
            futures = [self._pool.submit(_drain, context, output) for _ in range(self.config.workers)]
        results = [f.result() for f in futures]
        stats.wall_time = time.perf_counter() - begin

        failures = []
        for result in results:
            if result.failure is not None:
                failures.append(result.failure)
            for i, counters, duration in result.chunks:
                stats.add(counters)
                if self.config.collect_stats:
                    record = ChunkRecord(i, counters.bytes_in, counters.bytes_out, counters.refill_count, duration)
                    stats.chunks.append(record)

        if failures:
            raise min(failures, key=lambda e: getattr(e, "chunk"))

        stats.chunks.sort(key=lambda c: c.index)
        return bytes(memoryview(output)[:total]), stats


def decompress_archive(archive: ChunkedArchive, config: EngineConfig) -> Tuple[bytes, EngineStats]:
    with Engine(archive, config) as engine:
        return engine.run()


def bench_decompress(
    archive: ChunkedArchive,
    config: EngineConfig,
    repetitions: int,
    workers: Optional[Sequence[int]] = None,
    unit_chunks: Optional[Sequence[int]] = None,
) -> BenchReport:
    """Throughput over repetitions for every (workers, unit_chunks) combination

    Each configuration gets one untimed warm-up run first.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be at least 1, got {repetitions}")

    report = BenchReport(repetitions=repetitions)
    for w in workers or [config.workers]:
        for u in unit_chunks or [config.unit_chunks]:
            run_config = dataclasses.replace(config, workers=w, unit_chunks=u)
            with Engine(archive, run_config) as engine:
                engine.run()
                samples = [engine.run()[1] for _ in range(repetitions)]

            throughputs = [s.throughput_bps for s in samples]
            report.add(
                BenchRow(
                    codec=archive.header.codec_id.cli_name,
                    chunk_size=archive.header.chunk_size,
                    workers=w,
                    unit_chunks=u,
                    bytes_out=samples[0].bytes_out,
                    seconds=statistics.median(s.wall_time for s in samples),
                    min_bps=min(throughputs),
                    median_bps=statistics.median(throughputs),
                    max_bps=max(throughputs),
                    counters=samples[0].deterministic_counters(),
                )
            )
    return report
