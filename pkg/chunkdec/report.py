# SPDX-License-Identifier: LGPL-2.1+

import dataclasses
import json
from textwrap import dedent
from typing import IO, Any, Dict, List

from .backend import format_bytes
from .container import ChunkedArchive


@dataclasses.dataclass
class BenchRow:
    """Throughput of one (workers, unit_chunks) configuration

    Throughput is output bytes per second of wall time.
    """

    codec: str
    chunk_size: int
    workers: int
    unit_chunks: int
    bytes_out: int
    seconds: float
    min_bps: float
    median_bps: float
    max_bps: float
    counters: Dict[str, int] = dataclasses.field(default_factory=dict)

    @property
    def throughput_bps(self) -> float:
        return self.median_bps

    def as_dict(self) -> Dict[str, Any]:
        return {
            "codec": self.codec,
            "chunk_size": self.chunk_size,
            "workers": self.workers,
            "unit_chunks": self.unit_chunks,
            "bytes_out": self.bytes_out,
            "seconds": self.seconds,
            "throughput_bps": self.throughput_bps,
            "min_bps": self.min_bps,
            "max_bps": self.max_bps,
            "counters": dict(self.counters),
        }

    def record(self) -> str:
        fields = {k: v for k, v in self.as_dict().items() if k != "counters"}
        fields.update(self.counters)
        return format_record(fields)


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_record(fields: Dict[str, Any]) -> str:
    "key=value pairs on one line, floats with six significant digits"
    return " ".join(f"{k}={_format_value(v)}" for k, v in fields.items())


@dataclasses.dataclass
class BenchReport:
    repetitions: int
    rows: List[BenchRow] = dataclasses.field(default_factory=list)

    def add(self, row: BenchRow) -> None:
        self.rows.append(row)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "repetitions": self.repetitions,
            "results": [row.as_dict() for row in self.rows],
        }

    def write_json(self, out: IO[str]) -> None:
        json.dump(self.as_dict(), out, indent=2)
        out.write("\n")

    def write_records(self, out: IO[str]) -> None:
        "One key=value line per configuration"
        for row in self.rows:
            print(row.record(), file=out)

    def speedup(self, workers: int, unit_chunks: int = 1) -> float:
        "Median throughput relative to the first row with the same unit size"
        base = next(r for r in self.rows if r.unit_chunks == unit_chunks)
        row = next(r for r in self.rows if r.workers == workers and r.unit_chunks == unit_chunks)
        return row.median_bps / base.median_bps if base.median_bps else 0.0


def write_archive_summary(archive: ChunkedArchive, out: IO[str], with_index: bool = False) -> None:
    header = archive.header
    ratio = archive.ratio()
    ratio_text = "n/a" if ratio is None else f"{ratio:.4f}"
    out.write(
        dedent(
            f"""\
            Codec:          {header.codec_id}
            Version:        {header.version}
            Element width:  {header.element_width}
            Chunk size:     {format_bytes(header.chunk_size)}
            Chunks:         {header.chunk_count}
            Uncompressed:   {header.total_uncompressed}
            Compressed:     {archive.compressed_size}
            Ratio:          {ratio_text}
            """
        )
    )

    if not with_index:
        return

    print(f"\n{'chunk':>8} {'offset':>12} {'length':>10} {'raw':>10} {'crc32':>8}", file=out)
    for i, entry in enumerate(archive.index):
        print(
            f"{i:>8} {entry.compressed_offset:>12} {entry.compressed_length:>10} "
            f"{entry.uncompressed_length:>10} {entry.checksum:08x}",
            file=out,
        )
