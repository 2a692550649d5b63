# SPDX-License-Identifier: LGPL-2.1+

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import enum
import sys
from pathlib import Path
from typing import Any, Dict, Generator, List, NoReturn, Optional, Set, Tuple, Type, cast


class ChunkdecException(Exception):
    """Leads to sys.exit"""

    exit_code = 1


class UsageError(ChunkdecException):
    exit_code = 2


class VerificationError(ChunkdecException):
    exit_code = 4


class FormatError(ChunkdecException):
    """Something is wrong with an archive or with compressed chunk data"""

    exit_code = 3


class ArchiveErrorKind(enum.Enum):
    truncated_header = "truncated-header"
    bad_magic = "bad-magic"
    bad_version = "bad-version"
    unknown_codec = "unknown-codec"
    truncated_index = "truncated-index"
    truncated_payload = "truncated-payload"
    invariant_violation = "invariant-violation"
    inconsistent_lengths = "inconsistent-lengths"
    index_out_of_range = "index-out-of-range"

    def __str__(self) -> str:
        return self.value


class ArchiveError(FormatError):
    def __init__(self, kind: ArchiveErrorKind, message: str) -> None:
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message

    def __reduce__(self) -> Tuple[Any, ...]:
        return (self.__class__, (self.kind, self.message))


class CodecErrorKind(enum.Enum):
    truncated_stream = "truncated-stream"
    width_too_large = "width-too-large"
    varint_overflow = "varint-overflow"
    output_overflow = "output-overflow"
    bad_offset = "bad-offset"
    under_run = "under-run"
    invalid_width_code = "invalid-width-code"
    patch_overflow = "patch-overflow"
    bad_block_type = "bad-block-type"
    len_nlen_mismatch = "len-nlen-mismatch"
    over_subscribed = "over-subscribed"
    incomplete_tree = "incomplete-tree"
    invalid_code = "invalid-code"
    distance_too_far = "distance-too-far"

    def __str__(self) -> str:
        return self.value


class CodecError(FormatError):
    """Raised by streams, windows and decoders

    The engine fills in the chunk index once the error leaves a decoder.
    """

    def __init__(self, kind: CodecErrorKind, message: str, chunk: Optional[int] = None) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.chunk = chunk

    def __str__(self) -> str:
        where = f"chunk {self.chunk}: " if self.chunk is not None else ""
        return f"{where}{self.kind}: {self.message}"

    def __reduce__(self) -> Tuple[Any, ...]:
        return (CodecError, (self.kind, self.message, self.chunk))


class BitReadErrorKind(enum.Enum):
    past_end = "past-end"
    width_too_large = "width-too-large"

    def __str__(self) -> str:
        return self.value


class BitReadError(CodecError):
    def __init__(self, reason: BitReadErrorKind, message: str, chunk: Optional[int] = None) -> None:
        kind = CodecErrorKind.truncated_stream if reason == BitReadErrorKind.past_end else CodecErrorKind.width_too_large
        super().__init__(kind, message, chunk)
        self.reason = reason

    def __reduce__(self) -> Tuple[Any, ...]:
        return (BitReadError, (self.reason, self.message, self.chunk))


class CrcMismatchError(FormatError):
    def __init__(self, chunk: int, expected: int, actual: int) -> None:
        super().__init__(f"chunk {chunk}: crc-mismatch: expected {expected:08x}, got {actual:08x}")
        self.chunk = chunk
        self.expected = expected
        self.actual = actual

    def __reduce__(self) -> Tuple[Any, ...]:
        return (self.__class__, (self.chunk, self.expected, self.actual))


# This global should be initialized after parsing arguments
ARG_DEBUG: Set[str] = set()


class Parseable:
    "A mix-in to provide conversions for argparse"

    def __repr__(self) -> str:
        """Return the member name without the class name"""
        return cast(str, getattr(self, "name"))

    def __str__(self) -> str:
        return self.__repr__()

    @classmethod
    def from_string(cls: Any, name: str) -> Any:
        """A convenience method to be used with argparse"""
        try:
            return cls[name.replace("-", "_")]
        except KeyError:
            raise argparse.ArgumentTypeError(f"unknown {cls.__name__}: {name!r}")


class CodecId(Parseable, enum.Enum):
    rle_v1 = 1
    rle_v2 = 2
    deflate = 3

    @property
    def cli_name(self) -> str:
        return {CodecId.rle_v1: "rle1", CodecId.rle_v2: "rle2", CodecId.deflate: "deflate"}[self]

    def __str__(self) -> str:
        return self.cli_name

    @classmethod
    def from_string(cls, name: str) -> CodecId:
        for codec in cls:
            if name in (codec.cli_name, codec.name):
                return codec
        raise argparse.ArgumentTypeError(f"unknown codec: {name!r}")


class BitOrder(enum.Enum):
    lsb_first = "lsb-first"
    msb_first = "msb-first"

    def __str__(self) -> str:
        return self.value


class Executor(Parseable, enum.Enum):
    process = "process"
    thread = "thread"


class Encoder(Parseable, enum.Enum):
    internal = "internal"  # our own encoders, stored or fixed Huffman for deflate
    zlib = "zlib"  # raw deflate streams produced by the zlib library


class CorpusKind(Parseable, enum.Enum):
    constant_runs = "constant-runs"
    arithmetic = "arithmetic"
    uniform_random = "uniform-random"
    power_law = "power-law"
    genome = "genome"
    skewed = "skewed"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def doc(cls) -> Dict["CorpusKind", str]:
        return {
            cls.constant_runs: "long runs of repeated values",
            cls.arithmetic: "segments of constant-delta sequences",
            cls.uniform_random: "uniformly distributed values, essentially incompressible",
            cls.power_law: "Zipf distributed values",
            cls.genome: "A/C/G/T/N text with repeated stretches",
            cls.skewed: "chunk-sized regions alternating between very and barely compressible",
        }


@dataclasses.dataclass
class CommandLineArguments:
    """Type-hinted storage for command line arguments."""

    verb: str
    paths: List[Path]

    codec: CodecId
    element_width: int
    chunk_size: int
    encoder: Encoder
    level: int
    chunk_dir: Optional[Path]
    output: Optional[Path]
    force: bool

    workers: List[int]
    unit_chunks: List[int]
    executor: Executor
    block_size: int
    strict: bool
    stats: bool

    repetitions: int
    json: bool

    corpus: CorpusKind
    size: int
    seed: int

    directory: Optional[Path]
    default_path: Optional[Path]
    debug: List[str]


def die(message: str, exception: Type[ChunkdecException] = ChunkdecException) -> NoReturn:
    ChunkdecPrinter.warn(f"Error: {message}")
    raise exception(message)


def warn(message: str) -> None:
    ChunkdecPrinter.warn(f"Warning: {message}")


def format_bytes(num_bytes: int) -> str:
    if num_bytes >= 1024 * 1024 * 1024:
        return f"{num_bytes/1024**3 :0.1f}G"
    if num_bytes >= 1024 * 1024:
        return f"{num_bytes/1024**2 :0.1f}M"
    if num_bytes >= 1024:
        return f"{num_bytes/1024 :0.1f}K"

    return f"{num_bytes}B"


def parse_bytes(num_bytes: str) -> int:
    if num_bytes.endswith("G"):
        factor = 1024 ** 3
    elif num_bytes.endswith("M"):
        factor = 1024 ** 2
    elif num_bytes.endswith("K"):
        factor = 1024
    else:
        factor = 1

    if factor > 1:
        num_bytes = num_bytes[:-1]

    result = int(num_bytes) * factor
    if result < 0:
        raise ValueError("Size out of range")

    return result


def parse_boolean(s: str) -> bool:
    "Parse 1/true/yes as true and 0/false/no as false"
    s_l = s.lower()
    if s_l in {"1", "true", "yes"}:
        return True

    if s_l in {"0", "false", "no"}:
        return False

    raise ValueError(f"Invalid literal for bool(): {s!r}")


class ChunkdecPrinter:
    out_file = sys.stderr
    isatty = out_file.isatty()

    bold = "\033[0;1;39m" if isatty else ""
    red = "\033[31;1m" if isatty else ""
    reset = "\033[0m" if isatty else ""

    prefix = "‣ "

    level = 0

    @classmethod
    def _print(cls, text: str) -> None:
        cls.out_file.write(text)

    @classmethod
    def print_step(cls, text: str) -> None:
        prefix = cls.prefix + " " * cls.level
        if sys.exc_info()[0]:
            # We are falling through exception handling blocks.
            # De-emphasize this step here, so the user can tell more
            # easily which step generated the exception. The exception
            # or error will only be printed after we finish cleanup.
            cls._print(f"{prefix}({text})\n")
        else:
            cls._print(f"{prefix}{cls.bold}{text}{cls.reset}\n")

    @classmethod
    def info(cls, text: str) -> None:
        cls._print(text + "\n")

    @classmethod
    def warn(cls, text: str) -> None:
        cls._print(f"{cls.prefix}{cls.red}{text}{cls.reset}\n")

    @classmethod
    @contextlib.contextmanager
    def complete_step(cls, text: str, text2: Optional[str] = None) -> Generator[List[Any], None, None]:
        cls.print_step(text)

        cls.level += 1
        try:
            args: List[Any] = []
            yield args
        finally:
            cls.level -= 1
            assert cls.level >= 0

        if text2 is not None:
            cls.print_step(text2.format(*args))
