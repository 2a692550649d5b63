# SPDX-License-Identifier: LGPL-2.1+

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import dataclasses
import functools
import os
import re
import sys
import zlib
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

from .backend import (
    ARG_DEBUG,
    ChunkdecException,
    ChunkdecPrinter,
    CodecId,
    CommandLineArguments,
    CorpusKind,
    Encoder,
    Executor,
    UsageError,
    VerificationError,
    die,
    format_bytes,
    parse_boolean,
    parse_bytes,
    warn,
)
from .codecs import encode_chunk, encode_deflate_zlib
from .container import (
    DEFAULT_CHUNK_SIZE,
    ELEMENT_WIDTHS,
    ChunkedArchive,
    ceil_div,
    chunk_uncompressed_offset,
    pack_chunks,
    pack_payloads,
    read_archive,
    read_archive_file,
    write_archive_file,
)
from .corpus import generate_corpus
from .engine import EngineConfig, EngineStats, bench_decompress, decompress_archive, default_workers
from .report import format_record, write_archive_summary

__version__ = "1"

ARCHIVE_SUFFIX = ".cdg"

# verb: (minimum, maximum) number of paths
CHUNKDEC_COMMANDS: Dict[str, Tuple[int, int]] = {
    "pack": (1, 1),
    "unpack": (1, 1),
    "verify": (2, 2),
    "bench": (1, 1),
    "summary": (1, 1),
    "generate": (0, 1),
    "help": (0, 0),
}

T = TypeVar("T")


def remove_duplicates(items: List[T]) -> List[T]:
    "Return list with any repetitions removed"
    # We use a dictionary to simulate an ordered set
    return list({x: None for x in items})


class ListAction(argparse.Action):
    delimiter: str

    def __init__(self, *args: Any, choices: Optional[Iterable[Any]] = None, **kwargs: Any) -> None:
        # argparse would check the whole comma separated string against choices, so check the items here
        self.list_choices = choices
        super().__init__(*args, **kwargs)

    def __call__(
        self,  # These type-hints are copied from argparse.pyi
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: Union[str, Sequence[Any], None],
        option_string: Optional[str] = None,
    ) -> None:
        ary = getattr(namespace, self.dest)
        if ary is None:
            ary = []
        else:
            ary = list(ary)

        if isinstance(values, str):
            # Support list syntax for comma separated lists as well
            if self.delimiter == "," and values.startswith("[") and values.endswith("]"):
                values = values[1:-1]

            values = [x.strip() for x in values.split(self.delimiter) if x.strip()]

        if isinstance(values, list):
            for x in values:
                if self.list_choices is not None and x not in self.list_choices and not x.startswith("!"):
                    raise argparse.ArgumentError(self, f"Unknown value {x!r}")

                # Remove ! prefixed list entries from list. !* removes all entries.
                if x == "!*":
                    ary = []
                elif x.startswith("!"):
                    if x[1:] in ary:
                        ary.remove(x[1:])
                else:
                    ary.append(x)
        else:
            ary.append(values)

        ary = remove_duplicates(ary)
        setattr(namespace, self.dest, ary)


class CommaDelimitedListAction(ListAction):
    delimiter = ","


class BooleanAction(argparse.Action):
    """Parse boolean command line arguments

    The argument may be added more than once. The argument may be set explicitly (--foo yes)
    or implicitly --foo. If the parameter name starts with "not-" or "without-" the value gets
    inverted.
    """

    def __init__(
        self,  # These type-hints are copied from argparse.pyi
        option_strings: Sequence[str],
        dest: str,
        nargs: Optional[Union[int, str]] = None,
        const: Any = True,
        default: Any = False,
        **kwargs: Any,
    ) -> None:
        if nargs is not None:
            raise ValueError("nargs not allowed")
        super().__init__(option_strings, dest, nargs="?", const=const, default=default, **kwargs)

    def __call__(
        self,  # These type-hints are copied from argparse.pyi
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: Union[str, Sequence[Any], None, bool],
        option_string: Optional[str] = None,
    ) -> None:
        new_value = self.default
        if isinstance(values, str):
            try:
                new_value = parse_boolean(values)
            except ValueError as exp:
                raise argparse.ArgumentError(self, str(exp))
        elif isinstance(values, bool):  # Assign const
            new_value = values
        else:
            raise argparse.ArgumentError(self, "Invalid argument for %s %s" % (str(option_string), str(values)))

        # invert the value if the argument name starts with "not" or "without"
        for option in self.option_strings:
            if option[2:].startswith("not-") or option[2:].startswith("without-"):
                new_value = not new_value
                break

        setattr(namespace, self.dest, new_value)


class CustomHelpFormatter(argparse.HelpFormatter):
    def _format_action_invocation(self, action: argparse.Action) -> str:
        if not action.option_strings or action.nargs == 0:
            return super()._format_action_invocation(action)
        default = self._get_default_metavar_for_optional(action)
        args_string = self._format_args(action, default)
        return ", ".join(action.option_strings) + " " + args_string


class ArgumentParserChunkdec(argparse.ArgumentParser):
    """ArgumentParser with support for chunkdec.default file(s)

    This derived class adds a simple ini file parser to python's ArgumentParser features.
    Each line of the ini file is converted to a command line argument. Example:
    "ChunkSize=64K" in the ini file appends "--chunk-size 64K" to sys.argv.

    Command line arguments starting with - or -- are considered as regular arguments. Arguments
    starting with @ are considered as files which are fed to the ini file parser implemented
    in this class.
    """

    # Mapping of ini keys whose command line argument isn't the kebab-case of the key.
    SPECIAL_CHUNKDEC_DEFAULT_PARAMS = {
        "Repetitions": "--reps",
        "ElementWidth": "--width",
    }

    fromfile_prefix_chars: str = "@"

    def __init__(self, *kargs: Any, **kwargs: Any) -> None:
        # Add config files to be parsed
        kwargs["fromfile_prefix_chars"] = ArgumentParserChunkdec.fromfile_prefix_chars
        kwargs["formatter_class"] = CustomHelpFormatter

        super().__init__(*kargs, **kwargs)

    @staticmethod
    def _camel_to_arg(camel: str) -> str:
        s1 = re.sub("(.)([A-Z][a-z]+)", r"\1-\2", camel)
        return re.sub("([a-z0-9])([A-Z])", r"\1-\2", s1).lower()

    @classmethod
    def _ini_key_to_cli_arg(cls, key: str) -> str:
        return cls.SPECIAL_CHUNKDEC_DEFAULT_PARAMS.get(key) or ("--" + cls._camel_to_arg(key))

    def _read_args_from_files(self, arg_strings: List[str]) -> List[str]:
        """Convert @ prefixed command line arguments with corresponding file content

        Regular arguments are just returned. Arguments prefixed with @ are considered as
        configuration file paths. The settings of each file are parsed and returned as
        command line arguments.
        Example:
          The following chunkdec.default is loaded.
          [Pack]
          Codec=rle2

          chunkdec is called like: chunkdec --width 4 pack data.bin

          arg_strings: ['@chunkdec.default', '--width', '4', '--', 'pack', 'data.bin']
          return value: ['--codec', 'rle2', '--width', '4', '--', 'pack', 'data.bin']
        """

        # expand arguments referencing files
        new_arg_strings = []
        for arg_string in arg_strings:
            # for regular arguments, just add them back into the list
            if not arg_string or arg_string[0] not in self.fromfile_prefix_chars:
                new_arg_strings.append(arg_string)
                continue
            # replace arguments referencing files with the file content
            try:
                config = configparser.RawConfigParser(delimiters="=", inline_comment_prefixes=("#",))
                config.optionxform = str  # type: ignore
                with open(arg_string[1:]) as args_file:
                    config.read_file(args_file)

                for section in config.sections():
                    for key, value in config.items(section):
                        cli_arg = self._ini_key_to_cli_arg(key)

                        # \n in value strings is forwarded. List actions treat it as a delimiter.
                        for action in self._actions:
                            if cli_arg in action.option_strings:
                                if isinstance(action, ListAction):
                                    value = value.replace(os.linesep, action.delimiter)
                        new_arg_strings.extend([cli_arg, value])
            except OSError as e:
                self.error(str(e))
        # return the modified argument list
        return new_arg_strings

    def hoist_options(self, tail: List[str]) -> Tuple[List[str], List[str]]:
        """Split the arguments following the verb into options and paths

        Options may follow the verb ("chunkdec bench a.cdg --reps 5"), but once a "--" precedes
        the verb everything after it is positional, so they are moved in front of it.
        """
        options: List[str] = []
        paths: List[str] = []
        i = 0
        while i < len(tail):
            arg = tail[i]
            action = self._option_string_actions.get(arg.split("=", 1)[0]) if arg.startswith("-") else None
            if arg == "--":
                paths += tail[i + 1 :]
                break
            if action is None:
                paths.append(arg)
            else:
                options.append(arg)
                if "=" not in arg and i + 1 < len(tail):
                    takes_value = action.nargs is None
                    if isinstance(action, BooleanAction):
                        takes_value = tail[i + 1].lower() in {"1", "0", "true", "false", "yes", "no"}
                    if takes_value:
                        i += 1
                        options.append(tail[i])
            i += 1
        return options, paths


def parse_int_list(values: List[str], option: str) -> List[int]:
    try:
        ints = [int(v) for v in values]
    except ValueError:
        die(f"{option} takes a comma separated list of integers, got {','.join(values)}", UsageError)
    return remove_duplicates(ints)


def create_parser() -> ArgumentParserChunkdec:
    parser = ArgumentParserChunkdec(prog="chunkdec", description="Chunk-parallel decompression", add_help=False)

    group = parser.add_argument_group("Commands")
    group.add_argument("verb", choices=CHUNKDEC_COMMANDS, help="Operation to execute")
    group.add_argument("paths", nargs="*", type=Path, metavar="PATH", help="Input, archive or output files")
    group.add_argument("-h", "--help", action="help", help="Show this help")
    group.add_argument("--version", action="version", version="%(prog)s " + __version__)

    group = parser.add_argument_group("Packing")
    group.add_argument(
        "--codec",
        type=CodecId.from_string,
        default=CodecId.deflate,
        help="Codec to compress chunks with (rle1, rle2, deflate)",
        metavar="CODEC",
    )
    group.add_argument(
        "--width",
        dest="element_width",
        type=int,
        choices=ELEMENT_WIDTHS,
        default=1,
        help="Element width in bytes",
    )
    group.add_argument(
        "--chunk-size",
        type=parse_bytes,
        default=DEFAULT_CHUNK_SIZE,
        help="Uncompressed bytes per chunk",
        metavar="BYTES",
    )
    group.add_argument(
        "--encoder",
        type=Encoder.from_string,
        default=Encoder.internal,
        choices=list(Encoder),
        help="Deflate encoder producing the chunks",
    )
    group.add_argument("--level", type=int, default=9, help="Compression level of the zlib encoder")
    group.add_argument(
        "--chunk-dir",
        type=Path,
        metavar="PATH",
        help="Take the raw deflate payload of each chunk from the files in this directory, in name order",
    )
    group.add_argument("-o", "--output", type=Path, metavar="PATH", help="Output file")
    group.add_argument("-f", "--force", action=BooleanAction, help="Overwrite existing output files")

    group = parser.add_argument_group("Engine")
    group.add_argument(
        "--workers",
        action=CommaDelimitedListAction,
        default=[],
        help="Worker count, or a comma separated list of counts to sweep for bench",
        metavar="N",
    )
    group.add_argument(
        "--unit-chunks",
        action=CommaDelimitedListAction,
        default=[],
        help="Consecutive chunks claimed per work unit, or a list to sweep for bench",
        metavar="N",
    )
    group.add_argument(
        "--executor",
        type=Executor.from_string,
        default=Executor.process,
        choices=list(Executor),
        help="Run workers as processes or threads",
    )
    group.add_argument(
        "--block-size", type=parse_bytes, default=128, help="Bytes fetched per bitstream refill", metavar="BYTES"
    )
    group.add_argument("--strict", action=BooleanAction, help="Fail on chunks decoding to fewer bytes than indexed")
    group.add_argument("--stats", action=BooleanAction, help="Print decode counters after unpacking")

    group = parser.add_argument_group("Benchmark")
    group.add_argument("--reps", dest="repetitions", type=int, default=5, help="Timed runs per configuration")
    group.add_argument("--json", action=BooleanAction, help="Print the report as JSON")

    group = parser.add_argument_group("Corpus")
    group.add_argument(
        "--corpus",
        type=CorpusKind.from_string,
        default=CorpusKind.constant_runs,
        choices=list(CorpusKind),
        help="Kind of data to generate: " + "; ".join(f"{k}: {doc}" for k, doc in CorpusKind.doc().items()),
    )
    group.add_argument("--size", type=parse_bytes, default=16 * 1024 * 1024, help="Bytes to generate", metavar="BYTES")
    group.add_argument("--seed", type=int, default=0, help="Random seed")

    group = parser.add_argument_group("Additional Configuration")
    group.add_argument(
        "-C", "--directory",
        help="Change to specified directory before doing anything",
        type=Path,
        metavar="PATH",
    )
    group.add_argument(
        "--default",
        dest="default_path",
        help="Read configuration data from file",
        type=Path,
        metavar="PATH",
    )
    group.add_argument(
        "--debug",
        action=CommaDelimitedListAction,
        default=[],
        help="Turn on debugging output",
        choices=("chunks", "args"),
    )
    try:
        import argcomplete

        argcomplete.autocomplete(parser)
    except ImportError:
        pass

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Load default values from files and parse command line arguments"""
    parser = create_parser()

    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)  # make a copy 'cause we'll be modifying the list later on

    # Settings from chunkdec.default files are converted to command line arguments, so a
    # -- goes before the verb, otherwise it might be taken as the value of a boolean option.
    # For example chunkdec --strict unpack a.cdg would be treated as --strict=unpack.
    for v_i, arg in enumerate(argv):
        if arg in CHUNKDEC_COMMANDS:
            if v_i > 0 and argv[v_i - 1] == "--":
                v_i -= 1
                argv.pop(v_i)
            options, paths = parser.hoist_options(argv[v_i + 1 :])
            argv = argv[:v_i] + options + ["--", arg] + paths
            break

    # First run of command line arguments parsing to get the directory of chunkdec.default file and the verb.
    args_pre_parsed, _ = parser.parse_known_args(argv)

    if args_pre_parsed.verb == "help":
        parser.print_help()
        sys.exit(0)

    # Relative paths are not valid yet since we are not in the final working directory yet.
    if args_pre_parsed.directory is not None:
        directory = args_pre_parsed.directory = args_pre_parsed.directory.absolute()
    else:
        directory = Path.cwd()

    # Note that directory will be ignored if default_path is absolute
    default_path = directory / (args_pre_parsed.default_path or "chunkdec.default")
    if args_pre_parsed.default_path and not default_path.exists():
        die(f"No config file found at {default_path}", UsageError)

    return parse_args_file_group(argv, default_path, directory / "chunkdec.default.d")


def parse_args_file_group(argv: List[str], default_path: Path, defaults_dir: Path) -> argparse.Namespace:
    """Parse a chunkdec.default and the chunkdec.default.d/* files."""
    # Add the @ prefixed filenames to current argument list in inverse priority order.
    defaults_files = []

    if default_path.is_file():
        defaults_files += [f"{ArgumentParserChunkdec.fromfile_prefix_chars}{default_path}"]

    if defaults_dir.is_dir():
        for path in sorted(defaults_dir.iterdir()):
            if path.is_file():
                defaults_files += [f"{ArgumentParserChunkdec.fromfile_prefix_chars}{path}"]

    return create_parser().parse_args(defaults_files + argv)


def load_args(args: argparse.Namespace) -> CommandLineArguments:
    ARG_DEBUG.clear()
    ARG_DEBUG.update(args.debug)

    lo, hi = CHUNKDEC_COMMANDS[args.verb]
    if not lo <= len(args.paths) <= hi:
        expected = str(lo) if lo == hi else f"{lo} to {hi}"
        die(f"'{args.verb}' takes {expected} path(s), got {len(args.paths)}", UsageError)

    args.workers = parse_int_list(args.workers, "--workers") or [default_workers()]
    args.unit_chunks = parse_int_list(args.unit_chunks, "--unit-chunks") or [1]

    if any(w < 1 for w in args.workers):
        die("--workers must be >= 1", UsageError)
    if any(u < 1 for u in args.unit_chunks):
        die("--unit-chunks must be >= 1", UsageError)
    if args.verb != "bench" and (len(args.workers) > 1 or len(args.unit_chunks) > 1):
        die("Lists of --workers or --unit-chunks are only accepted by 'bench'", UsageError)

    if args.repetitions < 1:
        die("--reps must be >= 1", UsageError)
    if args.block_size < 1:
        die("--block-size must be >= 1", UsageError)
    if not 0 <= args.level <= 9:
        die("--level must be between 0 and 9", UsageError)

    if args.verb == "pack":
        if args.chunk_size < 1 or args.chunk_size % args.element_width != 0:
            die(f"--chunk-size must be a positive multiple of --width={args.element_width}", UsageError)
        if args.codec == CodecId.deflate and args.element_width != 1:
            die("--codec=deflate works on bytes, use --width=1", UsageError)
        if args.encoder == Encoder.zlib and args.codec != CodecId.deflate:
            die("--encoder=zlib can only be used with --codec=deflate", UsageError)
        if args.chunk_dir is not None:
            if args.codec != CodecId.deflate:
                die("--chunk-dir can only be used with --codec=deflate", UsageError)
            if args.encoder != Encoder.internal:
                die("--chunk-dir and --encoder=zlib are mutually exclusive", UsageError)
            if not args.chunk_dir.is_dir():
                die(f"--chunk-dir={args.chunk_dir} is not a directory", UsageError)
    elif args.chunk_dir is not None:
        die("--chunk-dir is only accepted by 'pack'", UsageError)

    args = CommandLineArguments(**vars(args))

    if "args" in ARG_DEBUG:
        for field in dataclasses.fields(args):
            ChunkdecPrinter.info(f"{field.name:>16}: {getattr(args, field.name)}")

    return args


def check_output(args: CommandLineArguments, output: Path) -> None:
    if args.force:
        return

    if output.exists():
        die(f"Output path {output} exists already. (Consider invocation with --force.)")


def read_input(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        die(f"Cannot read {path}: {e.strerror}")


def write_output(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as e:
        die(f"Cannot write {path}: {e.strerror}")


def engine_config(args: CommandLineArguments) -> EngineConfig:
    return EngineConfig(
        workers=args.workers[0],
        unit_chunks=args.unit_chunks[0],
        strict_length=args.strict,
        collect_stats=args.stats or "chunks" in ARG_DEBUG,
        executor=args.executor,
        block_size=args.block_size,
    )


def chunk_encoder(args: CommandLineArguments) -> Callable[[bytes], bytes]:
    "A picklable encoder, so chunks can be compressed in worker processes"
    if args.encoder == Encoder.zlib:
        return functools.partial(encode_deflate_zlib, level=args.level)
    return functools.partial(encode_chunk, args.codec, element_width=args.element_width)


def encode_chunks(args: CommandLineArguments, data: bytes) -> bytes:
    encode = chunk_encoder(args)
    workers = args.workers[0]
    if workers == 1:
        return pack_chunks(data, args.codec, args.element_width, args.chunk_size, encode)

    pool: concurrent.futures.Executor
    if args.executor == Executor.process:
        pool = concurrent.futures.ProcessPoolExecutor(max_workers=workers)
    else:
        pool = concurrent.futures.ThreadPoolExecutor(max_workers=workers)
    with pool:
        return pack_chunks(data, args.codec, args.element_width, args.chunk_size, encode, pool)


def read_chunk_payloads(chunk_dir: Path, count: int) -> List[bytes]:
    files = sorted(p for p in chunk_dir.iterdir() if p.is_file())
    if len(files) != count:
        die(f"{chunk_dir} holds {len(files)} chunk files, the input splits into {count} chunks", UsageError)
    return [read_input(p) for p in files]


def print_chunk_records(stats: EngineStats) -> None:
    for c in stats.chunks:
        ChunkdecPrinter.info(
            format_record(
                {
                    "chunk": c.index,
                    "bytes_in": c.bytes_in,
                    "bytes_out": c.bytes_out,
                    "refills": c.refill_count,
                    "duration": c.duration,
                }
            )
        )


def decompress(args: CommandLineArguments, archive: ChunkedArchive) -> Tuple[bytes, EngineStats]:
    config = engine_config(args)
    with ChunkdecPrinter.complete_step(
        f"Decompressing {archive.chunk_count} chunks with {config.workers} {config.executor} workers…",
        "Decompressed {} in {:.3f}s",
    ) as output:
        data, stats = decompress_archive(archive, config)
        output += [format_bytes(len(data)), stats.wall_time]

    if "chunks" in ARG_DEBUG:
        print_chunk_records(stats)
    return data, stats


def pack(args: CommandLineArguments) -> None:
    source = args.paths[0]
    try:
        size = source.stat().st_size
    except OSError as e:
        die(f"Cannot read {source}: {e.strerror}")
    if size % args.element_width != 0:
        die(f"{source} holds {size} bytes, not a multiple of --width={args.element_width}", UsageError)

    output = args.output or source.with_name(source.name + ARCHIVE_SUFFIX)
    check_output(args, output)

    data = read_input(source)
    if args.chunk_dir is not None:
        payloads = read_chunk_payloads(args.chunk_dir, ceil_div(len(data), args.chunk_size))
        step = f"Packing {source} with the chunks in {args.chunk_dir}…"
    else:
        step = f"Packing {source} with {args.codec} in {format_bytes(args.chunk_size)} chunks…"

    with ChunkdecPrinter.complete_step(step, "Wrote {}") as out:
        if args.chunk_dir is not None:
            archive_bytes = pack_payloads(data, args.codec, args.element_width, args.chunk_size, payloads)
        else:
            archive_bytes = encode_chunks(args, data)
        write_archive_file(output, archive_bytes)
        out.append(output)

    ratio = read_archive(archive_bytes).ratio()
    print(
        format_record(
            {
                "compressed": len(archive_bytes),
                "uncompressed": len(data),
                "ratio": "n/a" if ratio is None else f"{ratio:.4f}",
            }
        )
    )


def unpack(args: CommandLineArguments) -> None:
    source = args.paths[0]
    if args.output is not None:
        output = args.output
    elif source.suffix == ARCHIVE_SUFFIX:
        output = source.with_suffix("")
    else:
        output = source.with_name(source.name + ".out")
    check_output(args, output)

    archive = read_archive_file(source)
    data, stats = decompress(args, archive)
    write_output(output, data)

    if args.stats:
        fields: Dict[str, Any] = {
            "bytes_out": len(data),
            "wall_time": stats.wall_time,
            "throughput_bps": stats.throughput_bps,
        }
        fields.update(stats.deterministic_counters())
        print(format_record(fields))


def verify(args: CommandLineArguments) -> None:
    archive_path, original_path = args.paths
    archive = read_archive_file(archive_path)
    original = read_input(original_path)

    if len(original) != archive.header.total_uncompressed:
        die(
            f"{original_path} holds {len(original)} bytes, {archive_path} decompresses to "
            f"{archive.header.total_uncompressed}",
            VerificationError,
        )

    bad_chunks = []
    for i, entry in enumerate(archive.index):
        offset = chunk_uncompressed_offset(archive, i)
        if zlib.crc32(original[offset : offset + entry.uncompressed_length]) != entry.checksum:
            bad_chunks.append(i)

    data, _ = decompress(args, archive)
    if data != original:
        first = next(i for i, (a, b) in enumerate(zip(data, original)) if a != b)
        die(f"Decompressed data differs from {original_path} at byte {first}", VerificationError)
    if bad_chunks:
        die(f"Checksums of chunks {', '.join(map(str, bad_chunks))} do not match {original_path}", VerificationError)

    print(format_record({"verified": "yes", "chunks": archive.chunk_count, "bytes": len(data)}))


def bench(args: CommandLineArguments) -> None:
    archive = read_archive_file(args.paths[0])
    if archive.chunk_count < max(args.workers):
        warn(f"Only {archive.chunk_count} chunks for up to {max(args.workers)} workers")

    with ChunkdecPrinter.complete_step(
        f"Benchmarking {len(args.workers) * len(args.unit_chunks)} configurations, {args.repetitions} runs each…"
    ):
        report = bench_decompress(archive, engine_config(args), args.repetitions, args.workers, args.unit_chunks)

    if args.json:
        report.write_json(sys.stdout)
    else:
        report.write_records(sys.stdout)


def summary(args: CommandLineArguments) -> None:
    archive = read_archive_file(args.paths[0])
    write_archive_summary(archive, sys.stdout, with_index="chunks" in ARG_DEBUG)


def generate(args: CommandLineArguments) -> None:
    output = args.output or (args.paths[0] if args.paths else Path(f"{args.corpus}.bin"))
    check_output(args, output)

    with ChunkdecPrinter.complete_step(
        f"Generating {format_bytes(args.size)} of {args.corpus} data…", "Wrote {}"
    ) as out:
        write_output(output, generate_corpus(args.corpus, args.size, args.element_width, args.seed))
        out.append(output)


VERBS: Dict[str, Callable[[CommandLineArguments], None]] = {
    "pack": pack,
    "unpack": unpack,
    "verify": verify,
    "bench": bench,
    "summary": summary,
    "generate": generate,
}


def run_verb(raw: argparse.Namespace) -> None:
    args = load_args(raw)
    VERBS[args.verb](args)


__all__ = [
    "ChunkdecException",
    "create_parser",
    "load_args",
    "parse_args",
    "run_verb",
]
