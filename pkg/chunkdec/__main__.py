# SPDX-License-Identifier: LGPL-2.1+
# PYTHON_ARGCOMPLETE_OK
import os
import sys
from typing import List, Optional

from . import parse_args, run_verb
from .backend import ChunkdecException, ChunkdecPrinter, FormatError, die


def main(argv: Optional[List[str]] = None) -> None:
    try:
        args = parse_args(argv)

        # Change working directory if --directory is passed
        if args.directory:
            work_dir = args.directory
            if os.path.isdir(work_dir):
                os.chdir(work_dir)
            else:
                die(f"{work_dir} is not a directory!")

        run_verb(args)
    except FormatError as e:
        ChunkdecPrinter.warn(f"Error: {e}")
        sys.exit(e.exit_code)
    except ChunkdecException as e:
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()
