"""make-figures: render the standard images for a simulation run directory.

    make-figures --run-dir runs/default [--out figures/out]

Exit codes: 0 success, 2 missing file or column, 1 other failure.
"""

from __future__ import annotations

import argparse
import sys

from .plots import MissingColumnError, render_run


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="make-figures",
        description="Render parameter, norm, and error-surface figures from "
                    "a run's CSV outputs.")
    parser.add_argument("--run-dir", required=True,
                        help="directory holding timeseries.csv and snapshots.csv")
    parser.add_argument("--out", default=None,
                        help="output directory for images (default: the run dir)")
    args = parser.parse_args(argv)
    try:
        written = render_run(args.run_dir, args.out)
    except (MissingColumnError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
