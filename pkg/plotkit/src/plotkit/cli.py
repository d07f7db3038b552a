"""plotkit command line: render one isacsim figure from CSVs.

Usage: plotkit <figure_id> --in <csv_dir> --out <image_dir>
"""

import argparse
import sys

from .figures import FIGURE_IDS, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render isacsim experiment CSVs as figures",
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory containing the CSVs")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory for the rendered image")
    args = parser.parse_args(argv)
    try:
        path = render(args.figure_id, args.in_dir, args.out_dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
