"""Batch plotting CLI: plot <kind> --in PATH [--in PATH ...] --out PATH."""

import argparse
import sys

from .figures import FIGURE_KINDS, FigureJob, render
from .readers import ParseError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plot", description="Render figures from selmet output files."
    )
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="PATH", help="input file (repeatable for trajectories)")
    parser.add_argument("--out", required=True, metavar="PATH", help="output image")
    parser.add_argument("--title", default=None)
    parser.add_argument("--minima", default=None, metavar="PATH",
                        help="minima file to overlay on a landscape")
    parser.add_argument("--bounds", nargs=4, type=float, default=None,
                        metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
                        help="heatmap bounds (default -2 2 -2 2)")
    parser.add_argument("--bins", nargs=2, type=int, default=None, metavar=("NX", "NY"),
                        help="heatmap bins (default 40 40)")
    parser.add_argument("--centroid", type=int, default=1,
                        help="1-based centroid index for heatmaps")
    parser.add_argument("--n-bins", type=int, default=30, help="histogram bins")
    return parser


def job_from_args(args):
    options = {}
    if args.kind == "landscape" and args.minima:
        options["minima_path"] = args.minima
    if args.kind == "heatmap":
        if args.bounds:
            options["bounds"] = tuple(args.bounds)
        if args.bins:
            options["bins"] = tuple(args.bins)
        options["centroid"] = args.centroid
    if args.kind == "histogram":
        options["n_bins"] = args.n_bins
    return FigureJob(kind=args.kind, inputs=args.inputs, output=args.out,
                     title=args.title, options=options)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        render(job_from_args(args))
    except ParseError as e:
        print(f"plot: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"plot: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
