import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figures", description="Render figures from key-rate CSV files."
    )
    parser.add_argument("figure_kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="input_csv", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_image", required=True, metavar="IMAGE")
    parser.add_argument("--logy", action="store_true", help="log-scale the y axis")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input_csv,
        figure_kind=args.figure_kind,
        output_image=args.output_image,
        log_scale_y=args.logy,
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
