"""``qucnn`` command line: one subcommand per experiment.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import EXPERIMENTS, ConfigError, ExperimentConfig
from .experiments import RUNNERS, InvariantError
from .io import DataError

log = logging.getLogger("qucnn")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qucnn", description="SWAP-test convolution experiments")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML/JSON config file")
        p.add_argument("--seed", type=int)
        shots = p.add_mutually_exclusive_group()
        shots.add_argument("--shots", type=int, help="shots per SWAP test")
        shots.add_argument("--exact", action="store_true", help="exact probabilities, no sampling")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int)
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "forward":
            p.add_argument("--dataset", help="MNIST IDX image file")
            p.add_argument("--images", type=int, help="number of images")
            p.add_argument("--filter", help="filter vector file (one value per line)")
        if name in ("backprop-validate", "gradcheck"):
            p.add_argument("--dl-do", type=float)
        if name == "train-filter":
            p.add_argument("--runs", type=int)
            p.add_argument("--max-iters", type=int)
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {"experiment": args.experiment}
    for attr, key in [
        ("seed", "seed"),
        ("shots", "shots"),
        ("out", "output_dir"),
        ("workers", "workers"),
        ("dataset", "dataset_path"),
        ("images", "image_count"),
        ("filter", "filter_source"),
        ("dl_do", "dl_do"),
        ("runs", "runs"),
        ("max_iters", "max_iters"),
    ]:
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    if args.exact:
        overrides["shots"] = "exact"
    return config.replace(**overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args)
        result = RUNNERS[config.experiment](config)
    except ConfigError as exc:
        print(f"qucnn: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"qucnn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as exc:
        print(f"qucnn: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    log.info("%s done: %s", config.experiment, result)
    print(f"{config.experiment}: wrote {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
