import argparse
import logging
import sys
import warnings
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from .core.config import load_config
from .core.exceptions import ConfigError
from .reporters.scenario_reporter import EXIT_VALIDATION, SUBCOMMANDS, run_subcommand

logger = logging.getLogger("qeosim")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qeosim",
        description="Electro-optic sideband and coherent-state PSK simulations",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, type=Path, help="Scenario JSON document")
    parser.add_argument("--out", required=True, type=Path, help="Output directory")
    parser.add_argument("--seed", type=int, help="Override mc.seed (and QEOSIM_SEED)")
    parser.add_argument("--n", type=int, help="Override mc.n_samples for encode or mc.n_trials for ser")
    parser.add_argument("--plot", action="store_true", help="Also write PNG figures")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)
    warnings.simplefilter("default")

    try:
        config = load_config(args.config, seed_override=args.seed)
        if args.n is not None and args.n < 1:
            raise ConfigError("--n", "must be >= 1")
    except ConfigError as exc:
        logger.error("invalid configuration: %s", exc)
        return EXIT_VALIDATION

    logger.info("running %s from %s into %s", args.subcommand, args.config, args.out)
    return run_subcommand(args.subcommand, config, args.out, plot=args.plot, n_override=args.n)


if __name__ == "__main__":
    sys.exit(main())
