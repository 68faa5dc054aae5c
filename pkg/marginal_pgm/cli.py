"""
Command-line entry point for marginal-pgm.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .application import PGMApplication
from .core.errors import ModelTooLargeError, PGMError
from .utils.config import ConfigManager, default_log_level

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNEXPECTED = 2


def build_parser() -> argparse.ArgumentParser:
    """Create the command-line parser.

    Returns:
        argparse.ArgumentParser: Parser for the config path and run overrides.
    """
    parser = argparse.ArgumentParser(
        prog="marginal-pgm",
        description="Estimate a graphical model from noisy marginal measurements "
                    "and answer queries from it.",
    )
    parser.add_argument("config", help="path to the JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="master random seed")
    parser.add_argument("--output-dir", default=None, help="directory for the run artifacts")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for per-iteration detail")
    parser.add_argument("--noiseless", action="store_true", default=None,
                        help="skip noise (test mode; outputs are NOT private)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def configure_logging(verbosity: int) -> None:
    """Configure the root logger.

    Args:
        verbosity: Count of ``-v`` flags; 0 falls back to ``PGM_LOG_LEVEL``.
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, default_log_level(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the command line."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        overrides = {
            "seed": args.seed,
            "output_dir": str(Path(args.output_dir).resolve()) if args.output_dir else None,
            "noiseless": args.noiseless,
        }
        config = ConfigManager(args.config, overrides).to_run_config()
        result = PGMApplication(config).run()
    except ModelTooLargeError as err:
        logger.error(err.qualified())
        print(f"error: {err.qualified()}", file=sys.stderr)
        if err.model_size is not None:
            print(f"model size: {err.model_size}", file=sys.stderr)
        return EXIT_ERROR
    except PGMError as err:
        logger.error(err.qualified())
        print(f"error: {err.qualified()}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as err:  # noqa: BLE001
        logger.exception("unexpected failure")
        print(f"unexpected error: {err}", file=sys.stderr)
        return EXIT_UNEXPECTED
    print(f"done: {result.report.iterations} iterations, final loss "
          f"{result.report.final_loss:.6g}; outputs in {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
