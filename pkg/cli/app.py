import argparse
import platform
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

import active_self
from active_self.errors import ActiveSelfError
from active_self.pipeline import SCHEMA_VERSION, VARIANTS, write_json
from config.logging_config import setup_logging, get_cli_logger
from config.settings import OUTPUT_DIR, apply_profile_defaults, load_config, load_profile
from cli.commands import CommandResult, register_commands

logger = get_cli_logger()

MANIFEST_FILE = "manifest.json"
LOG_DIR = "logs"
UNEXPECTED_ERROR_EXIT = 1


def log_dir(out_dir: Path) -> Path:
    return out_dir / LOG_DIR


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None,
                        help="key=value config file (default: built-in defaults)")
    common.add_argument("--out", type=str, default=None,
                        help=f"Output directory (default: {OUTPUT_DIR})")
    common.add_argument("--seed", type=int, default=None, help="Root seed override")
    common.add_argument("--variant", type=str, default=None, choices=VARIANTS,
                        help="Adaptation variant override")
    common.add_argument("--iters", type=int, default=None, help="Maximum adaptation iterations override")
    common.add_argument("--jobs", type=int, default=None, help="Parallel LOSO folds (default: 1)")
    common.add_argument("--target", type=str, default=None, help="Target subject override")

    parser = argparse.ArgumentParser(
        prog="activeself",
        description="Cross-subject adaptation of activity classifiers from sparse oracle labels.",
    )
    subparsers = parser.add_subparsers(dest="verb", metavar="VERB", required=True)
    register_commands(subparsers, parents=[common])
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "seed": args.seed,
        "output_dir": args.out,
        "jobs": args.jobs,
        "run.variant": args.variant,
        "run.max_iterations": args.iters,
        "split.target_subject": args.target,
    }


def write_manifest(out_dir: Path, verb: str, argv: List[str], config, result: CommandResult) -> Path:
    """Everything needed to replay the run: config, its hash, seeds and library versions."""
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "verb": verb,
        "argv": argv,
        "created_at": pd.Timestamp.now(tz="UTC").isoformat(),
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "seeds": {"root": config.seed, **result.seeds},
        "outputs": result.outputs,
        "summary": result.summary,
        "versions": {
            "active_self": active_self.__version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "pandas": pd.__version__,
        },
    }
    return write_json(manifest, out_dir / MANIFEST_FILE)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the verb and return the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = create_parser().parse_args(argv)

    try:
        config = load_config(args.config, _overrides(args))
    except ActiveSelfError as e:
        setup_logging(log_dir=str(log_dir(Path(args.out) if args.out else OUTPUT_DIR)))
        logger.error(f"{args.verb} failed ({type(e).__name__}): {e}")
        return e.exit_code

    setup_logging(config.log_level, log_dir=str(log_dir(Path(config.output_dir))))
    try:
        profile = load_profile(config)
        config = apply_profile_defaults(config, profile)
        logger.info(f"{args.verb}: profile {config.profile_name}, config {config.config_hash()[:12]}")
        result = args.handler(args, config, profile)
        manifest = write_manifest(Path(config.output_dir), args.verb, argv, config, result)
        logger.info(f"{args.verb} finished; manifest at {manifest}")
        return 0
    except ActiveSelfError as e:
        logger.error(f"{args.verb} failed ({type(e).__name__}): {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"{args.verb} failed unexpectedly: {e}")
        return UNEXPECTED_ERROR_EXIT


if __name__ == '__main__':
    sys.exit(main())
