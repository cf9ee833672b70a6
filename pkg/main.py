"""Starts the command-line interface"""

import logging
import sys
from typing import List, Optional, Tuple

import click

from custom_exceptions import ConfigurationException, FileFormatException, UsageException
from local_environment import ENVIRONMENT_MANAGER
from manager import MANAGER
from models import RunConfig
from utils.basic import map_exit_code
from utils.files import read_qmatrix

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

VERBOSITY_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)

INPUT_FILE = click.Path(exists=True, dir_okay=False)
OUTPUT_FILE = click.Path(dir_okay=False)


def _parse_alphas(
    _ctx: click.Context, _param: click.Parameter, value: Optional[str]
) -> Optional[Tuple[float, ...]]:
    if value is None:
        return None
    try:
        alphas = tuple(float(part) for part in value.split(",") if part.strip())
    except ValueError as exc:
        raise click.BadParameter(f"'{value}' is not a comma-separated list of numbers") from exc
    if not alphas or any(not 0.0 < alpha < 0.5 for alpha in alphas):
        raise click.BadParameter("every alpha must lie in (0, 0.5)")
    return alphas


@click.group()
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker count.")
@click.option("-v", "--verbose", count=True, help="Repeat for more log output.")
@click.pass_context
def cli(ctx: click.Context, threads: Optional[int], verbose: int):
    """LCDM estimation, modification indices and simulation studies"""
    ctx.ensure_object(dict)
    ctx.obj["threads"] = threads
    ctx.obj["verbosity"] = verbose


@cli.command("fit")
@click.option("--responses", type=INPUT_FILE, required=True)
@click.option("--qmatrix", type=INPUT_FILE, required=True)
@click.option("--model", type=click.Choice(["lcdm", "dina", "mains", "custom"]), required=True)
@click.option("--mask", type=INPUT_FILE, default=None, help="JSON masks, custom only.")
@click.option("--structural-order", type=click.IntRange(min=1), default=None)
@click.option("--restarts", type=click.IntRange(min=0), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=OUTPUT_FILE, required=True)
@click.pass_context
def fit_command(ctx: click.Context, **options) -> RunConfig:
    """Fits a model and writes fit.json"""
    if options["mask"] is not None and options["model"] != "custom":
        raise UsageException("--mask is only valid with --model custom", flag="--mask")
    if options["model"] == "custom" and options["mask"] is None:
        raise UsageException("--model custom requires --mask", flag="--mask")

    q = read_qmatrix(options["qmatrix"])
    order = options["structural_order"]
    if order is not None and order > q.n_attributes:
        raise UsageException(
            f"--structural-order {order} exceeds the {q.n_attributes} attributes",
            flag="--structural-order",
        )
    return _run_config(ctx, "fit", options)


@cli.command("mi")
@click.option("--fit", "fit_path", type=INPUT_FILE, required=True)
@click.option("--responses", type=INPUT_FILE, required=True)
@click.option(
    "--candidates", type=click.Choice(["qmatrix", "model", "both"]), default="qmatrix"
)
@click.option("--max-order", type=click.IntRange(min=1), default=None)
@click.option(
    "--alpha",
    type=click.FloatRange(0.0, 0.5, min_open=True, max_open=True),
    default=None,
)
@click.option("--m-override", type=click.IntRange(min=1), default=None)
@click.option("--out", type=OUTPUT_FILE, required=True)
@click.option("--table", type=OUTPUT_FILE, default=None)
@click.pass_context
def mi_command(ctx: click.Context, **options) -> RunConfig:
    """Computes modification indices of a fitted model"""
    return _run_config(ctx, "mi", options)


@cli.command("classify")
@click.option("--fit", "fit_path", type=INPUT_FILE, required=True)
@click.option("--responses", type=INPUT_FILE, required=True)
@click.option("--out", type=OUTPUT_FILE, required=True)
@click.pass_context
def classify_command(ctx: click.Context, **options) -> RunConfig:
    """Writes posterior-mode profiles per examinee"""
    return _run_config(ctx, "classify", options)


@cli.command("simulate")
@click.option(
    "--study",
    type=click.Choice(["type1-q", "power-q", "type1-dina", "power-dina"]),
    required=True,
)
@click.option("--effect", type=click.Choice(["large", "smaller"]), default="large")
@click.option("--examinees", type=click.IntRange(min=1), default=None)
@click.option("--reps", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--split-rule", type=click.Choice(["equal-thirds", "mains-only"]), default=None)
@click.option("--structural-order", type=click.IntRange(min=1), default=None)
@click.option("--alphas", callback=_parse_alphas, default=None, help="e.g. 0.05,0.01")
@click.option("--out", type=OUTPUT_FILE, required=True)
@click.pass_context
def simulate_command(ctx: click.Context, **options) -> RunConfig:
    """Runs a Monte Carlo study and writes the study CSV"""
    return _run_config(ctx, "simulate", options)


def _run_config(ctx: click.Context, subcommand: str, options) -> RunConfig:
    return RunConfig(
        subcommand=subcommand,
        threads=ENVIRONMENT_MANAGER.get_threads(ctx.obj["threads"]),
        verbosity=ctx.obj["verbosity"],
        **options,
    )


def parse_and_validate(argv: Optional[List[str]]) -> Optional[RunConfig]:
    """Parses and validates the command line

    Args:
        argv (list[str], optional): arguments without the program name

    Returns:
        RunConfig | None: None when only help was printed
    """
    try:
        result = cli.main(args=argv, prog_name="main.py", standalone_mode=False)
    except click.ClickException as exc:
        flag = getattr(getattr(exc, "param", None), "opts", [None])[0]
        raise UsageException(exc.format_message(), flag=flag) from exc
    except click.exceptions.Abort as exc:
        raise UsageException("aborted") from exc
    if isinstance(result, RunConfig):
        return result
    return None


def configure_logging(verbosity: int) -> None:
    """Sets the root level from the -v count"""
    logging.getLogger().setLevel(VERBOSITY_LEVELS[min(verbosity, len(VERBOSITY_LEVELS) - 1)])


def main(argv: Optional[List[str]] = None) -> int:
    """Main function

    Returns:
        int: process exit code
    """
    logging.basicConfig(format=LOG_FORMAT, level=logging.WARNING)
    try:
        config = parse_and_validate(argv)
    except UsageException as exc:
        logger.error("usage error: %s", exc)
        return map_exit_code("USAGE")
    except (FileFormatException, ConfigurationException) as exc:
        logger.error("format error: %s", exc)
        return map_exit_code("FORMAT")
    if config is None:
        return map_exit_code("OK")

    configure_logging(config.verbosity)
    return MANAGER.run(config)


if __name__ == "__main__":
    sys.exit(main())
