"""main module"""

import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click

from src.app.config import TOOL_NAME, TOOL_VERSION, settings
from src.app.schemas.corpus import CategoryKeywords
from src.app.schemas.error import EXIT_OK, ConfigError
from src.app.services.experiment_service import config_hash_of, experiment_service
from src.app.services.report_service import report_service
from src.app.utils.error_handlers import handle_cli_error
from src.app.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

config_option = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), help="Experiment config (YAML)."
)
jobs_option = click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker cap.")
out_option = click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output directory.")
strict_option = click.option("--strict-log-regex", is_flag=True, default=None, help="Word-boundary log patterns.")


def _keywords(config_path: Optional[Path], seed: Optional[int] = None) -> Tuple[Optional[CategoryKeywords], Optional[int]]:
    """Keyword overrides and seed of an optional config; --seed wins"""
    if config_path is None:
        return None, seed
    loaded = experiment_service.load_config(config_path, {"seed": seed})
    return loaded.config.keywords, loaded.config.seed


def _overrides(seed, jobs, out_dir, force, strict) -> dict:
    return {
        "seed": seed,
        "jobs": jobs,
        "output_dir": str(out_dir) if out_dir is not None else None,
        "force": force,
        "strict_log_regex": strict,
    }


@click.group()
@click.version_option(TOOL_VERSION, prog_name=TOOL_NAME)
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool):
    """Where-to-log toolkit: mine Java corpora, extract leakage-safe method features, train and evaluate log placement models."""
    setup_logging("DEBUG" if verbose else settings.log_level)


@cli.command()
@click.argument("roots", nargs=-1, required=True, type=click.Path(path_type=Path))
@config_option
@click.option("--seed", type=int, default=None, help="Seed recorded in the provenance block.")
@jobs_option
@out_option
@strict_option
def scan(roots, config_path, seed, jobs, out_dir, strict_log_regex):
    """Measure log pervasiveness of one or more project roots."""
    keywords, seed = _keywords(config_path, seed)
    named = {}
    for root in roots:
        name = root.resolve().name or str(root)
        if name in named:
            raise ConfigError(f"two roots share the project name '{name}'")
        named[name] = root
    path = experiment_service.run_scan(
        named,
        out_dir or Path("out"),
        keywords=keywords,
        jobs=jobs or settings.jobs,
        strict=bool(strict_log_regex) or settings.strict_log_regex,
        seed=seed,
    )
    click.echo(str(path))


@cli.command()
@click.argument("root", type=click.Path(path_type=Path))
@config_option
@jobs_option
@out_option
@strict_option
@click.option("--force", is_flag=True, help="Emit the dataset even above the residual log threshold.")
@click.option("--shadow", "shadow_dir", type=click.Path(file_okay=False, path_type=Path), help="Mirror log-free sources here.")
@click.option("--name", default=None, help="Project name (defaults to the root directory name).")
def extract(root, config_path, jobs, out_dir, strict_log_regex, force, shadow_dir, name):
    """Remove logs and extract one labeled feature vector per method."""
    keywords, seed = _keywords(config_path)
    name = name or root.resolve().name
    dataset = experiment_service.extract_project(
        name,
        root,
        out_dir or Path("out"),
        keywords=keywords,
        jobs=jobs or settings.jobs,
        strict=bool(strict_log_regex) or settings.strict_log_regex,
        force=force,
        shadow_dir=shadow_dir,
        seed=seed,
        config_hash=config_hash_of((keywords or CategoryKeywords()).model_dump()),
    )
    click.echo(f"{len(dataset)} methods, {dataset.positives} logged")


@cli.command()
@config_option
@click.option("--seed", type=int, default=None, help="Master seed (overrides the config).")
@jobs_option
@out_option
@strict_option
@click.option("--force", is_flag=True, default=None, help="Ignore the residual log threshold.")
def experiment(config_path, seed, jobs, out_dir, strict_log_regex, force):
    """Train and evaluate every algorithm and sampler of the config."""
    if config_path is None:
        raise ConfigError("experiment needs --config")
    loaded = experiment_service.load_config(config_path, _overrides(seed, jobs, out_dir, force, strict_log_regex))
    click.echo(str(experiment_service.run_experiment(loaded)))


@cli.command()
@config_option
@click.option("--seed", type=int, default=None, help="Master seed (overrides the config).")
@jobs_option
@out_option
@strict_option
@click.option("--force", is_flag=True, default=None, help="Ignore the residual log threshold.")
def transfer(config_path, seed, jobs, out_dir, strict_log_regex, force):
    """Train on source projects and score on the fixed test set."""
    if config_path is None:
        raise ConfigError("transfer needs --config")
    loaded = experiment_service.load_config(config_path, _overrides(seed, jobs, out_dir, force, strict_log_regex))
    click.echo(str(experiment_service.run_transfer(loaded)))


@cli.command()
@click.argument("bundle", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--out", "out_file", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write the tables here instead of stdout.")
def report(bundle, out_file):
    """Render the text tables of a JSON report bundle."""
    text = report_service.render(report_service.read_bundle(bundle))
    if out_file is None:
        click.echo(text, nl=False)
    else:
        report_service.write_text(text, out_file)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line and return the exit code"""
    try:
        cli.main(args=argv, prog_name=TOOL_NAME, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except Exception as e:
        return handle_cli_error(e)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
