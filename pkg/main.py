import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from src.core import CLIArgs, Config
from src.core.exceptions import (
    ConfigFileNotFoundError,
    DegeneracyError,
    ExperimentBootstrapError,
    InvariantViolationError,
    ResourceCapError,
)
from src.core.logs import update_loggers_level, setup_logging
from src.app import ExperimentBootstrapper, ExperimentRunner, write_report

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE_CAP = 3
EXIT_INVARIANT = 4

log = logging.getLogger("src.main")


def _emit_diagnostic(error: str, message: str, exit_code: int, **extra: Any) -> int:
    """
    Writes one JSON diagnostic object to stderr and returns the exit code.
    """
    payload: Dict[str, Any] = {"error": error, "message": message, "exit_code": exit_code}
    payload.update({key: value for key, value in extra.items() if value is not None})
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return exit_code


def _error_exit_code(error: BaseException) -> int:
    if isinstance(error, InvariantViolationError):
        return EXIT_INVARIANT
    if isinstance(error, ResourceCapError):
        return EXIT_RESOURCE_CAP
    # pydantic's ValidationError is a ValueError, as are the input, format and degeneracy errors
    if isinstance(error, (ValueError, ConfigFileNotFoundError, FileNotFoundError, ExperimentBootstrapError)):
        return EXIT_VALIDATION
    return EXIT_UNEXPECTED


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Runs the application and returns its exit code.

    This function performs the following tasks:
    1. Parses CLI arguments and applies them to the loaded configuration file.
    2. Configures logging based on verbosity and configuration settings.
    3. Bootstraps experiments from the specified experiments directory.
    4. Runs every experiment, writes its reports and the run metrics.

    Exit codes: 0 on success, 2 on validation errors, 3 when a resource cap is hit, 4 when an invariant is
    violated and 1 on unexpected errors.
    """
    try:
        cli_args = CLIArgs.from_parsing(argv)
        config = cli_args.apply(Config.from_file(cli_args.config_file))

        if cli_args.verbose:
            update_loggers_level(config.logging, logging.DEBUG)

        setup_logging(config.logging)

        experiment_bootstrapper = ExperimentBootstrapper(cli_args.experiments_dir, config.app)
        experiments = experiment_bootstrapper.bootstrap_experiments(config.experiments)

        experiment_runner = ExperimentRunner(config.app)
        failures: List[dict] = []
        for experiment, report in experiment_runner.run(experiments):
            write_report(str(experiment), report, config.app.output_dir)
            failures.extend(failure.model_dump() for failure in report.failures)
        experiment_runner.write_metrics()
    except Exception as error:
        exit_code = _error_exit_code(error)
        if exit_code == EXIT_UNEXPECTED:
            log.exception("Unexpected error")
        return _emit_diagnostic(
            type(error).__name__, str(error), exit_code,
            failures=getattr(error, "failures", None),
            level=error.level if isinstance(error, DegeneracyError) else None,
        )

    if failures:
        return _emit_diagnostic("InvariantViolation", f"{len(failures)} invariant checks failed", EXIT_INVARIANT,
                                failures=failures)
    return EXIT_OK


def main():
    """
    Entry point of the application.
    """
    sys.exit(run())


if __name__ == "__main__":
    main()
