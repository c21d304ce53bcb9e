import argparse
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from src.core.config import Config, ExecutionMode
from src.core.exceptions import InvalidInputError

# CLI destination -> experiment config key, per subcommand
_COMMAND_OPTIONS: Dict[str, Dict[str, str]] = {
    "norm": {"matrix": "matrix_files", "random_sizes": "random_sizes", "oracle": "oracle"},
    "group": {"group": "group", "radius": "radii", "coeffs": "coefficients_file", "ordering": "ordering",
              "shift": "shift"},
    "uhf": {"dims": "dims", "alpha": "alpha"},
    "metric": {"dims": "dims", "alpha": "alpha", "states": "states", "sweep_levels": "sweep_levels",
               "oracle": "oracle"},
    "check": {"quick": "quick", "suites": "suites"},
}

CAP_KEYS = ("ball_size", "tower_dimension", "algebra_dimension")


def _list_of(convert: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    def parse(text: str) -> List[Any]:
        try:
            return [convert(token) for token in text.replace(" ", "").split(",") if token]
        except ValueError as error:
            raise argparse.ArgumentTypeError(f"Invalid list: '{text}'") from error
    return parse


def _alpha(text: str):
    return text if text == "auto" else _list_of(float)(text)


def _add_common_arguments(parser: argparse.ArgumentParser, suppress: bool):
    """
    Adds the global flags; subparsers suppress their defaults so values given before the subcommand
    are not overwritten.
    """
    def default_or(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "--config",
        dest="config_file",
        type=str,
        default=default_or("config/config.yml"),
        help="Path to the config file (yaml or json)."
    )
    parser.add_argument(
        "--experiments-dir",
        type=str,
        default=default_or("src/experiments/"),
        help="Path to the experiments directory (relative to the current directory)."
    )
    parser.add_argument("--seed", type=int, default=default_or(None), help="Base seed of the run.")
    parser.add_argument("--out", type=str, default=default_or(None), help="Output directory of the reports.")
    parser.add_argument("--p", type=_list_of(float), default=default_or(None),
                        help="Comma-separated exponents, e.g. 1,1.5,2.")
    parser.add_argument("--cap-override", action="append", metavar="KEY=VALUE", default=default_or(None),
                        help=f"Raise a resource cap ({', '.join(CAP_KEYS)}); requires --acknowledge-caps.")
    parser.add_argument("--acknowledge-caps", action="store_true", default=default_or(False),
                        help="Acknowledge resource caps raised above their defaults.")
    parser.add_argument("--workers", type=int, default=default_or(None),
                        help="Run cells on this many threads (1 runs them in order).")
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        default=default_or(False),
        help="Increase output verbosity (override logging to debug)."
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Run spectral triple experiments.")
    _add_common_arguments(parser, suppress=False)
    subparsers = parser.add_subparsers(dest="command")

    def subparser(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        _add_common_arguments(sub, suppress=True)
        return sub

    norm = subparser("norm", "Certified p->p norm intervals.")
    norm.add_argument("--matrix", action="append", help="Matrix file (repeatable).")
    norm.add_argument("--random-sizes", type=_list_of(int), help="Sizes of seeded random matrices.")
    norm.add_argument("--oracle", action="store_true", default=None, help="Also run the brute-force oracle.")

    group = subparser("group", "Commutator and resolvent estimates of a group spectral triple.")
    group.add_argument("--group", type=str, help="Group name: z, z2, f2, c6...")
    group.add_argument("--radius", type=_list_of(float), help="Comma-separated ball radii.")
    group.add_argument("--coeffs", type=str, help="File of 'element coefficient' lines.")
    group.add_argument("--ordering", choices=["length", "natural"], help="Ordering of ball elements.")
    group.add_argument("--shift", type=str, help="Complex shift of the resolvent, e.g. 0.5+1j.")

    uhf = subparser("uhf", "Projection tower, Dirac spectrum and resolvent of a UHF algebra.")
    uhf.add_argument("--dims", type=_list_of(int), help="Comma-separated d(0),...,d(M).")
    uhf.add_argument("--alpha", type=_alpha, help="Comma-separated alpha_0,...,alpha_M or 'auto'.")

    metric = subparser("metric", "Two-sided estimates of the distance between states.")
    metric.add_argument("--dims", type=_list_of(int), help="Comma-separated d(0),...,d(M).")
    metric.add_argument("--alpha", type=_alpha, help="Comma-separated alpha_0,...,alpha_M or 'auto'.")
    metric.add_argument("--states", type=_list_of(str), help="Comma-separated point:I, trace or state files.")
    metric.add_argument("--sweep-levels", action="store_true", default=None, help="Estimate on every level.")
    metric.add_argument("--oracle", action="store_true", default=None, help="Also run the grid oracle.")

    check = subparser("check", "Run the invariant suites.")
    check.add_argument("--quick", action="store_true", default=None, help="Reduce sample counts.")
    check.add_argument("--suites", type=_list_of(str), help="Comma-separated suites to run.")

    return parser


def _parse_cli_args(argv: Optional[Sequence[str]] = None) -> dict:
    """
    Parses the command-line arguments of the experiment runner.

    Global flags may be given before or after the subcommand. Subcommand flags are collected into the
    `options` entry, keyed by experiment config field.

    Args:
        argv (Optional[Sequence[str]]): Arguments to parse, `sys.argv[1:]` when None.

    Returns:
        dict: A dictionary containing the parsed command-line arguments.
    """
    parsed = vars(_build_parser().parse_args(argv))
    command = parsed.get("command")
    options = {}
    for dest, key in _COMMAND_OPTIONS.get(command, {}).items():
        value = parsed.pop(dest, None)
        if value is not None:
            options[key] = value
    parsed["options"] = options
    return parsed


class CLIArgs(BaseModel):
    """
    Represents the parsed command-line arguments as a Pydantic model.

    Attributes:
        config_file (str): Path to the config file (yaml or json).
        experiments_dir (str): Path to the experiments directory (relative to the current directory).
        command (Optional[str]): Experiment type to run instead of the configured experiments.
        options (Dict[str, Any]): Config of the subcommand experiment.
        seed (Optional[int]): Overrides the base seed.
        out (Optional[str]): Overrides the output directory.
        p (Optional[List[float]]): Overrides the default grid of exponents.
        cap_override (List[str]): KEY=VALUE resource cap overrides.
        acknowledge_caps (bool): Acknowledges caps raised above their defaults.
        workers (Optional[int]): Number of worker threads.
        verbose (bool): Flag to increase output verbosity, overriding logging to debug.
    """
    config_file: str
    experiments_dir: str
    command: Optional[str] = None
    options: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    out: Optional[str] = None
    p: Optional[List[float]] = None
    cap_override: List[str] = Field(default_factory=list)
    acknowledge_caps: bool = False
    workers: Optional[int] = Field(default=None, ge=1)
    verbose: bool = False

    @classmethod
    def from_parsing(cls, argv: Optional[Sequence[str]] = None):
        """
        Creates an instance of CLIArgs by parsing the command-line arguments.

        Returns:
            CLIArgs: An instance of the CLIArgs class with the parsed values.
        """
        cli_args = _parse_cli_args(argv)
        cli_args["cap_override"] = cli_args.get("cap_override") or []
        return cls(**cli_args)

    def _cap_overrides(self) -> Dict[str, int]:
        caps = {}
        for override in self.cap_override:
            key, separator, value = override.partition("=")
            if not separator or key not in CAP_KEYS:
                raise InvalidInputError(f"Invalid cap override '{override}', expected one of {CAP_KEYS} as KEY=VALUE")
            try:
                caps[key] = int(value)
            except ValueError as error:
                raise InvalidInputError(f"Cap override '{override}' must be an integer") from error
        return caps

    def apply(self, config: Config) -> Config:
        """
        Returns the configuration with the command-line overrides applied and validated.

        A subcommand replaces the configured experiments with a single experiment of that type.

        Raises:
            InvalidInputError: If a cap override is malformed.
            pydantic.ValidationError: If the resulting configuration is invalid.
        """
        data = config.model_dump()
        app = data["app"]
        if self.seed is not None:
            app["seed"] = self.seed
        if self.out is not None:
            app["output_dir"] = self.out
        if self.p is not None:
            app["p_values"] = self.p
        if self.workers is not None:
            app["max_workers"] = self.workers
            app["execution_mode"] = ExecutionMode.MULTITHREADED if self.workers > 1 else ExecutionMode.SYNC
        app["caps"].update(self._cap_overrides())
        if self.acknowledge_caps:
            app["caps"]["acknowledged"] = True
        if self.command is not None:
            data["experiments"] = [{"type": self.command, "config": dict(self.options)}]
        return Config.model_validate(data)
