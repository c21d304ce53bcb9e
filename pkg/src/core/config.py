import yaml
import json
from pathlib import PurePath
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from enum import Enum
from typing import Optional, List, Union, TypeVar

from src.core.exceptions import InvalidFileFormatError, ConfigFileNotFoundError

DEFAULT_BALL_SIZE_CAP = 100_000
DEFAULT_TOWER_DIMENSION_CAP = 4096
DEFAULT_ALGEBRA_DIMENSION_CAP = 1024


class ExecutionMode(str, Enum):
    """
    Enum representing the execution modes for experiment cells.

    Attributes:
        SYNC: Every cell runs in order on the calling thread.
        MULTITHREADED: Cells fan out over a thread pool; results are still collected in canonical order.
    """
    SYNC = "sync"
    MULTITHREADED = "multithreaded"


class EstimationBudget(BaseModel):
    """
    Settings of the iterative estimators (power iteration, multi-start searches).

    Attributes:
        starts (int): Number of starts of multi-start searches.
        iterations (int): Maximum number of iterations per start.
        tolerance (float): Relative convergence threshold between successive iterates' values.
        probes (int): Number of random-vector probes evaluated next to the power iteration.
        seed (int): Base seed; per-start generators derive from (seed, start index).
        workers (int): Number of threads used to fan out starts (1 runs them in order).
    """
    model_config = ConfigDict(frozen=True)

    starts: int = Field(default=16, ge=0)
    iterations: int = Field(default=200, ge=1)
    tolerance: float = Field(default=1e-12, gt=0)
    probes: int = Field(default=32, ge=0)
    seed: int = 0
    workers: int = Field(default=1, ge=1)


class ResourceCaps(BaseModel):
    """
    Resource caps guarding enumerations and dense allocations.

    Attributes:
        ball_size (int): Maximum number of group elements enumerated by a ball.
        tower_dimension (int): Maximum total dimension of a truncated tensor tower.
        algebra_dimension (int): Maximum dimension N^2 of a tower algebra whose commutator kernel or level subspaces
            are computed densely.
        acknowledged (bool): Must be set to raise any cap above its default.
    """
    model_config = ConfigDict(frozen=True)

    ball_size: int = Field(default=DEFAULT_BALL_SIZE_CAP, ge=1)
    tower_dimension: int = Field(default=DEFAULT_TOWER_DIMENSION_CAP, ge=1)
    algebra_dimension: int = Field(default=DEFAULT_ALGEBRA_DIMENSION_CAP, ge=1)
    acknowledged: bool = False

    @model_validator(mode="after")
    def _check_acknowledged(self):
        raised = (self.ball_size > DEFAULT_BALL_SIZE_CAP or self.tower_dimension > DEFAULT_TOWER_DIMENSION_CAP
                  or self.algebra_dimension > DEFAULT_ALGEBRA_DIMENSION_CAP)
        if raised and not self.acknowledged:
            raise ValueError("Raising a resource cap above its default requires an explicit acknowledgment")
        return self


class AppConfig(BaseModel):
    """
    Represents the application configuration.

    Attributes:
        execution_mode (ExecutionMode): Mode of execution of experiment cells (sync or multithreaded).
        max_workers (int): Size of the thread pool in multithreaded mode.
        output_dir (str): Directory receiving every report.
        seed (int): Base seed of the run; every cell derives its own generator from it.
        p_values (List[float]): Default grid of exponents, used when an experiment does not set its own.
        caps (ResourceCaps): Resource caps.
        budget (EstimationBudget): Default estimation budget.
        metrics_file (Optional[str]): File name (inside output_dir) of the Prometheus text file, None disables it.
    """
    model_config = ConfigDict(use_enum_values=True)

    execution_mode: ExecutionMode = ExecutionMode.SYNC
    max_workers: int = Field(default=4, ge=1)
    output_dir: str = "out"
    seed: int = 0
    p_values: List[float] = Field(default_factory=lambda: [1.0, 2.0])
    caps: ResourceCaps = Field(default_factory=ResourceCaps)
    budget: EstimationBudget = Field(default_factory=EstimationBudget)
    metrics_file: Optional[str] = "metrics.prom"

    @field_validator("p_values")
    @classmethod
    def _check_p_values(cls, p_values: List[float]) -> List[float]:
        if not p_values:
            raise ValueError("The list of exponents must not be empty")
        for p in p_values:
            if not (1.0 <= p < float("inf")):
                raise ValueError(f"Every exponent must be finite and >= 1, got: {p}")
        return p_values


ExperimentConfigT = TypeVar("ExperimentConfigT")


class ExperimentSettings(BaseModel):
    """
    Represents the configuration of a single experiment.

    Attributes:
        type (str): The type of experiment (name of its subpackage under the experiments directory).
        name (Optional[str]): The optional name of the experiment instance.
        enabled (bool): A flag indicating whether the experiment runs.
        config (Optional[Union[dict, ExperimentConfigT]]): Optional configuration specific to the experiment type.
    """
    model_config = ConfigDict(frozen=True)

    type: str
    name: Optional[str] = None
    enabled: bool = True
    config: Optional[Union[dict, ExperimentConfigT]] = None

    @property
    def qualified_name(self) -> str:
        """
        Returns the qualified name of the experiment.

        The qualified name is a concatenation of the experiment type and its name. If no name is provided,
        only the type is returned.

        Returns:
            str: The qualified name of the experiment.
        """
        return f"{self.type}.{self.name}" if self.name else self.type


_FILE_SUFFIX_TO_LOADER = {
    ".yml": yaml.safe_load,
    ".yaml": yaml.safe_load,
    ".json": json.load
}


def load_structured_file(file_path: str) -> dict:
    """
    Loads structured data (yaml or json) from a file, based on its extension.

    Args:
        file_path (str): The path to the file.

    Raises:
        InvalidFileFormatError: If the file format is unsupported or the content is not a mapping.
        ConfigFileNotFoundError: If the file does not exist.

    Returns:
        dict: The parsed data.
    """
    suffix = PurePath(file_path).suffix
    loader = _FILE_SUFFIX_TO_LOADER.get(suffix)
    if not loader:
        raise InvalidFileFormatError(f"Unsupported format of config file: '{file_path}'")

    try:
        with open(file_path, "r") as file:
            data = loader(file)
    except FileNotFoundError:
        raise ConfigFileNotFoundError(f"Path to config file does not exist: '{file_path}'")
    except (yaml.YAMLError, json.JSONDecodeError) as error:
        raise InvalidFileFormatError(f"Malformed config file: '{file_path}'") from error

    if not isinstance(data, dict):
        raise InvalidFileFormatError(f"Config file must contain a mapping at top level: '{file_path}'")
    return data


class Config(BaseModel):
    """
    Represents the full configuration: application settings, logging settings and the experiments to run.

    Attributes:
        app (AppConfig): The application-specific configuration.
        logging (dict): The logging configuration (logging.config.dictConfig schema).
        experiments (List[ExperimentSettings]): A list of experiments and their settings.
    """
    app: AppConfig = Field(default_factory=AppConfig)
    logging: dict = Field(default_factory=lambda: {"version": 1, "disable_existing_loggers": False})
    experiments: List[ExperimentSettings] = Field(default_factory=list)

    @classmethod
    def from_file(cls, file_path: str):
        """
        Creates a Config instance by loading and parsing a configuration file.

        Args:
            file_path (str): The path to the configuration file.

        Returns:
            Config: A Config instance populated with the data from the file.
        """
        config = load_structured_file(file_path)
        return cls(**config)
