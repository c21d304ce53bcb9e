import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Generic, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.core.config import AppConfig, EstimationBudget, ExperimentConfigT, ExperimentSettings
from src.core.seeding import derive_seed


class Table(BaseModel):
    """
    A report table, written as one CSV file.

    Attributes:
        columns (List[str]): The header row.
        rows (List[List[Any]]): The data rows, in canonical order.
    """
    columns: List[str]
    rows: List[List[Any]] = Field(default_factory=list)

    def add(self, *values: Any):
        if len(values) != len(self.columns):
            raise ValueError(f"Row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))


class Failure(BaseModel):
    """
    A violated invariant.
    """
    model_config = ConfigDict(frozen=True)

    suite: str
    check: str
    detail: str


class Report(BaseModel):
    """
    The outcome of an experiment.

    Attributes:
        tables (Dict[str, Table]): Tables by name.
        series (Dict[str, List[Tuple[float, float]]]): Plot-ready (x, y) series by name.
        diagnostics (Dict[str, Any]): Extra JSON-serializable data.
        matrices (Dict[str, Any]): Operators written in the matrix file format, by file stem.
        failures (List[Failure]): Violated invariants.
        suites (Dict[str, Tuple[int, int]]): Passed and failed check counts per suite.
    """
    tables: Dict[str, Table] = Field(default_factory=dict)
    series: Dict[str, List[Tuple[float, float]]] = Field(default_factory=dict)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    matrices: Dict[str, Any] = Field(default_factory=dict)
    failures: List[Failure] = Field(default_factory=list)
    suites: Dict[str, Tuple[int, int]] = Field(default_factory=dict)


class BaseExperiment(ABC, Generic[ExperimentConfigT]):
    """
    Abstract base class for experiments.

    An experiment splits its work into independent cells (one per exponent, instance...). Cells may run in any
    order or concurrently; `assemble` receives the results in the order of `cells()`.
    """

    def __init__(self, settings: ExperimentSettings, logger: logging.Logger, app: AppConfig):
        """
        Initializes the experiment with its settings, logger and the application configuration.

        Args:
            settings (ExperimentSettings): Settings of the experiment, with a validated config model.
            logger (logging.Logger): Logger instance to be used by the experiment.
            app (AppConfig): Application configuration (seed, exponents, caps, budget).
        """
        self._settings = settings
        self._logger = logger
        self._app = app

    @abstractmethod
    def cells(self) -> List[Any]:
        """
        Returns the independent units of work, in canonical order.
        """
        raise NotImplementedError

    @abstractmethod
    def run_cell(self, cell: Any) -> Any:
        """
        Runs one unit of work; must only depend on the cell and the configuration.
        """
        raise NotImplementedError

    @abstractmethod
    def assemble(self, cells: Sequence[Any], results: Sequence[Any]) -> Report:
        """
        Builds the report from the results of every cell.
        """
        raise NotImplementedError

    @property
    def config(self) -> Optional[ExperimentConfigT]:
        return self._settings.config

    @property
    def logger(self) -> logging.Logger:
        return self._logger

    @property
    def app(self) -> AppConfig:
        return self._app

    @property
    def p_values(self) -> List[float]:
        """
        The exponents of the experiment, falling back to the application default grid.
        """
        return list(getattr(self.config, "p_values", None) or self._app.p_values)

    def budget_for(self, *keys: Any) -> EstimationBudget:
        """
        The application budget with a seed derived from the run seed and the cell keys.
        """
        return self._app.budget.model_copy(update={"seed": derive_seed(self._app.seed, str(self), *keys)})

    def __str__(self):
        return self._settings.qualified_name

    def __repr__(self):
        return f"<Experiment type={self._settings.type} name={self._settings.name} enabled={self._settings.enabled}>"
