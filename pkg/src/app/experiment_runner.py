import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

from src.core.config import AppConfig, ExecutionMode
from src.core.logs import timed
from src.experiments.base import BaseExperiment, Report

RunFuncT = Callable[[BaseExperiment, Sequence[Any]], List[Any]]

log = logging.getLogger(__name__)


class ExperimentRunner:
    """
    Runs the cells of experiments in the configured execution mode and records run metrics.

    Results are always handed to `assemble` in the order of `cells()`, so reports do not depend on the mode or
    the number of workers.

    Attributes:
        _config (AppConfig): The application configuration.
        _execution_mode_to_run_func (Dict[ExecutionMode, RunFuncT]): Mapping of execution modes to run functions.
        registry (CollectorRegistry): Private registry of the run metrics.
    """

    def __init__(self, config: AppConfig, registry: Optional[CollectorRegistry] = None):
        """
        Initializes the runner with the given configuration.

        Args:
            config (AppConfig): Configuration object (execution mode, worker count, metrics file).
            registry (Optional[CollectorRegistry]): Registry receiving the metrics, a fresh one when None.
        """
        self._config = config
        self._execution_mode_to_run_func: Dict[ExecutionMode, RunFuncT] = {
            ExecutionMode.SYNC: self._run_sync,
            ExecutionMode.MULTITHREADED: self._run_multithreaded,
        }
        self.registry = registry or CollectorRegistry()
        self._cells_completed = Counter(
            "spectral_cells_completed", "Number of completed experiment cells", ["experiment"],
            registry=self.registry,
        )
        self._cell_duration = Histogram(
            "spectral_cell_duration_seconds", "Wall time of experiment cells", ["experiment"],
            registry=self.registry,
        )
        self._invariant_failures = Gauge(
            "spectral_invariant_failures", "Number of violated invariants per suite", ["experiment", "suite"],
            registry=self.registry,
        )

    def run(self, experiments: List[BaseExperiment]) -> List[Tuple[BaseExperiment, Report]]:
        """
        Runs every experiment in order.

        Args:
            experiments (List[BaseExperiment]): The bootstrapped experiments.

        Returns:
            List[Tuple[BaseExperiment, Report]]: Each experiment with its report.
        """
        log.info(f"Using execution mode: '{self._config.execution_mode}'")
        return [(experiment, self.run_experiment(experiment)) for experiment in experiments]

    def run_experiment(self, experiment: BaseExperiment) -> Report:
        """
        Runs the cells of one experiment and assembles its report.
        """
        cells = experiment.cells()
        log.info(f"Running experiment '{experiment}' with {len(cells)} cells")
        run_func = self._execution_mode_to_run_func[ExecutionMode(self._config.execution_mode)]
        results = run_func(experiment, cells)
        report = experiment.assemble(cells, results)

        for suite, (_, failed) in report.suites.items():
            self._invariant_failures.labels(experiment=str(experiment), suite=suite).set(failed)
        log.info(f"Finished experiment '{experiment}'")
        return report

    def _run_cell(self, experiment: BaseExperiment, cell: Any) -> Any:
        with timed(log, f"Cell {cell} of '{experiment}'") as record:
            result = experiment.run_cell(cell)
        self._cell_duration.labels(experiment=str(experiment)).observe(record["seconds"])
        self._cells_completed.labels(experiment=str(experiment)).inc()
        return result

    def _run_sync(self, experiment: BaseExperiment, cells: Sequence[Any]) -> List[Any]:
        """
        Runs the cells one after the other on the calling thread.
        """
        return [self._run_cell(experiment, cell) for cell in cells]

    def _run_multithreaded(self, experiment: BaseExperiment, cells: Sequence[Any]) -> List[Any]:
        """
        Runs the cells on a thread pool; `map` keeps the results in cell order.
        """
        with ThreadPoolExecutor(max_workers=self._config.max_workers) as pool:
            return list(pool.map(lambda cell: self._run_cell(experiment, cell), cells))

    def write_metrics(self) -> Optional[str]:
        """
        Writes the run metrics in the Prometheus text format, unless disabled.

        Returns:
            Optional[str]: The written path.
        """
        if not self._config.metrics_file:
            log.debug("Metrics file disabled")
            return None
        os.makedirs(self._config.output_dir, exist_ok=True)
        path = os.path.join(self._config.output_dir, self._config.metrics_file)
        write_to_textfile(path, self.registry)
        log.info(f"Wrote run metrics to: '{path}'")
        return path
