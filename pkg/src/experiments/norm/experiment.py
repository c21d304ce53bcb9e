from typing import List, Optional, Sequence, Tuple

from src.core.seeding import derive_rng
from src.experiments.base import BaseExperiment, Report, Table
from src.spectral.pspace import (
    ORACLE_MAX_DIMENSION,
    NormEstimate,
    OperatorMatrix,
    WeightedPointSpace,
    op_norm,
    oracle_norm,
    read_matrix_file,
)
from .config import Config

NormCellT = Tuple[int, float]


class Experiment(BaseExperiment[Config]):
    """
    Certified p->p norm intervals of operators read from matrix files or drawn at random.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._operators = self._load_operators()

    def _load_operators(self) -> List[Tuple[str, OperatorMatrix]]:
        operators = []
        for path in self.config.matrix_files:
            self.logger.debug(f"Reading matrix file: '{path}'")
            operators.append((path, read_matrix_file(path)))
        for size in self.config.random_sizes:
            rng = derive_rng(self.app.seed, str(self), "random", size)
            space = WeightedPointSpace.counting(size)
            entries = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
            operators.append((f"random-{size}", OperatorMatrix(domain=space, codomain=space, entries=entries)))
        if not operators:
            self.logger.warning("No operators configured")
        return operators

    def cells(self) -> List[NormCellT]:
        return [(index, p) for index in range(len(self._operators)) for p in self.p_values]

    def run_cell(self, cell: NormCellT) -> Tuple[NormEstimate, Optional[float]]:
        index, p = cell
        name, operator = self._operators[index]
        self.logger.debug(f"Estimating the norm of '{name}' at p = {p}")
        estimate = op_norm(operator, p, self.budget_for(index, p))
        oracle = None
        if self.config.oracle and operator.domain.size <= ORACLE_MAX_DIMENSION:
            oracle = oracle_norm(operator, p, seed=self.budget_for(index, p, "oracle").seed)
        return estimate, oracle

    def assemble(self, cells: Sequence[NormCellT], results: Sequence[Tuple[NormEstimate, Optional[float]]]) -> Report:
        table = Table(columns=["operator", "rows", "cols", "p", "lower", "upper", "width", "methods", "oracle"])
        report = Report(tables={"norms": table})
        for (index, p), (estimate, oracle) in zip(cells, results):
            name, operator = self._operators[index]
            rows, cols = operator.shape
            methods = "+".join(sorted(method.value for method in estimate.methods))
            table.add(name, rows, cols, p, estimate.lower, estimate.upper, estimate.width, methods, oracle)
            report.series.setdefault(f"norm_lower_{index}", []).append((p, estimate.lower))
            report.series.setdefault(f"norm_upper_{index}", []).append((p, estimate.upper))
        self.logger.info(f"Estimated {len(cells)} norms of {len(self._operators)} operators")
        return report
