from typing import List, Sequence

from src.experiments.base import BaseExperiment, Failure, Report, Table
from .config import Config
from .suites import SUITES, SuiteResult


class Experiment(BaseExperiment[Config]):
    """
    Runs the invariant suites of every numerical module and reports pass and fail counts.
    """

    def cells(self) -> List[str]:
        return list(self.config.suites)

    def run_cell(self, suite: str) -> SuiteResult:
        self.logger.info(f"Running suite '{suite}' (quick: {self.config.quick})")
        return SUITES[suite](self.app.seed, self.budget_for(suite), self.config.quick)

    def assemble(self, cells: Sequence[str], results: Sequence[SuiteResult]) -> Report:
        suites = Table(columns=["suite", "passed", "failed"])
        failures = Table(columns=["suite", "check", "detail"])
        report = Report(tables={"suites": suites, "failures": failures})
        for result in results:
            suites.add(result.name, result.passed, result.failed)
            report.suites[result.name] = (result.passed, result.failed)
            for check, detail in result.failures:
                failures.add(result.name, check, detail)
                report.failures.append(Failure(suite=result.name, check=check, detail=detail))
        total = sum(result.failed for result in results)
        if total:
            self.logger.warning(f"{total} invariant checks failed")
        else:
            self.logger.info(f"All {sum(result.passed for result in results)} invariant checks passed")
        return report
