from typing import List, Sequence

from src.experiments.base import BaseExperiment, Report, Table
from src.spectral.grouptriple import (
    CommutatorPoint,
    LengthFn,
    ResolventMode,
    ball,
    commutator_series,
    group_from_name,
    parse_group_element,
    read_group_element_file,
    resolvent_approx,
)
from .config import Config


class Experiment(BaseExperiment[Config]):
    """
    Commutator norm bounds and resolvent residuals of the length-function triple of a group, over a radius grid.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._group = group_from_name(self.config.group)
        self._length = LengthFn.word_length(self._group)
        if self.config.coefficients_file:
            self._element = read_group_element_file(self.config.coefficients_file, self._group)
        else:
            self._element = parse_group_element(self.config.terms, self._group)

    def cells(self) -> List[float]:
        return list(self.p_values)

    def run_cell(self, p: float) -> List[CommutatorPoint]:
        self.logger.debug(f"Commutator series of {self._group} at p = {p}")
        return commutator_series(
            self._element, self._group, self._length, self.config.radii, p, self.budget_for(p),
            cap=self.app.caps.ball_size, ordering=self.config.ordering,
        )

    def _resolvent_table(self, report: Report) -> Table:
        table = Table(columns=["radius", "ball_size", "mode", "shift", "residual"])
        for radius in self.config.radii:
            truncation = ball(self._group, self._length, radius, cap=self.app.caps.ball_size,
                              ordering=self.config.ordering)
            _, residual = resolvent_approx(truncation, mode=ResolventMode.SQUARED)
            table.add(radius, len(truncation), ResolventMode.SQUARED.value, None, residual)
            report.series.setdefault("resolvent_residual", []).append((radius, residual))
            if self.config.shift is not None:
                _, residual = resolvent_approx(truncation, mode=ResolventMode.SHIFTED, shift=complex(self.config.shift))
                table.add(radius, len(truncation), ResolventMode.SHIFTED.value, self.config.shift, residual)
        return table

    def assemble(self, cells: Sequence[float], results: Sequence[List[CommutatorPoint]]) -> Report:
        table = Table(columns=["p", "radius", "ball_size", "lower", "upper", "bound", "lower_le_bound"])
        report = Report(tables={"commutators": table})
        for p, points in zip(cells, results):
            if not points:
                self.logger.warning(f"No radius contains the support of the element at p = {p}")
            for point in points:
                table.add(p, point.radius, point.ball_size, point.estimate.lower, point.estimate.upper, point.bound,
                          point.estimate.lower <= point.bound + 1e-9)
                report.series.setdefault(f"commutator_lower_p{p:g}", []).append((point.radius, point.estimate.lower))
        report.tables["resolvents"] = self._resolvent_table(report)
        report.diagnostics = {
            "group": str(self._group),
            "support": [[self._group.encode(x), str(c)] for x, c in self._element.support],
            "l1_norm": self._element.l1_norm(),
        }
        self.logger.info(f"Computed commutator series of {self._group} for {len(cells)} exponents")
        return report
