import itertools
from typing import Any, Dict, List, Sequence, Tuple

from src.core.exceptions import InvalidInputError
from src.experiments.base import BaseExperiment, Report, Table
from src.spectral.pspace import ORACLE_MAX_DIMENSION, OperatorMatrix
from src.spectral.qmetric import (
    State,
    WitnessKind,
    check_algebra_dimension,
    cn_constants,
    degeneracy_probe,
    mk_grid_oracle,
    mk_lower,
    mk_upper,
    parse_state_token,
    quotient_distance,
)
from src.spectral.uhftriple import UHFSpecConfig, UHFTower, build_tower, embed_algebra
from .config import Config

MetricCellT = Tuple[int, float]


class Experiment(BaseExperiment[Config]):
    """
    Two-sided estimates of the extended pseudometric between states, with the constants c_n and the commutator
    kernel of the tower Dirac operator.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        top = build_tower(self.config.spec, cap=self.app.caps.tower_dimension)
        check_algebra_dimension(top.dimension, self.app.caps.algebra_dimension)
        for token in self.config.states:
            parse_state_token(token, top.dimension)
        self._top_level = top.level

    def cells(self) -> List[MetricCellT]:
        levels = range(1, self._top_level + 1) if self.config.sweep_levels else [self._top_level]
        return [(level, p) for level in levels for p in self.p_values]

    def _tower(self, level: int) -> UHFTower:
        spec = UHFSpecConfig(dims=tuple(self.config.dims[:level + 1]))
        return build_tower(spec, cap=self.app.caps.tower_dimension)

    def _pairs(self, tower: UHFTower) -> List[Tuple[State, State]]:
        states = []
        for token in self.config.states:
            try:
                states.append(parse_state_token(token, tower.dimension))
            except InvalidInputError:
                self.logger.debug(f"State '{token}' does not exist at level {tower.level}")
        return list(itertools.combinations(states, 2))

    def run_cell(self, cell: MetricCellT) -> Dict[str, Any]:
        level, p = cell
        tower = self._tower(level)
        budget = self.budget_for(level, p)
        cap = self.app.caps.algebra_dimension
        alpha, _ = self.config.alpha.resolve(tower, p, budget, cap)
        constants = cn_constants(tower, p, budget, cap)
        upper = mk_upper(tower, alpha, constants)
        use_oracle = self.config.oracle and tower.dimension ** 2 <= ORACLE_MAX_DIMENSION and p in (1.0, 2.0)

        rows = []
        for omega, psi in self._pairs(tower):
            estimate = mk_lower(tower, alpha, omega, psi, p, budget, cap).with_upper(upper)
            quotient = None
            if estimate.witness_kind == WitnessKind.FEASIBLE:
                quotient = quotient_distance(tower, embed_algebra(tower, tower.level, estimate.witness), p,
                                             budget).upper
            oracle = mk_grid_oracle(tower, alpha, omega, psi, p) if use_oracle else None
            rows.append((omega.label, psi.label, estimate, oracle, quotient))
        self.logger.debug(f"Estimated {len(rows)} distances at level {level}, p = {p}")
        return {
            "tower": tower,
            "constants": constants,
            "degeneracy": degeneracy_probe(tower, alpha, p, cap),
            "rows": rows,
        }

    def assemble(self, cells: Sequence[MetricCellT], results: Sequence[Dict[str, Any]]) -> Report:
        report = Report(tables={
            "metric": Table(columns=["level", "p", "omega", "psi", "lower", "upper", "oracle", "witness_kind",
                                     "witness_file", "witness_quotient_upper"]),
            "constants": Table(columns=["level", "p", "n", "c_n", "kernel_flag", "restricted", "certificate_lower",
                                        "certificate_upper", "dimension", "kernel_dimension"]),
            "degeneracy": Table(columns=["level", "p", "dimension", "algebra_dimension", "separates"]),
        })
        tables = report.tables
        for (level, p), result in zip(cells, results):
            tower = result["tower"]
            for entry in result["constants"].entries:
                certificate = entry.certificate
                tables["constants"].add(
                    level, p, entry.level, entry.value, entry.kernel_flag, entry.restricted,
                    certificate.lower if certificate else None, certificate.upper if certificate else None,
                    entry.dimension, entry.kernel_dimension,
                )
            degeneracy = result["degeneracy"]
            tables["degeneracy"].add(level, p, degeneracy.dimension, degeneracy.algebra_dimension,
                                     degeneracy.separates)
            report.diagnostics.setdefault("cells", []).append({
                "level": level,
                "p": p,
                "constants": result["constants"].values,
                "kernel_flags": result["constants"].flags,
                "restricted": result["constants"].restricted,
                "degeneracy": {
                    "dimension": degeneracy.dimension,
                    "commutator_norms": list(degeneracy.commutator_norms),
                    "witnesses": [witness.tolist() for witness in degeneracy.witnesses],
                },
            })
            for index, (omega, psi, estimate, oracle, quotient) in enumerate(result["rows"]):
                witness_file = f"witness_{len(tables['metric'].rows)}"
                report.matrices[witness_file] = OperatorMatrix(domain=tower.flat, codomain=tower.flat,
                                                               entries=estimate.witness)
                tables["metric"].add(level, p, omega, psi, estimate.lower, estimate.upper, oracle,
                                     estimate.witness_kind.value, f"{witness_file}.txt", quotient)
                if index == 0:
                    report.series.setdefault(f"mk_lower_p{p:g}", []).append((level, estimate.lower))
                    report.series.setdefault(f"mk_upper_p{p:g}", []).append((level, estimate.upper))
        self.logger.info(f"Estimated {len(tables['metric'].rows)} distances over {len(cells)} cells")
        return report
