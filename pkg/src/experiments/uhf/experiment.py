from typing import Any, Dict, List, Sequence

import numpy as np

from src.core.seeding import derive_rng
from src.experiments.base import BaseExperiment, Failure, Report, Table
from src.spectral.pspace import PVector
from src.spectral.qmetric import key_estimate, quotient_distance
from src.spectral.uhftriple import (
    build_tower,
    dirac_spectrum,
    nested_ranks,
    q_ranks,
    random_level_operator,
    resolvent_inverse,
    strong_convergence_profile,
    verify_tower,
)
from .config import Config

SUITE_NAME = "uhftriple"


class Experiment(BaseExperiment[Config]):
    """
    Projection tower identities, Dirac spectrum, resolvent and strong convergence of a truncated UHF algebra.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._tower = build_tower(self.config.spec, cap=self.app.caps.tower_dimension)

    def cells(self) -> List[float]:
        return list(self.p_values)

    def run_cell(self, p: float) -> Dict[str, Any]:
        tower = self._tower
        budget = self.budget_for(p)
        alpha, constants = self.config.alpha.resolve(tower, p, budget, self.app.caps.algebra_dimension)
        rng = derive_rng(budget.seed, "cell")

        eta = PVector(space=tower.flat, coords=rng.standard_normal(tower.dimension)
                      + 1j * rng.standard_normal(tower.dimension))
        top = random_level_operator(tower, tower.level, rng)
        keys = [(n, *key_estimate(tower, alpha, top, n, p)) for n in range(1, tower.level + 1)]
        quotients = []
        for n in range(tower.level + 1):
            estimate = quotient_distance(tower, random_level_operator(tower, n, rng), p, budget)
            quotients.append((n, estimate.lower, estimate.upper))

        self.logger.debug(f"Tower checks at p = {p} with alpha {list(alpha.values)}")
        return {
            "alpha": alpha,
            "constants": constants,
            "checks": verify_tower(tower, [p], budget),
            "convergence": strong_convergence_profile(tower, eta, p),
            "keys": keys,
            "quotients": quotients,
        }

    def assemble(self, cells: Sequence[float], results: Sequence[Dict[str, Any]]) -> Report:
        tower = self._tower
        report = Report(tables={
            "spectrum": Table(columns=["p", "index", "eigenvalue"]),
            "levels": Table(columns=["p", "level", "dimension", "q_rank", "p_rank", "alpha", "resolvent_eigenvalue"]),
            "invariants": Table(columns=["p", "check", "passed", "deviation", "tolerance"]),
            "convergence": Table(columns=["p", "level", "distance"]),
            "key_estimates": Table(columns=["p", "level", "lhs", "rhs"]),
            "quotients": Table(columns=["p", "level", "lower", "upper"]),
        })
        tables = report.tables
        ranks, dimensions = q_ranks(tower), nested_ranks(tower)
        passed = failed = 0
        for p, result in zip(cells, results):
            alpha = result["alpha"]
            for index, value in enumerate(dirac_spectrum(tower, alpha)):
                tables["spectrum"].add(p, index, float(np.round(value, 12)) + 0.0)
            resolvent = resolvent_inverse(tower, alpha)
            for n in range(tower.level + 1):
                tables["levels"].add(p, n, tower.spec.dimension_up_to(n), ranks[n], dimensions[n], alpha.values[n],
                                     1.0 / (1.0 + alpha.values[n] ** 2))
            for check in result["checks"]:
                tables["invariants"].add(p, check.name, check.passed, check.deviation, check.tolerance)
                if check.passed:
                    passed += 1
                else:
                    failed += 1
                    report.failures.append(Failure(suite=SUITE_NAME, check=f"{check.name} (p = {p})",
                                                   detail=f"deviation {check.deviation} > {check.tolerance}"))
            for n, distance in enumerate(result["convergence"]):
                tables["convergence"].add(p, n, distance)
                report.series.setdefault(f"strong_convergence_p{p:g}", []).append((n, distance))
            for n, lhs, rhs in result["keys"]:
                tables["key_estimates"].add(p, n, lhs, rhs)
            for n, lower, upper in result["quotients"]:
                tables["quotients"].add(p, n, lower, upper)
            if result["constants"] is not None:
                report.diagnostics.setdefault("constants", {})[f"{p:g}"] = result["constants"].values
            report.matrices[f"resolvent_p{p:g}"] = resolvent

        report.suites[SUITE_NAME] = (passed, failed)
        report.diagnostics["dims"] = list(tower.spec.dims)
        self.logger.info(f"Tower of dimension {tower.dimension}: {passed} checks passed, {failed} failed")
        return report
