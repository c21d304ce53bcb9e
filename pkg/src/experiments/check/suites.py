"""
Invariant suites of the `check` experiment, one per numerical module.

Every suite only asserts identities that hold exactly or with a certified margin, so a failure points at a defect.
"""
import logging
import math
from typing import Callable, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.core.config import EstimationBudget
from src.core.seeding import derive_rng
from src.spectral.grouptriple import (
    CyclicGroup,
    FreeGroup,
    GroupAlgElem,
    IntegerGroup,
    LengthFn,
    ResolventMode,
    ball,
    commutator_bound,
    commutator_norm_est,
    commutator_series,
    convolve,
    dirac_matrix,
    lambda_matrix,
    random_group_element,
    resolvent_approx,
)
from src.spectral.pspace import (
    OperatorMatrix,
    PVector,
    WeightedPointSpace,
    dual_map,
    lp_norm,
    op_norm,
    oracle_norm,
    vec_norm,
)
from src.spectral.qmetric import (
    CnTable,
    alpha_auto,
    cn_constants,
    degeneracy_probe,
    key_estimate,
    mk_grid_oracle,
    mk_lower,
    mk_upper,
    point_state,
    quotient_distance,
    trace_state,
)
from src.spectral.tensor import kron, kron_vectors
from src.spectral.uhftriple import (
    AlphaSeq,
    UHFSpecConfig,
    build_tower,
    commutator,
    dirac_spectrum,
    embed_algebra,
    nested_ranks,
    partial_projector,
    q_ranks,
    random_level_operator,
    resolvent_inverse,
    strong_convergence_profile,
    verify_tower,
)

log = logging.getLogger(__name__)

PROFILES = [(1, 2), (1, 2, 2), (1, 3, 2), (1, 2, 2, 2)]
TOWER_P_VALUES = [1.0, 1.5, 2.0, 3.0]
ORACLE_TOLERANCE = 5e-3
BOUND_SLACK = 1e-9
ENTRYWISE_TOLERANCE = 1e-12
SCALING_TOLERANCE = 1e-10
ORACLE_NORM_SLACK = 1e-6
P2_ORACLE_TOLERANCE = 1e-3


class SuiteResult(BaseModel):
    """
    Pass and fail counts of a suite, with the name of every check in order and a description of each failure.
    """
    name: str
    passed: int = 0
    failed: int = 0
    checks: List[str] = Field(default_factory=list)
    failures: List[Tuple[str, str]] = Field(default_factory=list)

    def check(self, name: str, condition: bool, detail: str = ""):
        self.checks.append(name)
        if condition:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append((name, detail))
            log.debug(f"Check '{name}' of suite '{self.name}' failed: {detail}")

    def run(self, name: str, func: Callable[[], Tuple[bool, str]]):
        """
        Records the outcome of a check that may raise; an exception counts as a failure.
        """
        try:
            condition, detail = func()
        except (ArithmeticError, AssertionError, ValueError, RuntimeError) as error:
            condition, detail = False, repr(error)
        self.check(name, condition, detail)


def _samples(quick: bool, full: int, reduced: int) -> int:
    return reduced if quick else full


def _random_matrix(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))


def pspace_suite(seed: int, budget: EstimationBudget, quick: bool) -> SuiteResult:
    result = SuiteResult(name="pspace")
    for index in range(_samples(quick, 10, 3)):
        rng = derive_rng(seed, "pspace", index)
        size = 2 + index % 2
        counting = WeightedPointSpace.counting(size)
        a = OperatorMatrix(domain=counting, codomain=counting, entries=_random_matrix(rng, size))
        for p in (1.5, 3.0):
            estimate = op_norm(a, p, budget)
            oracle = oracle_norm(a, p, seed=seed, levels=3, random_starts=8, iterations=50)
            result.check(f"oracle <= upper (sample {index}, p = {p})", oracle <= estimate.upper + BOUND_SLACK,
                         f"oracle {oracle}, upper {estimate.upper}")
        uniform = WeightedPointSpace.uniform(size)
        weighted = OperatorMatrix(domain=uniform, codomain=uniform, entries=a.entries)
        for p in (1.0, 2.0):
            result.check(f"uniform weights cancel (sample {index}, p = {p})",
                         math.isclose(op_norm(weighted, p).upper, op_norm(a, p).upper, rel_tol=1e-12))
        x = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        result.check(f"duality map has unit dual norm (sample {index})",
                     math.isclose(lp_norm(dual_map(x, 3.0), None, 1.5), 1.0, rel_tol=1e-10))

        for factor in (3.0, -0.5):
            for p in (1.5, 3.0):
                estimate, scaled = op_norm(a, p, budget), op_norm(a * factor, p, budget)
                result.check(
                    f"op norm scales with |c| (sample {index}, c = {factor:g}, p = {p})",
                    math.isclose(scaled.lower, abs(factor) * estimate.lower, rel_tol=SCALING_TOLERANCE)
                    and math.isclose(scaled.upper, abs(factor) * estimate.upper, rel_tol=SCALING_TOLERANCE),
                    f"scaled [{scaled.lower}, {scaled.upper}], original [{estimate.lower}, {estimate.upper}]",
                )

        b = OperatorMatrix(domain=counting, codomain=counting, entries=_random_matrix(rng, size))
        for p in (1.5, 3.0):
            joint = oracle_norm(a @ b, p, seed=seed, levels=3, random_starts=8, iterations=50)
            bound = op_norm(a, p, budget).upper * op_norm(b, p, budget).upper
            result.check(f"oracle ||ab|| <= ||a|| ||b|| (sample {index}, p = {p})",
                         joint <= bound + ORACLE_NORM_SLACK, f"oracle {joint}, bound {bound}")

        square = WeightedPointSpace.counting(3)
        c = OperatorMatrix(domain=square, codomain=square, entries=_random_matrix(rng, 3))
        exact, oracle = op_norm(c, 2.0).upper, oracle_norm(c, 2.0, seed=seed, levels=3, random_starts=8, iterations=50)
        result.check(f"p = 2 norm agrees with the oracle (sample {index})",
                     math.isclose(oracle, exact, rel_tol=P2_ORACLE_TOLERANCE), f"oracle {oracle}, exact {exact}")
    return result


def tensor_suite(seed: int, budget: EstimationBudget, quick: bool) -> SuiteResult:
    result = SuiteResult(name="tensor")
    for index in range(_samples(quick, 50, 10)):
        rng = derive_rng(seed, "tensor", index)
        size = 2 + index % 2
        space = WeightedPointSpace.counting(size)
        a = OperatorMatrix(domain=space, codomain=space, entries=_random_matrix(rng, size))
        b = OperatorMatrix(domain=space, codomain=space, entries=_random_matrix(rng, size))
        product = kron(a, b)
        exact = op_norm(product, 2.0).upper
        result.check(f"||a (x) b|| = ||a|| ||b|| at p = 2 (pair {index})",
                     math.isclose(exact, op_norm(a, 2.0).upper * op_norm(b, 2.0).upper, rel_tol=1e-8))
        if index < _samples(quick, 10, 3):
            for p in (1.5, 3.0):
                left, right, joint = op_norm(a, p, budget), op_norm(b, p, budget), op_norm(product, p, budget)
                result.check(f"tensor intervals overlap (pair {index}, p = {p})",
                             left.lower * right.lower <= joint.upper + BOUND_SLACK
                             and joint.lower <= left.upper * right.upper + BOUND_SLACK)

        c = OperatorMatrix(domain=space, codomain=space, entries=_random_matrix(rng, size))
        d = OperatorMatrix(domain=space, codomain=space, entries=_random_matrix(rng, size))
        mixed = (kron(a, b) @ kron(c, d)).max_abs_diff(kron(a @ c, b @ d))
        result.check(f"mixed product (a (x) b)(c (x) d) = ac (x) bd (pair {index})",
                     mixed <= ENTRYWISE_TOLERANCE * max(1.0, float(np.max(np.abs((a @ c).entries)))
                                                        * float(np.max(np.abs((b @ d).entries)))),
                     f"deviation {mixed}")

        factors = [WeightedPointSpace.uniform(size), WeightedPointSpace.uniform(2 + (index + 1) % 2)]
        xi = PVector(space=factors[0], coords=rng.standard_normal(factors[0].size)
                     + 1j * rng.standard_normal(factors[0].size))
        eta = PVector(space=factors[1], coords=rng.standard_normal(factors[1].size)
                      + 1j * rng.standard_normal(factors[1].size))
        for p in (1.0, 1.5, 2.0, 3.0):
            joint, split = vec_norm(kron_vectors(xi, eta), p), vec_norm(xi, p) * vec_norm(eta, p)
            result.check(f"||xi (x) eta|| = ||xi|| ||eta|| (pair {index}, p = {p})",
                         abs(joint - split) <= ENTRYWISE_TOLERANCE * max(1.0, split), f"{joint} vs {split}")
    return result


def group_suite(seed: int, budget: EstimationBudget, quick: bool) -> SuiteResult:
    result = SuiteResult(name="grouptriple")
    integers = IntegerGroup()
    length = LengthFn.word_length(integers)
    delta = GroupAlgElem.delta(1)

    points = commutator_series(delta, integers, length, range(2, 9), 2.0, budget)
    for point in points:
        if point.radius >= 3:
            result.check(f"commutator of delta_1 is 1 at R = {point.radius:g}",
                         abs(point.estimate.lower - 1.0) <= 1e-8, f"lower {point.estimate.lower}")
    lowers = [point.estimate.lower for point in points]
    result.check("commutator series is nondecreasing", all(x <= y for x, y in zip(lowers, lowers[1:])))

    for radius in range(0, 9):
        _, residual = resolvent_approx(ball(integers, length, radius), mode=ResolventMode.SQUARED)
        result.check(f"squared residual at R = {radius}", residual == 1.0 / (1.0 + (radius + 1) ** 2))

    for group in (integers, FreeGroup(2), CyclicGroup(6)):
        group_length = LengthFn.word_length(group)
        truncation = ball(group, group_length, 3)
        for index in range(_samples(quick, 30, 6)):
            rng = derive_rng(seed, "group", str(group), index)
            a = random_group_element(truncation, rng, 4)
            for p in (1.0, 2.0, 3.0):
                def bounded(a=a, p=p, truncation=truncation, group_length=group_length):
                    estimate = commutator_norm_est(a, truncation, p, budget)
                    bound = commutator_bound(a, group_length, p)
                    return estimate.lower <= bound + BOUND_SLACK, f"lower {estimate.lower}, bound {bound}"
                result.run(f"commutator below the analytic bound ({group}, sample {index}, p = {p})", bounded)
        samples = list(truncation.elements)
        result.check(f"length axioms ({group})", not group_length.check_axioms(group, samples))

    truncation = ball(FreeGroup(2), LengthFn.word_length(FreeGroup(2)), 2)
    half = ball(FreeGroup(2), LengthFn.word_length(FreeGroup(2)), 1)
    rng = derive_rng(seed, "homomorphism")
    a, b = random_group_element(half, rng, 3), random_group_element(half, rng, 3)
    inner = [truncation.index[x] for x in half.elements]
    product = lambda_matrix(a, truncation, 2.0).entries @ lambda_matrix(b, truncation, 2.0).entries
    convolution = lambda_matrix(convolve(a, b, truncation.group), truncation, 2.0).entries
    result.check("lambda is multiplicative on the inner ball",
                 np.allclose(product[np.ix_(inner, inner)], convolution[np.ix_(inner, inner)], atol=1e-12))

    for group in (integers, FreeGroup(2), CyclicGroup(6)):
        group_length = LengthFn.word_length(group)
        truncation = ball(group, group_length, 3)
        dirac = dirac_matrix(truncation).entries
        lengths = np.array(sorted(group_length(x) for x in truncation.elements), dtype=float)
        diagonal = np.diag(np.diag(dirac))
        result.check(f"Dirac spectrum is the set of lengths ({group})",
                     not np.any(dirac - diagonal) and np.array_equal(np.sort(np.diag(dirac).real), lengths)
                     and np.allclose(np.linalg.eigvalsh(dirac), lengths, atol=ENTRYWISE_TOLERANCE))
        shift = 0.5 + 1j
        approximant, _ = resolvent_approx(truncation, mode=ResolventMode.SHIFTED, shift=shift)
        identity = np.eye(len(truncation.elements))
        deviation = float(np.max(np.abs((dirac - shift * identity) @ approximant.entries - identity)))
        result.check(f"(D - lambda I) J_F = I ({group})", deviation <= ENTRYWISE_TOLERANCE,
                     f"deviation {deviation}")
    return result


def uhf_suite(seed: int, budget: EstimationBudget, quick: bool) -> SuiteResult:
    result = SuiteResult(name="uhftriple")
    profiles = PROFILES[:2] if quick else PROFILES
    for dims in profiles:
        tower = build_tower(UHFSpecConfig(dims=dims))
        for check in verify_tower(tower, TOWER_P_VALUES, budget):
            result.check(f"{check.name} {list(dims)}", check.passed, f"deviation {check.deviation}")

        for index in range(_samples(quick, 20, 5)):
            rng = derive_rng(seed, "commutation", str(dims), index)
            n = index % (tower.level + 1)
            a = random_level_operator(tower, n, rng).embedded
            deviation = max(float(np.max(np.abs((a @ tower.P[m] - tower.P[m] @ a).entries)))
                            for m in range(n, tower.level + 1))
            result.check(f"level-{n} operator commutes with P_m {list(dims)}", deviation <= 1e-12,
                         f"deviation {deviation}")

        alpha = AlphaSeq(values=tuple(float(n) for n in range(tower.level + 1)))
        result.run(f"resolvent inverse {list(dims)}", lambda: (resolvent_inverse(tower, alpha) is not None, ""))
        for n in range(tower.level + 1):
            for m in range(n, tower.level + 1):
                result.run(f"P_{m} factors through P_({m},{n}) {list(dims)}",
                           lambda n=n, m=m: (partial_projector(tower, n, m) is not None, ""))

        rng = derive_rng(seed, "profile", str(dims))
        eta = PVector(space=tower.flat, coords=rng.standard_normal(tower.dimension)
                      + 1j * rng.standard_normal(tower.dimension))
        for p in TOWER_P_VALUES:
            profile = strong_convergence_profile(tower, eta, p)
            bound = 2.0 * vec_norm(eta, p)
            result.check(f"strong convergence profile ends at 0 below 2 ||eta|| {list(dims)} p = {p}",
                         profile[-1] == 0.0 and all(value <= bound * (1.0 + BOUND_SLACK) for value in profile),
                         f"profile {profile}")

        ranks = nested_ranks(tower)
        result.check(f"nested ranges increase to the full space {list(dims)}",
                     all(x < y for x, y in zip(ranks, ranks[1:])) and ranks[-1] == tower.dimension,
                     f"ranks {ranks}")

        for n in range(tower.level + 1):
            rng = derive_rng(seed, "embedding", str(dims), n)
            a = random_level_operator(tower, n, rng)
            core_norm = float(np.linalg.norm(a.core, 2))
            embedded_norm = op_norm(a.embedded, 2.0).upper
            result.check(f"level-{n} embedding preserves the p = 2 norm {list(dims)}",
                         math.isclose(embedded_norm, core_norm, rel_tol=SCALING_TOLERANCE),
                         f"embedded {embedded_norm}, core {core_norm}")

            entries = a.embedded.entries
            expected = sum(alpha.values[k] * (tower.Q[k].entries @ entries - entries @ tower.Q[k].entries)
                           for k in range(1, n + 1))
            deviation = float(np.max(np.abs(commutator(tower, alpha, a).entries - expected)))
            scale = max(1.0, float(np.max(np.abs(entries)))) * max(alpha.values)
            result.check(f"[D, a] = sum_k alpha_k [Q_k, a] at level {n} {list(dims)}",
                         deviation <= ENTRYWISE_TOLERANCE * max(1.0, scale), f"deviation {deviation}")

    tower = build_tower(UHFSpecConfig(dims=(1, 2, 2)))
    spectrum = dirac_spectrum(tower, AlphaSeq(values=(0.0, 1.0, 2.0)))
    result.check("Dirac spectrum of (1, 2, 2)", np.allclose(spectrum, [0.0, 1.0, 2.0, 2.0], atol=1e-8),
                 f"spectrum {spectrum.tolist()}")
    result.check("Q ranks of (1, 2, 2)", q_ranks(tower) == [1, 1, 2])
    return result


def metric_suite(seed: int, budget: EstimationBudget, quick: bool) -> SuiteResult:
    result = SuiteResult(name="qmetric")
    configurations = _samples(quick, 30, 8)
    for index in range(configurations):
        dims = PROFILES[index % (2 if quick else len(PROFILES))]
        tower = build_tower(UHFSpecConfig(dims=dims))
        rng = derive_rng(seed, "key", index)
        alpha = AlphaSeq(values=(0.0,) + tuple(rng.uniform(0.5, 4.0, tower.level)))
        a = random_level_operator(tower, int(rng.integers(0, tower.level + 1)), rng)
        n = int(rng.integers(1, tower.level + 1))
        result.run(f"key estimate {list(dims)} sample {index}",
                   lambda: (True, "") if key_estimate(tower, alpha, a, n, 2.0) else (False, ""))

    tower = build_tower(UHFSpecConfig(dims=(1, 2)))
    alpha = AlphaSeq(values=(0.0, 1.0))
    omega, psi = point_state(2, 0), point_state(2, 1)
    oracle = mk_grid_oracle(tower, alpha, omega, psi, 2.0)
    lower = mk_lower(tower, alpha, omega, psi, 2.0, budget).lower
    result.check("mk lower agrees with the grid oracle", abs(lower - oracle) <= ORACLE_TOLERANCE,
                 f"lower {lower}, oracle {oracle}")
    result.check("mk(omega, omega) = 0", mk_lower(tower, alpha, omega, omega, 2.0, budget).lower == 0.0)
    scaled = mk_lower(tower, alpha.scaled(3.0), omega, psi, 2.0, budget).lower
    result.check("mk is homogeneous in alpha", abs(3.0 * scaled - lower) <= 2 * ORACLE_TOLERANCE,
                 f"3 * scaled {3.0 * scaled}, lower {lower}")
    trace = trace_state(2)
    left = mk_grid_oracle(tower, alpha, omega, trace, 2.0)
    right = mk_grid_oracle(tower, alpha, trace, psi, 2.0)
    result.check("grid oracle satisfies the triangle inequality", oracle <= left + right + 1e-2)

    degeneracy = degeneracy_probe(tower, alpha, 2.0)
    witness = np.array([[1.0, -1.0], [-1.0, 1.0]])
    result.check("commutator kernel has dimension >= 2", degeneracy.dimension >= 2,
                 f"dimension {degeneracy.dimension}")
    result.check("zero row and column sum core lies in the kernel", degeneracy.contains(witness))
    constants = cn_constants(tower, 2.0, budget)
    result.check("kernel flag is false at level 1", constants.flags == [False])

    synthetic = CnTable.synthetic([1.0, 1.0, 1.0])
    chosen = alpha_auto(synthetic)
    result.check("automatic alpha for c = (1, 1, 1)", chosen.values == (0.0, 2.0, 4.0, 8.0))
    deep = build_tower(UHFSpecConfig(dims=(1, 2, 2, 2)))
    result.check("mk upper <= 2 for automatic alpha", mk_upper(deep, chosen, synthetic) <= 2.0)

    for dims in PROFILES[:2]:
        tower = build_tower(UHFSpecConfig(dims=dims))
        alpha = AlphaSeq(values=tuple(float(n) for n in range(tower.level + 1)))
        upper = mk_upper(tower, alpha, cn_constants(tower, 2.0, budget))
        states = [point_state(tower.dimension, 0), point_state(tower.dimension, 1), trace_state(tower.dimension)]
        for omega, psi in [(states[0], states[1]), (states[0], states[2])]:
            lower = mk_lower(tower, alpha, omega, psi, 2.0, budget).lower
            consistent = not (math.isfinite(lower) and math.isfinite(upper)) or lower <= upper + ORACLE_TOLERANCE
            result.check(f"mk lower <= mk upper ({omega.label}, {psi.label}) {list(dims)}", consistent,
                         f"lower {lower}, upper {upper}")

    tower = build_tower(UHFSpecConfig(dims=(1, 2)))
    identity = quotient_distance(tower, embed_algebra(tower, 1, np.eye(2)), 2.0, budget)
    result.check("quotient distance of the identity is 0", identity.upper <= BOUND_SLACK,
                 f"[{identity.lower}, {identity.upper}]")
    sign = quotient_distance(tower, embed_algebra(tower, 1, np.diag([1.0, -1.0])), 2.0, budget)
    result.check("quotient distance of diag(1, -1) is 1",
                 abs(sign.lower - 1.0) <= BOUND_SLACK and abs(sign.upper - 1.0) <= BOUND_SLACK,
                 f"[{sign.lower}, {sign.upper}]")
    rng = derive_rng(seed, "quotient")
    small = 1e-3 * _random_matrix(rng, 2)
    shifted = quotient_distance(tower, embed_algebra(tower, 1, (2.0 - 1.0j) * np.eye(2) + small), 2.0, budget)
    small_norm = op_norm(embed_algebra(tower, 1, small).embedded, 2.0).upper
    result.check("quotient distance of c I + b is at most ||b||", shifted.upper <= small_norm + BOUND_SLACK,
                 f"distance {shifted.upper}, ||b|| {small_norm}")
    return result


SUITES: Dict[str, Callable[[int, EstimationBudget, bool], SuiteResult]] = {
    "pspace": pspace_suite,
    "tensor": tensor_suite,
    "grouptriple": group_suite,
    "uhftriple": uhf_suite,
    "qmetric": metric_suite,
}
