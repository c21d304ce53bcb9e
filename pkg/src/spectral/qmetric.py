"""
States on truncated UHF algebras and the extended pseudometric

    mk_D(omega, psi) = sup {|omega(a) - psi(a)| : ||[D, a]|| <= 1}.

Lower ends come from feasible points whose commutator norm is certified by the upper end of the norm estimate;
upper ends come from the seminorm-equivalence constants c_n of the tower levels.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import DEFAULT_ALGEBRA_DIMENSION_CAP, EstimationBudget
from src.core.exceptions import (
    BudgetError,
    DegeneracyError,
    DimensionMismatchError,
    InvalidFileFormatError,
    InvalidInputError,
    InvariantViolationError,
    ResourceCapError,
)
from src.core.seeding import derive_rng
from src.spectral.pspace import (
    ORACLE_MAX_DIMENSION,
    PROBABILITY_SUM_TOLERANCE,
    NormEstimate,
    NormMethod,
    OperatorMatrix,
    WeightedPointSpace,
    check_exponent,
    lp_norm,
    norm_upper,
    op_norm,
    to_counting,
    vec_norm,
)
from src.spectral.uhftriple import AlphaSeq, LevelOperator, UHFTower, commutator, dirac

log = logging.getLogger(__name__)

SEARCH_TOLERANCE = 5e-3
KEY_ESTIMATE_TOLERANCE = 1e-10
BASIS_THRESHOLD = 1e-10
KERNEL_THRESHOLD = 1e-9
FEASIBILITY_SLACK = 1e-12
POLISH_SWEEPS = 3


class StateKind(str, Enum):
    POINT = "point"
    TRACE = "trace"
    CUSTOM = "custom"


class State(BaseModel):
    """
    A diagonal functional omega(a) = sum_x c_x a_xx on the matrices over X_{<=M}.

    Attributes:
        weights (np.ndarray): The coefficients c_x, summing to one.
        kind (StateKind): How the state was built.
        label (str): Display name used in reports.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weights: np.ndarray
    kind: StateKind
    label: str

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce_weights(cls, value):
        weights = np.array(value, dtype=complex)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("State weights must be a nonempty vector")
        weights.flags.writeable = False
        return weights

    @model_validator(mode="after")
    def _check_weights(self):
        if abs(self.weights.sum() - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValueError(f"State weights must sum to 1, got: {self.weights.sum()}")
        if self.kind != StateKind.CUSTOM and (np.any(self.weights.imag != 0) or np.any(self.weights.real < 0)):
            raise ValueError("Point and trace states must have nonnegative weights")
        return self

    @property
    def size(self) -> int:
        return self.weights.size

    def evaluate(self, a: np.ndarray) -> complex:
        """
        omega(a) for a square matrix over X_{<=M}.
        """
        if a.shape != (self.size, self.size):
            raise DimensionMismatchError(f"State on {self.size} points cannot evaluate a matrix of shape {a.shape}")
        return complex(np.dot(self.weights, np.diag(a)))


def point_state(size: int, x: int) -> State:
    """
    The point state a -> a_xx.
    """
    if not 0 <= x < size:
        raise InvalidInputError(f"Point {x} is outside 0..{size - 1}")
    weights = np.zeros(size)
    weights[x] = 1.0
    return State(weights=weights, kind=StateKind.POINT, label=f"point:{x}")


def trace_state(size: int) -> State:
    """
    The normalized trace a -> (1/N) sum_x a_xx.
    """
    return State(weights=np.full(size, 1.0 / size), kind=StateKind.TRACE, label="trace")


def custom_state(weights: Sequence[complex], label: str = "custom") -> State:
    return State(weights=weights, kind=StateKind.CUSTOM, label=label)


def mixture(states: Sequence[State], coefficients: Sequence[float]) -> State:
    """
    The convex combination sum_i t_i omega_i.
    """
    if len(states) != len(coefficients) or not states:
        raise InvalidInputError("A mixture needs one coefficient per state")
    if any(t < 0 for t in coefficients) or abs(sum(coefficients) - 1.0) > PROBABILITY_SUM_TOLERANCE:
        raise InvalidInputError(f"Mixture coefficients must be a probability vector, got: {list(coefficients)}")
    weights = sum(t * state.weights for t, state in zip(coefficients, states))
    label = "+".join(f"{t:g}*{state.label}" for t, state in zip(coefficients, states))
    return State(weights=weights, kind=StateKind.CUSTOM, label=label)


def parse_state(lines: Sequence[str], size: int) -> State:
    """
    Parses a state description: "point INDEX", "trace", or "custom" followed by one weight per line.
    """
    lines = [line.strip() for line in lines if line.strip() and not line.strip().startswith("#")]
    if not lines:
        raise InvalidFileFormatError("Empty state description")
    head = lines[0].split()
    try:
        if head[0] == "point" and len(head) == 2:
            return point_state(size, int(head[1]))
        if head == ["trace"]:
            return trace_state(size)
        if head == ["custom"]:
            weights = [complex(token) for line in lines[1:] for token in line.split()]
            if len(weights) != size:
                raise InvalidFileFormatError(f"Custom state needs {size} weights, got: {len(weights)}")
            return custom_state(weights)
    except ValueError as error:
        raise InvalidFileFormatError(f"Malformed state description: {lines}") from error
    raise InvalidFileFormatError(f"Unknown state kind: '{lines[0]}'")


def read_state_file(path: str, size: int) -> State:
    with open(path, "r") as file:
        state = parse_state(file.readlines(), size)
    return state if state.kind != StateKind.CUSTOM else state.model_copy(update={"label": path})


class WitnessKind(str, Enum):
    """
    Attributes:
        FEASIBLE: A matrix with certified ||[D, a]|| <= 1 attaining the lower end.
        KERNEL: A matrix with [D, a] = 0 on which the two states differ; the metric is infinite.
    """
    FEASIBLE = "feasible"
    KERNEL = "kernel"


class MetricEstimate(BaseModel):
    """
    An interval for mk_D(omega, psi).

    Attributes:
        lower (float): Attained by `witness`, possibly infinite.
        upper (float): Possibly infinite.
        witness (Optional[np.ndarray]): The algebra element attaining `lower`.
        witness_kind (WitnessKind): Whether the witness is a feasible point or a kernel direction.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower: float = Field(ge=0.0)
    upper: float = Field(ge=0.0, default=math.inf)
    witness: Optional[np.ndarray] = None
    witness_kind: WitnessKind = WitnessKind.FEASIBLE

    @model_validator(mode="after")
    def _check_interval(self):
        if math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower > self.upper + SEARCH_TOLERANCE:
            raise ValueError(f"Lower end {self.lower} exceeds upper end {self.upper}")
        return self

    def with_upper(self, upper: float) -> "MetricEstimate":
        return MetricEstimate(lower=self.lower, upper=upper, witness=self.witness, witness_kind=self.witness_kind)


def check_algebra_dimension(size: int, cap: int = DEFAULT_ALGEBRA_DIMENSION_CAP):
    """
    Raises ResourceCapError when the algebra of N x N matrices has more than `cap` dimensions.
    """
    if size * size > cap:
        raise ResourceCapError(f"Algebra dimension {size * size} exceeds the cap of {cap}")


def _kernel_and_complement(d: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # D = V diag(lambda) V^T is real symmetric; [D, v_i v_j^T] = (lambda_i - lambda_j) v_i v_j^T
    eigenvalues, vectors = scipy.linalg.eigh(d.real)
    gaps = np.abs(np.subtract.outer(eigenvalues, eigenvalues)).ravel()
    # row-major vec(v_i v_j^T) is column i N + j of V (x) V
    units = np.kron(vectors, vectors)
    in_kernel = gaps < KERNEL_THRESHOLD
    return units[:, in_kernel], units[:, ~in_kernel]


def key_estimate(tower: UHFTower, alpha: AlphaSeq, a: LevelOperator, n: int, p: float = 2.0) -> Tuple[float, float]:
    """
    Evaluates both sides of ||Q_n [D, a] Q_0 1||_p = |alpha_n| ||Q_n a 1||_p.

    Raises:
        InvalidInputError: If n is outside 1..M.
        InvariantViolationError: If the sides differ by more than 1e-10 (relative to max(1, rhs)).
    """
    if not 1 <= n <= tower.level:
        raise InvalidInputError(f"Key estimate level {n} is outside 1..{tower.level}")
    one = tower.one()
    lhs = vec_norm((tower.Q[n] @ commutator(tower, alpha, a) @ tower.Q[0]).apply(one), p)
    rhs = abs(alpha.values[n]) * vec_norm((tower.Q[n] @ a.embedded).apply(one), p)
    if abs(lhs - rhs) > KEY_ESTIMATE_TOLERANCE * max(1.0, rhs):
        raise InvariantViolationError(f"Key estimate fails at level {n}: lhs {lhs}, rhs {rhs}")
    return lhs, rhs


class CnEntry(BaseModel):
    """
    The seminorm-equivalence constant of one level.

    Attributes:
        level (int): The level n >= 1.
        value (float): c_n, infinite when the kernels differ.
        kernel_flag (bool): Whether Q_n a 1 = 0 forces Q_n a = 0.
        certificate (Optional[NormEstimate]): Ratio interval at the best point found, None when infinite.
        restricted (float): The supremum on the complement of the kernel of b -> b 1 inside V_n.
        dimension (int): Dimension of V_n = Q_n A_M.
        kernel_dimension (int): Dimension of the kernel of b -> b 1 inside V_n.
    """
    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=1)
    value: float
    kernel_flag: bool
    certificate: Optional[NormEstimate] = None
    restricted: float
    dimension: int = 0
    kernel_dimension: int = 0

    @model_validator(mode="after")
    def _check_value(self):
        if math.isfinite(self.value) and self.value < 1.0:
            raise ValueError(f"c_{self.level} must be at least 1, got: {self.value}")
        if self.kernel_flag == math.isinf(self.value):
            raise ValueError("c_n is infinite exactly when the kernels differ")
        return self


class CnTable(BaseModel):
    """
    The constants c_1, ..., c_M with their kernel flags.
    """
    model_config = ConfigDict(frozen=True)

    entries: Tuple[CnEntry, ...]

    @classmethod
    def synthetic(cls, values: Sequence[float]) -> "CnTable":
        """
        A table with given constants, flagged degenerate where infinite.
        """
        return cls(entries=tuple(
            CnEntry(level=n, value=value, kernel_flag=math.isfinite(value), restricted=value if math.isfinite(value)
                    else 1.0)
            for n, value in enumerate(values, start=1)
        ))

    @property
    def values(self) -> List[float]:
        return [entry.value for entry in self.entries]

    @property
    def flags(self) -> List[bool]:
        return [entry.kernel_flag for entry in self.entries]

    @property
    def restricted(self) -> List[float]:
        return [entry.restricted for entry in self.entries]

    @property
    def all_finite(self) -> bool:
        return all(self.flags)


def _level_subspace(q: np.ndarray) -> np.ndarray:
    # Q = U U^T, so Q A = {U X} has the orthonormal basis vec(u_k e_j^T) = u_k (x) e_j
    eigenvalues, vectors = scipy.linalg.eigh(q)
    return np.kron(vectors[:, eigenvalues > 0.5], np.eye(q.shape[0]))


def _maximize(ratio, dimension: int, budget: EstimationBudget, seed_keys: tuple,
              structured: Sequence[np.ndarray] = ()) -> Tuple[float, np.ndarray]:
    """
    Multi-start derivative-free maximization of a scale-invariant ratio, followed by a coordinate polish.
    """
    starts = [start for start in structured if np.any(start)]
    for index in range(budget.starts):
        starts.append(derive_rng(budget.seed, *seed_keys, index).standard_normal(dimension))

    def ascend(start: np.ndarray) -> Tuple[float, np.ndarray]:
        result = scipy.optimize.minimize(
            lambda x: -ratio(x), start, method="Powell",
            options={"maxfev": budget.iterations * (dimension + 1), "xtol": 1e-10, "ftol": budget.tolerance},
        )
        point = result.x if -result.fun >= ratio(start) else start
        return ratio(point), point

    if budget.workers > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as pool:
            results = list(pool.map(ascend, starts))
    else:
        results = [ascend(start) for start in starts]
    best_value, best_point = max(results, key=lambda result: result[0])

    best_point = best_point / np.linalg.norm(best_point)
    for _ in range(POLISH_SWEEPS):
        for coordinate in range(dimension):
            def along(t, coordinate=coordinate):
                moved = best_point.copy()
                moved[coordinate] = t
                return -ratio(moved)

            result = scipy.optimize.minimize_scalar(along, bounds=(-2.0, 2.0), method="bounded")
            if -result.fun > best_value:
                best_point = best_point.copy()
                best_point[coordinate] = result.x
                best_value = -result.fun
    return float(best_value), best_point


def subspace_constant(space: WeightedPointSpace, basis: np.ndarray, level: int, p: float,
                      budget: Optional[EstimationBudget] = None) -> CnEntry:
    """
    The smallest c with ||b||_p <= c ||b 1||_p for every b in a subspace of operators on `space`.

    Args:
        space (WeightedPointSpace): The points the operators act on.
        basis (np.ndarray): Orthonormal columns, each a row-major vectorized N x N matrix.
        level (int): The level recorded in the entry.
        p (float): The exponent.
        budget (Optional[EstimationBudget]): Settings of the multi-start search.

    Returns:
        CnEntry: The constant, infinite when b -> b 1 has a kernel on the subspace, with the supremum restricted
            to the complement of that kernel and, when finite, the certified interval of the maximizer's ratio.
    """
    p = check_exponent(p)
    budget = budget or EstimationBudget()
    size = space.size
    weights = space.weight_array()
    dimension = basis.shape[1]
    if dimension == 0:
        return CnEntry(level=level, value=1.0, kernel_flag=True, restricted=1.0)
    row_sums = np.stack([basis[:, k].reshape(size, size).sum(axis=1) for k in range(dimension)], axis=1)
    _, singular_values, rows = scipy.linalg.svd(row_sums, full_matrices=True)
    rank = int(np.sum(singular_values > BASIS_THRESHOLD))
    kernel_flag = rank == dimension
    complement = basis @ rows[:rank].T

    def ratio(x: np.ndarray) -> float:
        b = (complement @ x).reshape(size, size)
        denominator = lp_norm(b.sum(axis=1), weights, p)
        if denominator <= BASIS_THRESHOLD * max(1.0, np.linalg.norm(x)):
            return 0.0
        return norm_upper(b, p) / denominator

    structured = [complement.T @ np.eye(size)[:, [x]].repeat(size, axis=1).ravel() for x in range(size)]
    restricted, point = _maximize(ratio, rank, budget, ("cn", level), structured) if rank else (1.0, None)
    restricted = max(restricted, 1.0)
    if not kernel_flag:
        log.warning(f"c_{level} is infinite: the subspace has dimension {dimension}, b -> b 1 has rank {rank}")
        return CnEntry(level=level, value=math.inf, kernel_flag=False, restricted=restricted, dimension=dimension,
                       kernel_dimension=dimension - rank)

    b = OperatorMatrix(domain=space, codomain=space, entries=(complement @ point).reshape(size, size))
    denominator = lp_norm(b.entries.sum(axis=1), weights, p)
    estimate = op_norm(b, p, budget)
    certificate = NormEstimate(lower=estimate.lower / denominator, upper=estimate.upper / denominator,
                               methods=estimate.methods)
    value = max(certificate.midpoint, 1.0)
    return CnEntry(level=level, value=value, kernel_flag=True, certificate=certificate, restricted=restricted,
                   dimension=dimension, kernel_dimension=0)


def cn_constants(tower: UHFTower, p: float, budget: Optional[EstimationBudget] = None,
                 cap: int = DEFAULT_ALGEBRA_DIMENSION_CAP) -> CnTable:
    """
    Computes the constants c_n with ||Q_n a|| <= c_n ||Q_n a 1||_p on V_n = Q_n A_M.

    V_n is spanned by u (x) e_j for u in an orthonormal basis of the range of Q_n. The kernel flag records whether
    b -> b 1 is injective on V_n; when it is not, c_n is infinite and only the restricted supremum on the
    complement of that kernel is finite.

    Returns:
        CnTable: One entry per level 1..M.

    Raises:
        ResourceCapError: If N^2 exceeds `cap`.
    """
    p = check_exponent(p)
    budget = budget or EstimationBudget()
    check_algebra_dimension(tower.dimension, cap)
    return CnTable(entries=tuple(
        subspace_constant(tower.flat, _level_subspace(tower.Q[n].entries.real), n, p, budget)
        for n in range(1, tower.level + 1)
    ))


def alpha_auto(cn: CnTable) -> AlphaSeq:
    """
    The choice alpha_n = 2^n max(c_n, 1), which makes sum c_n / alpha_n <= 1.

    Raises:
        DegeneracyError: If some c_n is infinite, carrying the first such level.
    """
    for entry in cn.entries:
        if not entry.kernel_flag:
            raise DegeneracyError(f"c_{entry.level} is infinite, no alpha makes the metric bounded", entry.level)
    return AlphaSeq(values=(0.0,) + tuple(2.0 ** entry.level * max(entry.value, 1.0) for entry in cn.entries))


def mk_upper(tower: UHFTower, alpha: AlphaSeq, cn: CnTable) -> float:
    """
    The diameter bound 2 sum_n c_n / alpha_n, infinite when some c_n is infinite.
    """
    if len(cn.entries) != tower.level or alpha.level != tower.level:
        raise DimensionMismatchError("Constants, alpha and tower must have the same number of levels")
    if not cn.all_finite or any(value == 0.0 for value in alpha.values[1:]):
        return math.inf
    return 2.0 * sum(entry.value / alpha.values[entry.level] for entry in cn.entries)


def _check_states(tower: UHFTower, omega: State, psi: State):
    if omega.size != tower.dimension or psi.size != tower.dimension:
        raise DimensionMismatchError(f"States must live on the {tower.dimension} points of the tower")


def mk_lower(tower: UHFTower, alpha: AlphaSeq, omega: State, psi: State, p: float,
             budget: Optional[EstimationBudget] = None, cap: int = DEFAULT_ALGEBRA_DIMENSION_CAP) -> MetricEstimate:
    """
    Certified lower estimate of mk_D(omega, psi) on the algebra of level M.

    Searches real matrices a for the largest |omega(a) - psi(a)| / U(a), U(a) the certified upper end of
    ||[D, a]||_p, over the orthogonal complement of the kernel of a -> [D, a]. The witness is a / U(a), which is
    feasible. When the difference of the states does not vanish on that kernel, the estimate is infinite and the
    witness is the kernel direction. D is normalized by max |alpha_n| during the search.

    Raises:
        BudgetError: If the budget has zero starts.
        ResourceCapError: If N^2 exceeds `cap`.
    """
    p = check_exponent(p)
    budget = budget or EstimationBudget()
    _check_states(tower, omega, psi)
    check_algebra_dimension(tower.dimension, cap)
    size = tower.dimension
    if np.array_equal(omega.weights, psi.weights):
        return MetricEstimate(lower=0.0, witness=np.zeros((size, size), dtype=complex))
    if budget.starts == 0:
        raise BudgetError("A budget with zero starts cannot search for feasible points")

    difference = omega.weights - psi.weights
    scale = max(abs(value) for value in alpha.values)
    normalized = dirac(tower, alpha).entries / scale if scale > 0 else np.zeros((size, size), dtype=complex)
    kernel, complement = _kernel_and_complement(normalized)
    for k in range(kernel.shape[1]):
        core = kernel[:, k].reshape(size, size)
        if abs(np.dot(difference, np.diag(core))) > KERNEL_THRESHOLD:
            log.warning(f"States {omega.label} and {psi.label} differ on the kernel of the commutator")
            return MetricEstimate(lower=math.inf, upper=math.inf, witness=core.astype(complex),
                                  witness_kind=WitnessKind.KERNEL)
    if complement.shape[1] == 0:
        return MetricEstimate(lower=0.0, witness=np.zeros((size, size), dtype=complex))

    def ratio(x: np.ndarray) -> float:
        a = (complement @ x).reshape(size, size)
        cost = norm_upper(normalized @ a - a @ normalized, p)
        if cost <= KERNEL_THRESHOLD * max(1.0, np.linalg.norm(x)):
            return 0.0
        return abs(np.dot(difference, np.diag(a))) / cost

    structured = [complement.T @ np.diag(np.eye(size)[x]).ravel() for x in range(size)]
    structured.append(complement.T @ np.diag(difference.real).ravel())
    value, point = _maximize(ratio, complement.shape[1], budget, ("mk", omega.label, psi.label, p), structured)

    a = (complement @ point).reshape(size, size).astype(complex)
    cost = norm_upper(scale * (normalized @ a - a @ normalized), p)
    witness = a / cost
    feasibility = norm_upper(to_counting(commutator_of(tower, alpha, witness), p), p)
    if feasibility > 1.0 + FEASIBILITY_SLACK:
        raise InvariantViolationError(f"Witness is infeasible: certified commutator norm {feasibility}")
    lower = abs(omega.evaluate(witness) - psi.evaluate(witness))
    log.debug(f"mk lower bound for ({omega.label}, {psi.label}) at p = {p}: {lower}")
    return MetricEstimate(lower=lower, witness=witness)


def commutator_of(tower: UHFTower, alpha: AlphaSeq, a: np.ndarray) -> OperatorMatrix:
    """
    [D, a] for a top-level matrix a.
    """
    d = dirac(tower, alpha)
    matrix = OperatorMatrix(domain=tower.flat, codomain=tower.flat, entries=a)
    return d @ matrix - matrix @ d


def _batched_norm(matrices: np.ndarray, p: float) -> np.ndarray:
    if p == 1.0:
        return np.abs(matrices).sum(axis=1).max(axis=1)
    return np.linalg.norm(matrices, ord=2, axis=(1, 2))


def mk_grid_oracle(tower: UHFTower, alpha: AlphaSeq, omega: State, psi: State, p: float, levels: int = 21) -> float:
    """
    Brute-force mk_D over a real grid of matrices, with exact commutator norms.

    Only for algebras of at most 4 real parameters and p in {1, 2}. Grid points with vanishing commutator on
    which the states differ give an infinite value.

    Raises:
        InvalidInputError: If the algebra is too large or p is not 1 or 2.
    """
    p = check_exponent(p)
    size = tower.dimension
    if size * size > ORACLE_MAX_DIMENSION or p not in (1.0, 2.0):
        raise InvalidInputError(f"Grid oracle needs at most {ORACLE_MAX_DIMENSION} parameters and p in {{1, 2}}")
    _check_states(tower, omega, psi)
    grid = np.array(list(itertools.product(np.linspace(-1.0, 1.0, levels), repeat=size * size)))
    cores = grid.reshape(-1, size, size)
    d = dirac(tower, alpha).entries.real
    commutators = np.einsum("ij,njk->nik", d, cores) - np.einsum("nij,jk->nik", cores, d)
    costs = _batched_norm(commutators, p)
    differences = np.abs(np.einsum("x,nxx->n", omega.weights - psi.weights, cores))
    if np.any((costs <= KERNEL_THRESHOLD) & (differences > KERNEL_THRESHOLD)):
        return math.inf
    feasible = costs > KERNEL_THRESHOLD
    return float(np.max(differences[feasible] / costs[feasible])) if np.any(feasible) else 0.0


def quotient_distance(tower: UHFTower, a: LevelOperator, p: float,
                      budget: Optional[EstimationBudget] = None) -> NormEstimate:
    """
    Estimates min over complex lambda of ||a - lambda I||_p, the norm of a modulo the scalars.

    The upper end is the best certified norm found by alternating one-dimensional searches over Re lambda and
    Im lambda in [-2 ||a||, 2 ||a||], each a bounded Brent search (scipy's minimize_scalar) in place of a
    golden-section search; both locate the minimum of the convex cost along a line. The lower end is
    max_{x,y} |a_xx - a_yy| / 2, since every diagonal entry is bounded by the norm.
    """
    p = check_exponent(p)
    budget = budget or EstimationBudget()
    entries = a.embedded.entries
    identity = np.eye(entries.shape[0])
    diagonal = np.diag(entries)

    def cost(shift: complex) -> float:
        return norm_upper(entries - shift * identity, p)

    radius = 2.0 * op_norm(a.embedded, p, budget).upper
    candidates = [complex(np.mean(diagonal)),
                  complex(0.5 * (diagonal.real.min() + diagonal.real.max()),
                          0.5 * (diagonal.imag.min() + diagonal.imag.max()))]
    best_shift = min(candidates, key=cost)
    best_cost = cost(best_shift)
    if radius > 0.0:
        for _ in range(POLISH_SWEEPS):
            real = scipy.optimize.minimize_scalar(
                lambda t: cost(complex(t, best_shift.imag)), bounds=(-radius, radius), method="bounded",
                options={"xatol": budget.tolerance},
            )
            if real.fun < best_cost:
                best_shift, best_cost = complex(real.x, best_shift.imag), float(real.fun)
            imaginary = scipy.optimize.minimize_scalar(
                lambda t: cost(complex(best_shift.real, t)), bounds=(-radius, radius), method="bounded",
                options={"xatol": budget.tolerance},
            )
            if imaginary.fun < best_cost:
                best_shift, best_cost = complex(best_shift.real, imaginary.x), float(imaginary.fun)

    lower = float(np.max(np.abs(np.subtract.outer(diagonal, diagonal)))) / 2.0
    return NormEstimate(lower=min(lower, best_cost), upper=best_cost, methods=frozenset({NormMethod.INTERPOLATION}))


class DegeneracyReport(BaseModel):
    """
    The numerical kernel of a -> [D, a] on the algebra of level M.

    Attributes:
        dimension (int): Dimension of the kernel; above 1 the metric does not separate all states.
        algebra_dimension (int): Dimension of the algebra, N^2.
        witnesses (Tuple[np.ndarray, ...]): Orthonormal real kernel basis, as N x N cores.
        commutator_norms (Tuple[float, ...]): Certified ||[D, k]||_p of each witness.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(ge=0)
    algebra_dimension: int
    witnesses: Tuple[np.ndarray, ...]
    commutator_norms: Tuple[float, ...]

    @property
    def separates(self) -> bool:
        return self.dimension <= 1

    def contains(self, core: np.ndarray) -> bool:
        """
        Whether a matrix lies in the kernel up to a relative projection residual of 1e-10.
        """
        core = np.asarray(core, dtype=complex)
        if not self.witnesses:
            return not np.any(core)
        basis = np.stack([witness.ravel() for witness in self.witnesses], axis=1)
        vector = core.ravel()
        residual = vector - basis @ (basis.T @ vector)
        return bool(np.linalg.norm(residual) <= BASIS_THRESHOLD * max(1.0, np.linalg.norm(vector)))


def degeneracy_probe(tower: UHFTower, alpha: AlphaSeq, p: float,
                     cap: int = DEFAULT_ALGEBRA_DIMENSION_CAP) -> DegeneracyReport:
    """
    Computes a basis of {a : ||[D, a]|| < 1e-9} from the eigendecomposition of D: the matrices v_i v_j^T with
    eigenvalue gap below 1e-9.

    Raises:
        ResourceCapError: If N^2 exceeds `cap`.
    """
    p = check_exponent(p)
    size = tower.dimension
    check_algebra_dimension(size, cap)
    kernel, _ = _kernel_and_complement(dirac(tower, alpha).entries)
    witnesses = tuple(kernel[:, k].reshape(size, size) for k in range(kernel.shape[1]))
    norms = tuple(norm_upper(to_counting(commutator_of(tower, alpha, witness), p), p) for witness in witnesses)
    if len(witnesses) > 1:
        log.warning(f"Commutator kernel has dimension {len(witnesses)}: the metric does not separate all states")
    return DegeneracyReport(dimension=len(witnesses), algebra_dimension=size * size, witnesses=witnesses,
                            commutator_norms=norms)


def parse_state_token(token: str, size: int) -> State:
    """
    Builds a state from "point:INDEX", "trace", or the path of a state file.
    """
    if token == "trace":
        return trace_state(size)
    if token.startswith("point:"):
        try:
            return point_state(size, int(token.split(":", 1)[1]))
        except ValueError as error:
            raise InvalidInputError(f"Invalid point state: '{token}'") from error
    return read_state_file(token, size)
