"""
Finite weighted L^p spaces, vector p-norms and certified p->p operator-norm estimation.

Every operator of the laboratory is an `OperatorMatrix` between two `WeightedPointSpace` objects. Norms are
computed after the isometric reduction `to_counting`, which moves the measure weights into the matrix entries.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Annotated, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import EstimationBudget
from src.core.exceptions import (
    BudgetError,
    DimensionMismatchError,
    InvalidFileFormatError,
    InvalidInputError,
)
from src.core.seeding import derive_rng

log = logging.getLogger(__name__)

PROBABILITY_SUM_TOLERANCE = 1e-12
ORACLE_MAX_DIMENSION = 4

PExponent = Annotated[float, Field(ge=1.0, allow_inf_nan=False)]


def check_exponent(p: float) -> float:
    """
    Validates an exponent p of an L^p space.

    Args:
        p (float): The exponent.

    Returns:
        float: The exponent as a float.

    Raises:
        InvalidInputError: If p is not finite or smaller than 1.
    """
    p = float(p)
    if not np.isfinite(p) or p < 1.0:
        raise InvalidInputError(f"Exponent must be finite and >= 1, got: {p}")
    return p


class MeasureKind(str, Enum):
    """
    Kind of measure carried by a finite point space.

    Attributes:
        PROBABILITY: Positive weights summing to one.
        COUNTING: Every weight equal to one.
    """
    PROBABILITY = "probability"
    COUNTING = "counting"


class WeightedPointSpace(BaseModel):
    """
    A finite measure space: a list of points carrying positive weights.

    Attributes:
        weights (Tuple[float, ...]): One positive weight per point.
        kind (MeasureKind): Probability (weights sum to 1) or counting (weights all 1).
    """
    model_config = ConfigDict(frozen=True)

    weights: Tuple[float, ...]
    kind: MeasureKind

    @model_validator(mode="after")
    def _check_weights(self):
        if not self.weights:
            raise ValueError("A point space needs at least one point")
        if any(not (weight > 0 and np.isfinite(weight)) for weight in self.weights):
            raise ValueError("Every weight must be positive and finite")
        if self.kind == MeasureKind.PROBABILITY and abs(sum(self.weights) - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValueError(f"Probability weights must sum to 1, got: {sum(self.weights)}")
        if self.kind == MeasureKind.COUNTING and any(weight != 1.0 for weight in self.weights):
            raise ValueError("Counting weights must all equal 1")
        return self

    @classmethod
    def uniform(cls, size: int) -> "WeightedPointSpace":
        """
        Builds the normalized counting measure on `size` points.
        """
        if size < 1:
            raise InvalidInputError(f"A point space needs at least one point, got size: {size}")
        return cls(weights=(1.0 / size,) * size, kind=MeasureKind.PROBABILITY)

    @classmethod
    def counting(cls, size: int) -> "WeightedPointSpace":
        """
        Builds the counting measure on `size` points.
        """
        if size < 1:
            raise InvalidInputError(f"A point space needs at least one point, got size: {size}")
        return cls(weights=(1.0,) * size, kind=MeasureKind.COUNTING)

    @classmethod
    def point(cls) -> "WeightedPointSpace":
        """
        Builds the one point space with counting measure (the empty product).
        """
        return cls.counting(1)

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "WeightedPointSpace":
        """
        Builds a space from raw weights, inferring its kind (counting when all weights are 1).

        Raises:
            InvalidInputError: If the weights are neither all 1 nor a probability vector.
        """
        weights = tuple(float(weight) for weight in weights)
        if weights and all(weight == 1.0 for weight in weights):
            return cls(weights=weights, kind=MeasureKind.COUNTING)
        if abs(sum(weights) - 1.0) <= PROBABILITY_SUM_TOLERANCE:
            return cls(weights=weights, kind=MeasureKind.PROBABILITY)
        raise InvalidInputError("Weights must either all equal 1 or sum to 1")

    @property
    def size(self) -> int:
        return len(self.weights)

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def matches(self, other: "WeightedPointSpace") -> bool:
        """
        Equality up to floating-point reassociation of product weights.
        """
        return (
            self.kind == other.kind
            and self.size == other.size
            and bool(np.allclose(self.weights, other.weights, rtol=1e-12, atol=0.0))
        )

    def constant(self, value: complex = 1.0) -> "PVector":
        """
        Returns the constant function with the given value.
        """
        return PVector(space=self, coords=np.full(self.size, value, dtype=complex))


def _as_complex_array(value, ndim: int) -> np.ndarray:
    array = np.array(value, dtype=complex)
    if array.ndim != ndim:
        raise ValueError(f"Expected an array with {ndim} dimensions, got shape: {array.shape}")
    array.flags.writeable = False
    return array


class PVector(BaseModel):
    """
    An element of L^p of a finite weighted point space.

    Attributes:
        space (WeightedPointSpace): The underlying space.
        coords (np.ndarray): One complex coordinate per point.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: WeightedPointSpace
    coords: np.ndarray

    @field_validator("coords", mode="before")
    @classmethod
    def _coerce_coords(cls, value):
        return _as_complex_array(value, 1)

    @model_validator(mode="after")
    def _check_length(self):
        if self.coords.shape[0] != self.space.size:
            raise DimensionMismatchError(
                f"Vector length {self.coords.shape[0]} does not match space size {self.space.size}"
            )
        return self


def lp_norm(coords: np.ndarray, weights: Optional[np.ndarray], p: float) -> float:
    """
    Computes (sum_i w_i |x_i|^p)^(1/p); counting measure when `weights` is None.
    """
    magnitudes = np.abs(coords) ** p
    total = magnitudes.sum() if weights is None else (weights * magnitudes).sum()
    return float(total ** (1.0 / p))


def vec_norm(v: PVector, p: float) -> float:
    """
    Computes the p-norm of a vector on its weighted space.

    Args:
        v (PVector): The vector.
        p (float): The exponent.

    Returns:
        float: (sum_i w_i |v_i|^p)^(1/p).
    """
    p = check_exponent(p)
    return lp_norm(v.coords, v.space.weight_array(), p)


class OperatorMatrix(BaseModel):
    """
    A bounded operator between two finite weighted point spaces, stored as a dense complex matrix.

    Attributes:
        domain (WeightedPointSpace): The space the operator acts on.
        codomain (WeightedPointSpace): The space the operator maps into.
        entries (np.ndarray): Complex matrix of shape (codomain.size, domain.size).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: WeightedPointSpace
    codomain: WeightedPointSpace
    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _coerce_entries(cls, value):
        return _as_complex_array(value, 2)

    @model_validator(mode="after")
    def _check_shape(self):
        expected = (self.codomain.size, self.domain.size)
        if self.entries.shape != expected:
            raise DimensionMismatchError(f"Matrix shape {self.entries.shape} does not match spaces {expected}")
        return self

    @classmethod
    def identity(cls, space: WeightedPointSpace) -> "OperatorMatrix":
        return cls(domain=space, codomain=space, entries=np.eye(space.size))

    @classmethod
    def zeros(cls, domain: WeightedPointSpace, codomain: Optional[WeightedPointSpace] = None) -> "OperatorMatrix":
        codomain = codomain or domain
        return cls(domain=domain, codomain=codomain, entries=np.zeros((codomain.size, domain.size)))

    @classmethod
    def diagonal(cls, values: Sequence[complex], space: WeightedPointSpace) -> "OperatorMatrix":
        return cls(domain=space, codomain=space, entries=np.diag(np.asarray(values, dtype=complex)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def is_square(self) -> bool:
        return self.domain.matches(self.codomain)

    def with_entries(self, entries: np.ndarray) -> "OperatorMatrix":
        """
        Returns an operator between the same spaces with new entries.
        """
        return OperatorMatrix(domain=self.domain, codomain=self.codomain, entries=entries)

    def apply(self, v: PVector) -> PVector:
        if not v.space.matches(self.domain):
            raise DimensionMismatchError("Vector does not live on the operator's domain")
        return PVector(space=self.codomain, coords=self.entries @ v.coords)

    def max_abs_diff(self, other: "OperatorMatrix") -> float:
        """
        Largest entrywise modulus of the difference with another operator of the same shape.
        """
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Cannot compare shapes {self.shape} and {other.shape}")
        if self.entries.size == 0:
            return 0.0
        return float(np.max(np.abs(self.entries - other.entries)))

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if not self.domain.matches(other.codomain):
            raise DimensionMismatchError("Cannot compose operators: domain and codomain differ")
        return OperatorMatrix(domain=other.domain, codomain=self.codomain, entries=self.entries @ other.entries)

    def _check_same_spaces(self, other: "OperatorMatrix"):
        if not (self.domain.matches(other.domain) and self.codomain.matches(other.codomain)):
            raise DimensionMismatchError("Operators act between different spaces")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_spaces(other)
        return self.with_entries(self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_spaces(other)
        return self.with_entries(self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return self.with_entries(complex(scalar) * self.entries)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return self.with_entries(-self.entries)


class NormMethod(str, Enum):
    """
    Provenance tags of a norm estimate.
    """
    EXACT_P1 = "exact-p1"
    EXACT_P2 = "exact-p2"
    POWER_ITERATION = "power-iteration"
    INTERPOLATION = "interpolation"
    ORACLE = "oracle"


_EXACT_METHODS = frozenset({NormMethod.EXACT_P1, NormMethod.EXACT_P2})


class NormEstimate(BaseModel):
    """
    A certified interval [lower, upper] containing a p->p operator norm.

    Attributes:
        lower (float): A value attained by some unit vector, hence a lower bound.
        upper (float): An analytic upper bound.
        methods (FrozenSet[NormMethod]): How the two ends were obtained.
    """
    model_config = ConfigDict(frozen=True)

    lower: float = Field(ge=0.0)
    upper: float = Field(ge=0.0)
    methods: FrozenSet[NormMethod]

    @model_validator(mode="after")
    def _check_interval(self):
        if self.lower > self.upper:
            raise ValueError(f"Lower end {self.lower} exceeds upper end {self.upper}")
        if self.methods & _EXACT_METHODS and self.lower != self.upper:
            raise ValueError("Exact estimates must have equal ends")
        return self

    @classmethod
    def exact(cls, value: float, method: NormMethod) -> "NormEstimate":
        return cls(lower=value, upper=value, methods=frozenset({method}))

    @property
    def is_exact(self) -> bool:
        return bool(self.methods & _EXACT_METHODS)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def to_counting(a: OperatorMatrix, p: float) -> np.ndarray:
    """
    Moves the measure weights of both spaces into the matrix entries.

    The returned matrix has entries (w_i^cod / w_j^dom)^(1/p) * a_ij and the same p->p norm on counting measures
    as `a` on its weighted spaces, because xi -> (w_i^(1/p) xi_i) is an isometry onto the counting space.

    Args:
        a (OperatorMatrix): The operator.
        p (float): The exponent.

    Returns:
        np.ndarray: The rescaled matrix.
    """
    p = check_exponent(p)
    ratios = np.divide.outer(a.codomain.weight_array(), a.domain.weight_array())
    return a.entries * ratios ** (1.0 / p)


def _max_column_sum(matrix: np.ndarray) -> float:
    return float(np.abs(matrix).sum(axis=0).max())


def _max_row_sum(matrix: np.ndarray) -> float:
    return float(np.abs(matrix).sum(axis=1).max())


def _spectral_norm(matrix: np.ndarray) -> float:
    return float(scipy.linalg.svdvals(matrix)[0])


def norm_upper(matrix: np.ndarray, p: float) -> float:
    """
    Riesz-Thorin upper bound for the p->p norm of a matrix on counting measures.

    Exact for p in {1, 2}; otherwise the smaller of the (1, inf) interpolation and the interpolation between
    2 and whichever of 1 or inf brackets p together with 2.
    """
    if p == 1.0:
        return _max_column_sum(matrix)
    if p == 2.0:
        return _spectral_norm(matrix)
    norm_1 = _max_column_sum(matrix)
    norm_inf = _max_row_sum(matrix)
    norm_2 = _spectral_norm(matrix)
    bound = norm_1 ** (1.0 / p) * norm_inf ** (1.0 - 1.0 / p)
    if p < 2.0:
        theta = 2.0 - 2.0 / p
        bound = min(bound, norm_1 ** (1.0 - theta) * norm_2 ** theta)
    else:
        bound = min(bound, norm_2 ** (2.0 / p) * norm_inf ** (1.0 - 2.0 / p))
    return float(bound)


def _phase(x: np.ndarray) -> np.ndarray:
    magnitudes = np.abs(x)
    phases = np.zeros_like(x, dtype=complex)
    nonzero = magnitudes > 0
    phases[nonzero] = x[nonzero] / magnitudes[nonzero]
    return phases


def dual_map(x: np.ndarray, p: float) -> np.ndarray:
    """
    The normalized duality map of l^p: x_i -> |x_i|^(p-1) phase(x_i) / ||x||_p^(p-1).

    The image has unit q-norm (1/p + 1/q = 1) and pairs with x to ||x||_p. Zero entries map to zero.
    """
    norm = lp_norm(x, None, p)
    if norm == 0.0:
        return np.zeros_like(x, dtype=complex)
    return np.abs(x) ** (p - 1.0) * _phase(x) / norm ** (p - 1.0)


def _power_iteration(matrix: np.ndarray, start: np.ndarray, p: float, budget: EstimationBudget) -> float:
    q = p / (p - 1.0)
    x = start / lp_norm(start, None, p)
    value = lp_norm(matrix @ x, None, p)
    best = value
    for _ in range(budget.iterations):
        y = matrix @ x
        if not np.any(y):
            break
        z = matrix.conj().T @ dual_map(y, p)
        if not np.any(z):
            break
        x = dual_map(z, q)
        new_value = lp_norm(matrix @ x, None, p)
        best = max(best, new_value)
        converged = abs(new_value - value) <= budget.tolerance * max(new_value, np.finfo(float).tiny)
        value = new_value
        if converged:
            break
    return best


def _random_complex(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _power_lower_bound(matrix: np.ndarray, p: float, budget: EstimationBudget) -> float:
    size = matrix.shape[1]
    column_norms = [lp_norm(matrix[:, j], None, p) for j in range(size)]
    best_column = int(np.argmax(column_norms))
    starts: List[np.ndarray] = [np.eye(size, dtype=complex)[best_column], np.ones(size, dtype=complex)]
    for index in range(len(starts), budget.starts):
        starts.append(_random_complex(derive_rng(budget.seed, "start", index), size))
    starts = starts[:budget.starts]

    if budget.workers > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as pool:
            values = list(pool.map(lambda start: _power_iteration(matrix, start, p, budget), starts))
    else:
        values = [_power_iteration(matrix, start, p, budget) for start in starts]

    best = max(values + [max(column_norms)])
    if budget.probes:
        rng = derive_rng(budget.seed, "probe")
        for _ in range(budget.probes):
            probe = _random_complex(rng, size)
            best = max(best, lp_norm(matrix @ probe, None, p) / lp_norm(probe, None, p))
    return float(best)


def op_norm(a: OperatorMatrix, p: float, budget: Optional[EstimationBudget] = None) -> NormEstimate:
    """
    Estimates the p->p operator norm of an operator between weighted point spaces.

    p = 1 uses the exact maximal column sum, p = 2 the largest singular value. Any other p gets a lower end from
    a multi-start generalized power iteration plus random probes, and an upper end from Riesz-Thorin interpolation.

    Args:
        a (OperatorMatrix): The operator.
        p (float): The exponent.
        budget (Optional[EstimationBudget]): Estimation settings, defaults when None.

    Returns:
        NormEstimate: A certified interval containing the norm.

    Raises:
        BudgetError: If the budget has zero starts and p is not 1 or 2.
    """
    p = check_exponent(p)
    budget = budget or EstimationBudget()
    matrix = to_counting(a, p)

    if p == 1.0:
        return NormEstimate.exact(_max_column_sum(matrix), NormMethod.EXACT_P1)
    if p == 2.0:
        return NormEstimate.exact(_spectral_norm(matrix), NormMethod.EXACT_P2)
    if budget.starts == 0:
        raise BudgetError(f"A budget with zero starts cannot estimate a norm at p = {p}")

    upper = norm_upper(matrix, p)
    lower = min(_power_lower_bound(matrix, p, budget), upper)
    return NormEstimate(
        lower=lower,
        upper=upper,
        methods=frozenset({NormMethod.POWER_ITERATION, NormMethod.INTERPOLATION}),
    )


def _projected_ascent(matrix: np.ndarray, start: np.ndarray, p: float, iterations: int) -> Tuple[float, np.ndarray]:
    x = start / lp_norm(start, None, p)
    value = lp_norm(matrix @ x, None, p)
    step = 0.5
    for _ in range(iterations):
        y = matrix @ x
        gradient = matrix.conj().T @ (np.abs(y) ** (p - 1.0) * _phase(y))
        gradient_norm = np.linalg.norm(gradient)
        if gradient_norm == 0.0:
            break
        candidate = x + step * gradient / gradient_norm
        candidate = candidate / lp_norm(candidate, None, p)
        candidate_value = lp_norm(matrix @ candidate, None, p)
        if candidate_value > value:
            x, value = candidate, candidate_value
            step = min(2.0 * step, 1.0)
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return value, x


def _fixed_point_polish(matrix: np.ndarray, x: np.ndarray, p: float, iterations: int) -> float:
    # xi <- J_q(a^H J_p(a xi)); the value never decreases along this map
    q = p / (p - 1.0)
    best = lp_norm(matrix @ x, None, p)
    for _ in range(iterations):
        z = matrix.conj().T @ dual_map(matrix @ x, p)
        if not np.any(z):
            break
        x = dual_map(z, q)
        value = lp_norm(matrix @ x, None, p)
        if value <= best * (1.0 + 1e-15):
            best = max(best, value)
            break
        best = value
    return best


def oracle_norm(a: OperatorMatrix, p: float, seed: int = 0, levels: int = 5, random_starts: int = 32,
                iterations: int = 200, polished: int = 8) -> float:
    """
    Brute-force lower estimate of a p->p norm for tiny operators, independent of `op_norm`.

    Runs projected-gradient ascent of ||a xi||_p over the unit p-sphere from every nonzero point of a real grid
    with `levels` values per coordinate, plus seeded random complex starts. The `polished` best ascent points are
    then pushed through the duality-map fixed-point iteration, which the plain ascent tends to stall short of.

    Args:
        a (OperatorMatrix): The operator, with a domain of at most 4 points.
        p (float): The exponent.
        seed (int): Seed of the random starts.
        levels (int): Grid values per coordinate.
        random_starts (int): Number of random complex starts.
        iterations (int): Ascent and polish steps per start.
        polished (int): Number of best ascent points to polish.

    Returns:
        float: The best value found.

    Raises:
        InvalidInputError: If the domain has more than 4 points.
    """
    p = check_exponent(p)
    size = a.domain.size
    if size > ORACLE_MAX_DIMENSION:
        raise InvalidInputError(f"Oracle norm supports domains of at most {ORACLE_MAX_DIMENSION} points, got: {size}")
    matrix = to_counting(a, p)

    starts = [np.asarray(point, dtype=complex) for point in itertools.product(np.linspace(-1, 1, levels), repeat=size)]
    starts = [start for start in starts if np.any(start)]
    for index in range(random_starts):
        starts.append(_random_complex(derive_rng(seed, "oracle", index), size))

    ascended = [_projected_ascent(matrix, start, p, iterations) for start in starts]
    ascended.sort(key=lambda pair: -pair[0])
    best = max([value for value, _ in ascended], default=0.0)
    if p != 1.0:
        for _, point in ascended[:polished]:
            best = max(best, _fixed_point_polish(matrix, point, p, iterations))
    log.debug(f"Oracle norm at p = {p} explored {len(starts)} starts, best value: {best}")
    return float(best)


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def _parse_complex(token: str, path: str) -> complex:
    try:
        return complex(token)
    except ValueError as error:
        raise InvalidFileFormatError(f"Malformed complex entry '{token}' in matrix file: '{path}'") from error


_WEIGHT_BLOCKS = ("domain-weights:", "codomain-weights:")


def read_matrix_file(path: str) -> OperatorMatrix:
    """
    Reads an operator from a matrix file.

    The file starts with a "rows cols" line, followed by one line of whitespace-separated complex entries
    (written as re+imj) per row. Optional trailing blocks "domain-weights:" and "codomain-weights:" carry the
    weights of the spaces, on the same line or on the following lines; a missing block means counting measure.
    Lines starting with '#' are ignored.

    Args:
        path (str): Path of the matrix file.

    Returns:
        OperatorMatrix: The operator.

    Raises:
        InvalidFileFormatError: If the file is malformed.
    """
    with open(path, "r") as file:
        lines = [line.strip() for line in file if line.strip() and not line.strip().startswith("#")]
    if not lines:
        raise InvalidFileFormatError(f"Empty matrix file: '{path}'")

    try:
        rows, cols = (int(token) for token in lines[0].split())
    except ValueError as error:
        raise InvalidFileFormatError(f"Matrix file must start with 'rows cols': '{path}'") from error
    if len(lines) < 1 + rows:
        raise InvalidFileFormatError(f"Matrix file has fewer than {rows} rows: '{path}'")

    entries = []
    for line in lines[1:1 + rows]:
        tokens = line.split()
        if len(tokens) != cols:
            raise InvalidFileFormatError(f"Expected {cols} entries per row in matrix file: '{path}'")
        entries.append([_parse_complex(token, path) for token in tokens])

    blocks = {}
    current = None
    for line in lines[1 + rows:]:
        block = next((name for name in _WEIGHT_BLOCKS if line.startswith(name)), None)
        if block:
            current = block
            blocks[current] = []
            line = line[len(block):]
        elif current is None:
            raise InvalidFileFormatError(f"Unexpected content after matrix rows: '{path}'")
        try:
            blocks[current].extend(float(token) for token in line.split())
        except ValueError as error:
            raise InvalidFileFormatError(f"Malformed weights in matrix file: '{path}'") from error

    try:
        domain = WeightedPointSpace.from_weights(blocks.get("domain-weights:", [1.0] * cols))
        codomain = WeightedPointSpace.from_weights(blocks.get("codomain-weights:", [1.0] * rows))
    except InvalidInputError as error:
        raise InvalidFileFormatError(f"Invalid weights in matrix file '{path}': {error}") from error
    if domain.size != cols or codomain.size != rows:
        raise InvalidFileFormatError(f"Weight blocks do not match the matrix shape: '{path}'")
    return OperatorMatrix(domain=domain, codomain=codomain, entries=np.asarray(entries, dtype=complex))


def write_matrix_file(path: str, a: OperatorMatrix):
    """
    Writes an operator in the matrix file format read by `read_matrix_file`.

    Args:
        path (str): Destination path.
        a (OperatorMatrix): The operator.
    """
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    lines.extend(" ".join(_format_complex(z) for z in row) for row in a.entries)
    for block, space in (("domain-weights:", a.domain), ("codomain-weights:", a.codomain)):
        if space.kind != MeasureKind.COUNTING:
            lines.append(f"{block} " + " ".join(f"{weight:.17g}" for weight in space.weights))
    with open(path, "w") as file:
        file.write("\n".join(lines) + "\n")
