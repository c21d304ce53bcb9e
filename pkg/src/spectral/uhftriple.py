"""
Truncated L^p UHF algebras of tensor product type, their projection tower and the tower Dirac operator.

The level spaces X_j carry d(j) points with uniform probability, X_{<=n} is the product of the first n + 1 of
them and every operator lives on the flat space X_{<=M} of the truncation level M. A level-n matrix acts on the
leading coordinates and as the identity on the trailing block X_(n,M].
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import DEFAULT_TOWER_DIMENSION_CAP, EstimationBudget
from src.core.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    InvariantViolationError,
    ResourceCapError,
    SpectrumError,
    TowerMismatchError,
)
from src.spectral.pspace import OperatorMatrix, PVector, WeightedPointSpace, op_norm, vec_norm
from src.spectral.tensor import ProductSpace, interval_space, product_space

log = logging.getLogger(__name__)

ENTRYWISE_TOLERANCE = 1e-12
INVERSE_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-9
RANK_THRESHOLD = 1e-8


class UHFSpecConfig(BaseModel):
    """
    Dimension profile of a truncated UHF algebra with the spatial representation.

    Attributes:
        dims (Tuple[int, ...]): d(0), ..., d(M) with d(0) = 1 and d(j) >= 2 for j >= 1.
    """
    model_config = ConfigDict(frozen=True)

    dims: Tuple[int, ...] = Field(min_length=1)

    @field_validator("dims")
    @classmethod
    def _check_dims(cls, dims: Tuple[int, ...]) -> Tuple[int, ...]:
        if dims[0] != 1:
            raise ValueError(f"The level-0 space must have one point, got: {dims[0]}")
        if any(d < 2 for d in dims[1:]):
            raise ValueError(f"Every level j >= 1 needs at least two points, got: {list(dims)}")
        return dims

    @property
    def level(self) -> int:
        """
        The truncation level M.
        """
        return len(self.dims) - 1

    @property
    def total_dimension(self) -> int:
        return math.prod(self.dims)

    def dimension_up_to(self, n: int) -> int:
        """
        Number of points of X_{<=n}.
        """
        return math.prod(self.dims[:n + 1])

    def level_spaces(self) -> List[WeightedPointSpace]:
        return [WeightedPointSpace.uniform(d) for d in self.dims]


class AlphaSeq(BaseModel):
    """
    Coefficients of the tower Dirac operator D = sum_n alpha_n Q_n.

    Attributes:
        values (Tuple[float, ...]): alpha_0, ..., alpha_M with alpha_0 = 0.
        allow_degenerate (bool): Accept alpha_n = 0 for n >= 1 (the all-zero sequence gives D = 0).
    """
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...] = Field(min_length=1)
    allow_degenerate: bool = False

    @model_validator(mode="after")
    def _check_values(self):
        if not all(math.isfinite(value) for value in self.values):
            raise ValueError("Alpha values must be finite")
        if self.values[0] != 0.0:
            raise ValueError(f"alpha_0 must be 0, got: {self.values[0]}")
        if self.allow_degenerate:
            if any(value < 0.0 for value in self.values[1:]):
                raise ValueError("Alpha values must be nonnegative")
        elif any(value <= 0.0 for value in self.values[1:]):
            raise ValueError("alpha_n must be positive for n >= 1")
        return self

    @classmethod
    def of(cls, values: Sequence[float]) -> "AlphaSeq":
        """
        Builds a sequence, accepting zero coefficients when any are present.
        """
        values = tuple(float(value) for value in values)
        return cls(values=values, allow_degenerate=any(value == 0.0 for value in values[1:]))

    @property
    def level(self) -> int:
        return len(self.values) - 1

    def scaled(self, factor: float) -> "AlphaSeq":
        return AlphaSeq(values=tuple(factor * value for value in self.values), allow_degenerate=self.allow_degenerate)


class UHFTower(BaseModel):
    """
    The projection tower of a truncated UHF algebra.

    Attributes:
        spec (UHFSpecConfig): The dimension profile.
        spaces (Tuple[ProductSpace, ...]): X_{<=n} for n = 0..M.
        iota (Tuple[OperatorMatrix, ...]): Constant extensions X_{<=n} -> X_{<=M}.
        pi (Tuple[OperatorMatrix, ...]): Trailing averages X_{<=M} -> X_{<=n}.
        P (Tuple[OperatorMatrix, ...]): P_n = iota_n pi_n on X_{<=M}.
        Q (Tuple[OperatorMatrix, ...]): Q_0 = P_0 and Q_n = P_n - P_{n-1}.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: UHFSpecConfig
    spaces: Tuple[ProductSpace, ...]
    iota: Tuple[OperatorMatrix, ...]
    pi: Tuple[OperatorMatrix, ...]
    P: Tuple[OperatorMatrix, ...]
    Q: Tuple[OperatorMatrix, ...]

    @property
    def level(self) -> int:
        return self.spec.level

    @property
    def flat(self) -> WeightedPointSpace:
        """
        The flat space X_{<=M} every tower operator acts on.
        """
        return self.spaces[-1].flat

    @property
    def dimension(self) -> int:
        return self.flat.size

    def identity(self) -> OperatorMatrix:
        return OperatorMatrix.identity(self.flat)

    def one(self) -> PVector:
        """
        The constant function 1 on X_{<=M}.
        """
        return self.flat.constant(1.0)

    def check_level(self, n: int):
        if not 0 <= n <= self.level:
            raise InvalidInputError(f"Level {n} is outside 0..{self.level}")


def build_tower(spec: UHFSpecConfig, cap: int = DEFAULT_TOWER_DIMENSION_CAP) -> UHFTower:
    """
    Builds the structural maps of the tower.

    iota_n replicates a function of the first n + 1 coordinates constantly across the trailing ones, pi_n averages
    over the trailing coordinates with their product weights.

    Args:
        spec (UHFSpecConfig): The dimension profile.
        cap (int): Maximum total dimension.

    Returns:
        UHFTower: The tower.

    Raises:
        ResourceCapError: If the total dimension exceeds the cap.
    """
    if spec.total_dimension > cap:
        raise ResourceCapError(f"Tower dimension {spec.total_dimension} exceeds the cap of {cap}")
    level_spaces = spec.level_spaces()
    spaces = tuple(product_space(level_spaces[:n + 1]) for n in range(spec.level + 1))
    flat = spaces[-1].flat

    iota, pi, projections, differences = [], [], [], []
    for n, space in enumerate(spaces):
        leading = np.eye(space.flat.size)
        trailing_weights = interval_space(level_spaces, n, spec.level).flat.weight_array()
        iota.append(OperatorMatrix(
            domain=space.flat, codomain=flat, entries=np.kron(leading, np.ones((len(trailing_weights), 1))),
        ))
        pi.append(OperatorMatrix(
            domain=flat, codomain=space.flat, entries=np.kron(leading, trailing_weights[np.newaxis, :]),
        ))
        projections.append(iota[n] @ pi[n])
        differences.append(projections[n] if n == 0 else projections[n] - projections[n - 1])

    log.debug(f"Built tower for dims {list(spec.dims)} with total dimension {spec.total_dimension}")
    return UHFTower(
        spec=spec,
        spaces=spaces,
        iota=tuple(iota),
        pi=tuple(pi),
        P=tuple(projections),
        Q=tuple(differences),
    )


def partial_projector(tower: UHFTower, n: int, m: int) -> OperatorMatrix:
    """
    The operator P_{m,n} on the trailing space X_(n,M] with P_m(eta_1 (x) eta_2) = eta_1 (x) P_{m,n}(eta_2).

    Args:
        tower (UHFTower): The tower.
        n (int): Leading level.
        m (int): Projection level, n <= m <= M.

    Returns:
        OperatorMatrix: P_{m,n}.

    Raises:
        InvalidInputError: If 0 <= n <= m <= M fails.
        InvariantViolationError: If kron(I_{<=n}, P_{m,n}) differs from P_m.
    """
    if not 0 <= n <= m <= tower.level:
        raise InvalidInputError(f"Partial projector needs 0 <= n <= m <= {tower.level}, got n = {n}, m = {m}")
    level_spaces = tower.spec.level_spaces()
    trailing = interval_space(level_spaces, n, tower.level).flat
    middle = interval_space(level_spaces, n, m).flat
    tail_weights = interval_space(level_spaces, m, tower.level).flat.weight_array()
    block = np.kron(np.eye(middle.size), np.outer(np.ones(len(tail_weights)), tail_weights))
    projector = OperatorMatrix(domain=trailing, codomain=trailing, entries=block)

    rebuilt = np.kron(np.eye(tower.spec.dimension_up_to(n)), block)
    deviation = float(np.max(np.abs(rebuilt - tower.P[m].entries)))
    if deviation > ENTRYWISE_TOLERANCE:
        raise InvariantViolationError(f"P_{m} does not factor through P_({m},{n}): deviation {deviation}")
    return projector


class LevelOperator(BaseModel):
    """
    A level-n matrix of the UHF algebra together with its embedding into the top level.

    Attributes:
        level (int): The level n.
        core (np.ndarray): Square complex matrix of size prod_{j <= n} d(j).
        embedded (OperatorMatrix): core (x) identity of the trailing dimension, on X_{<=M}.
        dims (Tuple[int, ...]): Dimension profile of the tower it was embedded in.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    level: int = Field(ge=0)
    core: np.ndarray
    embedded: OperatorMatrix
    dims: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_core(self):
        if self.core.ndim != 2 or self.core.shape[0] != self.core.shape[1]:
            raise ValueError(f"Core must be square, got shape: {self.core.shape}")
        if self.core.shape[0] != math.prod(self.dims[:self.level + 1]):
            raise ValueError("Core size does not match the level dimension")
        return self


def embed_algebra(tower: UHFTower, n: int, core: np.ndarray) -> LevelOperator:
    """
    Embeds a level-n matrix into the top level as core (x) identity.

    Raises:
        InvalidInputError: If n is outside 0..M.
        DimensionMismatchError: If the core is not square of size prod_{j <= n} d(j).
    """
    tower.check_level(n)
    core = np.array(core, dtype=complex)
    size = tower.spec.dimension_up_to(n)
    if core.shape != (size, size):
        raise DimensionMismatchError(f"Level-{n} core must have shape {(size, size)}, got: {core.shape}")
    core.flags.writeable = False
    trailing = tower.dimension // size
    embedded = OperatorMatrix(domain=tower.flat, codomain=tower.flat, entries=np.kron(core, np.eye(trailing)))
    return LevelOperator(level=n, core=core, embedded=embedded, dims=tower.spec.dims)


def lift(tower: UHFTower, operator: LevelOperator, m: int) -> LevelOperator:
    """
    Re-reads a level-n operator as the level-m core core (x) identity, m >= n.
    """
    if m < operator.level:
        raise InvalidInputError(f"Cannot lift a level-{operator.level} operator down to level {m}")
    filler = tower.spec.dimension_up_to(m) // tower.spec.dimension_up_to(operator.level)
    return embed_algebra(tower, m, np.kron(operator.core, np.eye(filler)))


def random_level_operator(tower: UHFTower, n: int, rng: np.random.Generator) -> LevelOperator:
    """
    A level-n operator with standard complex normal core entries.
    """
    size = tower.spec.dimension_up_to(n)
    core = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return embed_algebra(tower, n, core)


def _check_alpha(tower: UHFTower, alpha: AlphaSeq):
    if alpha.level != tower.level:
        raise DimensionMismatchError(f"Alpha has {len(alpha.values)} values, the tower has {tower.level + 1} levels")


def dirac(tower: UHFTower, alpha: AlphaSeq) -> OperatorMatrix:
    """
    The Dirac operator D = sum_{n=1}^M alpha_n Q_n on X_{<=M}.

    Raises:
        DimensionMismatchError: If alpha does not have M + 1 values.
    """
    _check_alpha(tower, alpha)
    entries = np.zeros((tower.dimension, tower.dimension), dtype=complex)
    for value, difference in zip(alpha.values[1:], tower.Q[1:]):
        entries += value * difference.entries
    return OperatorMatrix(domain=tower.flat, codomain=tower.flat, entries=entries)


def _check_inverse(forward: np.ndarray, inverse: np.ndarray, what: str):
    identity = np.eye(forward.shape[0])
    deviation = max(
        float(np.max(np.abs(forward @ inverse - identity))),
        float(np.max(np.abs(inverse @ forward - identity))),
    )
    if deviation > INVERSE_TOLERANCE:
        raise InvariantViolationError(f"{what} is not a two-sided inverse: deviation {deviation}")


def resolvent_inverse(tower: UHFTower, alpha: AlphaSeq) -> OperatorMatrix:
    """
    The inverse R = P_0 + sum_{n=1}^M Q_n / (1 + alpha_n^2) of I + D^2.

    Raises:
        DimensionMismatchError: If alpha does not have M + 1 values.
        InvariantViolationError: If (I + D^2) R = R (I + D^2) = I fails entrywise at 1e-10.
    """
    d = dirac(tower, alpha).entries
    entries = tower.P[0].entries.copy()
    for value, difference in zip(alpha.values[1:], tower.Q[1:]):
        entries += difference.entries / (1.0 + value ** 2)
    _check_inverse(np.eye(tower.dimension) + d @ d, entries, "R")
    return OperatorMatrix(domain=tower.flat, codomain=tower.flat, entries=entries)


def shifted_resolvent(tower: UHFTower, alpha: AlphaSeq, shift: complex) -> OperatorMatrix:
    """
    The inverse sum_{n=0}^M Q_n / (alpha_n - lambda) of D - lambda I.

    Raises:
        SpectrumError: If lambda lies within 1e-12 of some alpha_n.
        InvariantViolationError: If the two-sided inverse check fails.
    """
    _check_alpha(tower, alpha)
    shift = complex(shift)
    if min(abs(value - shift) for value in alpha.values) <= ENTRYWISE_TOLERANCE:
        raise SpectrumError(f"Shift {shift} lies on the spectrum {sorted(set(alpha.values))} of D")
    entries = sum(difference.entries / (value - shift) for value, difference in zip(alpha.values, tower.Q))
    d = dirac(tower, alpha).entries
    _check_inverse(d - shift * np.eye(tower.dimension), entries, "Shifted resolvent")
    return OperatorMatrix(domain=tower.flat, codomain=tower.flat, entries=entries)


def commutator(tower: UHFTower, alpha: AlphaSeq, a: LevelOperator) -> OperatorMatrix:
    """
    The commutator D a - a D of the Dirac operator with an embedded level operator.

    Verifies along the way that a commutes with Q_m for every m above its level.

    Raises:
        TowerMismatchError: If `a` was embedded in a tower with another profile.
        InvariantViolationError: If [Q_m, a] is not zero at 1e-12 for some m > level(a).
    """
    if a.dims != tower.spec.dims:
        raise TowerMismatchError(f"Operator from tower {list(a.dims)} used with tower {list(tower.spec.dims)}")
    entries = a.embedded.entries
    scale = max(1.0, float(np.max(np.abs(entries))))
    for m in range(a.level + 1, tower.level + 1):
        q = tower.Q[m].entries
        deviation = float(np.max(np.abs(q @ entries - entries @ q)))
        if deviation > ENTRYWISE_TOLERANCE * scale:
            raise InvariantViolationError(f"Level-{a.level} operator does not commute with Q_{m}: {deviation}")
    d = dirac(tower, alpha)
    return d @ a.embedded - a.embedded @ d


def q_ranks(tower: UHFTower) -> List[int]:
    """
    Ranks of Q_0, ..., Q_M by eigenvalue thresholding.
    """
    return [int(np.sum(np.abs(np.linalg.eigvals(q.entries)) > RANK_THRESHOLD)) for q in tower.Q]


def dirac_spectrum(tower: UHFTower, alpha: AlphaSeq) -> np.ndarray:
    """
    Ascending eigenvalues of D, each alpha_n repeated rank(Q_n) times.
    """
    return np.linalg.eigvalsh(dirac(tower, alpha).entries)


def nested_ranks(tower: UHFTower) -> List[int]:
    """
    Ranks of P_0, ..., P_M, the dimensions of the nested ranges iota_n(L^p(X_{<=n})).
    """
    return [int(np.linalg.matrix_rank(projection.entries, tol=RANK_THRESHOLD)) for projection in tower.P]


def strong_convergence_profile(tower: UHFTower, eta: PVector, p: float) -> List[float]:
    """
    The sequence ||P_n eta - eta||_p for n = 0..M; the last term is 0.
    """
    return [vec_norm(PVector(space=tower.flat, coords=projection.apply(eta).coords - eta.coords), p)
            for projection in tower.P]


class InvariantCheck(BaseModel):
    """
    Outcome of one numerical invariant check.

    Attributes:
        name (str): What was checked.
        passed (bool): Whether the deviation is within tolerance.
        deviation (float): The measured deviation.
        tolerance (float): The allowed deviation.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    deviation: float
    tolerance: float

    @classmethod
    def of(cls, name: str, deviation: float, tolerance: float) -> "InvariantCheck":
        return cls(name=name, passed=bool(deviation <= tolerance), deviation=float(deviation), tolerance=tolerance)


def verify_tower(tower: UHFTower, p_values: Sequence[float], budget: Optional[EstimationBudget] = None
                 ) -> List[InvariantCheck]:
    """
    Evaluates the tower identities: pi_n iota_n = I, iota_n isometric, ||pi_n|| <= 1, P_n P_m = P_m P_n = P_n for
    n <= m, Q_n idempotent and pairwise orthogonal, sum Q_n = I and P_M = I.

    Returns:
        List[InvariantCheck]: One result per identity, level and exponent.
    """
    checks: List[InvariantCheck] = []
    identity = tower.identity()
    for n in range(tower.level + 1):
        level_identity = OperatorMatrix.identity(tower.spaces[n].flat)
        checks.append(InvariantCheck.of(
            f"pi_{n} iota_{n} = I", (tower.pi[n] @ tower.iota[n]).max_abs_diff(level_identity), ENTRYWISE_TOLERANCE,
        ))
        for p in p_values:
            iota_norm = op_norm(tower.iota[n], p, budget)
            outside = max(iota_norm.lower - 1.0, 1.0 - iota_norm.upper, 0.0)
            checks.append(InvariantCheck.of(f"||iota_{n}|| = 1 at p = {p}", outside, NORM_TOLERANCE))
            pi_norm = op_norm(tower.pi[n], p, budget)
            checks.append(InvariantCheck.of(f"||pi_{n}|| <= 1 at p = {p}", max(pi_norm.upper - 1.0, 0.0),
                                            NORM_TOLERANCE))
        for m in range(n, tower.level + 1):
            deviation = max(
                (tower.P[n] @ tower.P[m]).max_abs_diff(tower.P[n]),
                (tower.P[m] @ tower.P[n]).max_abs_diff(tower.P[n]),
            )
            checks.append(InvariantCheck.of(f"P_{n} P_{m} = P_{m} P_{n} = P_{n}", deviation, ENTRYWISE_TOLERANCE))
        checks.append(InvariantCheck.of(
            f"Q_{n}^2 = Q_{n}", (tower.Q[n] @ tower.Q[n]).max_abs_diff(tower.Q[n]), ENTRYWISE_TOLERANCE,
        ))
        zero = OperatorMatrix.zeros(tower.flat)
        for m in range(tower.level + 1):
            if m != n:
                deviation = (tower.Q[n] @ tower.Q[m]).max_abs_diff(zero)
                checks.append(InvariantCheck.of(f"Q_{n} Q_{m} = 0", deviation, ENTRYWISE_TOLERANCE))

    total = OperatorMatrix.zeros(tower.flat)
    for difference in tower.Q:
        total = total + difference
    checks.append(InvariantCheck.of("sum Q_n = I", total.max_abs_diff(identity), ENTRYWISE_TOLERANCE))
    checks.append(InvariantCheck.of("P_M = I", tower.P[-1].max_abs_diff(identity), 0.0))
    return checks
