"""
Truncations of reduced group algebras with the length-function Dirac operator.

Everything is compressed to l^p of a length ball: compressions give certified lower bounds on operator norms,
and the analytic commutator bound gives the matching upper bound.
"""
import logging
import math
import re
import string
from abc import ABC, abstractmethod
from collections import deque
from enum import Enum
from typing import Any, Callable, Dict, Generic, Hashable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import DEFAULT_BALL_SIZE_CAP, EstimationBudget
from src.core.exceptions import (
    InvalidFileFormatError,
    InvalidInputError,
    InvariantViolationError,
    ResourceCapError,
    SpectrumError,
)
from src.spectral.pspace import NormEstimate, OperatorMatrix, WeightedPointSpace, check_exponent, op_norm

log = logging.getLogger(__name__)

COMMUTATOR_BOUND_SLACK = 1e-9
SPECTRUM_TOLERANCE = 1e-12

ElementT = TypeVar("ElementT", bound=Hashable)


class GroupModel(ABC, Generic[ElementT]):
    """
    A countable discrete group given by its elements' encoding, its product and a symmetric generating set.
    """

    @property
    @abstractmethod
    def identity(self) -> ElementT:
        raise NotImplementedError

    @abstractmethod
    def multiply(self, x: ElementT, y: ElementT) -> ElementT:
        raise NotImplementedError

    @abstractmethod
    def invert(self, x: ElementT) -> ElementT:
        raise NotImplementedError

    @abstractmethod
    def generators(self) -> List[ElementT]:
        """
        Returns a generating set closed under inversion.
        """
        raise NotImplementedError

    @abstractmethod
    def word_length(self, x: ElementT) -> int:
        """
        Word length with respect to `generators()`.
        """
        raise NotImplementedError

    @abstractmethod
    def encode(self, x: ElementT) -> str:
        raise NotImplementedError

    @abstractmethod
    def decode(self, text: str) -> ElementT:
        raise NotImplementedError

    @abstractmethod
    def natural_key(self, x: ElementT) -> tuple:
        """
        Sort key of the group's natural order.
        """
        raise NotImplementedError

    @property
    def max_length(self) -> Optional[int]:
        """
        Largest word length of an element, None for infinite groups.
        """
        return None

    def __repr__(self):
        return f"<Group {self}>"


class IntegerGroup(GroupModel[int]):
    """
    The integers under addition, generated by +1 and -1.
    """

    @property
    def identity(self) -> int:
        return 0

    def multiply(self, x: int, y: int) -> int:
        return x + y

    def invert(self, x: int) -> int:
        return -x

    def generators(self) -> List[int]:
        return [1, -1]

    def word_length(self, x: int) -> int:
        return abs(x)

    def encode(self, x: int) -> str:
        return str(x)

    def decode(self, text: str) -> int:
        try:
            return int(text)
        except ValueError as error:
            raise InvalidInputError(f"Invalid integer group element: '{text}'") from error

    def natural_key(self, x: int) -> tuple:
        return (x,)

    def __str__(self):
        return "integers"


class LatticeGroup(GroupModel[Tuple[int, ...]]):
    """
    The integer lattice Z^d, generated by the unit vectors and their negatives.
    """

    def __init__(self, rank: int):
        if rank < 1:
            raise InvalidInputError(f"Lattice rank must be positive, got: {rank}")
        self._rank = rank

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def identity(self) -> Tuple[int, ...]:
        return (0,) * self._rank

    def multiply(self, x: Tuple[int, ...], y: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(a + b for a, b in zip(x, y))

    def invert(self, x: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(-a for a in x)

    def generators(self) -> List[Tuple[int, ...]]:
        units = []
        for axis in range(self._rank):
            for sign in (1, -1):
                unit = [0] * self._rank
                unit[axis] = sign
                units.append(tuple(unit))
        return units

    def word_length(self, x: Tuple[int, ...]) -> int:
        return sum(abs(a) for a in x)

    def encode(self, x: Tuple[int, ...]) -> str:
        return ",".join(str(a) for a in x)

    def decode(self, text: str) -> Tuple[int, ...]:
        try:
            vector = tuple(int(token) for token in text.split(","))
        except ValueError as error:
            raise InvalidInputError(f"Invalid lattice element: '{text}'") from error
        if len(vector) != self._rank:
            raise InvalidInputError(f"Lattice element '{text}' does not have {self._rank} coordinates")
        return vector

    def natural_key(self, x: Tuple[int, ...]) -> tuple:
        return x

    def __str__(self):
        return f"lattice({self._rank})"


class FreeGroup(GroupModel[str]):
    """
    The free group on k generators; elements are reduced words, lowercase letters for the generators and
    uppercase letters for their inverses. The empty word (the identity) is encoded as "1".
    """

    IDENTITY_TOKEN = "1"

    def __init__(self, rank: int):
        if not 1 <= rank <= len(string.ascii_lowercase):
            raise InvalidInputError(f"Free group rank must be in [1, 26], got: {rank}")
        self._rank = rank
        self._letters = string.ascii_lowercase[:rank]

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def identity(self) -> str:
        return ""

    def multiply(self, x: str, y: str) -> str:
        left = list(x)
        for letter in y:
            if left and left[-1] == letter.swapcase():
                left.pop()
            else:
                left.append(letter)
        return "".join(left)

    def invert(self, x: str) -> str:
        return x[::-1].swapcase()

    def generators(self) -> List[str]:
        return [letter for generator in self._letters for letter in (generator, generator.upper())]

    def word_length(self, x: str) -> int:
        return len(x)

    def is_reduced(self, x: str) -> bool:
        return all(x[i] != x[i + 1].swapcase() for i in range(len(x) - 1))

    def encode(self, x: str) -> str:
        return x or self.IDENTITY_TOKEN

    def decode(self, text: str) -> str:
        if text == self.IDENTITY_TOKEN:
            return ""
        if not text or any(letter.lower() not in self._letters for letter in text):
            raise InvalidInputError(f"Invalid word for the free group on {self._rank} generators: '{text}'")
        if not self.is_reduced(text):
            raise InvalidInputError(f"Word is not reduced: '{text}'")
        return text

    def natural_key(self, x: str) -> tuple:
        return (len(x), x)

    def __str__(self):
        return f"free({self._rank})"


class CyclicGroup(GroupModel[int]):
    """
    The cyclic group Z/m, elements 0..m-1, generated by 1 and m-1.
    """

    def __init__(self, order: int):
        if order < 1:
            raise InvalidInputError(f"Cyclic group order must be positive, got: {order}")
        self._order = order

    @property
    def order(self) -> int:
        return self._order

    @property
    def identity(self) -> int:
        return 0

    def multiply(self, x: int, y: int) -> int:
        return (x + y) % self._order

    def invert(self, x: int) -> int:
        return (-x) % self._order

    def generators(self) -> List[int]:
        return sorted({1 % self._order, (self._order - 1) % self._order} - {0})

    def word_length(self, x: int) -> int:
        x %= self._order
        return min(x, self._order - x)

    def encode(self, x: int) -> str:
        return str(x)

    def decode(self, text: str) -> int:
        try:
            return int(text) % self._order
        except ValueError as error:
            raise InvalidInputError(f"Invalid cyclic group element: '{text}'") from error

    def natural_key(self, x: int) -> tuple:
        return (x,)

    @property
    def max_length(self) -> Optional[int]:
        return self._order // 2

    def __str__(self):
        return f"cyclic({self._order})"


_GROUP_NAME_PATTERNS = [
    (re.compile(r"^(z|integers)$"), lambda match: IntegerGroup()),
    (re.compile(r"^(?:z\^?|lattice:?)(\d+)$"), lambda match: LatticeGroup(int(match.group(1)))),
    (re.compile(r"^(?:f|free:?)(\d+)$"), lambda match: FreeGroup(int(match.group(1)))),
    (re.compile(r"^(?:c|cyclic:?)(\d+)$"), lambda match: CyclicGroup(int(match.group(1)))),
]


def group_from_name(name: str) -> GroupModel:
    """
    Builds a built-in group from its short name: "z", "z2"/"lattice:2", "f2"/"free:2", "c6"/"cyclic:6".

    Raises:
        InvalidInputError: If the name matches no built-in family.
    """
    normalized = name.strip().lower()
    for pattern, factory in _GROUP_NAME_PATTERNS:
        match = pattern.match(normalized)
        if match:
            return factory(match)
    raise InvalidInputError(f"Unknown group: '{name}'")


class LengthFn:
    """
    A length function on a group.

    Attributes:
        name (str): Display name.
        evaluator (Callable): Maps a group element to its length.
        integer_valued (bool): Whether every integer between 1 and `max_value` is an achieved length; required to
            compute analytic tail residuals.
        max_value (Optional[float]): Largest achieved length, None when unbounded.
    """

    def __init__(self, name: str, evaluator: Callable[[Any], float], integer_valued: bool = False,
                 max_value: Optional[float] = None):
        self.name = name
        self.evaluator = evaluator
        self.integer_valued = integer_valued
        self.max_value = max_value

    @classmethod
    def word_length(cls, group: GroupModel) -> "LengthFn":
        """
        The word length of a built-in group: |n| on the integers, l1 on lattices, reduced word length on free
        groups, min(k, m-k) on cyclic groups.
        """
        return cls("word-length", group.word_length, integer_valued=True, max_value=group.max_length)

    def __call__(self, x: Any) -> float:
        return float(self.evaluator(x))

    def next_value_beyond(self, radius: float) -> Optional[float]:
        """
        The smallest achieved length strictly larger than `radius`, None when there is none.

        Raises:
            InvalidInputError: If the growth of the length function is unknown.
        """
        if not self.integer_valued:
            raise InvalidInputError(f"Length function '{self.name}' does not describe its achieved values")
        value = math.floor(radius) + 1
        if self.max_value is not None and value > self.max_value:
            return None
        return float(value)

    def check_axioms(self, group: GroupModel, samples: Sequence[Any]) -> List[str]:
        """
        Checks the length-function axioms on sampled elements (all pairs for subadditivity).

        Returns:
            List[str]: Descriptions of violated axioms; empty when all hold.
        """
        failures = []
        if self(group.identity) != 0.0:
            failures.append(f"length of the identity is {self(group.identity)}")
        for x in samples:
            if x != group.identity and self(x) <= 0.0:
                failures.append(f"non-identity element {group.encode(x)} has length {self(x)}")
            if self(group.invert(x)) != self(x):
                failures.append(f"length of {group.encode(x)} differs from the length of its inverse")
            for y in samples:
                if self(group.multiply(x, y)) > self(x) + self(y):
                    failures.append(f"subadditivity fails for ({group.encode(x)}, {group.encode(y)})")
        return failures

    def __repr__(self):
        return f"<LengthFn {self.name}>"


class BallOrdering(str, Enum):
    """
    Orderings of ball elements.

    Attributes:
        LENGTH: By length, then by the lexicographic order of the element encodings.
        NATURAL: By the group's natural order (integers ascending, shortlex words...).
    """
    LENGTH = "length"
    NATURAL = "natural"


class BallTruncation(BaseModel):
    """
    The ball B_L(R) of a proper length function, in a fixed order.

    Attributes:
        group (GroupModel): The group.
        length (LengthFn): The length function.
        radius (float): The radius R.
        ordering (BallOrdering): The ordering of `elements`.
        elements (Tuple[Any, ...]): The elements of the ball.
        index (Dict[Any, int]): Position of each element in `elements`.
        space (WeightedPointSpace): Counting measure on the ball.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group: GroupModel
    length: LengthFn
    radius: float = Field(ge=0.0)
    ordering: BallOrdering
    elements: Tuple[Any, ...]
    index: Dict[Any, int]
    space: WeightedPointSpace

    @model_validator(mode="after")
    def _check_ball(self):
        if self.group.identity not in self.index:
            raise ValueError("A ball must contain the identity")
        if any(self.group.invert(x) not in self.index for x in self.elements):
            raise ValueError("A ball must be closed under inversion")
        if any(self.length(x) > self.radius for x in self.elements):
            raise ValueError("Every ball element must have length at most the radius")
        if self.space.size != len(self.elements):
            raise ValueError("Ball space size must match the number of elements")
        return self

    def __len__(self):
        return len(self.elements)

    def contains(self, x: Any) -> bool:
        return x in self.index


def ball(group: GroupModel, length: LengthFn, radius: float, cap: int = DEFAULT_BALL_SIZE_CAP,
         ordering: BallOrdering = BallOrdering.LENGTH) -> BallTruncation:
    """
    Enumerates the ball B_L(R) = L^-1([0, R]).

    Breadth-first search from the identity over right multiplication by the generators, keeping elements of
    length at most R. Exact for word-length functions, whose balls are reachable through geodesics.

    Args:
        group (GroupModel): The group.
        length (LengthFn): The length function.
        radius (float): The radius R >= 0.
        cap (int): Maximum number of elements.
        ordering (BallOrdering): Ordering of the result.

    Returns:
        BallTruncation: The ball.

    Raises:
        InvalidInputError: If R is negative.
        ResourceCapError: If the ball has more than `cap` elements.
    """
    if radius < 0:
        raise InvalidInputError(f"Ball radius must be nonnegative, got: {radius}")
    generators = group.generators()
    visited = {group.identity}
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        for generator in generators:
            y = group.multiply(x, generator)
            if y in visited or length(y) > radius:
                continue
            visited.add(y)
            if len(visited) > cap:
                raise ResourceCapError(f"Ball of radius {radius} in {group} exceeds the cap of {cap} elements")
            queue.append(y)

    if ordering == BallOrdering.LENGTH:
        elements = sorted(visited, key=lambda x: (length(x), group.encode(x)))
    else:
        elements = sorted(visited, key=group.natural_key)
    log.debug(f"Ball of radius {radius} in {group} has {len(elements)} elements")
    return BallTruncation(
        group=group,
        length=length,
        radius=float(radius),
        ordering=ordering,
        elements=tuple(elements),
        index={x: position for position, x in enumerate(elements)},
        space=WeightedPointSpace.counting(len(elements)),
    )


class GroupAlgElem(BaseModel):
    """
    A finitely supported function on a group, an element of C_c(G).

    Attributes:
        support (Tuple[Tuple[Any, complex], ...]): Pairs (element, coefficient), elements pairwise distinct and
            coefficients nonzero.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    support: Tuple[Tuple[Any, complex], ...]

    @field_validator("support", mode="before")
    @classmethod
    def _coerce_support(cls, value):
        return tuple((element, complex(coefficient)) for element, coefficient in value)

    @model_validator(mode="after")
    def _check_support(self):
        elements = [element for element, _ in self.support]
        if len(set(elements)) != len(elements):
            raise ValueError("Support elements must be pairwise distinct")
        if any(coefficient == 0 for _, coefficient in self.support):
            raise ValueError("Zero coefficients must not be stored")
        return self

    @classmethod
    def from_terms(cls, terms: Sequence[Tuple[Any, complex]]) -> "GroupAlgElem":
        """
        Builds an element from possibly repeated terms, summing duplicates and dropping zeros.
        """
        coefficients: Dict[Any, complex] = {}
        for element, coefficient in terms:
            coefficients[element] = coefficients.get(element, 0j) + complex(coefficient)
        return cls(support=tuple((x, c) for x, c in coefficients.items() if c != 0))

    @classmethod
    def delta(cls, element: Any, coefficient: complex = 1.0) -> "GroupAlgElem":
        return cls.from_terms([(element, coefficient)])

    @property
    def elements(self) -> List[Any]:
        return [element for element, _ in self.support]

    def coefficient(self, element: Any) -> complex:
        return dict(self.support).get(element, 0j)

    def l1_norm(self) -> float:
        return float(sum(abs(coefficient) for _, coefficient in self.support))

    def scaled(self, factor: complex) -> "GroupAlgElem":
        return GroupAlgElem.from_terms([(x, factor * c) for x, c in self.support])


def convolve(a: GroupAlgElem, b: GroupAlgElem, group: GroupModel) -> GroupAlgElem:
    """
    The product of l1(G): (a * b)(g) = sum_k a(k) b(k^-1 g).
    """
    return GroupAlgElem.from_terms(
        [(group.multiply(x, y), c * d) for x, c in a.support for y, d in b.support]
    )


def random_group_element(truncation: BallTruncation, rng: np.random.Generator, max_support: int,
                         radius: Optional[float] = None) -> GroupAlgElem:
    """
    Draws an element with 1..max_support complex coefficients supported in the ball (or in B(radius)).
    """
    pool = [x for x in truncation.elements if radius is None or truncation.length(x) <= radius]
    size = int(rng.integers(1, min(max_support, len(pool)) + 1))
    chosen = rng.choice(len(pool), size=size, replace=False)
    return GroupAlgElem.from_terms(
        [(pool[i], complex(rng.standard_normal(), rng.standard_normal())) for i in sorted(chosen)]
    )


def lambda_matrix(a: GroupAlgElem, truncation: BallTruncation, p: float) -> OperatorMatrix:
    """
    Compression of the left regular representation lambda_p(a) to l^p of the ball.

    The entry at (g, h) is a(g h^-1), i.e. (a * xi)(g) = sum_k a(k) xi(k^-1 g) restricted to ball indices.

    Args:
        a (GroupAlgElem): The algebra element.
        truncation (BallTruncation): The ball.
        p (float): The exponent (the matrix does not depend on it).

    Returns:
        OperatorMatrix: The compressed operator.
    """
    check_exponent(p)
    group = truncation.group
    entries = np.zeros((len(truncation), len(truncation)), dtype=complex)
    for h, column in truncation.index.items():
        for k, coefficient in a.support:
            row = truncation.index.get(group.multiply(k, h))
            if row is not None:
                entries[row, column] += coefficient
    return OperatorMatrix(domain=truncation.space, codomain=truncation.space, entries=entries)


def dirac_matrix(truncation: BallTruncation, length: Optional[LengthFn] = None) -> OperatorMatrix:
    """
    The compression of the Dirac operator (D xi)(g) = L(g) xi(g): a diagonal matrix in ball order.
    """
    length = length or truncation.length
    return OperatorMatrix.diagonal([length(x) for x in truncation.elements], truncation.space)


def commutator_bound(a: GroupAlgElem, length: LengthFn, p: float) -> float:
    """
    The analytic bound (||a||_1^p sum_{g in supp(a)} L(g)^p)^(1/p) on ||[D, lambda_p(a)]||.
    """
    p = check_exponent(p)
    total = sum(length(x) ** p for x in a.elements)
    return float((a.l1_norm() ** p * total) ** (1.0 / p))


def _check_support_in_ball(a: GroupAlgElem, truncation: BallTruncation):
    outside = [truncation.group.encode(x) for x in a.elements if not truncation.contains(x)]
    if outside:
        raise InvalidInputError(f"Support elements {outside} lie outside the ball of radius {truncation.radius}")


def commutator_matrix(a: GroupAlgElem, truncation: BallTruncation, p: float) -> OperatorMatrix:
    """
    The compressed commutator D M - M D of the Dirac operator and lambda_p(a).
    """
    _check_support_in_ball(a, truncation)
    dirac = dirac_matrix(truncation)
    regular = lambda_matrix(a, truncation, p)
    return dirac @ regular - regular @ dirac


def commutator_norm_est(a: GroupAlgElem, truncation: BallTruncation, p: float,
                        budget: Optional[EstimationBudget] = None) -> NormEstimate:
    """
    Estimates ||[D_L, lambda_p(a)]|| on the ball.

    The lower end is a valid lower bound for the untruncated commutator, since compressions to coordinate
    subspaces do not increase p-norms.

    Args:
        a (GroupAlgElem): The algebra element, supported in the ball.
        truncation (BallTruncation): The ball.
        p (float): The exponent.
        budget (Optional[EstimationBudget]): Estimation settings.

    Returns:
        NormEstimate: The interval of the compressed commutator norm.

    Raises:
        InvalidInputError: If the support of `a` is not contained in the ball.
        InvariantViolationError: If the lower end exceeds the analytic bound.
    """
    estimate = op_norm(commutator_matrix(a, truncation, p), p, budget)
    bound = commutator_bound(a, truncation.length, p)
    if estimate.lower > bound + COMMUTATOR_BOUND_SLACK:
        raise InvariantViolationError(
            f"Commutator lower bound {estimate.lower} exceeds the analytic bound {bound} at p = {p}"
        )
    return estimate


class CommutatorPoint(BaseModel):
    """
    One radius of a commutator series.
    """
    model_config = ConfigDict(frozen=True)

    radius: float
    ball_size: int
    estimate: NormEstimate
    bound: float


def commutator_series(a: GroupAlgElem, group: GroupModel, length: LengthFn, radii: Sequence[float], p: float,
                      budget: Optional[EstimationBudget] = None, cap: int = DEFAULT_BALL_SIZE_CAP,
                      ordering: BallOrdering = BallOrdering.LENGTH) -> List[CommutatorPoint]:
    """
    Commutator estimates over increasing radii.

    Radii whose ball does not contain the support are skipped. Each lower end is the running maximum, which is
    valid because the commutator on a smaller ball is a compression of the one on a larger ball.
    """
    points: List[CommutatorPoint] = []
    running_lower = 0.0
    bound = commutator_bound(a, length, p)
    for radius in sorted(radii):
        truncation = ball(group, length, radius, cap=cap, ordering=ordering)
        if any(not truncation.contains(x) for x in a.elements):
            log.debug(f"Skipping radius {radius}: the support is not contained in the ball")
            continue
        estimate = commutator_norm_est(a, truncation, p, budget)
        running_lower = min(max(running_lower, estimate.lower), estimate.upper)
        estimate = NormEstimate(lower=running_lower, upper=estimate.upper, methods=estimate.methods) \
            if not estimate.is_exact else estimate
        points.append(CommutatorPoint(radius=radius, ball_size=len(truncation), estimate=estimate, bound=bound))
    return points


class ResolventMode(str, Enum):
    """
    The two resolvents approximated on a ball.

    Attributes:
        SQUARED: (I + D^2)^-1.
        SHIFTED: (D - lambda I)^-1.
    """
    SQUARED = "squared"
    SHIFTED = "shifted"


def _shifted_tail_distance(length: LengthFn, first: float, shift: complex) -> float:
    candidate = max(float(round(shift.real)), first)
    if length.max_value is not None:
        candidate = min(candidate, float(length.max_value))
    neighbours = [value for value in (candidate - 1.0, candidate, candidate + 1.0)
                  if value >= first and (length.max_value is None or value <= length.max_value)]
    return min(abs(value - shift) for value in neighbours)


def resolvent_approx(truncation: BallTruncation, length: Optional[LengthFn] = None,
                     mode: ResolventMode = ResolventMode.SQUARED,
                     shift: Optional[complex] = None) -> Tuple[OperatorMatrix, float]:
    """
    Finite-rank diagonal approximant of a resolvent of D_L, with the analytic tail residual.

    K_F has entries 1/(1 + L(g)^2) (squared mode), J_F has entries 1/(L(g) - lambda) (shifted mode). The residual
    is the supremum of the same modulus over the lengths achieved outside the ball, which bounds the operator
    norm of the difference with the untruncated resolvent.

    Args:
        truncation (BallTruncation): The ball F.
        length (Optional[LengthFn]): The length function, the ball's one by default.
        mode (ResolventMode): Squared or shifted.
        shift (Optional[complex]): lambda, required in shifted mode.

    Returns:
        Tuple[OperatorMatrix, float]: The approximant and the residual.

    Raises:
        SpectrumError: If lambda lies within 1e-12 of a length achieved in the ball.
        InvalidInputError: If shifted mode is requested without a shift.
    """
    length = length or truncation.length
    lengths = np.array([length(x) for x in truncation.elements])
    tail = length.next_value_beyond(truncation.radius)

    if mode == ResolventMode.SQUARED:
        values = 1.0 / (1.0 + lengths ** 2)
        residual = 0.0 if tail is None else 1.0 / (1.0 + tail ** 2)
        return OperatorMatrix.diagonal(values, truncation.space), residual

    if shift is None:
        raise InvalidInputError("Shifted resolvent requires a shift")
    shift = complex(shift)
    if np.min(np.abs(lengths - shift)) <= SPECTRUM_TOLERANCE:
        raise SpectrumError(f"Shift {shift} lies on the spectrum of the Dirac operator")
    log.debug(f"Spectrum check for shift {shift} only covers lengths up to radius {truncation.radius}")

    values = 1.0 / (lengths - shift)
    if tail is None:
        residual = 0.0
    else:
        distance = _shifted_tail_distance(length, tail, shift)
        if distance <= SPECTRUM_TOLERANCE:
            log.warning(f"Shift {shift} is a length achieved outside the ball of radius {truncation.radius}")
            residual = math.inf
        else:
            residual = 1.0 / distance
    return OperatorMatrix.diagonal(values, truncation.space), residual


def parse_group_element(lines: Sequence[str], group: GroupModel) -> GroupAlgElem:
    """
    Parses "element coefficient" lines into an algebra element; blank lines and '#' comments are skipped.

    Raises:
        InvalidFileFormatError: If a line is malformed.
    """
    terms = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise InvalidFileFormatError(f"Expected 'element coefficient', got: '{line}'")
        try:
            terms.append((group.decode(tokens[0]), complex(tokens[1])))
        except (ValueError, InvalidInputError) as error:
            raise InvalidFileFormatError(f"Malformed group element line: '{line}'") from error
    return GroupAlgElem.from_terms(terms)


def read_group_element_file(path: str, group: GroupModel) -> GroupAlgElem:
    """
    Reads an algebra element from a file of "element coefficient" lines.
    """
    with open(path, "r") as file:
        return parse_group_element(file.readlines(), group)
