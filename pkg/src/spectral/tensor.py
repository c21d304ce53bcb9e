"""
Spatial tensor products of finite weighted point spaces and of operators between them.

One flattening convention is used everywhere: multi-indices are laid out row-major, the first factor varying
slowest, which is exactly the layout of `numpy.kron`.
"""
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.core.exceptions import InvalidInputError
from src.spectral.pspace import MeasureKind, OperatorMatrix, PVector, WeightedPointSpace


class ProductSpace(BaseModel):
    """
    A finite product of weighted point spaces together with its flattened space.

    Attributes:
        factors (Tuple[WeightedPointSpace, ...]): The ordered factors.
        flat (WeightedPointSpace): The product measure on the flattened points.
    """
    model_config = ConfigDict(frozen=True)

    factors: Tuple[WeightedPointSpace, ...]
    flat: WeightedPointSpace

    @model_validator(mode="after")
    def _check_flat(self):
        if self.flat.size != int(np.prod([factor.size for factor in self.factors])):
            raise ValueError("Flat space size must equal the product of the factor sizes")
        return self

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(factor.size for factor in self.factors)


def _product_kind(factors: Sequence[WeightedPointSpace]) -> MeasureKind:
    # one-point spaces are both counting and probability spaces, so they never decide the kind
    kinds = {factor.kind for factor in factors if factor.size > 1}
    if len(kinds) > 1:
        raise InvalidInputError("Cannot multiply probability and counting factors with more than one point")
    return kinds.pop() if kinds else factors[0].kind


def product_space(factors: Sequence[WeightedPointSpace]) -> ProductSpace:
    """
    Builds the product of a nonempty list of weighted point spaces.

    The weight of the flat point (x_0, ..., x_k) is the product of the factor weights, the first factor varying
    slowest. A product of probability spaces is a probability space.

    Args:
        factors (Sequence[WeightedPointSpace]): The factors, in order.

    Returns:
        ProductSpace: The product.

    Raises:
        InvalidInputError: If the list is empty or mixes non-trivial probability and counting factors.
    """
    factors = tuple(factors)
    if not factors:
        raise InvalidInputError("A product space needs at least one factor")
    kind = _product_kind(factors)
    weights = reduce(np.kron, [factor.weight_array() for factor in factors])
    if kind == MeasureKind.COUNTING:
        flat = WeightedPointSpace.counting(len(weights))
    else:
        flat = WeightedPointSpace(weights=tuple(float(weight) for weight in weights), kind=kind)
    return ProductSpace(factors=factors, flat=flat)


def interval_space(spaces: Sequence[WeightedPointSpace], n: int, m: int) -> ProductSpace:
    """
    Builds X_(n,m], the product of spaces[n+1..m]; the one point counting space when n == m.

    Args:
        spaces (Sequence[WeightedPointSpace]): The level spaces X_0, X_1, ...
        n (int): Exclusive lower level, n >= -1.
        m (int): Inclusive upper level, m >= n.

    Returns:
        ProductSpace: The product space.
    """
    if n < -1 or m < n or m >= len(spaces):
        raise InvalidInputError(f"Invalid level interval ({n}, {m}] for {len(spaces)} levels")
    factors = list(spaces[n + 1:m + 1])
    return product_space(factors or [WeightedPointSpace.point()])


def kron(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """
    Spatial tensor product of two operators, with entries (a (x) b)_{(i,k),(j,l)} = a_ij b_kl.

    Args:
        a (OperatorMatrix): Left factor.
        b (OperatorMatrix): Right factor.

    Returns:
        OperatorMatrix: The operator a (x) b between the product spaces.
    """
    domain = product_space([a.domain, b.domain]).flat
    codomain = product_space([a.codomain, b.codomain]).flat
    return OperatorMatrix(domain=domain, codomain=codomain, entries=np.kron(a.entries, b.entries))


def kron_all(operators: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """
    Left fold of `kron` over a nonempty list of operators.
    """
    if not operators:
        raise InvalidInputError("Cannot tensor an empty list of operators")
    return reduce(kron, operators)


def kron_vectors(xi: PVector, eta: PVector) -> PVector:
    """
    The elementary tensor xi (x) eta on the product space.
    """
    space = product_space([xi.space, eta.space]).flat
    return PVector(space=space, coords=np.kron(xi.coords, eta.coords))


def identity_on(factors: List[WeightedPointSpace]) -> OperatorMatrix:
    """
    The identity on the flattened product of `factors`.
    """
    return OperatorMatrix.identity(product_space(factors).flat)
