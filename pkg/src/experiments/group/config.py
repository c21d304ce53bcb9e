from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from src.spectral.grouptriple import BallOrdering
from src.spectral.pspace import PExponent


class Config(BaseModel):
    """
    Configuration of a group spectral triple run.

    Attributes:
        group (str): Built-in group name ("z", "z2", "f2", "c6"...), with its word length.
        radii (List[float]): Ball radii.
        coefficients_file (Optional[str]): File of "element coefficient" lines.
        terms (List[str]): Inline "element coefficient" lines, used when no file is given.
        ordering (BallOrdering): Ordering of ball elements.
        shift (Optional[str]): Complex spectral parameter ("1.5+0.5j") of the shifted resolvent, skipped when unset.
        p_values (Optional[List[float]]): Exponents, the application grid when unset.
    """
    group: str = "z"
    radii: List[float] = Field(default_factory=lambda: [3.0], min_length=1)
    coefficients_file: Optional[str] = None
    terms: List[str] = Field(default_factory=lambda: ["1 1"])
    ordering: BallOrdering = BallOrdering.LENGTH
    shift: Optional[str] = None
    p_values: Optional[List[PExponent]] = Field(default=None, min_length=1)

    @field_validator("shift", mode="before")
    @classmethod
    def _check_shift(cls, value):
        if value is None:
            return None
        value = str(value)
        complex(value)
        return value

    @field_validator("radii")
    @classmethod
    def _check_radii(cls, radii: List[float]) -> List[float]:
        if any(radius < 0 for radius in radii):
            raise ValueError(f"Radii must be nonnegative, got: {radii}")
        return sorted(radii)
