from typing import List, Optional

from pydantic import BaseModel, Field

from src.experiments.uhf.config import AlphaChoice
from src.spectral.pspace import PExponent
from src.spectral.uhftriple import UHFSpecConfig


class Config(BaseModel):
    """
    Configuration of a metric estimation run.

    Attributes:
        dims (List[int]): d(0), ..., d(M).
        alpha (AlphaChoice): Dirac coefficients, a plain list or "auto" are accepted.
        states (List[str]): "point:INDEX", "trace" or state file paths; every unordered pair is estimated.
        sweep_levels (bool): Repeat the estimation on every truncation level 1..M.
        oracle (bool): Also run the grid oracle where it applies.
        p_values (Optional[List[float]]): Exponents, the application grid when unset.
    """
    dims: List[int] = Field(default_factory=lambda: [1, 2])
    alpha: AlphaChoice = Field(default_factory=lambda: AlphaChoice(explicit=[0.0, 1.0]))
    states: List[str] = Field(default_factory=lambda: ["point:0", "point:1"], min_length=2)
    sweep_levels: bool = False
    oracle: bool = False
    p_values: Optional[List[PExponent]] = Field(default=None, min_length=1)

    @property
    def spec(self) -> UHFSpecConfig:
        return UHFSpecConfig(dims=tuple(self.dims))
