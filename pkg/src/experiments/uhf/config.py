from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from src.core.config import DEFAULT_ALGEBRA_DIMENSION_CAP, EstimationBudget
from src.spectral.pspace import PExponent
from src.spectral.qmetric import CnTable, alpha_auto, cn_constants
from src.spectral.uhftriple import AlphaSeq, UHFSpecConfig, UHFTower


class AlphaChoice(BaseModel):
    """
    Either explicit Dirac coefficients or the automatic choice from the constants c_n.

    Attributes:
        explicit (Optional[List[float]]): alpha_0, ..., alpha_M; truncated towers use a prefix.
        auto (Optional[dict]): Present (possibly empty) to select alpha_n = 2^n max(c_n, 1).
    """
    explicit: Optional[List[float]] = None
    auto: Optional[dict] = None

    @model_validator(mode="before")
    @classmethod
    def _accept_shorthand(cls, value):
        if isinstance(value, (list, tuple)):
            return {"explicit": list(value)}
        if value == "auto":
            return {"auto": {}}
        return value

    @model_validator(mode="after")
    def _check_exclusive(self):
        if (self.explicit is None) == (self.auto is None):
            raise ValueError("Alpha must be either explicit or auto")
        return self

    def resolve(self, tower: UHFTower, p: float, budget: EstimationBudget,
                cap: int = DEFAULT_ALGEBRA_DIMENSION_CAP) -> Tuple[AlphaSeq, Optional[CnTable]]:
        """
        Returns the coefficients, and the constants they were derived from in auto mode.

        Raises:
            DegeneracyError: In auto mode, if some c_n is infinite.
            ResourceCapError: In auto mode, if N^2 exceeds `cap`.
        """
        if self.explicit is not None:
            return AlphaSeq.of(self.explicit[:tower.level + 1]), None
        table = cn_constants(tower, p, budget, cap)
        return alpha_auto(table), table


class Config(BaseModel):
    """
    Configuration of a UHF tower run.

    Attributes:
        dims (List[int]): d(0), ..., d(M).
        alpha (AlphaChoice): Dirac coefficients, a plain list or "auto" are accepted.
        p_values (Optional[List[float]]): Exponents, the application grid when unset.
    """
    dims: List[int] = Field(default_factory=lambda: [1, 2, 2])
    alpha: AlphaChoice = Field(default_factory=lambda: AlphaChoice(explicit=[0.0, 1.0, 2.0]))
    p_values: Optional[List[PExponent]] = Field(default=None, min_length=1)

    @property
    def spec(self) -> UHFSpecConfig:
        return UHFSpecConfig(dims=tuple(self.dims))
