from typing import List

from pydantic import BaseModel, Field, field_validator


class Config(BaseModel):
    """
    Configuration of the invariant check run.

    Attributes:
        quick (bool): Reduce sample counts and profiles.
        suites (List[str]): Suites to run, in order.
    """
    quick: bool = False
    suites: List[str] = Field(default_factory=lambda: ["pspace", "tensor", "grouptriple", "uhftriple", "qmetric"])

    @field_validator("suites")
    @classmethod
    def _check_suites(cls, suites: List[str]) -> List[str]:
        from .suites import SUITES

        unknown = [suite for suite in suites if suite not in SUITES]
        if unknown:
            raise ValueError(f"Unknown suites: {unknown}")
        return suites
