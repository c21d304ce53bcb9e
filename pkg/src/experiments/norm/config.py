from typing import List, Optional

from pydantic import BaseModel, Field

from src.spectral.pspace import PExponent


class Config(BaseModel):
    """
    Configuration of a norm estimation run.

    Attributes:
        matrix_files (List[str]): Operators to estimate, in the matrix file format.
        random_sizes (List[int]): Sizes of seeded random complex square matrices on counting spaces.
        oracle (bool): Also run the brute-force oracle on operators with at most 4 domain points.
        p_values (Optional[List[float]]): Exponents, the application grid when unset.
    """
    matrix_files: List[str] = Field(default_factory=list)
    random_sizes: List[int] = Field(default_factory=list)
    oracle: bool = False
    p_values: Optional[List[PExponent]] = Field(default=None, min_length=1)
