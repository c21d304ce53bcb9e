from .pspace import NormEstimate, OperatorMatrix, PVector, WeightedPointSpace, op_norm, vec_norm
