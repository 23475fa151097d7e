"""Exact p-adic analysis toolkit: function spaces, antiderivation,
non-Archimedean operators, quasimeasures and a p-adic stochastic integral."""
from .antiderivation import MultilinearKernel, SimpleRandomField, antiderive_multilinear
from .banach import MatrixOperator, ProjectionValuedMeasure, RankOneSum, nu_q, operator_norm, spectral_decompose
from .function_spaces import ApproximationOfIdentity, CnFunction, MahlerSeries, Polynomial, mahler_expand
from .padic import (
    Ball,
    IndistinguishableFromZero,
    PadicNumber,
    PrecisionError,
    PrimeMismatchError,
    fractional_part,
    from_rational,
    norm,
    partition,
    valuation,
)
from .quasimeasure import DeltaKernel, HaarBallKernel, LocallyConstantMeasure, TransitionKernel
from .stochastic import ProcessLaw, sample_path, stochastic_integral

__all__ = [
    "ApproximationOfIdentity",
    "Ball",
    "CnFunction",
    "DeltaKernel",
    "HaarBallKernel",
    "IndistinguishableFromZero",
    "LocallyConstantMeasure",
    "MahlerSeries",
    "MatrixOperator",
    "MultilinearKernel",
    "PadicNumber",
    "Polynomial",
    "PrecisionError",
    "PrimeMismatchError",
    "ProcessLaw",
    "ProjectionValuedMeasure",
    "RankOneSum",
    "SimpleRandomField",
    "TransitionKernel",
    "antiderive_multilinear",
    "fractional_part",
    "from_rational",
    "mahler_expand",
    "norm",
    "nu_q",
    "operator_norm",
    "partition",
    "sample_path",
    "spectral_decompose",
    "stochastic_integral",
    "valuation",
]
