"""Finite-dimensional Jordan algebras, their associative subalgebras, and
recovery of Jordan isomorphisms from subalgebra posets."""
from .algebra import (
    AlgebraDescriptor,
    AlgebraMismatchError,
    DescriptorError,
    Element,
    HermFactor,
    Projection,
    RealFactor,
    SpinFactor,
    UnsupportedFactorError,
    jordan_product,
    operator_commute,
    U_map,
)
from .frames import Frame, UnitalFrame, generate_assoc, includes, intersect, orthogonal, sum_detect
from .linmap import LinearMap
from .reconstruction import IsoOracle, PosetFragment, reconstruct
from .spectral import dyadic_expand, spectral_decompose
from .suite import demo, run_suite

__all__ = [
    "AlgebraDescriptor",
    "AlgebraMismatchError",
    "DescriptorError",
    "Element",
    "Frame",
    "HermFactor",
    "IsoOracle",
    "LinearMap",
    "PosetFragment",
    "Projection",
    "RealFactor",
    "SpinFactor",
    "U_map",
    "UnitalFrame",
    "UnsupportedFactorError",
    "demo",
    "dyadic_expand",
    "generate_assoc",
    "includes",
    "intersect",
    "jordan_product",
    "operator_commute",
    "orthogonal",
    "reconstruct",
    "run_suite",
    "spectral_decompose",
    "sum_detect",
]
