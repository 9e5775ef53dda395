"""Truncated Mercer expansions (singular value expansions) of continuous
kernels on rectangles, computed by pseudo-skeleton approximation plus
quasimatrix QR compression, with decay bounds and convergence diagnostics."""

from .chebapprox import (
    ChebSeries,
    Interval,
    adapt_interpolate,
    cheb_points,
    clenshaw_curtis,
    evaluate,
    inner_product,
    linf_norm,
)
from .decay import (
    DecayParams,
    figure1_data,
    legendre_truncation_bound,
    singular_value_bound,
)
from .gallery import IntervalPartition, KernelSpec, make_builtin
from .orthopoly import (
    OrthoFamily,
    chebU_weighted,
    legendre_coeffs,
    legendre_normalized,
)
from .skeleton import Skeleton, gecp_approximate, residual_max, skeleton_eval
from .sve import (
    SVE,
    Quasimatrix,
    dense_svd_oracle,
    load_sve,
    qr,
    save_sve,
    sve_eval,
    sve_from_skeleton,
    tail_l2,
    truncate,
)

__all__ = [
    "ChebSeries",
    "Interval",
    "adapt_interpolate",
    "cheb_points",
    "clenshaw_curtis",
    "evaluate",
    "inner_product",
    "linf_norm",
    "DecayParams",
    "figure1_data",
    "legendre_truncation_bound",
    "singular_value_bound",
    "IntervalPartition",
    "KernelSpec",
    "make_builtin",
    "OrthoFamily",
    "chebU_weighted",
    "legendre_coeffs",
    "legendre_normalized",
    "Skeleton",
    "gecp_approximate",
    "residual_max",
    "skeleton_eval",
    "SVE",
    "Quasimatrix",
    "dense_svd_oracle",
    "load_sve",
    "qr",
    "save_sve",
    "sve_eval",
    "sve_from_skeleton",
    "tail_l2",
    "truncate",
]

__version__ = "0.1.0"
