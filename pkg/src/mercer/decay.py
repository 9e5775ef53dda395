"""Analytic decay bounds and the tail-vs-bound comparison table.

For a kernel whose slices are (r-1)-times continuously differentiable with an
r-th derivative of variation at most V, truncating the Legendre expansion of
the slices after k terms gives

    || f - f_{k-1} ||_L2  <=  sqrt(2) V / ( sqrt(pi (r + 1/2)) (k - r - 1)^(r + 1/2) ),

valid for k > r + 1, and chaining through the best-rank-k property yields

    sigma_{2k}  <=  2 V (pi (r + 1/2))^(-1/2) / ( sqrt(k) (k - r - 1)^(r + 1/2) ).

``figure1_data`` compares, for each k: (a) the computed expansion tail
sqrt(sum_{n>k} sigma_n^2), (b) sqrt(2) max_y of the Legendre tail of the
x-slices on a finite y grid, and (c) the closed-form bound, checking the
chain (a) <= (b) pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .chebapprox import (
    DEFAULT_MAX_DEGREE,
    UNIT,
    adapt_interpolate,
    cheb_points,
    inner_product,
)
from .exceptions import OutOfValidityError
from .gallery import KernelSpec
from .orthopoly import legendre_coeffs_upto
from .sve import SVE, tail_l2

CHAIN_SLACK = 1e-6


@dataclass(frozen=True)
class DecayParams:
    """Smoothness class r and variation bound V of the kernel slices.

    ``alpha`` (> 1/2) is an optional reported decay exponent; it is carried
    for reporting only and enters no formula here.
    """

    V: float
    r: int
    alpha: Optional[float] = None

    def __post_init__(self):
        if not self.V > 0.0:
            raise ValueError("V must be positive")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if self.alpha is not None and not self.alpha > 0.5:
            raise ValueError("alpha must exceed 1/2")


def legendre_truncation_bound(p: DecayParams, k: int) -> float:
    """The L2 error bound for the degree-(k-1) Legendre truncation."""
    if k <= p.r + 1:
        raise OutOfValidityError(f"bound requires k > r + 1 = {p.r + 1}, got k = {k}")
    return math.sqrt(2.0) * p.V / (
        math.sqrt(math.pi * (p.r + 0.5)) * (k - p.r - 1) ** (p.r + 0.5)
    )


def singular_value_bound(p: DecayParams, k: int) -> float:
    """The closed-form bound on sigma_{2k}."""
    if k <= p.r + 1:
        raise OutOfValidityError(f"bound requires k > r + 1 = {p.r + 1}, got k = {k}")
    return 2.0 * p.V / (
        math.sqrt(math.pi * (p.r + 0.5))
        * math.sqrt(k)
        * (k - p.r - 1) ** (p.r + 0.5)
    )


@dataclass(frozen=True)
class Figure1Row:
    k: int
    sve_tail: float
    legendre_bound: float
    analytic_bound: Optional[float]


@dataclass(frozen=True)
class Figure1Table:
    kernel: str
    y_grid: int
    slice_tol: float
    rows: List[Figure1Row]


def slice_legendre_tails(
    K: KernelSpec,
    k_max: int,
    y_grid: int = 129,
    slice_tol: float = 1e-12,
    max_degree: Optional[int] = None,
) -> np.ndarray:
    """For k = 0..k_max: sqrt(2) * max over the y grid of the Legendre tail
    sqrt(sum_{n >= k} a_n(y)^2) of the x-slices."""
    if K.x_domain != UNIT or K.y_domain != UNIT:
        raise ValueError("Legendre slice bounds require the kernel on [-1,1]^2")
    if max_degree is None:
        max_degree = K.slice_max_degree or DEFAULT_MAX_DEGREE
    worst = np.zeros(k_max + 1)
    for y in cheb_points(y_grid, K.y_domain):
        s = adapt_interpolate(
            lambda xs: K(xs, y), K.x_domain, slice_tol, max_degree
        )
        norm2 = max(inner_product(s, s), 0.0)
        a = legendre_coeffs_upto(s, k_max)
        partial = np.concatenate([[0.0], np.cumsum(a[:k_max] ** 2)])
        tails = np.sqrt(np.maximum(norm2 - partial, 0.0))
        worst = np.maximum(worst, tails)
    return math.sqrt(2.0) * worst


def figure1_data(
    K: KernelSpec,
    k_max: int,
    y_grid: int = 129,
    sve: Optional[SVE] = None,
    tol: float = 1e-10,
    max_rank: int = 160,
    slice_tol: float = 1e-12,
) -> Figure1Table:
    """The per-k comparison table behind the singular-value-decay figure.

    The expansion is computed on demand when ``sve`` is not supplied.  Raises
    if the computed tail exceeds the slice bound anywhere (they must satisfy
    (a) <= (b) up to quadrature slack).
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    if sve is None:
        from .skeleton import gecp_approximate
        from .sve import sve_from_skeleton

        sve = sve_from_skeleton(gecp_approximate(K, tol=tol, max_rank=max_rank))
    bounds = slice_legendre_tails(K, k_max, y_grid, slice_tol)
    params = (
        DecayParams(V=K.variation_V, r=K.smoothness_r)
        if K.variation_V is not None and K.smoothness_r is not None
        else None
    )
    rows = []
    for k in range(k_max + 1):
        a = tail_l2(sve, k)
        b = float(bounds[k])
        if a > b * (1.0 + CHAIN_SLACK):
            raise RuntimeError(
                f"decay chain violated at k = {k}: tail {a!r} > slice bound {b!r}"
            )
        c = None
        if params is not None and k > params.r + 1:
            c = math.sqrt(2.0) * legendre_truncation_bound(params, k)
        rows.append(Figure1Row(k=k, sve_tail=a, legendre_bound=b, analytic_bound=c))
    return Figure1Table(kernel=K.name, y_grid=y_grid, slice_tol=slice_tol, rows=rows)
