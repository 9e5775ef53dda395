"""Normalized Legendre polynomials and weighted Chebyshev-U functions.

Two orthonormal families on [-1, 1] drive the counterexample kernels and the
decay bounds:

* ``legendre_normalized``:  Pt_n(x) = sqrt(n + 1/2) P_n(x), orthonormal in
  the plain L2 inner product.
* ``chebU_weighted``:  Ut_n(x) = sqrt(2/pi) (1 - x^2)^{1/4} U_n(x), also an
  L2-orthonormal set, vanishing at the endpoints.

Both are generated by their three-term recurrences.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .chebapprox import UNIT, ChebSeries, cheb_coeffs_from_values, cheb_points
from .exceptions import DomainError

LEGENDRE = "legendre_normalized"
CHEB_U = "chebU_weighted"

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _legendre_raw(n: int, x):
    """P_n(x) by the recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}."""
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


def _chebu_raw(n: int, x):
    """U_n(x) by the recurrence U_{k+1} = 2x U_k - U_{k-1}."""
    u_prev = np.ones_like(x)
    if n == 0:
        return u_prev
    u = 2.0 * x
    for _ in range(1, n):
        u_prev, u = u, 2.0 * x * u - u_prev
    return u


def legendre_normalized(n: int, x):
    """Pt_n(x) = sqrt(n + 1/2) P_n(x) for x in [-1, 1] (scalar or array)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xs = _check_unit(x)
    out = np.sqrt(n + 0.5) * _legendre_raw(n, xs)
    return float(out) if out.ndim == 0 else out


def chebU_weighted(n: int, x):
    """Ut_n(x) = sqrt(2/pi) (1 - x^2)^{1/4} U_n(x); exactly 0 at x = +-1."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xs = _check_unit(x)
    out = _SQRT_2_OVER_PI * (1.0 - xs**2) ** 0.25 * _chebu_raw(n, xs)
    return float(out) if out.ndim == 0 else out


def iter_chebU_weighted(x, n_max: int):
    """Yield (n, Ut_n(x)) for n = 0..n_max with one shared recurrence pass.

    Memory stays at two rows regardless of n_max; intended for sup-norm
    scans over large grids.
    """
    xs = _check_unit(x)
    weight = _SQRT_2_OVER_PI * (1.0 - xs**2) ** 0.25
    u_prev = np.ones_like(xs)
    yield 0, weight * u_prev
    if n_max == 0:
        return
    u = 2.0 * xs
    yield 1, weight * u
    for n in range(2, n_max + 1):
        u_prev, u = u, 2.0 * xs * u - u_prev
        yield n, weight * u


@dataclass
class OrthoFamily:
    """Cached access to one of the two families.

    For the Legendre family, ``series(n)`` returns the exact ChebSeries
    representation (built once and reused; the cache is lock-protected so
    warmed-up instances can be shared across threads).
    """

    kind: str = LEGENDRE
    max_cached_degree: int = 256
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.kind not in (LEGENDRE, CHEB_U):
            raise ValueError(f"unknown family kind {self.kind!r}")

    def eval(self, n: int, x):
        if self.kind == LEGENDRE:
            return legendre_normalized(n, x)
        return chebU_weighted(n, x)

    def series(self, n: int) -> ChebSeries:
        """Exact ChebSeries of degree n (Legendre family only)."""
        if self.kind != LEGENDRE:
            raise ValueError("only the Legendre family is polynomial")
        with self._lock:
            hit = self._cache.get(n)
        if hit is not None:
            return hit
        vals = legendre_normalized(n, cheb_points(n + 1))
        s = ChebSeries(cheb_coeffs_from_values(np.atleast_1d(vals)), UNIT)
        if n <= self.max_cached_degree:
            with self._lock:
                self._cache.setdefault(n, s)
        return s


_LEGENDRE_FAMILY = OrthoFamily(LEGENDRE)


def gauss_chebyshev_u(n: int):
    """Gauss quadrature for the weight sqrt(1 - x^2) on [-1, 1]:
    nodes cos(k pi/(n+1)) and weights pi/(n+1) sin^2(k pi/(n+1))."""
    k = np.arange(n, 0, -1)
    theta = k * np.pi / (n + 1)
    return np.cos(theta), np.pi / (n + 1) * np.sin(theta) ** 2


def legendre_coeffs_upto(s: ChebSeries, n_max: int) -> np.ndarray:
    """Coefficients a_n = <s, Pt_n> for n = 0..n_max by a single
    Clenshaw-Curtis rule that is exact for every integrand."""
    from .chebapprox import _clenshaw, clenshaw_curtis  # local to avoid cycle

    if s.domain != UNIT:
        raise ValueError("series must live on [-1, 1]; transplant first")
    pts, w = clenshaw_curtis(max(s.degree + n_max + 1, 2), UNIT)
    sv = _clenshaw(s.coeffs, pts) * w
    out = np.empty(n_max + 1)
    p_prev = np.ones_like(pts)
    out[0] = np.sqrt(0.5) * float(p_prev @ sv)
    p = pts.copy()
    for n in range(1, n_max + 1):
        out[n] = np.sqrt(n + 0.5) * float(p @ sv)
        p_prev, p = p, ((2 * n + 1) * pts * p - n * p_prev) / (n + 1)
    return out


def legendre_coeffs(s: ChebSeries) -> np.ndarray:
    """All Legendre coefficients of s up to its polynomial degree."""
    return legendre_coeffs_upto(s, s.degree)


def legendre_series(n: int) -> ChebSeries:
    """Pt_n as an exact ChebSeries on [-1, 1] (shared cache)."""
    return _LEGENDRE_FAMILY.series(n)
