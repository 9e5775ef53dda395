"""Adaptive univariate approximation in the Chebyshev-T basis.

Functions are represented by coefficient vectors on a finite interval and
evaluated with the Clenshaw recurrence.  Interpolation samples a function at
the Chebyshev extreme points on grids of size 2^j + 1, converts values to
coefficients by direct cosine summation (O(n^2), no FFT), and stops once the
trailing coefficients fall below a relative tolerance.  Inner products are
Clenshaw-Curtis quadratures, exact for polynomial integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, EvaluationError

DEFAULT_MAX_DEGREE = 2**13

# chunk size (in matrix entries) for the on-the-fly cosine matrices below;
# keeps temporaries around ~64 MB at the largest grids
_CHUNK_ENTRIES = 8 * 1024 * 1024


@dataclass(frozen=True)
class Interval:
    """A finite interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def span(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_unit(self, x):
        """Affine pullback onto [-1, 1]."""
        return (2.0 * np.asarray(x, dtype=float) - self.lo - self.hi) / self.span

    def from_unit(self, t):
        """Affine pushforward of t in [-1, 1] onto the interval."""
        return 0.5 * (self.span * np.asarray(t, dtype=float) + self.lo + self.hi)


UNIT = Interval(-1.0, 1.0)


@dataclass(frozen=True)
class ChebSeries:
    """A polynomial sum_k coeffs[k] T_k on ``domain`` (index 0 = constant).

    ``resolved`` is False when adaptive interpolation hit its degree cap
    before the coefficients decayed below tolerance.
    """

    coeffs: np.ndarray
    domain: Interval = UNIT
    resolved: bool = True

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a nonempty 1-D sequence")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return evaluate(self, x)


def cheb_points(n: int, domain: Interval = UNIT) -> np.ndarray:
    """The n Chebyshev extreme points of ``domain``, strictly increasing.

    Computed as sin(pi (2k - N) / (2N)) rather than cos(pi k / N) so the set
    is exactly symmetric about the midpoint (same points in exact arithmetic).
    """
    if n < 1:
        raise ValueError(f"need n >= 1 points, got {n}")
    if n == 1:
        return np.array([domain.mid])
    N = n - 1
    k = np.arange(n)
    return domain.from_unit(np.sin(np.pi * (2 * k - N) / (2 * N)))


def _cos_pi_table(N: int) -> np.ndarray:
    """cos(pi * j / N) for j = 0..2N-1 (one full period)."""
    return np.cos(np.pi * np.arange(2 * N) / N)


# grids up to 2^11+1 points cache their cosine matrix permanently (~45 MB
# total over the nested ladder); the 4k band is kept in a small LRU
_DCT_DICT_LIMIT = 2**11 + 1
_DCT_CACHE_LIMIT = 4200
_dct_cache: dict = {}


@lru_cache(maxsize=1)
def _dct_matrix_large(N: int) -> np.ndarray:
    k = np.arange(N + 1, dtype=np.int64)
    M = _cos_pi_table(N)[(k[:, None] * k) % (2 * N)]
    M.flags.writeable = False
    return M


def _dct_matrix(N: int) -> np.ndarray:
    """The full (N+1) x (N+1) cosine matrix cos(pi m k / N), cached."""
    if N + 1 > _DCT_DICT_LIMIT:
        return _dct_matrix_large(N)
    M = _dct_cache.get(N)
    if M is None:
        k = np.arange(N + 1, dtype=np.int64)
        M = _cos_pi_table(N)[(k[:, None] * k) % (2 * N)]
        M.flags.writeable = False
        _dct_cache[N] = M
    return M


def cheb_coeffs_from_values(values: np.ndarray) -> np.ndarray:
    """Chebyshev-T coefficients of the interpolant through values at the
    n extreme points in increasing-x order (DCT-I by direct cosine sums).

    ``values`` may be (n,) or (n, m); columns are transformed independently.
    """
    v = np.asarray(values, dtype=float)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[:, None]
    n = v.shape[0]
    if n == 1:
        out = v.copy()
        return out[:, 0] if squeeze else out
    N = n - 1
    v = v[::-1].copy()  # theta order: row k holds f(cos(pi k / N))
    v[0] *= 0.5
    v[N] *= 0.5
    if n <= _DCT_CACHE_LIMIT:
        out = _dct_matrix(N) @ v
    else:
        table = _cos_pi_table(N)
        k = np.arange(n, dtype=np.int64)
        out = np.empty_like(v)
        rows = max(1, _CHUNK_ENTRIES // n)
        for s in range(0, n, rows):
            m = np.arange(s, min(s + rows, n), dtype=np.int64)
            out[s : s + len(m)] = table[(m[:, None] * k) % (2 * N)] @ v
    out *= 2.0 / N
    out[0] *= 0.5
    out[N] *= 0.5
    return out[:, 0] if squeeze else out


def _clenshaw(coeffs: np.ndarray, t):
    """Evaluate sum_k coeffs[k] T_k(t) for t in [-1, 1] (scalar or array)."""
    t = np.asarray(t, dtype=float)
    t2 = 2.0 * t
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for c in coeffs[:0:-1]:
        b1, b2 = t2 * b1 - b2 + c, b1
    return t * b1 - b2 + coeffs[0]


def eval_many_at_point(coeff_list, t: float) -> np.ndarray:
    """Values of several coefficient vectors at one unit-interval point,
    via the synthesis T_k(cos theta) = cos(k theta) (stable for |t| <= 1)."""
    if not coeff_list:
        return np.zeros(0)
    theta = math.acos(min(1.0, max(-1.0, t)))
    L = max(len(c) for c in coeff_list)
    basis = np.cos(theta * np.arange(L))
    return np.array([basis[: len(c)] @ c for c in coeff_list])


def evaluate(s: ChebSeries, x):
    """Clenshaw evaluation of ``s`` at x (scalar or array) inside its domain."""
    x = np.asarray(x, dtype=float)
    slack = 1e-13 * s.domain.span
    if np.any(x < s.domain.lo - slack) or np.any(x > s.domain.hi + slack):
        raise DomainError(
            f"evaluation point outside [{s.domain.lo}, {s.domain.hi}]"
        )
    t = np.clip(s.domain.to_unit(x), -1.0, 1.0)
    out = _clenshaw(s.coeffs, t)
    return float(out) if out.ndim == 0 else out


def _chop(coeffs: np.ndarray, threshold: float) -> np.ndarray:
    """Drop the trailing coefficients below ``threshold`` (keep index 0)."""
    keep = np.nonzero(np.abs(coeffs) >= threshold)[0]
    last = keep[-1] if len(keep) else 0
    return coeffs[: last + 1]


def _sample(f, pts):
    vals = np.asarray(f(pts), dtype=float)
    if vals.shape != pts.shape:
        vals = np.array([float(f(p)) for p in pts])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        x_bad = float(pts[bad][0])
        raise EvaluationError(f"non-finite sample at x = {x_bad}", abscissa=x_bad)
    return vals


def adapt_interpolate(
    f,
    domain: Interval,
    tol: float,
    max_degree: int = DEFAULT_MAX_DEGREE,
    coeff_floor: float = 0.0,
    chop_floor: Optional[float] = None,
) -> ChebSeries:
    """Interpolate ``f`` adaptively: grids of 2^j + 1 points, j = 4, 5, ...

    Refinement reuses previous samples (the grids are nested) and stops when
    the last two coefficients drop below tol * max|coeff| (or below the
    absolute ``coeff_floor``, whichever is larger).  If degree ``max_degree``
    is reached first the best available series is returned with
    ``resolved=False``.  ``chop_floor``, when given, chops the returned tail
    at that absolute level instead of the resolution threshold (useful to
    keep slices a notch more accurate than the stopping rule requires).
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    if max_degree < 16:
        raise ValueError("max_degree must be at least 16")
    j = 4
    pts = cheb_points(2**j + 1, domain)
    vals = _sample(f, pts)
    while True:
        c = cheb_coeffs_from_values(vals)
        cmax = np.max(np.abs(c))
        if cmax == 0.0:
            return ChebSeries(np.zeros(1), domain, resolved=True)
        threshold = max(tol * cmax, coeff_floor)
        chop_at = threshold if chop_floor is None else min(threshold, chop_floor)
        if abs(c[-1]) < threshold and abs(c[-2]) < threshold:
            return ChebSeries(_chop(c, chop_at), domain, resolved=True)
        if 2**j >= max_degree:
            return ChebSeries(_chop(c, chop_at), domain, resolved=False)
        j += 1
        fine = cheb_points(2**j + 1, domain)
        new_vals = _sample(f, fine[1::2])
        merged = np.empty(len(fine))
        merged[::2] = vals
        merged[1::2] = new_vals
        pts, vals = fine, merged


# integrals of T_k over [-1, 1]: 2/(1-k^2) for even k, 0 for odd k
def _chebT_integrals(n: int) -> np.ndarray:
    k = np.arange(n)
    out = np.zeros(n)
    even = k % 2 == 0
    out[even] = 2.0 / (1.0 - k[even] ** 2)
    return out


def inner_product(f: ChebSeries, g: ChebSeries) -> float:
    """L2 inner product over the common domain by Clenshaw-Curtis quadrature
    with deg(f) + deg(g) + 1 points, exact for the polynomial integrand."""
    if f.domain != g.domain:
        raise ValueError("inner_product requires matching domains")
    n = max(f.degree + g.degree + 1, 2)
    t = np.cos(np.pi * np.arange(n - 1, -1, -1) / (n - 1))
    vals = _clenshaw(f.coeffs, t) * _clenshaw(g.coeffs, t)
    c = cheb_coeffs_from_values(vals)
    return 0.5 * f.domain.span * float(c @ _chebT_integrals(n))


def l2_norm(s: ChebSeries) -> float:
    return math.sqrt(max(inner_product(s, s), 0.0))


def linf_norm(s: ChebSeries, grid_size: int) -> float:
    """max |s| over a Chebyshev grid; a lower bound on the true sup norm."""
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    return float(np.max(np.abs(evaluate(s, cheb_points(grid_size, s.domain)))))


@lru_cache(maxsize=64)
def _cc_weights_unit(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights on [-1, 1] for the n extreme points
    (increasing-x order; the weights are symmetric)."""
    if n == 1:
        w = np.array([2.0])
    else:
        N = n - 1
        k = np.arange(n)
        w = np.ones(n)
        jmax = N // 2
        if jmax >= 1:
            j = np.arange(1, jmax + 1)
            b = np.where(2 * j == N, 1.0, 2.0)
            w -= (b / (4.0 * j**2 - 1.0)) @ np.cos(
                2.0 * np.pi * np.outer(j, k) / N
            )
        c = np.where((k == 0) | (k == N), 1.0, 2.0)
        w *= c / N
    w.flags.writeable = False
    return w


def clenshaw_curtis(n: int, domain: Interval = UNIT):
    """Quadrature points and weights on ``domain`` at n Chebyshev extreme
    points; exact for polynomials of degree <= n - 1."""
    if n < 1:
        raise ValueError(f"need n >= 1 points, got {n}")
    return cheb_points(n, domain), 0.5 * domain.span * _cc_weights_unit(n)
