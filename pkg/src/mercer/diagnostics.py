"""Empirical verification of the convergence and divergence claims.

Covered here: harmonic growth of the absolute partial sums of the k_abs
series at the corner (1, 1) together with convergence of its signed value,
the constant lower bound 4/3 on the localized k_uni terms (the Cauchy
witness for non-uniform convergence), Fourier partial-sum humps of the
Fejer-type blocks at t = 0, the sup-norm envelope of the weighted
Chebyshev-U functions, and the Legendre-sum closed form on [1/2, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
from scipy.special import digamma

from .chebapprox import cheb_points
from .exceptions import OutOfValidityError, UnsupportedScaleError
from .gallery import MAX_FEJER_BLOCKS
from .orthopoly import chebU_weighted, iter_chebU_weighted, legendre_normalized

# limit of sum (-1)^n (2/n + 1/(2n^2)) = -2 ln 2 - pi^2 / 24
KABS_CORNER_LIMIT = -2.0 * math.log(2.0) - math.pi**2 / 24.0

SQRT_8_OVER_PI = math.sqrt(8.0 / math.pi)


@dataclass(frozen=True)
class ConvergenceReport:
    """Partial-sum traces at fixed sample points plus a pass/fail verdict."""

    kind: str
    points: List[float]
    indices: List[int]
    values: List[float]
    verdict: bool
    details: Dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("values must be finite")


def kabs_absolute_sum(N: int) -> float:
    """A_N = sum_{n<=N} (2/n + 1/(2 n^2)), the absolute corner sum."""
    total = 0.0
    for start in range(1, N + 1, 10**6):
        n = np.arange(start, min(start + 10**6, N + 1), dtype=float)
        total += float(np.sum(2.0 / n + 0.5 / n**2))
    return total


def kabs_absolute_divergence(N_list: Sequence[int]) -> ConvergenceReport:
    """Absolute partial sums at (1, 1); the verdict checks that A_N - 2 ln N
    has settled (Cauchy within 0.01 between the two largest N)."""
    N_list = list(N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be increasing")
    values = [kabs_absolute_sum(N) for N in N_list]
    shifted = [v - 2.0 * math.log(N) for v, N in zip(values, N_list)]
    verdict = len(N_list) >= 2 and abs(shifted[-1] - shifted[-2]) <= 0.01
    return ConvergenceReport(
        kind="absolute",
        points=[1.0, 1.0],
        indices=N_list,
        values=values,
        verdict=verdict,
        details={"shifted": shifted},
    )


def kabs_signed_value(N: int) -> float:
    """Pair-averaged signed partial sum of sum (-1)^n (2/n + 1/(2n^2))."""
    n = np.arange(1, N + 2, dtype=float)
    terms = (-1.0) ** n * (2.0 / n + 0.5 / n**2)
    s = np.cumsum(terms)
    return 0.5 * float(s[N - 1] + s[N])


def kuni_term_norm(m: int, grid: int) -> float:
    """(1/m^3) (max |v_{2m}|)^2 = (pi^2 / 6m) ||Ut_{2m+2}||_inf^2 on a grid.

    The grid is augmented with cos(pi/(2(2m+3))), where the sup norm is
    provably above 2 sqrt(2m+2)/pi, so the value exceeds 4/3 for every m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    pts = np.append(cheb_points(grid), np.cos(np.pi / (2.0 * (2 * m + 3))))
    umax = float(np.max(np.abs(chebU_weighted(2 * m + 2, pts))))
    return (np.pi**2 / (6.0 * m)) * umax**2


# ---------------------------------------------------------------------------
# Fejer-type blocks: g_n(t) = sin((2^{n^3}+1) |t| / 2) / n^2, cosine series
# S_M(t) = c_0 + sum_{m=1}^M a_m cos(m t) with closed-form coefficients
#   c_0 = 1/(pi n^2 alpha),  a_m = (1/(pi n^2)) (1/(alpha+m) + 1/(alpha-m)),
# alpha = (2^{n^3}+1)/2; the sines at half-integer multiples of pi are +-1,
# which collapses the coefficient integrals to the two reciprocals above.

def _alpha(block_n: int) -> float:
    if not 1 <= block_n <= MAX_FEJER_BLOCKS:
        raise UnsupportedScaleError(
            f"block_n must be in 1..{MAX_FEJER_BLOCKS}, got {block_n}"
        )
    return (2.0 ** (block_n**3) + 1.0) / 2.0


def fejer_cos_coeffs(block_n: int, m_max: int) -> np.ndarray:
    """[c_0, a_1, ..., a_{m_max}] of the evenized block's cosine series."""
    a = _alpha(block_n)
    m = np.arange(1, m_max + 1, dtype=float)
    coeffs = np.empty(m_max + 1)
    coeffs[0] = 1.0 / (math.pi * block_n**2 * a)
    coeffs[1:] = (1.0 / (a + m) + 1.0 / (a - m)) / (math.pi * block_n**2)
    return coeffs


def fejer_partial_sum_at_zero(block_n: int, M) -> np.ndarray:
    """S_M(0) for the single block, vectorized over M via digamma sums."""
    a = _alpha(block_n)
    N = int(round(a - 0.5))
    M = np.asarray(M, dtype=np.int64)
    s_plus = digamma(a + M + 1.0) - digamma(a + 1.0)
    mn = np.minimum(M, N)
    s_minus = digamma(a) - digamma(a - mn)
    over = M > N
    if np.any(over):
        s_minus = s_minus - np.where(
            over, digamma(M - N + 0.5) - digamma(0.5), 0.0
        )
    out = (1.0 / a + s_plus + s_minus) / (math.pi * block_n**2)
    return float(out) if out.ndim == 0 else out


def fejer_block_max(block_n: int) -> float:
    """max |S_M(0)| over the block's own dyadic window
    M in (2^{(n-1)^3}, 2^{n^3}].

    S_M(0) increases while m < alpha (all cosine coefficients positive) and
    decreases afterwards, so the window maximum sits at the peak
    M = 2^{n^3 - 1} when the window contains it and at a window edge
    otherwise.  The windows are disjoint: each block is measured at its own
    frequency scale.
    """
    lo = 2 ** ((block_n - 1) ** 3)
    hi = 2 ** (block_n**3)
    peak = 2 ** (block_n**3 - 1)
    candidates = {min(max(peak, lo + 1), hi), lo + 1, hi}
    return max(abs(fejer_partial_sum_at_zero(block_n, M)) for M in candidates)


def fejer_partial_sums(block_n: int, M_list: Sequence[int]) -> ConvergenceReport:
    """Partial sums S_M(g_block; 0) for the given M, with the cross-block
    verdict: the per-window maxima of blocks 1..block_n strictly increase."""
    M_list = list(M_list)
    values = [float(fejer_partial_sum_at_zero(block_n, M)) for M in M_list]
    maxima = [fejer_block_max(n) for n in range(1, block_n + 1)]
    verdict = all(b > a for a, b in zip(maxima, maxima[1:]))
    return ConvergenceReport(
        kind="pointwise",
        points=[0.0],
        indices=M_list,
        values=values,
        verdict=verdict,
        details={"block_maxima": maxima, "alpha": _alpha(block_n)},
    )


# ---------------------------------------------------------------------------
# appendix lemma bounds

def lemma_suite(
    n_max: int = 500,
    grid: int = 10**5,
    bernstein_samples: int = 10**4,
    seed: int = 20240809,
) -> Dict:
    """Check the three bound families for n <= n_max:

    * 2 sqrt(n)/pi <= ||Ut_n||_inf <= sqrt(4(n+1)/pi) (lower bound certified
      at cos(pi/(2(n+1))); upper bound with 1e-8 slack);
    * ||Ut_{2n} - Ut_{2n+2}||_inf <= sqrt(8/pi) + 1e-8;
    * |Pt_n(x)| < sqrt(2/pi) (1-x^2)^{-1/4} at random (n, x) pairs.

    Returns worst margins (nonnegative = pass) per family.
    """
    pts = cheb_points(grid)
    deg_max = 2 * n_max + 2

    # certification points: row n evaluated at its own cos(pi/(2(n+1)))
    cert_x = np.cos(np.pi / (2.0 * (np.arange(1, n_max + 1) + 1.0)))
    cert_vals = np.empty(n_max + 1)
    for n, vals in iter_chebU_weighted(cert_x, n_max):
        if n >= 1:
            cert_vals[n] = abs(vals[n - 1])

    norms = np.zeros(deg_max + 1)
    pair_norms = np.zeros(n_max + 1)
    prev2 = None
    prev1 = None
    for n, vals in iter_chebU_weighted(pts, deg_max):
        norms[n] = np.max(np.abs(vals))
        if n >= 2 and n % 2 == 0:
            pair_norms[(n - 2) // 2] = np.max(np.abs(prev2 - vals))
        prev2, prev1 = prev1, vals.copy()

    ns = np.arange(1, n_max + 1, dtype=float)
    measured = np.maximum(norms[1 : n_max + 1], cert_vals[1:])
    lower_margin = float(np.min(measured - 2.0 * np.sqrt(ns) / np.pi))
    upper_margin = float(
        np.min(np.sqrt(4.0 * (ns + 1.0) / np.pi) + 1e-8 - norms[1 : n_max + 1])
    )
    pair_margin = float(
        np.min(SQRT_8_OVER_PI + 1e-8 - pair_norms[1 : n_max + 1])
    )

    rng = np.random.default_rng(seed)
    deg = rng.integers(0, n_max + 1, size=bernstein_samples)
    xs = rng.uniform(-1.0, 1.0, size=bernstein_samples)
    vals = np.empty(bernstein_samples)
    p_prev = np.ones_like(xs)
    p = xs.copy()
    vals[deg == 0] = math.sqrt(0.5)
    for k in range(1, int(deg.max()) + 1):
        sel = deg == k
        if np.any(sel):
            vals[sel] = np.sqrt(k + 0.5) * np.abs(p[sel])
        p_prev, p = p, ((2 * k + 1) * xs * p - k * p_prev) / (k + 1)
    bern_bound = math.sqrt(2.0 / math.pi) * (1.0 - xs**2) ** -0.25
    bern_margin = float(np.min(bern_bound - vals))
    zero_margin = float(
        math.sqrt(2.0 / math.pi)
        - max(
            abs(legendre_normalized(n, 0.0)) for n in range(0, n_max + 1)
        )
    )

    report = {
        "n_max": n_max,
        "grid": grid,
        "unbound": {
            "lower_margin": lower_margin,
            "upper_margin": upper_margin,
            "pass": lower_margin >= 0.0 and upper_margin >= 0.0,
        },
        "pair_difference": {
            "ceiling": SQRT_8_OVER_PI,
            "margin": pair_margin,
            "pass": pair_margin >= 0.0,
        },
        "bernstein": {
            "samples": bernstein_samples,
            "margin": bern_margin,
            "zero_point_margin": zero_margin,
            "pass": bern_margin > 0.0 and zero_margin > 0.0,
        },
    }
    report["all_pass"] = all(
        report[k]["pass"] for k in ("unbound", "pair_difference", "bernstein")
    )
    return report


def g_closed_form(x) -> np.ndarray:
    """log(4 / ((1 + sqrt(x))^2 (1 + x))), the closed form of
    sum (-1)^n P_{2n}(x)/n on [1/2, 1]."""
    x = np.asarray(x, dtype=float)
    return np.log(4.0 / ((1.0 + np.sqrt(x)) ** 2 * (1.0 + x)))


def g_closedform_check(x_list: Sequence[float], N: int) -> Dict:
    """Pair-averaged partial sums of sum (-1)^n P_{2n}(x)/n versus the
    closed form; valid for x in [1/2, 1]."""
    xs = np.asarray(list(x_list), dtype=float)
    if np.any(xs < 0.5) or np.any(xs > 1.0):
        raise OutOfValidityError("the closed form holds on [1/2, 1]")
    if N < 10:
        raise ValueError("N must be >= 10")
    p_prev = np.ones_like(xs)
    p = xs.copy()
    s = np.zeros_like(xs)
    s_N = None
    for k in range(1, 2 * (N + 1) + 1):
        p_prev, p = p, ((2 * k + 1) * xs * p - k * p_prev) / (k + 1)
        if (k + 1) % 2 == 0:
            n = (k + 1) // 2
            s = s + (-1.0) ** n * p / n
            if n == N:
                s_N = s.copy()
    averaged = 0.5 * (s_N + s)
    closed = g_closed_form(xs)
    dev = np.abs(averaged - closed)
    return {
        "x": xs.tolist(),
        "partial": averaged.tolist(),
        "closed_form": closed.tolist(),
        "deviation": dev.tolist(),
        "max_deviation": float(np.max(dev)),
    }
