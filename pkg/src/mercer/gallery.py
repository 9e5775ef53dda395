"""Built-in kernels: smooth test kernels and the counterexample constructions.

Every kernel is wrapped in a :class:`KernelSpec` carrying its domain and
metadata.  The counterexamples are

* ``k_abs``  -- sum_n (-1)^n / n^2 Pt_{2n}(x) Pt_{2n}(y): pointwise but not
  absolutely convergent (the absolute sums at (1, 1) grow harmonically);
* ``k_uni``  -- a localized construction on a partition of [-1, 1] into
  intervals of length 12/(pi^2 n^2): pointwise but not uniformly convergent;
* ``k_as``   -- its asymmetric cousin, with global left factors Ut_{2n};
* ``k_pt``   -- f(x - y) for an evenized Fejer-type f whose Fourier series
  misbehaves at 0, on [-pi, pi]^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .chebapprox import Interval, UNIT
from .exceptions import UnsupportedScaleError
from .orthopoly import chebU_weighted

PI_DOMAIN = Interval(-np.pi, np.pi)


@dataclass(frozen=True)
class KernelSpec:
    """A black-box bivariate kernel with domain and smoothness metadata.

    ``evaluator`` must be pure and accept numpy-broadcastable arguments.
    ``smoothness_r`` / ``variation_V`` feed the analytic decay bounds;
    ``slice_max_degree`` caps adaptive interpolation of kernel slices for
    kernels whose slices only converge algebraically (e.g. kinked ones).
    """

    name: str
    evaluator: Callable
    x_domain: Interval
    y_domain: Interval
    symmetric: bool
    smoothness_r: Optional[int] = None
    variation_V: Optional[float] = None
    slice_max_degree: Optional[int] = None

    def __call__(self, x, y):
        return self.evaluator(x, y)


@dataclass(frozen=True)
class IntervalPartition:
    """[-1, 1) split into I_n of length 12/(pi^2 n^2), capped at M intervals.

    ``prefix`` holds the right endpoints of I_1..I_M.  The uncovered tail
    near +1 has length at most 12/(pi^2 M) (1 + 1/M); evaluations beyond the
    cap are treated as zero ("truncated").
    """

    prefix: np.ndarray
    M: int

    @classmethod
    def build(cls, M: int = 10**5) -> "IntervalPartition":
        n = np.arange(1, M + 1, dtype=float)
        prefix = -1.0 + (12.0 / np.pi**2) * np.cumsum(1.0 / n**2)
        prefix.flags.writeable = False
        return cls(prefix=prefix, M=M)

    def left(self, m: int) -> float:
        return -1.0 if m == 1 else float(self.prefix[m - 2])

    def right(self, m: int) -> float:
        return float(self.prefix[m - 1])

    def length(self, m: int) -> float:
        return 12.0 / (np.pi**2 * m**2)

    def locate(self, x: float) -> int:
        """1-based index m with x in [left(m), right(m)); M + 1 beyond the cap."""
        return int(np.searchsorted(self.prefix, x, side="right")) + 1

    def covers(self, x: float) -> bool:
        return -1.0 <= x < self.right(self.M)

    def to_unit(self, m: int, x: float) -> float:
        """The linear bijection i_m from I_m onto [-1, 1]."""
        lo, hi = self.left(m), self.right(m)
        return (2.0 * x - lo - hi) / (hi - lo)


_DEFAULT_PARTITION = None


def default_partition() -> IntervalPartition:
    global _DEFAULT_PARTITION
    if _DEFAULT_PARTITION is None:
        _DEFAULT_PARTITION = IntervalPartition.build()
    return _DEFAULT_PARTITION


def v_function(n: int, x: float, partition: IntervalPartition) -> float:
    """The orthonormal localized functions: on I_m,
    v_{2m-1} = -(m pi/sqrt 6) Ut_{2m}(i_m(x)) and
    v_{2m}   = +(m pi/sqrt 6) Ut_{2m+2}(i_m(x)); zero elsewhere."""
    m = (n + 1) // 2
    if m > partition.M:
        return 0.0
    lo, hi = partition.left(m), partition.right(m)
    if not lo <= x < hi:
        return 0.0
    scale = m * np.pi / np.sqrt(6.0)
    u = partition.to_unit(m, x)
    if n == 2 * m - 1:
        return -scale * chebU_weighted(2 * m, u)
    return scale * chebU_weighted(2 * m + 2, u)


def _kabs_terms_scalar(x: float, y: float, n_terms: int):
    px_prev, px = 1.0, x
    py_prev, py = 1.0, y
    s = 0.0
    s_last = 0.0
    sign = -1.0
    for n in range(1, n_terms + 2):
        # advance from degree 2n-1 to 2n in both variables
        k = 2 * n - 1
        px_prev, px = px, ((2 * k + 1) * x * px - k * px_prev) / (k + 1)
        py_prev, py = py, ((2 * k + 1) * y * py - k * py_prev) / (k + 1)
        # Pt_{2n}(x) Pt_{2n}(y) = (2n + 1/2) P_{2n}(x) P_{2n}(y)
        s += sign * (2 * n + 0.5) / (n * n) * px * py
        sign = -sign
        if n == n_terms:
            s_last = s
        k = 2 * n
        px_prev, px = px, ((2 * k + 1) * x * px - k * px_prev) / (k + 1)
        py_prev, py = py, ((2 * k + 1) * y * py - k * py_prev) / (k + 1)
    return s_last, s


def _kabs_terms(x, y, n_terms: int):
    """Running partial sums S_N and S_{N+1} of the defining series of k_abs
    at broadcastable points, via one shared Legendre recurrence."""
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        s_last, s = _kabs_terms_scalar(float(x), float(y), n_terms)
        return np.asarray(s_last), np.asarray(s)
    xb, yb = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    px_prev = np.ones_like(xb)
    py_prev = np.ones_like(yb)
    px, py = xb.copy(), yb.copy()
    s = np.zeros_like(xb)
    s_last = None
    for k in range(1, 2 * (n_terms + 1) + 1):
        px_prev, px = px, ((2 * k + 1) * xb * px - k * px_prev) / (k + 1)
        py_prev, py = py, ((2 * k + 1) * yb * py - k * py_prev) / (k + 1)
        deg = k + 1
        if deg % 2 == 0:
            n = deg // 2
            # Pt_{2n}(x) Pt_{2n}(y) = (2n + 1/2) P_{2n}(x) P_{2n}(y)
            s = s + ((-1) ** n) * (2 * n + 0.5) / n**2 * px * py
            if n == n_terms:
                s_last = s.copy()
    return s_last, s


def k_abs_eval(x: float, y: float, n_terms: int = 2000):
    """Pair-averaged partial sum of the k_abs series and an absolute
    truncation-error estimate (half the last term gap)."""
    if n_terms < 2 or n_terms % 2:
        raise ValueError("n_terms must be an even integer >= 2")
    s_n, s_n1 = _kabs_terms(x, y, n_terms)
    value = 0.5 * (s_n + s_n1)
    est = 0.5 * np.abs(s_n1 - s_n)
    if value.ndim == 0:
        return float(value), float(est)
    return value, est


def k_uni_eval(x: float, y: float, partition: IntervalPartition) -> float:
    """Exact two-term value of k_uni: with m such that x in I_m,
    (pi^2 / 6m) [Ut_{2m+2}(x') Ut_{2m+2}(y') - Ut_{2m}(x') Ut_{2m}(y')]
    for y in I_m, else zero; zero beyond the partition cap."""
    m = partition.locate(x)
    if m > partition.M or partition.locate(y) != m:
        return 0.0
    xu = partition.to_unit(m, x)
    yu = partition.to_unit(m, y)
    return (np.pi**2 / (6.0 * m)) * (
        chebU_weighted(2 * m + 2, xu) * chebU_weighted(2 * m + 2, yu)
        - chebU_weighted(2 * m, xu) * chebU_weighted(2 * m, yu)
    )


def k_as_eval(x: float, y: float, partition: IntervalPartition) -> float:
    """The asymmetric kernel: with m such that y in I_m, only terms
    n = 2m-1, 2m survive, each weighted 1/(2m)^2, with left factors
    u_n(x) = Ut_{2n}(x) on the whole interval."""
    m = partition.locate(y)
    if m > partition.M:
        return 0.0
    w = 1.0 / (2.0 * m) ** 2
    return w * (
        chebU_weighted(2 * (2 * m - 1), x) * v_function(2 * m - 1, y, partition)
        + chebU_weighted(2 * (2 * m), x) * v_function(2 * m, y, partition)
    )


MAX_FEJER_BLOCKS = 3


def fejer_f(t: float, n_blocks: int = MAX_FEJER_BLOCKS):
    """Evenized Fejer-type function sum_{n<=n_blocks} sin((2^{n^3}+1)|t|/2)/n^2.

    The sine blocks themselves are odd, so the classical even extension from
    [0, pi] is taken (|t|); the 2 pi-periodic extension then has a pure
    cosine series.  Frequencies overflow double precision beyond three
    blocks (2^{4^3} ~ 1.8e19).
    """
    if not 1 <= n_blocks <= MAX_FEJER_BLOCKS:
        raise UnsupportedScaleError(
            f"n_blocks must be in 1..{MAX_FEJER_BLOCKS}, got {n_blocks}"
        )
    ta = np.abs(np.asarray(t, dtype=float))
    if np.any(ta > np.pi + 1e-12):
        raise ValueError("t must lie in [-pi, pi]")
    out = np.zeros_like(ta)
    for n in range(1, n_blocks + 1):
        out += np.sin((2.0**(n**3) + 1.0) * ta / 2.0) / n**2
    return float(out) if out.ndim == 0 else out


def _wrap_to_pi(d):
    return d - 2.0 * np.pi * np.round(d / (2.0 * np.pi))


def _vectorized(scalar_fn):
    vec = np.vectorize(scalar_fn, otypes=[float])

    def wrapped(x, y):
        out = vec(x, y)
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return float(out)
        return out

    return wrapped


BUILTIN_NAMES = (
    "tanh",
    "pyramid",
    "modulated_pyramid",
    "k_abs",
    "k_uni",
    "k_as",
    "k_pt",
    "separable",
    "zero",
)


def make_builtin(name: str, params: Optional[dict] = None) -> KernelSpec:
    """Construct a gallery kernel by name.

    Recognized params: ``scale`` (tanh, default 100), ``n_terms`` (k_abs),
    ``partition_m`` (k_uni / k_as cap), ``n_blocks`` (k_pt).
    """
    params = dict(params or {})

    def take(key, default):
        return params.pop(key, default)

    if name == "tanh":
        scale = float(take("scale", 100.0))
        spec = KernelSpec(
            name="tanh",
            evaluator=lambda x, y: np.tanh(scale * np.multiply(x, y) + 1.0),
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=True,
        )
    elif name == "pyramid":
        spec = KernelSpec(
            name="pyramid",
            evaluator=lambda x, y: np.maximum(
                0.0, 1.0 - np.abs(np.asarray(x, float)) - np.abs(np.asarray(y, float))
            ),
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=True,
            smoothness_r=1,
            variation_V=2.0,
            slice_max_degree=2**11,
        )
    elif name == "modulated_pyramid":
        spec = KernelSpec(
            name="modulated_pyramid",
            evaluator=lambda x, y: np.exp(
                -(np.asarray(x, float) ** 2 + np.asarray(y, float) ** 2) / 200.0
            )
            * np.maximum(
                0.0, 1.0 - np.abs(np.asarray(x, float)) - np.abs(np.asarray(y, float))
            ),
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=True,
            smoothness_r=1,
            variation_V=2.0,
            slice_max_degree=2**11,
        )
    elif name == "k_abs":
        n_terms = int(take("n_terms", 2000))
        spec = KernelSpec(
            name="k_abs",
            evaluator=lambda x, y: k_abs_eval(x, y, n_terms)[0],
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=True,
            slice_max_degree=2**11,
        )
    elif name in ("k_uni", "k_as"):
        m_cap = int(take("partition_m", 10**5))
        part = (
            default_partition()
            if m_cap == 10**5
            else IntervalPartition.build(m_cap)
        )
        core = k_uni_eval if name == "k_uni" else k_as_eval
        spec = KernelSpec(
            name=name,
            evaluator=_vectorized(lambda x, y: core(x, y, part)),
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=(name == "k_uni"),
            slice_max_degree=2**11,
        )
    elif name == "k_pt":
        n_blocks = int(take("n_blocks", MAX_FEJER_BLOCKS))
        spec = KernelSpec(
            name="k_pt",
            evaluator=lambda x, y: fejer_f(
                _wrap_to_pi(np.asarray(x, float) - np.asarray(y, float)), n_blocks
            ),
            x_domain=PI_DOMAIN,
            y_domain=PI_DOMAIN,
            symmetric=True,
        )
    elif name == "separable":
        spec = KernelSpec(
            name="separable",
            evaluator=lambda x, y: np.exp(np.asarray(x, float)) * np.sin(np.asarray(y, float)),
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=False,
        )
    elif name == "zero":
        spec = KernelSpec(
            name="zero",
            evaluator=lambda x, y: np.multiply(x, y) * 0.0,
            x_domain=UNIT,
            y_domain=UNIT,
            symmetric=True,
        )
    else:
        raise ValueError(f"unknown kernel {name!r}; choose from {BUILTIN_NAMES}")
    if params:
        raise ValueError(f"unrecognized params for {name!r}: {sorted(params)}")
    return spec
