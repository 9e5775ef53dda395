"""Singular value expansions of rank-R cross approximants.

The skeleton factors Phi(x) = [phi_1 .. phi_R] and Psi(y) are orthonormalized
by a quasimatrix QR (a weighted-sample Householder QR that is exact for
polynomial columns), the small matrix R1 C R2^T gets a dense SVD, and the
singular functions are assembled as the corresponding linear combinations:

    K_R(x, y) = sum_j sigma_j u_j(x) v_j(y),
    u_j = sum_s U_sj Q^left_s,   v_j = sum_s V_sj Q^right_s.

``dense_svd_oracle`` provides the brute-force alternative (sample, weight,
matrix SVD) used to validate the computed spectra.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .chebapprox import (
    ChebSeries,
    Interval,
    cheb_coeffs_from_values,
    clenshaw_curtis,
    evaluate,
)
from .exceptions import IntegrityError, ParseError
from .gallery import KernelSpec
from .skeleton import Skeleton

DROP_TOL = 1e-15
RANK_DEFICIENCY_TOL = 1e-13


@dataclass(frozen=True)
class Quasimatrix:
    """An ordered collection of ChebSeries columns on a common interval."""

    columns: Tuple[ChebSeries, ...]
    domain: Interval

    def __post_init__(self):
        for col in self.columns:
            if col.domain != self.domain:
                raise ValueError("all columns must share the quasimatrix domain")

    @property
    def ncols(self) -> int:
        return len(self.columns)

    @property
    def max_degree(self) -> int:
        return max((c.degree for c in self.columns), default=0)

    def sample(self, pts) -> np.ndarray:
        """Values of all columns at ``pts`` as an (npts, ncols) matrix."""
        out = np.empty((len(pts), self.ncols))
        for j, col in enumerate(self.columns):
            out[:, j] = evaluate(col, pts)
        return out


def _series_from_sampled(vals: np.ndarray, domain: Interval) -> List[ChebSeries]:
    """Re-interpolate sampled columns (at the full Chebyshev grid) into
    ChebSeries, chopping float-noise tails."""
    coeffs = cheb_coeffs_from_values(vals)
    out = []
    for j in range(coeffs.shape[1]):
        c = coeffs[:, j]
        mx = np.max(np.abs(c))
        keep = np.nonzero(np.abs(c) >= 1e-15 * mx)[0] if mx > 0 else [0]
        last = keep[-1] if len(keep) else 0
        out.append(ChebSeries(c[: last + 1], domain))
    return out


def qr(A: Quasimatrix) -> Tuple[Quasimatrix, np.ndarray]:
    """Quasimatrix QR with L2-orthonormal columns and nonnegative R diagonal.

    Columns are sampled at m >= 2*maxdeg + 1 Chebyshev points, rows scaled by
    square roots of the Clenshaw-Curtis weights, and a dense Householder QR
    of the weighted matrix is mapped back to function columns.  Exact (up to
    rounding) because Q's columns stay inside the polynomial column span.
    """
    if A.ncols == 0:
        return A, np.zeros((0, 0))
    m = max(2 * A.max_degree + 1, A.ncols, 2)
    pts, w = clenshaw_curtis(m, A.domain)
    sw = np.sqrt(w)
    Qh, R = np.linalg.qr(sw[:, None] * A.sample(pts), mode="reduced")
    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    Qh = Qh * signs
    R = signs[:, None] * R
    # a column is dependent when its diagonal entry is negligible against
    # the column's own norm (columns with small norms are fine)
    diag = np.abs(np.diag(R))
    col_norms = np.linalg.norm(R, axis=0)
    deficient = diag <= RANK_DEFICIENCY_TOL * np.where(col_norms > 0, col_norms, 1.0)
    if np.any(deficient):
        warnings.warn(
            "quasimatrix is numerically rank-deficient; "
            "R has (near-)zero diagonal entries",
            stacklevel=2,
        )
    qcols = _series_from_sampled(Qh / sw[:, None], A.domain)
    return Quasimatrix(tuple(qcols), A.domain), R


def gram_matrix(Q: Quasimatrix) -> np.ndarray:
    """True L2 Gram matrix of the columns (exact quadrature)."""
    if Q.ncols == 0:
        return np.zeros((0, 0))
    pts, w = clenshaw_curtis(max(2 * Q.max_degree + 1, 2), Q.domain)
    S = Q.sample(pts)
    return S.T @ (S * w[:, None])


@dataclass(frozen=True)
class SVE:
    """A truncated singular value expansion sum_j sigma_j u_j(x) v_j(y)."""

    sigma: np.ndarray
    U: Quasimatrix
    V: Quasimatrix
    provenance: Dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float)
        s.flags.writeable = False
        object.__setattr__(self, "sigma", s)
        if not (len(s) == self.U.ncols == self.V.ncols):
            raise ValueError("sigma, U and V must have matching counts")

    @property
    def rank(self) -> int:
        return len(self.sigma)

    @property
    def x_domain(self) -> Interval:
        return self.U.domain

    @property
    def y_domain(self) -> Interval:
        return self.V.domain


def _combine_columns(Q: Quasimatrix, weights: np.ndarray) -> List[ChebSeries]:
    """Columns of Q combined by the coefficient matrix ``weights``."""
    L = max(len(c.coeffs) for c in Q.columns)
    C = np.zeros((L, Q.ncols))
    for j, col in enumerate(Q.columns):
        C[: len(col.coeffs), j] = col.coeffs
    M = C @ weights
    out = []
    for j in range(M.shape[1]):
        c = M[:, j]
        mx = np.max(np.abs(c))
        keep = np.nonzero(np.abs(c) >= 1e-15 * mx)[0] if mx > 0 else [0]
        out.append(ChebSeries(c[: keep[-1] + 1] if len(keep) else c[:1], Q.domain))
    return out


def sve_from_skeleton(skel: Skeleton, drop_tol: float = DROP_TOL) -> SVE:
    """QR both skeleton factors, SVD of R1 C R2^T, assemble and truncate.

    Singular values below ``drop_tol`` * sigma_1 are dropped.  The sign of
    each pair is fixed so that u_j's largest-magnitude coefficient is
    positive, making the output deterministic.
    """
    provenance = {"name": skel.name, "tol": skel.tol, "rank": skel.rank}
    if skel.rank == 0:
        return SVE(
            np.zeros(0),
            Quasimatrix((), skel.x_domain),
            Quasimatrix((), skel.y_domain),
            provenance,
        )
    QL, R1 = qr(Quasimatrix(tuple(skel.cols), skel.x_domain))
    QR_, R2 = qr(Quasimatrix(tuple(skel.rows), skel.y_domain))
    M = (R1 * skel.c[None, :]) @ R2.T
    Um, s, Vh = np.linalg.svd(M)
    keep = s > max(drop_tol * s[0] if len(s) else 0.0, 0.0)
    s = s[keep]
    ucols = _combine_columns(QL, Um[:, keep])
    vcols = _combine_columns(QR_, Vh[keep, :].T)
    for j in range(len(s)):
        cu = ucols[j].coeffs
        if cu[np.argmax(np.abs(cu))] < 0.0:
            ucols[j] = ChebSeries(-cu, ucols[j].domain)
            vcols[j] = ChebSeries(-vcols[j].coeffs, vcols[j].domain)
    return SVE(
        s,
        Quasimatrix(tuple(ucols), skel.x_domain),
        Quasimatrix(tuple(vcols), skel.y_domain),
        provenance,
    )


def sve_eval(e: SVE, x, y):
    """Evaluate sum_j sigma_j u_j(x) v_j(y); x and y broadcast."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast_shapes(xa.shape, ya.shape))
    for sj, u, v in zip(e.sigma, e.U.columns, e.V.columns):
        out = out + sj * np.asarray(evaluate(u, xa)) * np.asarray(evaluate(v, ya))
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(out)
    return out


def truncate(e: SVE, k: int) -> SVE:
    """Keep the first k triples (a best rank-k approximation in L2)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    k = min(k, e.rank)
    return SVE(
        e.sigma[:k],
        Quasimatrix(e.U.columns[:k], e.U.domain),
        Quasimatrix(e.V.columns[:k], e.V.domain),
        dict(e.provenance),
    )


def tail_l2(e: SVE, k: int) -> float:
    """sqrt(sum_{n > k} sigma_n^2) over the retained spectrum."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return math.sqrt(float(np.sum(e.sigma[k:] ** 2)))


def dense_svd_oracle(K: KernelSpec, n: int) -> np.ndarray:
    """Singular values of the kernel sampled on an n x n Chebyshev grid and
    scaled by square roots of the Clenshaw-Curtis weights on both axes;
    converges to the integral-operator spectrum as n grows."""
    if n < 2:
        raise ValueError("n must be >= 2")
    xg, wx = clenshaw_curtis(n, K.x_domain)
    yg, wy = clenshaw_curtis(n, K.y_domain)
    M = np.sqrt(wx)[:, None] * np.asarray(K(xg[:, None], yg[None, :]), float) * np.sqrt(wy)[None, :]
    return np.linalg.svd(M, compute_uv=False)


# ---------------------------------------------------------------------------
# persistence: { name, tol, x_domain, y_domain, sigma, u, v }

def sve_to_dict(e: SVE) -> Dict:
    return {
        "name": str(e.provenance.get("name", "")),
        "tol": float(e.provenance.get("tol", 0.0)),
        "x_domain": [e.x_domain.lo, e.x_domain.hi],
        "y_domain": [e.y_domain.lo, e.y_domain.hi],
        "sigma": [float(s) for s in e.sigma],
        "u": [[float(c) for c in col.coeffs] for col in e.U.columns],
        "v": [[float(c) for c in col.coeffs] for col in e.V.columns],
    }


def save_sve(e: SVE, path) -> None:
    with open(path, "w") as fh:
        json.dump(sve_to_dict(e), fh, indent=1)
        fh.write("\n")


def _validate_sve(e: SVE) -> None:
    s = e.sigma
    if np.any(s <= 0.0):
        raise IntegrityError("singular values must be strictly positive")
    if np.any(np.diff(s) > 0.0):
        raise IntegrityError("singular values must be nonincreasing")
    for Q in (e.U, e.V):
        if Q.ncols:
            G = gram_matrix(Q)
            dev = float(np.max(np.abs(G - np.eye(Q.ncols))))
            if dev > 1e-10:
                raise IntegrityError(
                    f"singular functions are not orthonormal (Gram deviation {dev:.3e})"
                )


def load_sve(path) -> SVE:
    try:
        with open(path) as fh:
            data = json.load(fh)
        name = data["name"]
        tol = data["tol"]
        xd = Interval(*map(float, data["x_domain"]))
        yd = Interval(*map(float, data["y_domain"]))
        sigma = np.asarray(data["sigma"], dtype=float)
        ucols = tuple(ChebSeries(np.asarray(c, float), xd) for c in data["u"])
        vcols = tuple(ChebSeries(np.asarray(c, float), yd) for c in data["v"])
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse expansion file {path}: {exc}") from exc
    try:
        e = SVE(
            sigma,
            Quasimatrix(ucols, xd),
            Quasimatrix(vcols, yd),
            {"name": name, "tol": tol, "rank": len(sigma)},
        )
    except ValueError as exc:
        raise IntegrityError(str(exc)) from exc
    _validate_sve(e)
    return e
