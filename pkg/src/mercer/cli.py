"""Command-line front end.

Subcommands: ``sve`` (compute and save an expansion), ``figure1`` /
``figure2`` (decay and pivot data as CSV), ``decay`` (analytic bound
tables), ``verify`` (diagnostic suites), ``gallery`` (kernel listing).

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 I/O error.
Identical invocations produce byte-identical outputs; nothing here is
randomized.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import diagnostics
from .chebapprox import UNIT
from .decay import DecayParams, figure1_data, legendre_truncation_bound, singular_value_bound
from .exceptions import OutOfValidityError
from .gallery import BUILTIN_NAMES, KernelSpec, make_builtin
from .skeleton import gecp_approximate, l2_errors_by_rank
from .sve import dense_svd_oracle, load_sve, save_sve, sve_eval, sve_from_skeleton


class UsageError(Exception):
    pass


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                raise UsageError(f"--param value must be numeric, got {raw!r}")
        params[key] = value
    return params


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path, header, rows, comments=()):
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else _fmt(v) if isinstance(v, float) else v for v in row])


def _resolve_threads(args) -> int:
    env = os.environ.get("MERCER_THREADS")
    if env is not None:
        return int(env)
    return getattr(args, "threads", 1) or 1


def cmd_sve(args) -> int:
    try:
        kernel = make_builtin(args.kernel, _parse_params(args.param))
    except ValueError as exc:
        raise UsageError(str(exc))
    skel = gecp_approximate(kernel, tol=args.tol, max_rank=args.max_rank)
    expansion = sve_from_skeleton(skel)
    save_sve(expansion, args.out)
    sigma1 = float(expansion.sigma[0]) if expansion.rank else 0.0
    print(f"kernel={kernel.name} rank={expansion.rank} sigma1={_fmt(sigma1)} "
          f"residual={_fmt(skel.achieved_error)} converged={skel.converged}")
    return 0


def cmd_figure2(args) -> int:
    kernel = make_builtin("tanh", {"scale": args.scale})
    skel = gecp_approximate(kernel, tol=args.tol, max_rank=args.max_rank)
    _write_csv(
        args.out[0],
        ["step", "x", "y", "pivot_value"],
        [
            (j + 1, float(x), float(y), float(pv))
            for j, ((x, y), pv) in enumerate(zip(skel.pivots, skel.pivot_values))
        ],
        comments=[f"kernel=tanh scale={args.scale} tol={args.tol}"],
    )
    errs = l2_errors_by_rank(kernel, skel, args.l2_grid)
    sigma = dense_svd_oracle(kernel, args.oracle_n)
    tails = np.sqrt(np.cumsum((sigma**2)[::-1])[::-1])
    rows = []
    for r in range(1, skel.rank + 1):
        tail = float(tails[r]) if r < len(sigma) else 0.0
        rows.append((r, float(errs[r]), tail))
    _write_csv(
        args.out[1],
        ["r", "skeleton_l2_error", "oracle_tail"],
        rows,
        comments=[f"kernel=tanh scale={args.scale} tol={args.tol} "
                  f"l2_grid={args.l2_grid} oracle_n={args.oracle_n}"],
    )
    print(f"rank={skel.rank} residual={_fmt(skel.achieved_error)} "
          f"wrote {args.out[0]} {args.out[1]}")
    return 0


def cmd_figure1(args) -> int:
    try:
        kernel = make_builtin(args.kernel)
    except ValueError as exc:
        raise UsageError(str(exc))
    table = figure1_data(
        kernel, args.max_k, y_grid=args.y_grid, tol=args.tol, max_rank=args.max_rank
    )
    _write_csv(
        args.out,
        ["k", "sve_tail", "legendre_bound", "analytic_bound"],
        [
            (row.k, row.sve_tail, row.legendre_bound, row.analytic_bound)
            for row in table.rows
        ],
        comments=[
            f"kernel={table.kernel} y_grid={table.y_grid} "
            f"slice_tol={table.slice_tol} tol={args.tol}"
        ],
    )
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    return 0


def cmd_decay(args) -> int:
    try:
        lo, _, hi = args.k_range.partition(":")
        k_lo, k_hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--k-range expects a:b, got {args.k_range!r}")
    if k_lo < 0 or k_hi < k_lo:
        raise UsageError("--k-range must satisfy 0 <= a <= b")
    params = DecayParams(V=args.V, r=args.r, alpha=args.alpha)
    rows = []
    for k in range(k_lo, k_hi + 1):
        try:
            lb = legendre_truncation_bound(params, k)
            sb = singular_value_bound(params, k)
        except OutOfValidityError:
            lb = sb = None
        rows.append((k, lb, sb))
    _write_csv(
        args.out,
        ["k", "legendre_truncation_bound", "sigma_2k_bound"],
        rows,
        comments=[f"V={args.V} r={args.r} alpha={args.alpha}"],
    )
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_gallery(args) -> int:
    for name in BUILTIN_NAMES:
        spec = make_builtin(name)
        meta = [f"x=[{spec.x_domain.lo:g},{spec.x_domain.hi:g}]",
                f"y=[{spec.y_domain.lo:g},{spec.y_domain.hi:g}]",
                f"symmetric={spec.symmetric}"]
        if spec.smoothness_r is not None:
            meta.append(f"r={spec.smoothness_r}")
        if spec.variation_V is not None:
            meta.append(f"V={spec.variation_V:g}")
        print(f"{name:20s} " + " ".join(meta))
    return 0


# ---------------------------------------------------------------------------
# verification suites

def _suite_lemmas() -> dict:
    report = diagnostics.lemma_suite()
    return {"name": "lemmas", "passed": bool(report["all_pass"]), "report": report}


def _suite_kabs() -> dict:
    signed = diagnostics.kabs_signed_value(10**4)
    signed_ok = abs(signed - diagnostics.KABS_CORNER_LIMIT) <= 1e-3
    sums = {N: diagnostics.kabs_absolute_sum(N) for N in (10**2, 10**3, 10**4, 10**5)}
    floor = 2.0 * math.log(10.0) - 0.1
    growth_ok = all(
        sums[10 * N] - sums[N] >= floor for N in (10**2, 10**3, 10**4)
    )
    return {
        "name": "kabs",
        "passed": bool(signed_ok and growth_ok),
        "report": {
            "signed_value": signed,
            "signed_reference": diagnostics.KABS_CORNER_LIMIT,
            "absolute_sums": {str(k): v for k, v in sums.items()},
            "growth_floor": floor,
        },
    }


def _suite_kuni() -> dict:
    values = {m: diagnostics.kuni_term_norm(m, 10**5) for m in range(1, 51)}
    worst = min(values.values())
    return {
        "name": "kuni",
        "passed": bool(worst > 4.0 / 3.0),
        "report": {"min_term_norm": worst, "bound": 4.0 / 3.0},
    }


def _fejer_quadrature_coeffs(block_n: int, m_max: int) -> np.ndarray:
    """Numerical-quadrature oracle for the cosine coefficients."""
    a = (2.0 ** (block_n**3) + 1.0) / 2.0
    t, w = np.polynomial.legendre.leggauss(2000)
    t = 0.5 * np.pi * (t + 1.0)
    w = 0.5 * np.pi * w
    g = np.sin(a * t) / block_n**2
    out = np.empty(m_max + 1)
    out[0] = float(w @ g) / np.pi
    for m in range(1, m_max + 1):
        out[m] = 2.0 * float(w @ (g * np.cos(m * t))) / np.pi
    return out


def _suite_fejer() -> dict:
    report = diagnostics.fejer_partial_sums(3, [1, 2, 128, 256, 2**26, 2**27])
    coeff_dev = 0.0
    for block in (1, 2):
        closed = diagnostics.fejer_cos_coeffs(block, 8)
        quad = _fejer_quadrature_coeffs(block, 8)
        coeff_dev = max(coeff_dev, float(np.max(np.abs(closed - quad))))
    return {
        "name": "fejer",
        "passed": bool(report.verdict and coeff_dev <= 1e-10),
        "report": {
            "block_maxima": report.details["block_maxima"],
            "coefficient_deviation": coeff_dev,
            "partial_sums": dict(zip(map(str, report.indices), report.values)),
        },
    }


def _suite_oracle() -> dict:
    exp_kernel = KernelSpec("exp_xy", lambda x, y: np.exp(np.multiply(x, y)), UNIT, UNIT, True)
    s200 = dense_svd_oracle(exp_kernel, 200)
    s400 = dense_svd_oracle(exp_kernel, 400)
    self_dev = float(np.max(np.abs(s200[:10] - s400[:10])))
    one = KernelSpec("one", lambda x, y: np.multiply(x, y) * 0.0 + 1.0, UNIT, UNIT, True)
    s_one = dense_svd_oracle(one, 40)
    one_ok = abs(s_one[0] - 2.0) <= 1e-12 and float(np.max(s_one[1:])) <= 1e-13
    rank1 = KernelSpec("pt1_pt1", lambda x, y: 1.5 * np.multiply(x, y), UNIT, UNIT, True)
    s_r1 = dense_svd_oracle(rank1, 50)
    r1_ok = abs(s_r1[0] - 1.0) <= 1e-12
    return {
        "name": "oracle",
        "passed": bool(self_dev <= 1e-10 and one_ok and r1_ok),
        "report": {
            "exp_self_consistency": self_dev,
            "constant_kernel_sigma1": float(s_one[0]),
            "rank1_sigma1": float(s_r1[0]),
        },
    }


_SUITES = {
    "lemmas": _suite_lemmas,
    "kabs": _suite_kabs,
    "kuni": _suite_kuni,
    "fejer": _suite_fejer,
    "oracle": _suite_oracle,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    results = [_SUITES[name]() for name in names]
    passed = all(r["passed"] for r in results)
    print(json.dumps({"suites": results, "passed": passed}, indent=2, sort_keys=True))
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mercer",
        description="Truncated Mercer expansions of continuous kernels",
    )
    parser.add_argument("--threads", type=int, default=1,
                        help="reserved; MERCER_THREADS overrides")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sve", help="compute an expansion and save it as JSON")
    p.add_argument("--kernel", required=True)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-rank", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sve)

    p = sub.add_parser("figure2", help="pivot locations and per-rank L2 errors")
    p.add_argument("--out", nargs=2, required=True, metavar=("PIVOTS", "ERRS"))
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--scale", type=float, default=100.0)
    p.add_argument("--max-rank", type=int, default=256)
    p.add_argument("--l2-grid", type=int, default=1025)
    p.add_argument("--oracle-n", type=int, default=400)
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("figure1", help="singular value decay versus bounds")
    p.add_argument("--kernel", required=True,
                   choices=["pyramid", "modulated_pyramid"])
    p.add_argument("--max-k", type=int, default=60)
    p.add_argument("--y-grid", type=int, default=129)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-rank", type=int, default=160)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("decay", help="analytic bound table")
    p.add_argument("--V", type=float, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--k-range", required=True, metavar="A:B")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", required=True, choices=[*_SUITES, "all"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gallery", help="list built-in kernels")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_gallery)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _resolve_threads(args)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
