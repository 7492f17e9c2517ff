"""Dense linear programs in inequality form: maximize ``c @ v`` s.t. ``G @ v <= h``.

The default backend is a primal-dual interior-point method on the
homogeneous self-dual embedding with Mehrotra predictor-corrector steps. The
embedding yields either an optimal pair or a Farkas-type certificate, so
infeasible and unbounded problems are reported explicitly instead of making
the iteration diverge. ``method="simplex"`` selects HiGHS' dual simplex via
:func:`scipy.optimize.linprog`.

Rows of ``G`` are equilibrated (scaled to unit infinity norm) before solving
and all tolerances refer to the scaled problem.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from os import PathLike

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

__all__ = [
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "LpOptions",
    "solve",
    "estimate_iteration_cost",
    "dump_problem",
    "load_problem",
]


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    ITERATION_LIMIT = "IterationLimit"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class LpProblem:
    """maximize ``c @ v`` subject to ``G @ v <= h``."""

    c: np.ndarray
    G: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
        self.h = np.asarray(self.h, dtype=float).ravel()
        m, n = self.G.shape
        if self.c.size != n or self.h.size != m:
            raise ValueError(
                f"inconsistent LP dimensions: c has {self.c.size}, G is {m}x{n}, h has {self.h.size}"
            )
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.G)) and np.all(np.isfinite(self.h))):
            raise ValueError("LP data must be finite")

    @property
    def n_vars(self) -> int:
        return self.G.shape[1]

    @property
    def n_cons(self) -> int:
        return self.G.shape[0]


@dataclass
class LpSolution:
    v: np.ndarray
    objective: float
    status: LpStatus
    iterations: int
    max_violation: float
    duality_gap: float = np.nan
    infeasible: bool = False
    unbounded: bool = False
    z: np.ndarray | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class LpOptions:
    """Solver controls.

    ``feas_tol`` bounds the scaled primal violation and dual residual,
    ``gap_tol`` the duality gap relative to ``1 + |objective|``. The defaults
    are tighter than a 1e-8 / 1e-6 contract so downstream comparisons at
    1e-6 have headroom.
    """

    method: str = "ipm"
    feas_tol: float = 1e-9
    gap_tol: float = 1e-9
    cert_tol: float = 1e-8
    max_iter: int = 100
    step_damping: float = 0.99


def _equilibrate(G, h):
    norms = np.max(np.abs(G), axis=1)
    norms[norms == 0] = 1.0
    return G / norms[:, None], h / norms, norms


def _split_rows(G):
    """Indices of dense rows, and (row, column, value) of single-nonzero rows.

    Single-nonzero rows (bounds written as inequalities) only touch the
    diagonal of the normal-equation matrix.
    """
    nnz = np.count_nonzero(G, axis=1)
    single = np.flatnonzero(nnz == 1)
    dense = np.flatnonzero(nnz != 1)
    cols = np.argmax(G[single] != 0, axis=1)
    return dense, single, cols, G[single, cols]


def _violation(Gs, hs, v):
    if Gs.shape[0] == 0:
        return 0.0
    return float(max(0.0, np.max(Gs @ v - hs)))


def solve(p: LpProblem, opts: LpOptions | None = None, **kwargs) -> LpSolution:
    """Solve ``p``; keyword arguments override fields of ``opts``.

    Examples
    --------
    >>> sol = solve(LpProblem(c=[1.0], G=[[1.0], [-1.0]], h=[3.0, 0.0]))
    >>> sol.status.value, round(sol.objective, 8)
    ('Optimal', 3.0)
    """
    opts = opts or LpOptions()
    if kwargs:
        opts = LpOptions(**{**opts.__dict__, **kwargs})
    if opts.method == "ipm":
        return _solve_hsd(p, opts)
    if opts.method == "simplex":
        return _solve_highs(p, opts)
    raise ValueError(f"unknown LP method {opts.method!r}")


def _factor(K):
    try:
        return scipy.linalg.cho_factor(K, lower=False, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        reg = 1e-12 * max(1.0, float(np.max(np.abs(np.diag(K)))))
        return scipy.linalg.cho_factor(K + reg * np.eye(K.shape[0]), lower=False, check_finite=False)


def _solve_hsd(p: LpProblem, opts: LpOptions) -> LpSolution:
    G, h, rownorm = _equilibrate(p.G, p.h)
    f = -p.c  # minimize f @ x
    m, n = G.shape

    x = np.zeros(n)
    s = np.ones(m)
    z = np.ones(m)
    tau = kappa = 1.0
    fnorm = 1.0 + np.max(np.abs(f), initial=0.0)
    dense, single, single_cols, single_vals = _split_rows(G)
    Gd = G[dense]

    def result(status, it, infeasible=False, unbounded=False):
        v = x / tau
        zz = z / tau
        obj = float(p.c @ v)
        gap = abs(float(f @ v + h @ zz))
        return LpSolution(
            v=v,
            objective=obj,
            status=status,
            iterations=it,
            max_violation=_violation(G, h, v),
            duality_gap=gap,
            infeasible=infeasible,
            unbounded=unbounded,
            z=zz / rownorm,
        )

    for it in range(opts.max_iter + 1):
        rx = G.T @ z + f * tau
        rz = G @ x + s - h * tau
        rt = f @ x + h @ z + kappa
        mu = (s @ z + tau * kappa) / (m + 1)

        # convergence on the de-homogenized iterate
        xh, sh, zh = x / tau, s / tau, z / tau
        pres = np.max(np.abs(G @ xh + sh - h), initial=0.0)
        dres = np.max(np.abs(G.T @ zh + f), initial=0.0) / fnorm
        pobj, dobj = f @ xh, -h @ zh
        if (
            pres <= opts.feas_tol
            and dres <= opts.feas_tol
            and abs(pobj - dobj) <= opts.gap_tol * (1.0 + abs(pobj))
            and _violation(G, h, xh) <= opts.feas_tol
        ):
            return result(LpStatus.OPTIMAL, it)

        hz, fx = h @ z, f @ x
        if hz < 0 and np.max(np.abs(G.T @ z), initial=0.0) / -hz <= opts.cert_tol:
            return result(LpStatus.NUMERICAL_FAILURE, it, infeasible=True)
        if fx < 0 and np.max(np.abs(G @ x + s), initial=0.0) / -fx <= opts.cert_tol:
            return result(LpStatus.NUMERICAL_FAILURE, it, unbounded=True)
        if it == opts.max_iter:
            break

        d = z / s
        K = (Gd.T * d[dense]) @ Gd
        K[np.diag_indices(n)] += np.bincount(single_cols, d[single] * single_vals**2, minlength=n)
        try:
            cf = _factor(K)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            return result(LpStatus.NUMERICAL_FAILURE, it)
        u = G.T @ (d * h)
        q = scipy.linalg.cho_solve(cf, u - f, check_finite=False)
        dz1 = d * (G @ q - h)
        denom = f @ q + h @ dz1 - kappa / tau

        def newton(eta, r_sz, r_tk):
            e = eta * rz + r_sz / z
            pp = scipy.linalg.cho_solve(cf, -eta * rx - G.T @ (d * e), check_finite=False)
            dz0 = d * (G @ pp + e)
            dtau = (-eta * rt - f @ pp - h @ dz0 - r_tk / tau) / denom
            dx = pp + dtau * q
            dz = dz0 + dtau * dz1
            ds = (r_sz - s * dz) / z
            dkappa = (r_tk - kappa * dtau) / tau
            return dx, ds, dz, dtau, dkappa

        def max_step(ds, dz, dtau, dkappa):
            ratios = [1.0]
            for val, dval in ((s, ds), (z, dz)):
                neg = dval < 0
                if np.any(neg):
                    ratios.append(np.min(-val[neg] / dval[neg]))
            for val, dval in ((tau, dtau), (kappa, dkappa)):
                if dval < 0:
                    ratios.append(-val / dval)
            return min(ratios)

        # predictor (affine scaling)
        a_dx, a_ds, a_dz, a_dtau, a_dkappa = newton(1.0, -s * z, -tau * kappa)
        alpha = max_step(a_ds, a_dz, a_dtau, a_dkappa)
        mu_aff = (
            (s + alpha * a_ds) @ (z + alpha * a_dz)
            + (tau + alpha * a_dtau) * (kappa + alpha * a_dkappa)
        ) / (m + 1)
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        # corrector
        r_sz = -s * z + sigma * mu - a_ds * a_dz
        r_tk = -tau * kappa + sigma * mu - a_dtau * a_dkappa
        dx, ds, dz, dtau, dkappa = newton(1.0 - sigma, r_sz, r_tk)
        alpha = min(1.0, opts.step_damping * max_step(ds, dz, dtau, dkappa))
        if not np.all(np.isfinite(dx)) or alpha < 1e-12:
            return result(LpStatus.NUMERICAL_FAILURE, it)

        x = x + alpha * dx
        s = s + alpha * ds
        z = z + alpha * dz
        tau += alpha * dtau
        kappa += alpha * dkappa

        # keep the embedding well scaled
        scale = max(tau, 1.0)
        if scale > 1e6:
            x, s, z, tau, kappa = x / scale, s / scale, z / scale, tau / scale, kappa / scale

    return result(LpStatus.ITERATION_LIMIT, opts.max_iter)


def _solve_highs(p: LpProblem, opts: LpOptions) -> LpSolution:
    G, h, rownorm = _equilibrate(p.G, p.h)
    res = linprog(
        -p.c,
        A_ub=G,
        b_ub=h,
        bounds=(None, None),
        method="highs-ds",
        options={"maxiter": opts.max_iter * max(10, p.n_vars), "primal_feasibility_tolerance": opts.feas_tol,
                 "dual_feasibility_tolerance": opts.feas_tol},
    )
    nit = int(getattr(res, "nit", 0))
    if res.status == 2:
        return LpSolution(np.full(p.n_vars, np.nan), np.nan, LpStatus.NUMERICAL_FAILURE, nit, np.inf, infeasible=True)
    if res.status == 3:
        return LpSolution(np.full(p.n_vars, np.nan), np.inf, LpStatus.NUMERICAL_FAILURE, nit, np.inf, unbounded=True)
    if res.x is None:
        return LpSolution(np.full(p.n_vars, np.nan), np.nan, LpStatus.NUMERICAL_FAILURE, nit, np.inf)
    v = np.asarray(res.x, dtype=float)
    zs = -np.asarray(res.ineqlin.marginals, dtype=float)
    gap = abs(float(-p.c @ v + h @ zs))
    status = {0: LpStatus.OPTIMAL, 1: LpStatus.ITERATION_LIMIT}.get(res.status, LpStatus.NUMERICAL_FAILURE)
    return LpSolution(v, float(p.c @ v), status, nit, _violation(G, h, v), gap, z=zs / rownorm)


def estimate_iteration_cost(N: int, M: int) -> int:
    """Arithmetic operations per interior-point iteration on the precoding LP.

    ``max{(2N+1)^3, (2N+1)^2 (2M+4N), 4NM}``; the middle term dominates for
    every ``N, M >= 1``.
    """
    if N < 1 or M < 1:
        raise ValueError(f"N and M must be positive, got N={N}, M={M}")
    n = 2 * N + 1
    return max(n**3, n**2 * (2 * M + 4 * N), 4 * N * M)


def dump_problem(p: LpProblem, path: str | PathLike) -> None:
    """Write ``p`` as whitespace-separated text: ``n_vars n_cons``, c, G rows, h."""
    with open(path, "w") as fh:
        fh.write(f"{p.n_vars} {p.n_cons}\n")
        fh.write(" ".join(repr(float(a)) for a in p.c) + "\n")
        for row in p.G:
            fh.write(" ".join(repr(float(a)) for a in row) + "\n")
        fh.write(" ".join(repr(float(a)) for a in p.h) + "\n")


def load_problem(path: str | PathLike) -> LpProblem:
    with open(path) as fh:
        tokens = fh.read().split()
    n, m = int(tokens[0]), int(tokens[1])
    vals = np.array(tokens[2:], dtype=float)
    if vals.size != n + m * n + m:
        raise ValueError(f"expected {n + m * n + m} numbers after the header, found {vals.size}")
    return LpProblem(c=vals[:n], G=vals[n : n + m * n].reshape(m, n), h=vals[n + m * n :])
