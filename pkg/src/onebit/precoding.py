"""Symbol-wise maximum-safety-margin (MSM) precoding for 1-bit transmitters.

For a symbol vector ``s`` and channel ``H`` the MSM precoder chooses the
transmit vector ``x`` inside the box spanned by the QPSK alphabet so that the
worst user's noiseless receive sample ``(H x)_m`` lies as deep as possible in
the decision sector of ``s_m``. After rotating every user's row by
``conj(s_m)`` this is a linear program in ``v = [Re x; Im x; delta]``.

Also here: the 1-bit quantizer, a Wiener-filter baseline and an exhaustive
search over the discrete alphabet used as a test oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .lp import LpOptions, LpProblem, LpSolution, solve
from .pskmod import PskConstellation, min_margin

__all__ = [
    "MsmGeometry",
    "TransmitVector",
    "build_modified_channel",
    "build_real_matrices",
    "assemble_msm_lp",
    "msm_precode",
    "quantize",
    "wf_matrix",
    "wf_precode",
    "brute_force_msm",
    "BRUTE_FORCE_MAX_N",
]

INV_SQRT2 = 1.0 / np.sqrt(2.0)
BRUTE_FORCE_MAX_N = 8


@dataclass
class MsmGeometry:
    """Real-valued form of the rotated channel: ``A x' = Re(Ht x)``, ``B x' = Im(Ht x)``."""

    A: np.ndarray
    B: np.ndarray
    theta: float
    H_tilde: np.ndarray


@dataclass
class TransmitVector:
    """Relaxed precoder output ``x`` and the achieved LP margin ``delta_star``.

    ``lp`` holds the solver record for MSM and is ``None`` for linear
    precoders, whose ``delta_star`` is NaN.
    """

    x: np.ndarray
    delta_star: float = np.nan
    lp: LpSolution | None = None


def _check_unit(s):
    if not np.allclose(np.abs(s), 1.0, atol=1e-9):
        raise ValueError("symbols must have unit magnitude")


def build_modified_channel(H, s) -> np.ndarray:
    """``diag(conj(s)) @ H``: row ``m`` rotated by the conjugate phase of ``s_m``."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    s = np.asarray(s, dtype=complex).ravel()
    if s.size != H.shape[0]:
        raise ValueError(f"H has {H.shape[0]} rows but s has {s.size} entries")
    _check_unit(s)
    return np.conj(s)[:, None] * H


def build_real_matrices(H_tilde, theta: float = np.pi / 4) -> MsmGeometry:
    Ht = np.atleast_2d(np.asarray(H_tilde, dtype=complex))
    re, im = Ht.real, Ht.imag
    A = np.hstack([re, -im])
    B = np.hstack([im, re])
    return MsmGeometry(A=A, B=B, theta=theta, H_tilde=Ht)


def assemble_msm_lp(geom: MsmGeometry, N: int | None = None, M: int | None = None) -> LpProblem:
    """Stack sector and box constraints into ``max delta s.t. G v <= h``.

    The ``2M`` sector rows are ``[+-B - tan(theta) A | 1/cos(theta)]``, the
    ``4N`` box rows ``[+-I | 0]`` with right-hand side ``1/sqrt(2)``.
    """
    M_, twoN = geom.A.shape
    N_ = twoN // 2
    if (N is not None and N != N_) or (M is not None and M != M_):
        raise ValueError(f"geometry is {M_}x{N_}, requested {M}x{N}")
    N, M = N_, M_
    t = np.tan(geom.theta)
    col = np.full((M, 1), 1.0 / np.cos(geom.theta))
    sector = np.vstack(
        [
            np.hstack([geom.B - t * geom.A, col]),
            np.hstack([-geom.B - t * geom.A, col]),
        ]
    )
    eye = np.eye(2 * N)
    zeros = np.zeros((2 * N, 1))
    box = np.vstack([np.hstack([eye, zeros]), np.hstack([-eye, zeros])])
    G = np.vstack([sector, box])
    h = np.concatenate([np.zeros(2 * M), np.full(4 * N, INV_SQRT2)])
    c = np.zeros(2 * N + 1)
    c[-1] = 1.0
    return LpProblem(c=c, G=G, h=h)


def msm_precode(H, s, const: PskConstellation, opts: LpOptions | None = None) -> TransmitVector:
    """Maximum-safety-margin transmit vector for one symbol vector.

    Solver failures are not raised; the returned ``lp`` record carries the
    status and ``x`` holds the solver's best iterate.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    M, N = H.shape
    geom = build_real_matrices(build_modified_channel(H, s), const.theta)
    sol = solve(assemble_msm_lp(geom), opts)
    v = sol.v
    if not np.all(np.isfinite(v)):
        v = np.zeros(2 * N + 1)
    x = v[:N] + 1j * v[N : 2 * N]
    return TransmitVector(x=x, delta_star=float(v[-1]), lp=sol)


def quantize(x) -> np.ndarray:
    """1-bit DAC: ``(sign Re x + j sign Im x) / sqrt(2)`` with ``sign(0) = +1``."""
    x = np.asarray(x)
    re = np.where(np.real(x) >= 0, 1.0, -1.0)
    im = np.where(np.imag(x) >= 0, 1.0, -1.0)
    return (re + 1j * im) * INV_SQRT2


def wf_matrix(H, Ptx: float, noise_var: float = 1.0) -> np.ndarray:
    """Normalized Wiener-filter precoding matrix ``P`` of shape ``(N, M)``.

    ``P = beta * H^H (H H^H + (M noise_var / Ptx) I)^-1`` with ``beta`` such
    that ``||P||_F^2 = N``, i.e. ``E||P s||^2 = N`` for unit-energy symbols.
    Raises ``numpy.linalg.LinAlgError`` when the regularized Gram matrix is
    singular.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    M, N = H.shape
    if Ptx <= 0:
        raise ValueError(f"Ptx must be positive, got {Ptx}")
    gram = H @ H.conj().T + (M * noise_var / Ptx) * np.eye(M)
    if np.linalg.cond(gram) > 1e12:
        raise np.linalg.LinAlgError("channel Gram matrix is numerically singular")
    T = np.linalg.solve(gram, H).conj().T  # H^H gram^{-1}, gram is Hermitian
    fro = np.linalg.norm(T)
    return T * (np.sqrt(N) / fro)


def wf_precode(H, s, Ptx: float, noise_var: float = 1.0) -> TransmitVector:
    return TransmitVector(x=wf_matrix(H, Ptx, noise_var) @ np.asarray(s, dtype=complex).ravel())


def _o4_candidates(N: int) -> np.ndarray:
    o4 = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) * INV_SQRT2
    return np.array(list(itertools.product(o4, repeat=N)))


def brute_force_msm(H, s, const: PskConstellation):
    """Exhaustive search over ``O_4^N`` for the largest worst-user margin.

    Returns ``(xq, delta)`` for the best quantized vector. Refuses ``N > 8``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    s = np.asarray(s, dtype=complex).ravel()
    N = H.shape[1]
    if N > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force over 4^N candidates refused for N={N} > {BRUTE_FORCE_MAX_N}")
    X = _o4_candidates(N)
    W = (X @ H.T) * np.conj(s)
    th = const.theta
    margins = np.min(W.real * np.sin(th) - np.abs(W.imag) * np.cos(th), axis=1)
    best = int(np.argmax(margins))
    xq = X[best]
    # recompute via the public path so both routes agree exactly
    return xq, min_margin(H @ xq, s, const)
