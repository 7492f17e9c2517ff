"""Monte-Carlo uncoded BER for 1-bit downlink precoders.

Per channel realization: draw ``H``, the transmitter's estimate ``H_e``, a
block of random symbol vectors and receiver noise, then for every precoder
and transmit power run ``precode -> quantize -> sqrt(Ptx/N) H -> + noise ->
detect`` and count bit errors.

Every channel index owns its own random streams derived from
``(seed, channel index)``, and the same channels, symbols and noise are used
for every precoder, transmit power and CSI-error level. Curves are therefore
paired, and results do not depend on how channels are spread over workers.
The MSM transmit vector does not depend on ``Ptx`` and is computed once per
symbol vector.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import channel as chan
from .lp import LpOptions, LpSolution
from .precoding import msm_precode, quantize, wf_matrix, wf_precode
from .pskmod import PskConstellation, detect, gray_decode

__all__ = [
    "MSM",
    "WF_Q",
    "WF_UNQ",
    "PRECODERS",
    "SimConfig",
    "BerRecord",
    "ChannelResult",
    "run_symbol",
    "simulate_channel",
    "run_point",
    "run_sweep",
    "default_workers",
]

MSM = "MSM"
WF_Q = "WF+Q"
WF_UNQ = "WF-unq"
PRECODERS = (MSM, WF_Q, WF_UNQ)

NOISE_VAR = 1.0
LOW_CONFIDENCE_ERRORS = 10

# child stream ids under each channel index
_S_CHANNEL, _S_CSI, _S_BITS, _S_NOISE = range(4)


def _as_tuple(val) -> tuple:
    if isinstance(val, (str, bytes)) or not isinstance(val, Iterable):
        return (val,)
    return tuple(val)


@dataclass(frozen=True)
class SimConfig:
    """Monte-Carlo protocol. ``ptx_grid`` holds linear transmit powers.

    ``upsilon2`` may be a single CSI-error variance or a sequence of them; it
    is stored as a tuple.
    """

    N: int = 128
    M: int = 16
    D: int = 4
    ptx_grid: tuple[float, ...] = (1.0, 10.0, 100.0)
    n_symbols_per_channel: int = 1000
    n_channels: int = 100
    upsilon2: tuple[float, ...] = (0.0,)
    precoders: tuple[str, ...] = PRECODERS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ptx_grid", tuple(float(p) for p in _as_tuple(self.ptx_grid)))
        object.__setattr__(self, "upsilon2", tuple(float(u) for u in _as_tuple(self.upsilon2)))
        object.__setattr__(self, "precoders", tuple(_as_tuple(self.precoders)))
        PskConstellation(self.D)  # validates the order
        for name in ("N", "M", "n_symbols_per_channel", "n_channels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.M > self.N:
            raise ValueError(f"need N >= M, got N={self.N}, M={self.M}")
        if not self.ptx_grid or min(self.ptx_grid) <= 0:
            raise ValueError("ptx_grid must be non-empty and positive")
        if not self.upsilon2 or min(self.upsilon2) < 0:
            raise ValueError("upsilon2 values must be non-empty and non-negative")
        if not self.precoders or set(self.precoders) - set(PRECODERS):
            raise ValueError(f"precoders must be a non-empty subset of {PRECODERS}, got {self.precoders}")

    @property
    def constellation(self) -> PskConstellation:
        return PskConstellation(self.D)

    @property
    def bits_per_vector(self) -> int:
        return self.M * self.constellation.bits_per_symbol

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BerRecord:
    """Accumulated bit errors for one (precoder, Ptx, CSI-error) point.

    ``channel_checksum`` identifies the channel sequence that produced the
    record; it is not part of equality and is not serialized to CSV.
    """

    precoder: str
    ptx: float
    upsilon2: float
    bit_errors: int
    total_bits: int
    lp_iterations_mean: float | None = None
    lp_failures: int = 0
    channel_checksum: str = field(default="", compare=False, repr=False)

    @property
    def ber(self) -> float:
        return self.bit_errors / self.total_bits

    @property
    def ci95(self) -> float:
        """Normal-approximation 95% half-width."""
        p = self.ber
        return 1.96 * math.sqrt(p * (1.0 - p) / self.total_bits)

    @property
    def ptx_db(self) -> float:
        return 10.0 * math.log10(self.ptx)

    @property
    def low_confidence(self) -> bool:
        return self.bit_errors < LOW_CONFIDENCE_ERRORS


@dataclass
class ChannelResult:
    """Per-channel tallies keyed by ``(precoder, ptx, upsilon2)``."""

    index: int
    errors: dict = field(default_factory=dict)
    lp_iterations: dict = field(default_factory=dict)
    lp_solves: dict = field(default_factory=dict)
    lp_failures: dict = field(default_factory=dict)
    digest: bytes = b""


def _popcount_table(const: PskConstellation) -> np.ndarray:
    return np.array([int(w).bit_count() for w in range(const.order)])


def run_symbol(
    H_true,
    H_est,
    s,
    precoder: str,
    Ptx: float,
    rng,
    const: PskConstellation,
    *,
    noise=None,
    quantize_output: bool = True,
    lp_opts: LpOptions | None = None,
):
    """Transmit one symbol vector and count bit errors.

    The precoder sees ``H_est``; propagation uses ``H_true``. ``noise``
    overrides the AWGN draw (pass zeros for a noiseless link) and
    ``quantize_output=False`` bypasses the 1-bit DAC. ``WF-unq`` is never
    quantized.

    Returns ``(bit_errors, lp_solution)``; the LP record is ``None`` for
    linear precoders.
    """
    H_true = np.atleast_2d(H_true)
    M, N = H_true.shape
    s = np.asarray(s, dtype=complex).ravel()
    lp_sol: LpSolution | None = None
    if precoder == MSM:
        tv = msm_precode(H_est, s, const, lp_opts)
        x, lp_sol = tv.x, tv.lp
    elif precoder in (WF_Q, WF_UNQ):
        x = wf_precode(H_est, s, Ptx, NOISE_VAR).x
    else:
        raise ValueError(f"unknown precoder {precoder!r}")
    if quantize_output and precoder != WF_UNQ:
        x = quantize(x)
    if noise is None:
        noise = chan.draw_noise(M, rng)
    r = np.sqrt(Ptx / N) * (H_true @ x) + noise
    idx_hat = detect(r, const)
    idx_true = const.index_of(s)
    errors = int(np.sum(_popcount_table(const)[const.gray_map[idx_true] ^ const.gray_map[idx_hat]]))
    return errors, lp_sol


def _digest(H) -> bytes:
    return hashlib.sha256(np.ascontiguousarray(H).tobytes()).digest()


def simulate_channel(
    cfg: SimConfig,
    index: int,
    precoders: Sequence[str] | None = None,
    ptx_grid: Sequence[float] | None = None,
    upsilon2: Sequence[float] | None = None,
    lp_opts: LpOptions | None = None,
) -> ChannelResult:
    """Run all symbol vectors of channel realization ``index``.

    Omitted arguments default to the values in ``cfg``.
    """
    precoders = tuple(precoders or cfg.precoders)
    ptx_grid = tuple(ptx_grid or cfg.ptx_grid)
    ups_list = tuple(cfg.upsilon2 if upsilon2 is None else upsilon2)
    const = cfg.constellation
    N, M, K = cfg.N, cfg.M, cfg.n_symbols_per_channel
    root = chan.RngStream(cfg.seed, index)

    H = chan.draw_channel(M, N, root.child(_S_CHANNEL))
    bits = root.child(_S_BITS).generator().integers(0, 2, size=(K, M, const.bits_per_symbol))
    words = bits @ (1 << np.arange(const.bits_per_symbol - 1, -1, -1))
    idx_true = gray_decode(words)
    S = const.points[idx_true]  # (K, M)
    noise = chan.draw_noise(M, root.child(_S_NOISE), size=K)  # (K, M)
    pop = _popcount_table(const)

    res = ChannelResult(index=index, digest=_digest(H))

    def tally(key, X, powers):
        for ptx in powers:
            R = np.sqrt(ptx / N) * (X @ H.T) + noise
            idx_hat = detect(R, const)
            res.errors[(key, ptx, ups)] = int(np.sum(pop[const.gray_map[idx_true] ^ const.gray_map[idx_hat]]))

    for ups in ups_list:
        He = chan.perturb_csi(H, ups, root.child(_S_CSI))
        for pre in precoders:
            if pre == MSM:
                X = np.empty((K, N), dtype=complex)
                iters = fails = 0
                for k in range(K):
                    tv = msm_precode(He, S[k], const, lp_opts)
                    X[k] = tv.x
                    iters += tv.lp.iterations
                    fails += not tv.lp.optimal
                tally(pre, quantize(X), ptx_grid)
                for ptx in ptx_grid:
                    res.lp_iterations[(pre, ptx, ups)] = iters
                    res.lp_solves[(pre, ptx, ups)] = K
                    res.lp_failures[(pre, ptx, ups)] = fails
            else:
                for ptx in ptx_grid:
                    X = S @ wf_matrix(He, ptx, NOISE_VAR).T
                    if pre == WF_Q:
                        X = quantize(X)
                    tally(pre, X, (ptx,))
    return res


def default_workers() -> int:
    """Worker count from ``ONEBIT_THREADS``, else 1."""
    env = os.environ.get("ONEBIT_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"ONEBIT_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return 1


def _channel_job(args):
    cfg, index, precoders, ptx_grid, ups, lp_opts = args
    return simulate_channel(cfg, index, precoders, ptx_grid, ups, lp_opts)


def _run_channels(cfg, precoders, ptx_grid, ups, workers, lp_opts, progress):
    jobs = [(cfg, c, precoders, ptx_grid, ups, lp_opts) for c in range(cfg.n_channels)]
    workers = default_workers() if workers is None else max(1, int(workers))
    results = []
    if workers == 1:
        for done, job in enumerate(jobs, 1):
            results.append(_channel_job(job))
            if progress:
                progress(done, len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for done, r in enumerate(ex.map(_channel_job, jobs), 1):
                results.append(r)
                if progress:
                    progress(done, len(jobs))
    results.sort(key=lambda r: r.index)
    return results


def _aggregate(cfg, results, precoders, ptx_grid, ups_list) -> list[BerRecord]:
    h = hashlib.sha256()
    for r in results:
        h.update(r.digest)
    checksum = h.hexdigest()
    total_bits = cfg.n_channels * cfg.n_symbols_per_channel * cfg.bits_per_vector
    records = []
    for pre in precoders:
        for ups in ups_list:
            for ptx in ptx_grid:
                key = (pre, ptx, ups)
                errors = sum(r.errors[key] for r in results)
                if pre == MSM:
                    iters = sum(r.lp_iterations[key] for r in results)
                    solves = sum(r.lp_solves[key] for r in results)
                    fails = sum(r.lp_failures[key] for r in results)
                    mean_it = iters / solves
                else:
                    mean_it, fails = None, 0
                records.append(
                    BerRecord(
                        precoder=pre,
                        ptx=ptx,
                        upsilon2=ups,
                        bit_errors=errors,
                        total_bits=total_bits,
                        lp_iterations_mean=mean_it,
                        lp_failures=fails,
                        channel_checksum=checksum,
                    )
                )
    return records


def run_point(
    cfg: SimConfig,
    precoder: str,
    Ptx: float,
    upsilon2: float | None = None,
    *,
    workers: int | None = None,
    lp_opts: LpOptions | None = None,
) -> BerRecord:
    """BER of one precoder at one transmit power.

    ``upsilon2`` defaults to the first value in ``cfg.upsilon2``.
    """
    ups = cfg.upsilon2[0] if upsilon2 is None else float(upsilon2)
    results = _run_channels(cfg, (precoder,), (float(Ptx),), (ups,), workers, lp_opts, None)
    return _aggregate(cfg, results, (precoder,), (float(Ptx),), (ups,))[0]


def run_sweep(
    cfg: SimConfig,
    *,
    workers: int | None = None,
    lp_opts: LpOptions | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> list[BerRecord]:
    """All records of ``precoders x upsilon2 x ptx_grid``, in that nesting order."""
    results = _run_channels(cfg, cfg.precoders, cfg.ptx_grid, cfg.upsilon2, workers, lp_opts, progress)
    return _aggregate(cfg, results, cfg.precoders, cfg.ptx_grid, cfg.upsilon2)
