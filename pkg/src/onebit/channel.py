"""Rayleigh channel, CSI-error and receiver-noise generation.

All randomness flows through :class:`RngStream`, a ``(seed, stream_id)`` pair
that deterministically names an independent numpy ``Generator``. Parallel
work derives child streams instead of sharing a generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "draw_channel", "perturb_csi", "draw_noise", "complex_normal"]


@dataclass(frozen=True)
class RngStream:
    """Named, reproducible random stream.

    ``stream_id`` may be an int or a tuple of ints; the same pair always
    produces the same draws.
    """

    seed: int
    stream_id: int | tuple[int, ...] = 0

    def _key(self) -> tuple[int, ...]:
        sid = self.stream_id
        return tuple(sid) if isinstance(sid, tuple) else (int(sid),)

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.seed, self._key() + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed) & (2**64 - 1), spawn_key=self._key())
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def complex_normal(shape, rng, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples, ``variance`` per entry."""
    gen = _as_generator(rng)
    scale = np.sqrt(variance / 2.0)
    return scale * (gen.standard_normal(shape) + 1j * gen.standard_normal(shape))


def draw_channel(M: int, N: int, rng) -> np.ndarray:
    """i.i.d. unit-variance Rayleigh channel ``H`` of shape ``(M, N)``.

    ``rng`` is an :class:`RngStream`, a numpy ``Generator`` or a seed.
    """
    if M < 1 or N < 1:
        raise ValueError(f"channel dimensions must be positive, got M={M}, N={N}")
    return complex_normal((M, N), rng)


def perturb_csi(H, upsilon2: float, rng) -> np.ndarray:
    """Imperfect channel estimate ``H + Gamma``, ``Gamma ~ CN(0, upsilon2)`` i.i.d.

    The estimate is not re-normalized. ``upsilon2 = 0`` returns ``H`` itself
    without consuming randomness.
    """
    if upsilon2 < 0:
        raise ValueError(f"CSI error variance must be non-negative, got {upsilon2}")
    H = np.asarray(H)
    if upsilon2 == 0:
        return H
    return H + complex_normal(H.shape, rng, upsilon2)


def draw_noise(M: int, rng, size: int | None = None) -> np.ndarray:
    """Unit-variance complex AWGN for ``M`` receivers.

    With ``size`` given, returns ``size`` independent vectors as rows of a
    ``(size, M)`` array.
    """
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")
    shape = (M,) if size is None else (size, M)
    return complex_normal(shape, rng)
