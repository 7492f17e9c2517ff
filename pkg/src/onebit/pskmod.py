"""PSK constellations, Gray bit mapping, hard detection and symbol-region geometry.

Points of an order-``D`` constellation sit at angles ``(2d + 1) * pi / D`` so
that QPSK coincides with the 1-bit DAC alphabet ``{+-1/sqrt(2) +- j/sqrt(2)}``.
Each point owns an angular sector of half-width ``theta = pi / D``; the safety
margin of a received sample is its perpendicular distance to the nearest
boundary ray of the sector of its intended symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "PskConstellation",
    "RotatedCoords",
    "map_bits_to_symbols",
    "symbols_to_bits",
    "detect",
    "rotate_to_symbol_frame",
    "safety_margin",
    "min_margin",
    "gray_encode",
    "gray_decode",
]


def gray_encode(n):
    """Binary-reflected Gray code of ``n`` (scalar or integer array)."""
    n = np.asarray(n)
    return n ^ (n >> 1)


def gray_decode(g):
    """Inverse of :func:`gray_encode`."""
    g = np.array(g, copy=True)
    shift = g >> 1
    while np.any(shift):
        g ^= shift
        shift >>= 1
    return g


@dataclass(frozen=True)
class PskConstellation:
    """Unit-energy ``D``-PSK alphabet with a Gray labelling.

    Parameters
    ----------
    order : int
        Number of points ``D``; a power of two, at least 4.
    offset : bool
        Rotate the constellation by ``pi / D`` (the default). With the offset,
        ``D = 4`` reproduces the quantizer alphabet exactly.

    Attributes
    ----------
    points : ndarray, shape (D,)
        Point ``d`` at angle ``(2d + 1) pi / D`` (or ``2 d pi / D`` without offset).
    theta : float
        Half-angle of a decision sector, ``pi / D``.
    gray_map : ndarray, shape (D,)
        ``gray_map[d]`` is the integer value of the bit word carried by point ``d``.
    """

    order: int
    offset: bool = True
    points: np.ndarray = field(init=False, repr=False, compare=False)
    gray_map: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        D = self.order
        if not isinstance(D, (int, np.integer)) or D < 4 or D & (D - 1):
            raise ValueError(f"PSK order must be a power of two >= 4, got {D!r}")
        d = np.arange(D)
        phase = (2 * d + 1) if self.offset else 2 * d
        points = np.exp(1j * np.pi * phase / D)
        points.setflags(write=False)
        gmap = gray_encode(d)
        gmap.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "gray_map", gmap)

    @property
    def theta(self) -> float:
        return np.pi / self.order

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1

    def bits_of(self, index) -> np.ndarray:
        """Bit words (MSB first) of point indices; shape ``index.shape + (k,)``."""
        words = self.gray_map[np.asarray(index)]
        k = self.bits_per_symbol
        shifts = np.arange(k - 1, -1, -1)
        return ((words[..., None] >> shifts) & 1).astype(np.uint8)

    def index_of(self, symbols) -> np.ndarray:
        """Point index of each (exact or near-exact) constellation symbol."""
        symbols = np.asarray(symbols)
        dist = np.abs(symbols[..., None] - self.points)
        return np.argmin(dist, axis=-1)


class RotatedCoords(NamedTuple):
    """Coordinates of a received sample in the frame of its intended symbol."""

    z_R: float
    z_I: float


def map_bits_to_symbols(bits, const: PskConstellation) -> np.ndarray:
    """Map a flat bit sequence to constellation symbols, MSB first per word.

    >>> map_bits_to_symbols([0, 0], PskConstellation(4))
    array([0.70710678+0.70710678j])
    """
    bits = np.asarray(bits, dtype=np.int64).ravel()
    k = const.bits_per_symbol
    if bits.size % k:
        raise ValueError(
            f"bit sequence length {bits.size} is not a multiple of log2(D) = {k}"
        )
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    words = bits.reshape(-1, k) @ (1 << np.arange(k - 1, -1, -1))
    return const.points[gray_decode(words)]


def symbols_to_bits(index, const: PskConstellation) -> np.ndarray:
    """Flat bit sequence carried by a sequence of point indices."""
    return const.bits_of(np.asarray(index).ravel()).ravel()


def detect(r, const: PskConstellation):
    """Hard PSK decision: index of the sector containing ``arg(r)``.

    Sectors are half-open ``[lower, upper)`` in angle, so samples exactly on a
    threshold go to the sector that starts there. ``r = 0`` detects as 0.
    Works elementwise on arrays.
    """
    r = np.asarray(r)
    D = const.order
    ang = np.angle(r)
    if not const.offset:
        ang = ang + const.theta
    ang = np.mod(ang, 2 * np.pi)
    idx = np.floor(ang / (2 * const.theta)).astype(np.int64) % D
    idx = np.where(r == 0, 0, idx)
    return idx if idx.ndim else int(idx)


def rotate_to_symbol_frame(y_m, s_m, const: PskConstellation | None = None):
    """Rotate ``y_m`` by the conjugate phase of the unit-modulus symbol ``s_m``.

    Returns ``RotatedCoords(z_R, z_I)``; array inputs give array fields.
    """
    w = np.asarray(y_m) * np.conj(s_m)
    return RotatedCoords(np.real(w), np.imag(w))


def safety_margin(z: RotatedCoords, theta: float):
    """Distance from the nearest sector boundary; negative outside the sector."""
    if not 0 < theta < np.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2), got {theta}")
    return z.z_R * np.sin(theta) - np.abs(z.z_I) * np.cos(theta)


def min_margin(y, s, const: PskConstellation) -> float:
    """Worst-user safety margin of the noiseless receive vector ``y``."""
    y = np.asarray(y).ravel()
    s = np.asarray(s).ravel()
    if y.size == 0 or y.shape != s.shape:
        raise ValueError(
            f"y and s must be non-empty and of equal length, got {y.shape} and {s.shape}"
        )
    return float(np.min(safety_margin(rotate_to_symbol_frame(y, s), const.theta)))
