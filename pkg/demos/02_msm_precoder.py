"""
Maximum-safety-margin precoding of one symbol vector
====================================================

Solve the precoding LP for a small system, compare with exhaustive search
over the 1-bit alphabet, and look at what quantization does to the margin.
"""

import numpy as np

from onebit.channel import RngStream, draw_channel
from onebit.precoding import brute_force_msm, msm_precode, quantize
from onebit.pskmod import PskConstellation, detect, min_margin

const = PskConstellation(4)
rng = RngStream(seed=3).generator()
M, N = 2, 6
H = draw_channel(M, N, rng)
s = const.points[rng.integers(0, const.order, M)]

tv = msm_precode(H, s, const)
print(f"LP status {tv.lp.status.value} after {tv.lp.iterations} iterations")
print(f"relaxed optimum delta*         = {tv.delta_star:.4f}")
print(f"worst-user margin of H x       = {min_margin(H @ tv.x, s, const):.4f}")

# Many entries of the relaxed solution already sit on the box corners.
on_corner = np.isclose(np.abs(tv.x.real), 1 / np.sqrt(2)) & np.isclose(np.abs(tv.x.imag), 1 / np.sqrt(2))
print(f"entries on a QPSK corner       = {on_corner.sum()} of {N}")

xq = quantize(tv.x)
print(f"margin after 1-bit quantizer   = {min_margin(H @ xq, s, const):.4f}")

xb, d_disc = brute_force_msm(H, s, const)
print(f"best margin over all 4^{N} inputs = {d_disc:.4f}  (never above delta*)")
print("noiseless detection correct   :", np.array_equal(detect(H @ xq, const), const.index_of(s)))
