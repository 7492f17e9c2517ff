"""
PSK symbol regions and safety margins
=====================================

Every PSK point owns an angular sector of half-width ``theta = pi / D``.
The safety margin of a received sample is its distance to the nearest sector
boundary, measured in the frame of the intended symbol.
"""

import numpy as np

from onebit.pskmod import (
    PskConstellation,
    detect,
    map_bits_to_symbols,
    rotate_to_symbol_frame,
    safety_margin,
)

const = PskConstellation(8)
print("8PSK points:", np.round(const.points, 3))
print("Gray words :", [format(int(w), "03b") for w in const.gray_map])

# bits -> symbols -> detection round trip
bits = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1])
s = map_bits_to_symbols(bits, const)
print("symbols    :", np.round(s, 3))
print("detected   :", detect(s, const))

# A sample pushed off its symbol: its margin shrinks and eventually turns negative.
s0 = const.points[0]
for offset in (0.0, 0.2, 0.4, 0.6):
    y = s0 * (1 + 1j * offset)
    z = rotate_to_symbol_frame(y, s0)
    print(f"z = ({z.z_R:.2f}, {z.z_I:.2f})  margin = {safety_margin(z, const.theta):+.4f}"
          f"  detected = {detect(y, const)}")
