"""
Imperfect channel knowledge
===========================

The precoder only sees ``H_e = H + Gamma`` with ``Gamma`` i.i.d. of variance
``upsilon2``. Channels, symbols and noise are shared across the CSI levels,
so the curves differ only through the estimation error.
"""

import numpy as np

from onebit.sim import MSM, SimConfig, run_sweep

for D in (4, 8):
    ptx_db = np.array([0.0, 5.0, 10.0])
    cfg = SimConfig(
        N=64,
        M=8,
        D=D,
        ptx_grid=tuple(10 ** (ptx_db / 10)),
        n_symbols_per_channel=100,
        n_channels=5,
        upsilon2=(0.0, 0.1, 0.2),
        precoders=(MSM,),
        seed=2,
    )
    print(f"{D}PSK")
    for r in run_sweep(cfg):
        print(f"  csi_var {r.upsilon2:.1f}  {r.ptx_db:5.1f} dB  BER {r.ber:.2e}")
