"""
BER against transmit power
==========================

A reduced-size Monte-Carlo sweep comparing MSM with the Wiener-filter
baselines, written out as CSV and SVG. The full-size protocol is
``onebit-sim`` with default flags (N=128, M=16, 100 channels x 1000 symbols).
"""

from pathlib import Path

import numpy as np

from onebit.cli import emit_csv, emit_plot
from onebit.sim import SimConfig, run_sweep

ptx_db = np.arange(-6.0, 10.1, 2.0)
cfg = SimConfig(
    N=64,
    M=8,
    D=4,
    ptx_grid=tuple(10 ** (ptx_db / 10)),
    n_symbols_per_channel=100,
    n_channels=10,
    seed=1,
)
records = run_sweep(cfg)

for r in records:
    extra = f"  LP iterations {r.lp_iterations_mean:.1f}" if r.lp_iterations_mean else ""
    print(f"{r.precoder:7s} {r.ptx_db:6.1f} dB  BER {r.ber:.2e} +- {r.ci95:.1e}{extra}")

out = Path("demo-out")
out.mkdir(exist_ok=True)
emit_csv(records, out / "ber_qpsk.csv")
emit_plot(records, out / "ber_qpsk.svg")
print("wrote", out / "ber_qpsk.csv", "and", out / "ber_qpsk.svg")
