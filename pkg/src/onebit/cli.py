"""Command-line BER sweeps: ``onebit-sim`` / ``python -m onebit``.

Writes ``ber.csv``, ``ber.svg`` and ``manifest.json`` into ``--out``.
Exit status is 0 on success, 2 on a usage error and 1 on a runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from os import PathLike
from pathlib import Path
from xml.sax.saxutils import escape

from . import __version__
from .sim import MSM, PRECODERS, BerRecord, SimConfig, default_workers, run_sweep

__all__ = [
    "CSV_HEADER",
    "RunManifest",
    "build_parser",
    "parse_args",
    "emit_csv",
    "read_csv",
    "emit_plot",
    "main",
]

CSV_HEADER = (
    "precoder",
    "ptx_db",
    "ptx_linear",
    "csi_var",
    "ber",
    "ci95",
    "bit_errors",
    "total_bits",
    "lp_iter_mean",
    "lp_failures",
)

FULL_DEFAULTS = dict(antennas=128, users=16, symbols=1000, channels=100)
QUICK_DEFAULTS = dict(antennas=32, users=4, symbols=50, channels=10)
DEFAULT_PTX_DB = "-10,-5,0,5,10,15,20"


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("list must not be empty")
    return vals


def _precoder_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in PRECODERS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"precoders must be chosen from {', '.join(PRECODERS)}; got {text!r}")
    return names


def _psk_order(text: str) -> int:
    try:
        D = int(text)
    except ValueError:
        D = 0
    if D < 4 or D & (D - 1):
        raise argparse.ArgumentTypeError(f"PSK order must be a power of two >= 4, got {text!r}")
    return D


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="onebit-sim",
        description="Monte-Carlo uncoded BER of 1-bit massive-MIMO downlink precoders with PSK.",
    )
    p.add_argument("--antennas", type=int, help="base-station antennas N (default 128)")
    p.add_argument("--users", type=int, help="single-antenna users M (default 16)")
    p.add_argument("--psk", type=_psk_order, default=4, help="PSK order D (default 4)")
    p.add_argument("--ptx-db", type=_float_list, default=_float_list(DEFAULT_PTX_DB),
                   help=f"transmit powers in dB, comma separated (default {DEFAULT_PTX_DB})")
    p.add_argument("--symbols", type=int, help="symbol vectors per channel realization (default 1000)")
    p.add_argument("--channels", type=int, help="channel realizations (default 100)")
    p.add_argument("--csi-var", type=_float_list, default=[0.0],
                   help="CSI error variances, comma separated (default 0)")
    p.add_argument("--precoders", type=_precoder_list, default=list(PRECODERS),
                   help=f"comma-separated subset of {','.join(PRECODERS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("onebit-out"), help="output directory")
    p.add_argument("--quick", action="store_true",
                   help="small preset for smoke tests: N=32, M=4, 50 symbols, 10 channels")
    return p


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    preset = QUICK_DEFAULTS if args.quick else FULL_DEFAULTS
    for key, val in preset.items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    for key in ("antennas", "users", "symbols", "channels"):
        if getattr(args, key) < 1:
            parser.error(f"--{key} must be >= 1")
    if args.users > args.antennas:
        parser.error(f"--users ({args.users}) must not exceed --antennas ({args.antennas})")
    if any(u < 0 for u in args.csi_var):
        parser.error("--csi-var values must be non-negative")
    cfg = SimConfig(
        N=args.antennas,
        M=args.users,
        D=args.psk,
        ptx_grid=tuple(10.0 ** (db / 10.0) for db in args.ptx_db),
        n_symbols_per_channel=args.symbols,
        n_channels=args.channels,
        upsilon2=tuple(args.csi_var),
        precoders=tuple(args.precoders),
        seed=args.seed,
    )
    return cfg, args


def parse_args(argv=None) -> SimConfig:
    """Parse command-line flags into a :class:`SimConfig`; exits with status 2 on bad input."""
    return _parse(argv)[0]


def _fmt(x: float) -> str:
    # shortest string that round-trips exactly
    return repr(float(x))


def emit_csv(records, path: str | PathLike) -> None:
    """Write one CSV row per record, in the given order."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(
                [
                    r.precoder,
                    _fmt(r.ptx_db),
                    _fmt(r.ptx),
                    _fmt(r.upsilon2),
                    _fmt(r.ber),
                    _fmt(r.ci95),
                    r.bit_errors,
                    r.total_bits,
                    "" if r.lp_iterations_mean is None else _fmt(r.lp_iterations_mean),
                    r.lp_failures,
                ]
            )


def read_csv(path: str | PathLike) -> list[BerRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        BerRecord(
            precoder=row["precoder"],
            ptx=float(row["ptx_linear"]),
            upsilon2=float(row["csi_var"]),
            bit_errors=int(row["bit_errors"]),
            total_bits=int(row["total_bits"]),
            lp_iterations_mean=float(row["lp_iter_mean"]) if row["lp_iter_mean"] else None,
            lp_failures=int(row["lp_failures"]),
        )
        for row in rows
    ]


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
_W, _H = 800, 600
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 190, 40, 60


def emit_plot(records, path: str | PathLike) -> None:
    """Semilog-y SVG of BER against transmit power in dB.

    One series per ``(precoder, csi_var)``; zero-BER points are not drawn.
    Series with fewer than two drawable points are drawn as markers only.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to plot")
    if len({r.ptx for r in records}) < 2:
        warnings.warn("fewer than two transmit powers; drawing markers instead of lines", stacklevel=2)

    multi_csi = len({r.upsilon2 for r in records}) > 1
    series: dict[tuple[str, float], list[BerRecord]] = {}
    for r in records:
        series.setdefault((r.precoder, r.upsilon2), []).append(r)

    xs = [r.ptx_db for r in records]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    positive = [r.ber for r in records if r.ber > 0]
    y_lo = math.floor(math.log10(min(positive))) if positive else -6
    y_lo = min(y_lo, -1)
    y_hi = 0

    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def px(db):
        return _LEFT + (db - x_lo) / (x_hi - x_lo) * pw

    def py(ber):
        return _TOP + (y_hi - math.log10(ber)) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f"<!-- onebit {escape(__version__)} -->",
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        '<g font-family="sans-serif" font-size="12">',
    ]
    for e in range(y_lo, y_hi + 1):
        y = py(10.0**e)
        out.append(f'<line x1="{_LEFT}" y1="{y:.2f}" x2="{_LEFT + pw}" y2="{y:.2f}" stroke="#cccccc"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">1e{e}</text>')
    for db in sorted(set(xs)):
        x = px(db)
        out.append(f'<line x1="{x:.2f}" y1="{_TOP}" x2="{x:.2f}" y2="{_TOP + ph}" stroke="#eeeeee"/>')
        out.append(f'<text x="{x:.2f}" y="{_TOP + ph + 18}" text-anchor="middle">{db:g}</text>')
    out.append(f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{_H - 15}" text-anchor="middle">P_tx [dB]</text>')
    out.append(
        f'<text x="20" y="{_TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {_TOP + ph / 2:.2f})">uncoded BER</text>'
    )

    for i, ((pre, ups), recs) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        label = f"{pre} (csi_var={ups:g})" if multi_csi else pre
        pts = [(px(r.ptx_db), py(r.ber)) for r in sorted(recs, key=lambda r: r.ptx) if r.ber > 0]
        group = [f'<g class="series" data-label="{escape(label)}">']
        if len(pts) >= 2:
            coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            group.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        for x, y in pts:
            group.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        group.append("</g>")
        out.extend(group)
        ly = _TOP + 15 + 20 * i
        lx = _LEFT + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{escape(label)}</text>')

    out.append("</g>")
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


@dataclass
class RunManifest:
    config: dict
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: dict = field(default_factory=dict)

    def write(self, path: str | PathLike) -> None:
        Path(path).write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _progress(done: int, total: int) -> None:
    print(f"\rchannels {done}/{total}", end="\n" if done == total else "", file=sys.stderr, flush=True)


def main(argv=None) -> int:
    try:
        cfg, args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(config=cfg.to_dict(), started=_now())
        records = run_sweep(cfg, workers=default_workers(), progress=_progress)
        csv_path, svg_path = out / "ber.csv", out / "ber.svg"
        emit_csv(records, csv_path)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            emit_plot(records, svg_path)
        manifest.finished = _now()
        manifest.outputs = {"csv": str(csv_path), "plot": str(svg_path)}
        manifest.write(out / "manifest.json")
    except Exception as exc:  # runtime failure, reported as exit status 1
        print(f"onebit-sim: error: {exc}", file=sys.stderr)
        return 1

    for r in records:
        extra = f"  lp_iter={r.lp_iterations_mean:.2f}" if r.precoder == MSM else ""
        print(f"{r.precoder:7s} csi_var={r.upsilon2:<5g} ptx={r.ptx_db:7.2f} dB  ber={r.ber:.4e}{extra}")
    return 0
