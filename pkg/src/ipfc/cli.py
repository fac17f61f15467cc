"""Command-line interface: evolve, converge, render, spectrum.

Exit codes: 0 success, 2 configuration error, 3 numerical blowup,
4 I/O or data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .config import load_config
from .drivers import format_converge_table, run_converge, run_evolve
from .errors import BlowupError, ConfigError, DataError
from .field import read_dump
from .reporting import render_physical, spectrum_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_IO = 4


def _parse_floats(text: str, what: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{what} must be comma-separated numbers, got {text!r}") from exc


def _parse_resolution(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"resolution must look like 256 or 256x256, got {text!r}") from exc


def _load_field(dump: Path, config: Path):
    cfg = load_config(config)
    return cfg, read_dump(dump, cfg.lattice)


def _cmd_evolve(args: argparse.Namespace) -> int:
    result = run_evolve(load_config(args.config))
    print(f"finished at t={result.state.t:g} after {result.state.step_index} steps")
    print(f"energy log: {result.csv_path}")
    for path in result.dump_paths:
        print(f"dump: {path}")
    if result.figure_path is not None:
        print(f"figure: {result.figure_path}")
    return EXIT_OK


def _cmd_converge(args: argparse.Namespace) -> int:
    result = run_converge(load_config(args.config))
    print(format_converge_table(result))
    print(f"table: {result.csv_path}")
    if result.figure_path is not None:
        print(f"figure: {result.figure_path}")
    return EXIT_OK


def _cmd_render(args: argparse.Namespace) -> int:
    cfg, field = _load_field(args.dump, args.config)
    render = cfg.output.render
    bbox = _parse_floats(args.bbox, "--bbox") if args.bbox else (
        render.bbox if render else None)
    resolution = _parse_resolution(args.resolution) if args.resolution else (
        render.resolution if render else None)
    if bbox is None or resolution is None:
        raise ConfigError("render needs --bbox and --resolution "
                          "(or an [output.render] block in the config)")
    threshold = args.threshold if args.threshold is not None else (
        render.threshold if render else 0.0)
    out = args.out if args.out else args.dump.with_suffix(".pgm")
    render_physical(field, bbox, resolution, threshold, out)
    print(f"image: {out}")
    return EXIT_OK


def _cmd_spectrum(args: argparse.Namespace) -> int:
    _, field = _load_field(args.dump, args.config)
    report = spectrum_report(field, args.top)
    width = max(len(str(entry.index)) for entry in report)
    print(f"{'index':<{width}s}  {'|k|':>12s}  {'magnitude':>13s}")
    for entry in report:
        radius = sum(v * v for v in entry.wavevector) ** 0.5
        print(f"{str(entry.index):<{width}s}  {radius:12.8f}  {entry.magnitude:13.6e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipfc",
        description="Spectral solver for multi-length-scale phase-field "
                    "crystal evolution on projected lattices.")
    sub = parser.add_subparsers(dest="command", required=True)

    evolve = sub.add_parser("evolve", help="march a configured run to T")
    evolve.add_argument("config", type=Path)
    evolve.set_defaults(func=_cmd_evolve)

    converge = sub.add_parser("converge", help="error/rate table vs a fine reference")
    converge.add_argument("config", type=Path)
    converge.set_defaults(func=_cmd_converge)

    render = sub.add_parser("render", help="render a coefficient dump to PGM")
    render.add_argument("dump", type=Path)
    render.add_argument("--config", type=Path, required=True,
                        help="config supplying the lattice geometry")
    render.add_argument("--bbox", help="x0,x1 (1D) or x0,x1,y0,y1 (2D)")
    render.add_argument("--resolution", help="W (1D) or WxH (2D)")
    render.add_argument("--threshold", type=float,
                        help="skip modes with |coeff| below this")
    render.add_argument("--out", type=Path)
    render.set_defaults(func=_cmd_render)

    spectrum = sub.add_parser("spectrum", help="strongest modes of a dump")
    spectrum.add_argument("dump", type=Path)
    spectrum.add_argument("--config", type=Path, required=True,
                          help="config supplying the lattice geometry")
    spectrum.add_argument("--top", type=int, default=24)
    spectrum.set_defaults(func=_cmd_spectrum)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowupError as exc:
        print(f"blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (DataError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
