"""Evolution and convergence drivers behind the command-line interface.

run_evolve marches the configured scheme, streaming one CSV row per
step (flushed eagerly so a blowup still leaves the rows written so far),
dumping coefficients at the configured cadence, and rendering images at
dump times when a render block is present.  run_converge produces the
error/rate table against a same-scheme fine reference.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, TextIO, Tuple

import numpy as np

from .config import RunConfig, initial_field
from .errors import BlowupError, ConfigError, DataError
from .field import SpectralField, norm_ap, write_dump
from .model import ModelParams, energy
from .reporting import convergence_figure, energy_figure, render_physical
from .sav_cn import SavState, init_state, integrate_cn, modified_energy
from .sdc import SdcConfig, integrate_sdc

CSV_COLUMNS = ("step", "t", "original_energy", "modified_energy", "R", "mass_abs")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class EvolveResult:
    state: SavState
    csv_path: Path
    dump_paths: List[Path]
    image_paths: List[Path]
    figure_path: Optional[Path]


class _EvolveLog:
    """Streams CSV rows and handles dump/render cadence."""

    def __init__(self, cfg: RunConfig, out_dir: Path, fh: TextIO):
        self.cfg = cfg
        self.out_dir = out_dir
        self.writer = csv.writer(fh)
        self.fh = fh
        self.writer.writerow(CSV_COLUMNS)
        self.rows: List[Tuple[float, float, float]] = []
        self.dump_paths: List[Path] = []
        self.image_paths: List[Path] = []
        self.last_state: Optional[SavState] = None

    def observe(self, state: SavState) -> None:
        params = self.cfg.model
        try:
            # a step can leave finite coefficients whose quartic density
            # still overflows; that is a blowup for logging purposes
            orig = energy(params, state.phi).total
        except DataError as exc:
            raise BlowupError(state.step_index,
                              f"energy overflow at step {state.step_index}") from exc
        mod = modified_energy(params, state)
        mass = abs(state.phi.dc())
        self.writer.writerow([state.step_index, _fmt(state.t), _fmt(orig),
                              _fmt(mod), _fmt(state.r), _fmt(mass)])
        self.fh.flush()
        self.rows.append((state.t, orig, mod))
        self.last_state = state
        every = self.cfg.output.dump_every
        if every > 0 and state.step_index % every == 0:
            self.dump(state)

    def dump(self, state: SavState) -> None:
        path = self.out_dir / f"state_{state.step_index:06d}.ipfc"
        if path not in self.dump_paths:
            write_dump(state.phi, path)
            self.dump_paths.append(path)
            render = self.cfg.output.render
            if render is not None:
                image = path.with_suffix(".pgm")
                render_physical(state.phi, render.bbox, render.resolution,
                                render.threshold, image)
                self.image_paths.append(image)


def run_evolve(cfg: RunConfig) -> EvolveResult:
    """March to T per the config; see the module docstring for artifacts."""
    out_dir = cfg.output.directory
    out_dir.mkdir(parents=True, exist_ok=True)
    phi0 = initial_field(cfg)
    csv_path = out_dir / cfg.output.energy_csv

    with open(csv_path, "w", newline="") as fh:
        log = _EvolveLog(cfg, out_dir, fh)
        try:
            if cfg.time.scheme == "cn":
                state = integrate_cn(cfg.model, phi0, cfg.time.T, cfg.time.NT,
                                     observer=log.observe)
            else:
                # Whole-interval method: rows appear once the sweeps finish,
                # at the (non-uniform) Chebyshev node times.  R is the frozen
                # provisional auxiliary value at each node.
                traj = integrate_sdc(cfg.model, phi0,
                                     SdcConfig(T=cfg.time.T, NT=cfg.time.NT,
                                               sweeps=cfg.time.sweeps))
                for n, t in enumerate(traj.nodes):
                    state = SavState(phi=traj.phi_corr[n], phi_prev=None,
                                     r_excess=float(traj.r_excess_prov[n]),
                                     sqrt_c1=traj.sqrt_c1, t=float(t), step_index=n)
                    log.observe(state)
        except BlowupError:
            # retain a last-good dump for post-mortem (initial state if the
            # failure preceded any completed step)
            log.dump(log.last_state or init_state(cfg.model, phi0))
            raise
        log.dump(state)

    figure_path = None
    if cfg.output.figures and log.rows:
        figure_path = out_dir / "energy.png"
        t, orig, mod = zip(*log.rows)
        energy_figure(figure_path, t, orig, mod)
    return EvolveResult(state=state, csv_path=csv_path, dump_paths=log.dump_paths,
                        image_paths=log.image_paths, figure_path=figure_path)


@dataclass(frozen=True)
class ConvergeRow:
    scheme: str
    NT: int
    tau: float
    error: float
    rate: Optional[float]


@dataclass
class ConvergeResult:
    rows: List[ConvergeRow]
    csv_path: Path
    figure_path: Optional[Path]


def _final_field(params: ModelParams, phi0: SpectralField, scheme: str,
                 T: float, NT: int, sweeps: int) -> SpectralField:
    if scheme == "cn":
        return integrate_cn(params, phi0, T, NT).phi
    traj = integrate_sdc(params, phi0, SdcConfig(T=T, NT=NT, sweeps=sweeps))
    return traj.phi_corr[-1]


def coefficient_error(a: SpectralField, b: SpectralField) -> float:
    """l2 distance between coefficient vectors in the unnormalized DFT
    convention (prod N_j times the AP norm), the scale used for the
    reported error/rate tables."""
    return float(np.prod(a.lattice.N)) * norm_ap(a - b)


def run_converge(cfg: RunConfig, _allow_reference_overlap: bool = False) -> ConvergeResult:
    """Error/rate table for each configured scheme against its own
    reference run at converge.reference_nt."""
    if cfg.converge is None:
        raise ConfigError("missing [converge] section")
    conv = cfg.converge
    if not _allow_reference_overlap and any(nt >= conv.reference_nt for nt in conv.nts):
        raise ConfigError(
            f"reference_nt={conv.reference_nt} must exceed every tested NT {conv.nts}")

    out_dir = cfg.output.directory
    out_dir.mkdir(parents=True, exist_ok=True)
    phi0 = initial_field(cfg)
    params = cfg.model
    T, sweeps = cfg.time.T, cfg.time.sweeps

    rows: List[ConvergeRow] = []
    for scheme in conv.schemes:
        reference = _final_field(params, phi0, scheme, T, conv.reference_nt, sweeps)
        previous: Optional[ConvergeRow] = None
        for nt in sorted(conv.nts):
            err = coefficient_error(
                _final_field(params, phi0, scheme, T, nt, sweeps), reference)
            rate = None
            if previous is not None and err > 0 and previous.error > 0:
                # finer NT halves tau relative to the previous row
                rate = math.log(previous.error / err) / math.log(nt / previous.NT)
            row = ConvergeRow(scheme=scheme, NT=nt, tau=T / nt, error=err, rate=rate)
            rows.append(row)
            previous = row

    csv_path = out_dir / "convergence.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("scheme", "NT", "tau", "error", "rate"))
        for row in rows:
            writer.writerow([row.scheme, row.NT, _fmt(row.tau), _fmt(row.error),
                             "" if row.rate is None else _fmt(row.rate)])

    figure_path = None
    if cfg.output.figures:
        plottable = [(r.scheme, r.NT, r.tau, r.error) for r in rows if r.error > 0]
        if plottable:
            figure_path = out_dir / "convergence.png"
            convergence_figure(figure_path, plottable)
    return ConvergeResult(rows=rows, csv_path=csv_path, figure_path=figure_path)


def format_converge_table(result: ConvergeResult) -> str:
    lines = [f"{'scheme':8s} {'NT':>6s} {'tau':>12s} {'error':>14s} {'rate':>7s}"]
    for row in result.rows:
        rate = "-" if row.rate is None else f"{row.rate:7.3f}"
        lines.append(f"{row.scheme:8s} {row.NT:6d} {row.tau:12.6g} "
                     f"{row.error:14.6e} {rate:>7s}")
    return "\n".join(lines)
