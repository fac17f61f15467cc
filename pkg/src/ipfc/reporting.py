"""Physical-space rendering, dominant-mode reports, and run figures.

Images are 8-bit binary PGM (P5) with one comment line recording the
physical value range, so a rendered field can be round-tripped exactly:
the pixel array is a pure function of the dumped coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import ConfigError, DataError
from .field import SpectralField

_PIXEL_CHUNK = 4096


def physical_values(f: SpectralField, bbox: Sequence[float],
                    resolution: Sequence[int], threshold: float = 0.0) -> np.ndarray:
    """Evaluate the field at pixel centers by direct mode summation.

    bbox is (x0, x1) for d=1 or (x0, x1, y0, y1) for d=2; resolution is
    (W,) or (W, H).  Row 0 of the result is the top of the image (largest
    y), matching raster order.  Modes with |coeff| <= threshold are
    skipped; threshold 0 keeps every stored nonzero mode.
    """
    d = f.lattice.d
    if d not in (1, 2):
        raise ConfigError(f"direct rendering supports d in (1, 2), got d={d}")
    if len(bbox) != 2 * d:
        raise ConfigError(f"bbox needs {2 * d} entries for d={d}, got {len(bbox)}")
    if len(resolution) != d:
        raise ConfigError(f"resolution needs {d} entries for d={d}, got {len(resolution)}")
    if any(m < 2 for m in resolution):
        raise ConfigError(f"resolution must be at least 2 per axis, got {tuple(resolution)}")

    mask = np.abs(f.coeffs) > threshold
    coeffs = f.coeffs[mask]
    kvecs = f.lattice.wavevector_grid()[(slice(None),) + np.nonzero(mask)]  # (d, M)

    w = int(resolution[0])
    x0, x1 = float(bbox[0]), float(bbox[1])
    xs = x0 + (np.arange(w) + 0.5) * (x1 - x0) / w
    if d == 1:
        points = xs[None, :]
        shape = (1, w)
    else:
        h = int(resolution[1])
        y0, y1 = float(bbox[2]), float(bbox[3])
        ys = y1 - (np.arange(h) + 0.5) * (y1 - y0) / h
        gx, gy = np.meshgrid(xs, ys)
        points = np.stack([gx.ravel(), gy.ravel()])  # (2, W*H)
        shape = (h, w)

    values = np.empty(points.shape[1])
    for start in range(0, points.shape[1], _PIXEL_CHUNK):
        block = points[:, start:start + _PIXEL_CHUNK]
        phases = kvecs.T @ block  # (M, chunk)
        values[start:start + _PIXEL_CHUNK] = (coeffs @ np.exp(1j * phases)).real
    return values.reshape(shape)


def quantize(values: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """Map [min, max] linearly onto 0..255; a constant field maps to 0."""
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax > vmin:
        pixels = np.rint((values - vmin) * (255.0 / (vmax - vmin)))
    else:
        pixels = np.zeros_like(values)
    return pixels.astype(np.uint8), vmin, vmax


def write_pgm(path: Path, values: np.ndarray) -> None:
    """Binary 8-bit PGM with the physical range in a comment line."""
    pixels, vmin, vmax = quantize(values)
    header = (f"P5\n# min={vmin:.17g} max={vmax:.17g}\n"
              f"{pixels.shape[1]} {pixels.shape[0]}\n255\n")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path: Path) -> Tuple[np.ndarray, float, float]:
    """Inverse of write_pgm; returns (pixels, min, max) for round-trip checks."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        magic, comment, dims, maxval, rest = raw.split(b"\n", 4)
        if magic != b"P5" or maxval != b"255":
            raise ValueError("not an 8-bit P5 graymap")
        fields = dict(item.split(b"=") for item in comment[1:].split())
        vmin, vmax = float(fields[b"min"]), float(fields[b"max"])
        w, h = (int(v) for v in dims.split())
        pixels = np.frombuffer(rest[:w * h], dtype=np.uint8).reshape(h, w)
        if rest[w * h:]:
            raise ValueError("trailing bytes after pixel data")
    except (ValueError, KeyError) as exc:
        raise DataError(f"malformed PGM {path}: {exc}") from exc
    return pixels, vmin, vmax


def render_physical(f: SpectralField, bbox: Sequence[float],
                    resolution: Sequence[int], threshold: float,
                    path: Path) -> np.ndarray:
    """Render to a PGM file; returns the physical values used."""
    values = physical_values(f, bbox, resolution, threshold)
    write_pgm(path, values)
    return values


@dataclass(frozen=True)
class SpectrumEntry:
    index: Tuple[int, ...]
    wavevector: Tuple[float, ...]
    magnitude: float


def spectrum_report(f: SpectralField, top_k: int) -> List[SpectrumEntry]:
    """Strongest top_k modes over the half-space h > 0.

    Half-space: the first nonzero component of h is positive, so exactly
    one representative of each conjugate pair is listed.  Ordering is by
    descending |coeff| with lexicographic index as the tie-break, which
    makes reports deterministic for symmetric spectra.
    """
    if top_k < 1:
        raise ConfigError(f"top_k must be at least 1, got {top_k}")
    entries = []
    for h in f.lattice.enumerate_modes():
        lead = next((c for c in h if c != 0), 0)
        if lead <= 0:
            continue
        entries.append((-abs(complex(f.coeffs[f.lattice.index_of(h)])), h))
    entries.sort()
    report = []
    for neg_mag, h in entries[:top_k]:
        k = f.lattice.wavevector(h)
        report.append(SpectrumEntry(index=h, wavevector=tuple(float(v) for v in k),
                                    magnitude=-neg_mag))
    return report


def energy_figure(path: Path, t: Sequence[float], original: Sequence[float],
                  modified: Sequence[float]) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(t, original, label="original", lw=1.4)
    ax.plot(t, modified, label="modified", lw=1.4, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def convergence_figure(path: Path, rows: Sequence[Tuple[str, int, float, float]]) -> None:
    """Log-log error vs step size, one line per scheme; rows are
    (scheme, NT, tau, error)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    schemes = sorted({row[0] for row in rows})
    for scheme in schemes:
        pts = sorted((row[2], row[3]) for row in rows if row[0] == scheme)
        taus = [p[0] for p in pts]
        errs = [p[1] for p in pts]
        ax.loglog(taus, errs, "o-", label=scheme)
        order = 2.0 if scheme == "cn" else 4.0
        guide = [errs[-1] * (tau / taus[-1]) ** order for tau in taus]
        ax.loglog(taus, guide, ":", color="gray", lw=1.0,
                  label=f"slope {order:g}")
    ax.set_xlabel("step size")
    ax.set_ylabel("error")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
