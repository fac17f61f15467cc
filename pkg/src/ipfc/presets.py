"""Initial-condition presets: sine, dodecagonal seed, seeded random band."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .errors import ConfigError
from .field import SpectralField, project_mean_zero
from .lattice import PMLattice


def sine_seed(lattice: PMLattice, amplitude: float = 1.0) -> SpectralField:
    """amplitude * sin(x) along the first lattice direction."""
    coeffs = np.zeros(lattice.shape, dtype=np.complex128)
    plus = (1,) + (0,) * (lattice.n - 1)
    minus = (-1,) + (0,) * (lattice.n - 1)
    coeffs[lattice.index_of(plus)] = -0.5j * amplitude
    coeffs[lattice.index_of(minus)] = 0.5j * amplitude
    return SpectralField(lattice, coeffs, copy=False)


def ddqc_ring_indices(n: int = 4) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Tuple[int, ...], ...]]:
    """Index vectors of the two dodecagonal rings on the lifted 4D lattice.

    The twelve 30-degree-spaced unit directions are e1..e4, e3-e1, e4-e2 and
    their negatives; the second ring collects sums of consecutive unit
    directions, which all share the projected radius 2 cos(pi/12).
    """
    if n != 4:
        raise ConfigError(f"dodecagonal seed needs a 4D lifted lattice, got n={n}")
    e = np.eye(4, dtype=int)
    half = [e[0], e[1], e[2], e[3], e[2] - e[0], e[3] - e[1]]
    ring1 = [v for u in half for v in (u, -u)]
    circle = half + [-u for u in half]  # consecutive 30-degree order
    ring2 = [circle[j] + circle[(j + 1) % 12] for j in range(12)]
    as_tuples = lambda vs: tuple(tuple(int(c) for c in v) for v in vs)
    return as_tuples(ring1), as_tuples(ring2)


def ddqc_seed(lattice: PMLattice, amplitude: float = 0.3) -> SpectralField:
    """Equal-amplitude cosine seed on the 24 dodecagonal modes."""
    ring1, ring2 = ddqc_ring_indices(lattice.n)
    coeffs = np.zeros(lattice.shape, dtype=np.complex128)
    for h in ring1 + ring2:
        coeffs[lattice.index_of(h)] = amplitude
    return SpectralField(lattice, coeffs, copy=False)


def random_seed(lattice: PMLattice, seed: int, amplitude: float = 0.3) -> SpectralField:
    """Seeded Hermitian mean-zero field with uniform coefficients in the
    band |h_j| <= N_j/4 (so products of pairs stay inside the truncation)."""
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(lattice.shape, dtype=np.complex128)
    band = np.ones(lattice.shape, dtype=bool)
    modes = lattice.mode_grid()
    for j in range(lattice.n):
        band &= np.abs(modes[j]) <= lattice.N[j] // 4
    count = int(band.sum())
    coeffs[band] = rng.uniform(-1.0, 1.0, count) + 1j * rng.uniform(-1.0, 1.0, count)
    rev = coeffs[tuple(slice(None, None, -1) for _ in range(lattice.n))]
    rev = np.roll(rev, shift=(1,) * lattice.n, axis=tuple(range(lattice.n)))
    sym = 0.5 * (coeffs + np.conj(rev))
    return project_mean_zero(SpectralField(lattice, amplitude * sym, copy=False))
