"""Projection-method lattice geometry.

A quasiperiodic field in d physical dimensions is represented by Fourier
coefficients on an n-dimensional integer lattice (n >= d).  An index vector
h maps to the physical wavevector k = P @ B @ h, where P is the d x n
projection matrix and B the n x n invertible lattice basis.  Periodic
crystals are the special case n = d.

Coefficients are stored on the full FFT grid: axis j runs over the integer
frequencies [0, 1, ..., N_j/2 - 1, -N_j/2, ..., -1] (numpy FFT order), so a
flattened C-order walk of the grid is the canonical storage order.  Mode
counts N_j must be even; the unmatched Nyquist frequency -N_j/2 has no
Hermitian partner on the grid and its coefficient is pinned to zero
throughout the package.
"""

from __future__ import annotations

from typing import Iterator, Sequence, Tuple

import numpy as np

from .errors import ConfigError

IndexVector = Tuple[int, ...]


def fft_axis_frequencies(n_modes: int) -> np.ndarray:
    """Integer frequencies of one axis in FFT storage order."""
    half = n_modes // 2
    return np.concatenate([np.arange(0, half), np.arange(-half, 0)])


class PMLattice:
    """Geometry of the lifted index lattice and its projection to d dimensions."""

    def __init__(self, d: int, n: int, P, B, N: Sequence[int],
                 det_threshold: float = 1e-12):
        if not (1 <= d <= n):
            raise ConfigError(f"need 1 <= d <= n, got d={d}, n={n}")
        P = np.asarray(P, dtype=float)
        B = np.asarray(B, dtype=float)
        if P.shape != (d, n):
            raise ConfigError(f"P must be {d}x{n}, got shape {P.shape}")
        if B.shape != (n, n):
            raise ConfigError(f"B must be {n}x{n}, got shape {B.shape}")
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(B))):
            raise ConfigError("P and B must be finite")
        if abs(np.linalg.det(B)) <= det_threshold:
            raise ConfigError("B is singular or near-singular")
        N = tuple(int(v) for v in N)
        if len(N) != n:
            raise ConfigError(f"N must have {n} entries, got {len(N)}")
        if any(v < 2 or v % 2 != 0 for v in N):
            raise ConfigError(f"mode counts must be even and >= 2, got {N}")

        self.d = d
        self.n = n
        self.P = P
        self.B = B
        self.N = N
        self.PB = P @ B
        for arr in (self.P, self.B, self.PB):
            arr.flags.writeable = False

        # caches filled lazily; keyed by scales tuple where applicable
        self._mode_grid = None
        self._wavevector_grid = None
        self._ksq_grid = None
        self._nyquist_mask = None
        self._symbol_cache: dict = {}

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.N

    @property
    def mode_count(self) -> int:
        return int(np.prod(self.N))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, PMLattice):
            return NotImplemented
        return (self.d == other.d and self.n == other.n and self.N == other.N
                and np.array_equal(self.P, other.P)
                and np.array_equal(self.B, other.B))

    def __repr__(self) -> str:
        return f"PMLattice(d={self.d}, n={self.n}, N={self.N})"

    def mode_grid(self) -> np.ndarray:
        """Integer index vectors of every grid slot, shape (n, *N)."""
        if self._mode_grid is None:
            axes = [fft_axis_frequencies(m) for m in self.N]
            grid = np.stack(np.meshgrid(*axes, indexing="ij"))
            grid.flags.writeable = False
            self._mode_grid = grid
        return self._mode_grid

    def wavevector_grid(self) -> np.ndarray:
        """Physical wavevectors P B h of every grid slot, shape (d, *N)."""
        if self._wavevector_grid is None:
            k = np.einsum("ab,b...->a...", self.PB, self.mode_grid().astype(float))
            k.flags.writeable = False
            self._wavevector_grid = k
        return self._wavevector_grid

    def ksq_grid(self) -> np.ndarray:
        """|P B h|^2 of every grid slot."""
        if self._ksq_grid is None:
            k2 = np.sum(self.wavevector_grid() ** 2, axis=0)
            k2.flags.writeable = False
            self._ksq_grid = k2
        return self._ksq_grid

    def nyquist_mask(self) -> np.ndarray:
        """Boolean grid marking slots with any h_j = -N_j/2."""
        if self._nyquist_mask is None:
            modes = self.mode_grid()
            mask = np.zeros(self.N, dtype=bool)
            for j in range(self.n):
                mask |= modes[j] == -(self.N[j] // 2)
            mask.flags.writeable = False
            self._nyquist_mask = mask
        return self._nyquist_mask

    def wavevector(self, h: Sequence[int]) -> np.ndarray:
        """Physical wavevector of a single index vector (|h_j| <= N_j/2)."""
        h = self._check_index(h)
        return self.PB @ h

    def symbol_grid(self, scales: Sequence[float]) -> np.ndarray:
        """prod_j (q_j^2 - |k|^2) over the whole grid, cached per scales."""
        key = tuple(float(q) for q in scales)
        if key not in self._symbol_cache:
            k2 = self.ksq_grid()
            sym = np.ones_like(k2)
            for q in key:
                sym = sym * (q * q - k2)
            sym.flags.writeable = False
            self._symbol_cache[key] = sym
        return self._symbol_cache[key]

    def g_symbol(self, scales: Sequence[float], h: Sequence[int]) -> float:
        """Symbol of the multi-scale operator at one index vector."""
        h = self._check_index(h)
        ksq = float(np.sum((self.PB @ h) ** 2))
        out = 1.0
        for q in scales:
            out *= float(q) ** 2 - ksq
        return out

    def enumerate_modes(self) -> Iterator[IndexVector]:
        """All index vectors in storage order (row-major over FFT-ordered axes)."""
        flat = self.mode_grid().reshape(self.n, -1)
        for col in range(flat.shape[1]):
            yield tuple(int(v) for v in flat[:, col])

    def index_of(self, h: Sequence[int]) -> Tuple[int, ...]:
        """Grid slot of a representable index vector (-N_j/2 <= h_j < N_j/2)."""
        h = np.asarray(h, dtype=int)
        if h.shape != (self.n,):
            raise IndexError(f"index vector must have {self.n} entries")
        for j, (hj, mj) in enumerate(zip(h, self.N)):
            if not (-(mj // 2) <= hj < mj // 2):
                raise IndexError(
                    f"h[{j}] = {hj} outside representable range "
                    f"[{-(mj // 2)}, {mj // 2 - 1}]")
        return tuple(int(hj) % mj for hj, mj in zip(h, self.N))

    def _check_index(self, h: Sequence[int]) -> np.ndarray:
        h = np.asarray(h, dtype=int)
        if h.shape != (self.n,):
            raise IndexError(f"index vector must have {self.n} entries")
        for j, (hj, mj) in enumerate(zip(h, self.N)):
            if abs(int(hj)) > mj // 2:
                raise IndexError(f"h[{j}] = {hj} outside truncation |h| <= {mj // 2}")
        return h


def periodic_lattice(d: int, N: Sequence[int]) -> PMLattice:
    """Ordinary periodic lattice: n = d, P = B = identity."""
    eye = np.eye(d)
    return PMLattice(d, d, eye, eye, N)


def ddqc_lattice(N: Sequence[int]) -> PMLattice:
    """4D lifted lattice whose projection carries 12-fold quasicrystals.

    Projection columns are unit vectors at 0, 30, 60 and 90 degrees; B is
    the identity.  Half-integer entries are written algebraically so the
    column norms are exact in floating point.
    """
    r = np.sqrt(3.0) / 2
    P = np.array([[1.0, r, 0.5, 0.0],
                  [0.0, 0.5, r, 1.0]])
    return PMLattice(2, 4, P, np.eye(4), N)
