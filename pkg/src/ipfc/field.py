"""Spectral fields on a projection-method lattice.

A field is a complex coefficient array over the full FFT grid of its
lattice.  Real-valued fields are represented by Hermitian-symmetric
coefficients, coeffs(-h) = conj(coeffs(h)); the unmatched Nyquist slots
are pinned to zero so every retained mode has its partner on the grid.
Collocation values live on the uniform grid of the n-dimensional torus in
lattice coordinates, and transforms are normalized so that coefficients
are function amplitudes: the zero mode equals the field mean.

The dump format is an ASCII header line ``IPFC1 <n> <N_1> ... <N_n>``
followed by one little-endian (real, imag) float64 pair per grid slot in
storage order.
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DataError
from .lattice import PMLattice, fft_axis_frequencies

DUMP_MAGIC = "IPFC1"
_IMAG_TOL = 1e-12


class SpectralField:
    """Coefficient grid bound to a lattice; arithmetic is coefficient-wise."""

    __slots__ = ("lattice", "coeffs")

    def __init__(self, lattice: PMLattice, coeffs, copy: bool = True,
                 validate: bool = False):
        if copy:
            coeffs = np.array(coeffs, dtype=np.complex128, order="C")
        else:
            # takes ownership: Nyquist forcing below may write into the array
            coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        if coeffs.shape != lattice.shape:
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match lattice {lattice.shape}")
        coeffs[lattice.nyquist_mask()] = 0.0
        self.lattice = lattice
        self.coeffs = coeffs
        if validate:
            if not np.all(np.isfinite(coeffs)):
                raise DataError("non-finite coefficients")
            res = hermitian_residual(self)
            if res > _IMAG_TOL * max(1.0, float(np.max(np.abs(coeffs)))):
                raise DataError(f"coefficients are not Hermitian-symmetric (residual {res:.3e})")

    @classmethod
    def zeros(cls, lattice: PMLattice) -> "SpectralField":
        return cls._wrap(lattice, np.zeros(lattice.shape, dtype=np.complex128))

    @classmethod
    def from_modes(cls, lattice: PMLattice, modes: Dict[Tuple[int, ...], complex]
                   ) -> "SpectralField":
        """Field with the given coefficients; the caller supplies both members
        of each Hermitian pair."""
        coeffs = np.zeros(lattice.shape, dtype=np.complex128)
        for h, value in modes.items():
            coeffs[lattice.index_of(h)] = value
        return cls(lattice, coeffs, copy=False)

    @classmethod
    def _wrap(cls, lattice: PMLattice, coeffs: np.ndarray) -> "SpectralField":
        # internal fast path: coeffs already conform (owned, Nyquist-free)
        obj = object.__new__(cls)
        obj.lattice = lattice
        obj.coeffs = coeffs
        return obj

    def copy(self) -> "SpectralField":
        return SpectralField._wrap(self.lattice, self.coeffs.copy())

    def dc(self) -> complex:
        return complex(self.coeffs[(0,) * self.lattice.n])

    def _match(self, other: "SpectralField") -> None:
        if self.lattice is not other.lattice and self.lattice != other.lattice:
            raise ValueError("fields live on different lattices")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._match(other)
        return SpectralField._wrap(self.lattice, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._match(other)
        return SpectralField._wrap(self.lattice, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField._wrap(self.lattice, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "SpectralField":
        return SpectralField._wrap(self.lattice, self.coeffs / float(scalar))

    def __neg__(self) -> "SpectralField":
        return SpectralField._wrap(self.lattice, -self.coeffs)

    def __repr__(self) -> str:
        return f"SpectralField({self.lattice!r})"


def to_collocation(f: SpectralField) -> np.ndarray:
    """Real collocation values on the torus grid; imaginary residue is checked
    against the Hermitian-symmetry budget and discarded."""
    if not np.all(np.isfinite(f.coeffs)):
        raise DataError("non-finite coefficients")
    values = np.fft.ifftn(f.coeffs, norm="forward")
    scale = max(1.0, float(np.max(np.abs(values.real))))
    residue = float(np.max(np.abs(values.imag)))
    if residue > _IMAG_TOL * scale:
        raise DataError(f"collocation imaginary residue {residue:.3e} exceeds budget")
    return np.ascontiguousarray(values.real)


def _hermitian_project(coeffs: np.ndarray) -> np.ndarray:
    """Average coeffs(h) with conj(coeffs(-h)); exact for real-field data."""
    rev = coeffs[tuple(slice(None, None, -1) for _ in range(coeffs.ndim))]
    rev = np.roll(rev, shift=(1,) * coeffs.ndim, axis=tuple(range(coeffs.ndim)))
    return 0.5 * (coeffs + np.conj(rev))


def to_spectral(lattice: PMLattice, values: np.ndarray) -> SpectralField:
    """Coefficients of real collocation values; Nyquist slots are zeroed.

    The FFT of real data is Hermitian only to rounding; the symmetry is
    re-projected exactly so that it cannot drift over long operation chains.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != lattice.shape:
        raise ValueError(f"value shape {values.shape} does not match lattice {lattice.shape}")
    if not np.all(np.isfinite(values)):
        raise DataError("non-finite collocation values")
    coeffs = _hermitian_project(np.fft.fftn(values, norm="forward"))
    coeffs[lattice.nyquist_mask()] = 0.0
    return SpectralField._wrap(lattice, coeffs)


def inner_product_ap(f: SpectralField, g: SpectralField) -> float:
    """Parseval inner product of fields with real collocation values.

    For Hermitian coefficient arrays the imaginary summands cancel in
    conjugate pairs, so only the real parts are accumulated; this keeps
    the result exactly real instead of real-up-to-roundoff.
    """
    f._match(g)
    return float(np.sum((f.coeffs * np.conj(g.coeffs)).real))


def norm_ap(f: SpectralField) -> float:
    return float(np.sqrt(inner_product_ap(f, f)))


def project_mean_zero(f: SpectralField) -> SpectralField:
    out = f.coeffs.copy()
    out[(0,) * f.lattice.n] = 0.0
    return SpectralField._wrap(f.lattice, out)


def _padded_slots(lattice: PMLattice, padded_shape: Tuple[int, ...]):
    """Per-axis positions of the lattice frequencies inside a larger FFT grid."""
    return tuple(fft_axis_frequencies(m) % big
                 for m, big in zip(lattice.N, padded_shape))


def pseudo_product(*fields: SpectralField, dealias: bool = False) -> SpectralField:
    """Pointwise product of 2 or 3 fields, evaluated in collocation space.

    Without dealiasing the product picks up the usual wrap-around aliasing.
    With dealias=True the factors are zero-padded by the 3/2 rule before
    multiplication, which removes quadratic aliasing entirely and damps the
    cubic tail.
    """
    if len(fields) not in (2, 3):
        raise ConfigError(f"pseudo_product takes 2 or 3 factors, got {len(fields)}")
    first = fields[0]
    for g in fields[1:]:
        first._match(g)
    lattice = first.lattice

    if not dealias:
        values = to_collocation(fields[0])
        for g in fields[1:]:
            values = values * to_collocation(g)
        return to_spectral(lattice, values)

    padded = tuple(3 * m // 2 for m in lattice.N)
    slots = np.ix_(*_padded_slots(lattice, padded))
    prod = None
    for g in fields:
        big = np.zeros(padded, dtype=np.complex128)
        big[slots] = g.coeffs
        vals = np.fft.ifftn(big, norm="forward").real
        prod = vals if prod is None else prod * vals
    if not np.all(np.isfinite(prod)):
        raise DataError("non-finite values in dealiased product")
    spec = np.fft.fftn(prod, norm="forward")
    coeffs = _hermitian_project(np.ascontiguousarray(spec[slots]))
    coeffs[lattice.nyquist_mask()] = 0.0
    return SpectralField._wrap(lattice, coeffs)


def hermitian_residual(f: SpectralField) -> float:
    """max |coeffs(h) - conj(coeffs(-h))| over the grid."""
    c = f.coeffs
    rev = c[tuple(slice(None, None, -1) for _ in range(c.ndim))]
    rev = np.roll(rev, shift=(1,) * c.ndim, axis=tuple(range(c.ndim)))
    return float(np.max(np.abs(c - np.conj(rev))))


def write_dump(f: SpectralField, path) -> None:
    """Write the bit-exact binary dump of a field."""
    header = " ".join([DUMP_MAGIC, str(f.lattice.n)] + [str(m) for m in f.lattice.N])
    with open(path, "wb") as fh:
        fh.write((header + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(f.coeffs, dtype="<c16").tobytes())


def load_dump_raw(path) -> Tuple[int, Tuple[int, ...], np.ndarray]:
    """Read a dump without lattice context; returns (n, N, coefficient grid)."""
    with open(path, "rb") as fh:
        header = fh.readline(4096)
        if not header.endswith(b"\n"):
            raise DataError("dump header is not a terminated ASCII line")
        parts = header.decode("ascii", errors="replace").split()
        if len(parts) < 2 or parts[0] != DUMP_MAGIC:
            raise DataError("dump does not start with the IPFC1 magic")
        try:
            n = int(parts[1])
            N = tuple(int(v) for v in parts[2:])
        except ValueError as exc:
            raise DataError(f"garbled dump header: {header!r}") from exc
        if len(N) != n or n < 1:
            raise DataError(f"dump header declares n={n} but {len(N)} axis counts")
        count = int(np.prod(N))
        data = fh.read(16 * count)
        if len(data) != 16 * count:
            raise DataError(f"dump truncated: expected {16 * count} payload bytes, "
                            f"got {len(data)}")
    coeffs = np.frombuffer(data, dtype="<c16", count=count).reshape(N)
    return n, N, coeffs.astype(np.complex128)


def read_dump(path, lattice: PMLattice) -> SpectralField:
    """Read a dump and bind it to a lattice with matching grid."""
    n, N, coeffs = load_dump_raw(path)
    if n != lattice.n or N != lattice.N:
        raise DataError(f"dump grid n={n}, N={N} does not match lattice "
                        f"n={lattice.n}, N={lattice.N}")
    return SpectralField(lattice, coeffs, copy=False)
