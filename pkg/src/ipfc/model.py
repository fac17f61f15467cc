"""Free energy and variational derivative of the multi-length-scale model.

The linear operator G acts diagonally in coefficient space with symbol
lambda(h) = prod_j (q_j^2 - |P B h|^2), so G annihilates every mode on one
of the prescribed rings |k| = q_j.  The free energy is

    E[f] = 1/2 <G f, G f> + <N(f), 1>,
    N(f) = eps/2 f^2 - alpha/3 f^3 + 1/4 f^4,

with means taken over the lifted torus.  The L2 variational derivative is
W(f) = G^2 f + N'(f) with N'(f) = eps f - alpha f^2 + f^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Tuple

import numpy as np

from .errors import ConfigError, DataError
from .field import SpectralField, inner_product_ap, pseudo_product, to_collocation, to_spectral


@dataclass(frozen=True)
class ModelParams:
    """Model constants: ring radii q_j, bulk coefficients, SAV shift C1."""

    scales: Tuple[float, ...]
    epsilon: float
    alpha: float
    c1: float = 1e16
    dealias: bool = dataclass_field(default=False)

    def __post_init__(self):
        scales = tuple(float(q) for q in self.scales)
        object.__setattr__(self, "scales", scales)
        if len(scales) < 1:
            raise ConfigError("need at least one length scale")
        if any(not np.isfinite(q) or q <= 0 for q in scales):
            raise ConfigError(f"length scales must be positive, got {scales}")
        if not (np.isfinite(self.epsilon) and np.isfinite(self.alpha)):
            raise ConfigError("epsilon and alpha must be finite")
        if not (np.isfinite(self.c1) and self.c1 > 0):
            raise ConfigError(f"C1 must be positive, got {self.c1}")


@dataclass(frozen=True)
class EnergyBreakdown:
    total: float
    gradient_part: float
    bulk_part: float


def apply_g(params: ModelParams, f: SpectralField) -> SpectralField:
    """Diagonal action of G: multiply each coefficient by its symbol."""
    sym = f.lattice.symbol_grid(params.scales)
    return SpectralField._wrap(f.lattice, f.coeffs * sym)


def apply_g_squared(params: ModelParams, f: SpectralField) -> SpectralField:
    sym = f.lattice.symbol_grid(params.scales)
    return SpectralField._wrap(f.lattice, f.coeffs * (sym * sym))


def bulk_derivative(params: ModelParams, f: SpectralField) -> SpectralField:
    """N'(f) = eps f - alpha f^2 + f^3 via pseudospectral products."""
    square = pseudo_product(f, f, dealias=params.dealias)
    cube = pseudo_product(f, f, f, dealias=params.dealias)
    return SpectralField._wrap(
        f.lattice,
        params.epsilon * f.coeffs - params.alpha * square.coeffs + cube.coeffs)


def bulk_mean(params: ModelParams, f: SpectralField) -> float:
    """<N(f), 1>: DC Fourier coefficient of the pointwise bulk density."""
    v = to_collocation(f)
    # quartic overflow on an extreme state is reported by to_spectral as
    # DataError; suppress the redundant numpy warning on that path
    with np.errstate(over="ignore", invalid="ignore"):
        density = (params.epsilon / 2) * v * v - (params.alpha / 3) * v ** 3 \
            + 0.25 * v ** 4
    return to_spectral(f.lattice, density).dc().real


def energy(params: ModelParams, f: SpectralField) -> EnergyBreakdown:
    gf = apply_g(params, f)
    gradient_part = 0.5 * inner_product_ap(gf, gf)
    bulk_part = bulk_mean(params, f)
    return EnergyBreakdown(gradient_part + bulk_part, gradient_part, bulk_part)


def f1(params: ModelParams, f: SpectralField) -> float:
    """Shifted bulk energy <N(f), 1> + C1; must be positive for SAV."""
    value = bulk_mean(params, f) + params.c1
    if not np.isfinite(value):
        raise DataError(f"F1 evaluated to {value}")
    if value <= 0:
        raise ConfigError(f"F1 = {value} is not positive; increase C1")
    return value


def variational_derivative(params: ModelParams, f: SpectralField) -> SpectralField:
    """W(f) = G^2 f + N'(f)."""
    return apply_g_squared(params, f) + bulk_derivative(params, f)
