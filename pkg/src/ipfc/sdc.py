"""One-sweep spectral deferred correction on a global Chebyshev grid.

A provisional SAV/CN solution is computed on the Chebyshev-Lobatto nodes
t^n = T/2 - (T/2) cos(n pi / NT), n = 0..NT.  The defect of the provisional
trajectory against the integral form of the flow is measured with an
interpolatory quadrature that is exact for the degree-NT polynomial
through all NT+1 nodes, and a Crank-Nicolson marched correction

    (I + tau/2 G^2) eps^{n+1} = (I - tau/2 G^2) eps^n
        - int_{t^n}^{t^{n+1}} W(phi_[0]) dt - phi_[0]^{n+1} + phi_[0]^n
        - tau (R^{n+1/2}/sqrt(F1(phibar))) [N'(phibar + epsbar) - N'(phibar)]

lifts the result to fourth order in one sweep.  The residual integrand is
the true variational derivative W = G^2 phi + N'(phi); the auxiliary
variable is never corrected, so R^{n+1/2} and the provisional r values are
reused verbatim in every sweep.  The whole node trajectory is kept in
memory: storage grows like (NT+1) * prod(N_j) coefficients.

The quadrature matrix is assembled by stable interpolation: values at the
given nodes are re-expanded on an auxiliary Chebyshev-Lobatto grid via the
barycentric formula, converted to Chebyshev coefficients, integrated with
the exact antiderivative recurrence, and differenced between consecutive
nodes.  For polynomials up to degree NT this is exact to rounding for any
set of distinct nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .errors import BlowupError, ConfigError, DataError
from .field import SpectralField
from .model import ModelParams, bulk_derivative, f1, variational_derivative
from .sav_cn import cn_step, init_state


@dataclass(frozen=True)
class SdcConfig:
    """Global-grid settings: horizon T, interval count NT, correction sweeps."""

    T: float
    NT: int
    sweeps: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise ConfigError(f"final time must be positive, got {self.T}")
        if self.NT < 2:
            raise ConfigError(f"need NT >= 2 Chebyshev intervals, got {self.NT}")
        if self.sweeps < 0:
            raise ConfigError(f"sweep count must be >= 0, got {self.sweeps}")


@dataclass
class SdcTrajectory:
    """Provisional and corrected node values over one global grid."""

    nodes: np.ndarray
    phi_prov: List[SpectralField]
    r_prov: np.ndarray
    w_eval: List[SpectralField]
    eps: List[SpectralField]
    phi_corr: List[SpectralField]
    r_excess_prov: np.ndarray
    sqrt_c1: float


def chebyshev_nodes(T: float, NT: int) -> np.ndarray:
    """Chebyshev-Lobatto nodes on [0, T], endpoints exact."""
    if not (np.isfinite(T) and T > 0):
        raise ConfigError(f"final time must be positive, got {T}")
    if NT < 2:
        raise ConfigError(f"need NT >= 2, got {NT}")
    n = np.arange(NT + 1)
    t = T / 2 - (T / 2) * np.cos(n * np.pi / NT)
    t[0] = 0.0
    t[-1] = T
    return t


def _barycentric_weights(x: np.ndarray) -> np.ndarray:
    # log-space products stay in range for thousands of nodes
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    sign = np.prod(np.sign(diff), axis=1)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    logw -= np.max(logw)
    return sign * np.exp(logw)


def _barycentric_matrix(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """E with (E @ values_at_x) = interpolant evaluated at z."""
    w = _barycentric_weights(x)
    dz = z[:, None] - x[None, :]
    exact = dz == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w[None, :] / dz
        E = terms / np.sum(terms, axis=1, keepdims=True)
    hit_rows = np.any(exact, axis=1)
    E[hit_rows] = exact[hit_rows].astype(float)
    return E


def integration_weights(nodes: np.ndarray) -> np.ndarray:
    """Node-to-node quadrature matrix S of the interpolatory rule.

    S[n, j] integrates the j-th Lagrange basis polynomial of all the nodes
    over [nodes[n], nodes[n+1]]; S @ values gives every subinterval integral
    of the degree-NT interpolant exactly.
    """
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ConfigError("need a 1D array of at least two nodes")
    if not np.all(np.isfinite(x)):
        raise ConfigError("nodes must be finite")
    if np.unique(x).size != x.size:
        raise ConfigError("nodes must be distinct")
    deg = x.size - 1
    a, b = float(np.min(x)), float(np.max(x))
    xm = (2.0 * x - (b + a)) / (b - a)  # affine map onto [-1, 1]

    z = -np.cos(np.arange(deg + 1) * np.pi / deg)
    E = _barycentric_matrix(xm, z)
    # values at the Lobatto grid -> Chebyshev coefficients (type-I cosine sums)
    i = np.arange(deg + 1)
    A = 2.0 * np.cos(np.pi * np.outer(i, deg - i) / deg) / deg
    A[:, 0] *= 0.5
    A[:, -1] *= 0.5
    A[0] *= 0.5
    A[-1] *= 0.5

    C = A @ E
    Cint = npcheb.chebint(C, axis=0)
    Q = npcheb.chebvander(xm, deg + 1) @ Cint
    return (Q[1:] - Q[:-1]) * ((b - a) / 2.0)


def provisional_sweep(params: ModelParams, phi0: SpectralField,
                      cfg: SdcConfig) -> SdcTrajectory:
    """SAV/CN over the Chebyshev intervals, recording fields, r, and W."""
    nodes = chebyshev_nodes(cfg.T, cfg.NT)
    state = init_state(params, phi0)
    phi_prov = [state.phi]
    r_excess = [state.r_excess]
    w_eval = [variational_derivative(params, state.phi)]
    for n in range(cfg.NT):
        state = cn_step(params, state, nodes[n + 1] - nodes[n])
        phi_prov.append(state.phi)
        r_excess.append(state.r_excess)
        w_eval.append(variational_derivative(params, state.phi))
    r_excess = np.array(r_excess)
    zero = SpectralField.zeros(phi0.lattice)
    return SdcTrajectory(nodes=nodes, phi_prov=phi_prov,
                         r_prov=state.sqrt_c1 + r_excess,
                         w_eval=w_eval, eps=[zero] * (cfg.NT + 1),
                         phi_corr=list(phi_prov),
                         r_excess_prov=r_excess, sqrt_c1=state.sqrt_c1)


def _sweep_once(params: ModelParams, traj: SdcTrajectory,
                base: List[SpectralField], w: List[SpectralField],
                weights: np.ndarray) -> List[SpectralField]:
    """One marched correction of the base trajectory; returns the eps list."""
    lattice = base[0].lattice
    nodes = traj.nodes
    sym = lattice.symbol_grid(params.scales)
    lam2 = sym * sym
    origin = (0,) * lattice.n

    w_stack = np.stack([g.coeffs for g in w])
    integrals = np.tensordot(weights, w_stack, axes=1)

    eps = [SpectralField.zeros(lattice)]
    for n in range(len(nodes) - 1):
        tau = nodes[n + 1] - nodes[n]
        try:
            if n == 0:
                phibar = base[0]
                epsbar_coeffs = None
            else:
                phibar = SpectralField._wrap(
                    lattice, 1.5 * base[n].coeffs - 0.5 * base[n - 1].coeffs)
                epsbar_coeffs = 1.5 * eps[n].coeffs - 0.5 * eps[n - 1].coeffs
            r_half = 0.5 * (traj.r_prov[n] + traj.r_prov[n + 1])
            coef = r_half / np.sqrt(f1(params, phibar))
            if epsbar_coeffs is None:
                bracket = 0.0
            else:
                shifted = SpectralField._wrap(lattice, phibar.coeffs + epsbar_coeffs)
                bracket = (bulk_derivative(params, shifted).coeffs
                           - bulk_derivative(params, phibar).coeffs)
            rhs = ((1.0 - (0.5 * tau) * lam2) * eps[n].coeffs
                   - integrals[n]
                   - base[n + 1].coeffs + base[n].coeffs
                   - (tau * coef) * bracket)
        except DataError as exc:
            raise BlowupError(n + 1, f"correction sweep: {exc}") from exc
        rhs[origin] = 0.0
        new = rhs / (1.0 + (0.5 * tau) * lam2)
        if not np.all(np.isfinite(new)):
            raise BlowupError(n + 1, f"correction sweep blew up at node {n + 1}")
        eps.append(SpectralField._wrap(lattice, new))
    return eps


def correction_sweep(params: ModelParams, traj: SdcTrajectory,
                     cfg: SdcConfig) -> SdcTrajectory:
    """Apply cfg.sweeps corrections, re-deriving eps against the latest
    corrected trajectory each pass; r stays frozen at its provisional values."""
    weights = integration_weights(traj.nodes)
    base = list(traj.phi_prov)
    w = list(traj.w_eval)
    eps = list(traj.eps)
    for sweep in range(cfg.sweeps):
        if sweep > 0:
            w = [variational_derivative(params, g) for g in base]
        eps = _sweep_once(params, traj, base, w, weights)
        base = [SpectralField._wrap(b.lattice, b.coeffs + e.coeffs)
                for b, e in zip(base, eps)]
    return SdcTrajectory(nodes=traj.nodes, phi_prov=traj.phi_prov,
                         r_prov=traj.r_prov, w_eval=traj.w_eval,
                         eps=eps, phi_corr=base,
                         r_excess_prov=traj.r_excess_prov, sqrt_c1=traj.sqrt_c1)


def integrate_sdc(params: ModelParams, phi0: SpectralField,
                  cfg: SdcConfig) -> SdcTrajectory:
    """Provisional sweep plus cfg.sweeps corrections."""
    traj = provisional_sweep(params, phi0, cfg)
    if cfg.sweeps > 0:
        traj = correction_sweep(params, traj, cfg)
    return traj
