"""Spectral solver for an incommensurate multi-length-scale phase-field
crystal model: projection-method fields, SAV/CN energy-stable stepping, and
a one-sweep spectral deferred correction."""

from .errors import BlowupError, ConfigError, DataError
from .lattice import PMLattice, ddqc_lattice, periodic_lattice
from .field import (SpectralField, inner_product_ap, norm_ap, project_mean_zero,
                    pseudo_product, read_dump, to_collocation, to_spectral,
                    write_dump)
from .model import (EnergyBreakdown, ModelParams, apply_g, apply_g_squared,
                    bulk_derivative, bulk_mean, energy, f1,
                    variational_derivative)
from .sav_cn import (SavState, cn_step, extrapolant, init_state, integrate_cn,
                     modified_energy, sav_drive)
from .sdc import (SdcConfig, SdcTrajectory, chebyshev_nodes, correction_sweep,
                  integration_weights, integrate_sdc, provisional_sweep)
from .presets import ddqc_ring_indices, ddqc_seed, random_seed, sine_seed
from .config import RunConfig, initial_field, load_config, parse_config
from .reporting import (physical_values, read_pgm, render_physical,
                        spectrum_report, write_pgm)
from .drivers import (ConvergeResult, ConvergeRow, EvolveResult,
                      coefficient_error, format_converge_table, run_converge,
                      run_evolve)

__all__ = [
    "BlowupError", "ConfigError", "DataError",
    "PMLattice", "ddqc_lattice", "periodic_lattice",
    "SpectralField", "inner_product_ap", "norm_ap", "project_mean_zero",
    "pseudo_product", "read_dump", "to_collocation", "to_spectral", "write_dump",
    "EnergyBreakdown", "ModelParams", "apply_g", "apply_g_squared",
    "bulk_derivative", "bulk_mean", "energy", "f1", "variational_derivative",
    "SavState", "cn_step", "extrapolant", "init_state", "integrate_cn",
    "modified_energy", "sav_drive",
    "SdcConfig", "SdcTrajectory", "chebyshev_nodes", "correction_sweep",
    "integration_weights", "integrate_sdc", "provisional_sweep",
    "ddqc_ring_indices", "ddqc_seed", "random_seed", "sine_seed",
    "RunConfig", "initial_field", "load_config", "parse_config",
    "physical_values", "read_pgm", "render_physical", "spectrum_report",
    "write_pgm",
    "ConvergeResult", "ConvergeRow", "EvolveResult", "coefficient_error",
    "format_converge_table", "run_converge", "run_evolve",
]
