"""Lattice electron energy laboratory.

Thin python layer over the C++ core: finite-domain spectra, bulk reference
quantities, inequality checks, and hole-set sampling.
"""

from ._fklab import (  # noqa: F401
    BulkModel,
    Domain,
    Torus,
    alpha,
    boundary_stats,
    config_energy,
    decorrelation_check,
    default_bulk_points,
    dirichlet_spectrum,
    dispersion,
    energy_sandwich_check,
    eta,
    exact_delta_corr,
    free_energy,
    gamma_bar_screening,
    gamma_screening,
    ground_energy,
    mu_estimate,
    n_star,
    random_connected_domain,
    screened_spectrum,
    sphere_volume,
    version,
)

__version__ = version()
