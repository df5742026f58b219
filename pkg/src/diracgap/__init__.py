"""Meshfree toolkit for the principal eigenvalue of the 2-D Dirac operator
with infinite-mass boundary conditions: a direct collocation solver, the
nonlinear variational route, geometric spectral bounds, and batch
experiments on random domains."""

__version__ = "0.1.0"

from .bessel import bessel_j0, bessel_j1, bessel_moment, disk_e1, disk_eigenfunction
from .bounds import BoundsReport, check_e1_against_bounds, evaluate_bounds
from .config import SolverConfig, load_config
from .geometry import (DomainSpec, disk, load_domain, make_conformal_domain,
                       make_radial_domain, save_domain, scale_to_area)
from .pencil import (DiracEigenResult, PencilSystem, assemble_pencil,
                     find_eigenvalues, reconstruct_field, sigma_min_at)
from .rbf import (CollocationMatrices, Discretization, build_discretization,
                  collocation_matrices, multiquadric, repel_centers)
from .sweep import SpectralRecord, random_domain, run_sweep, solve_domain
from .varform import (FormMatrices, MuCurve, assemble_forms, e1_from_mu,
                      mu_curve, mu_of_e, transplant_bound)
