"""Sharp Hardy-Littlewood-Sobolev constants on the CR sphere: closed forms, geometry and a subcritical solver."""
from .specfun import DomainError, SpectralIndex
from .spectra import (Family, KernelSpec, critical_exponent, eig_dist_kernel, eig_dist_kernel_weighted, oracle_eig,
                      positivity_scan, r2v_best_c, re_kernel_eig, self_integral, sharp_constant, sphere_area)
from .heisenberg import HeisenbergPoint, SpherePoint, cayley, cayley_inverse, group_mul
from .mobius_sphere import MobiusParams, flow, flow_factor, phi_map
from .discretize import DensityField, KernelOperator, hopf_rule, kernel_matrix, real_sphere_rule
from .extremal_solver import SolveReport, SolverConfig, continuation, functional, solve

__version__ = "0.1.0"

__all__ = [
    "DomainError", "SpectralIndex",
    "Family", "KernelSpec", "critical_exponent", "eig_dist_kernel", "eig_dist_kernel_weighted", "oracle_eig",
    "positivity_scan", "r2v_best_c", "re_kernel_eig", "self_integral", "sharp_constant", "sphere_area",
    "HeisenbergPoint", "SpherePoint", "cayley", "cayley_inverse", "group_mul",
    "MobiusParams", "flow", "flow_factor", "phi_map",
    "DensityField", "KernelOperator", "hopf_rule", "kernel_matrix", "real_sphere_rule",
    "SolveReport", "SolverConfig", "continuation", "functional", "solve",
]
