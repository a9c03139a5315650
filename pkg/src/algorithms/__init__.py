"""
アルゴリズム層

数値カーネル、厳密対角化、SI ソルバー、SF ソルバーを提供します。
"""

from .exact_diag import exact_spectrum, ground_state_density, momentum_occupations, site_occupations
from .numerics import RootConfig, bdg_eig, secular_residual, solve_secular, sym_eig
from .sf_solver import bdg_oracle_check, sf_ground_distributions, sf_levels, sf_solve
from .si_solver import si_ground_distributions, si_levels, si_sp_energies

__all__ = [
    "RootConfig",
    "solve_secular",
    "secular_residual",
    "sym_eig",
    "bdg_eig",
    "exact_spectrum",
    "ground_state_density",
    "site_occupations",
    "momentum_occupations",
    "si_sp_energies",
    "si_levels",
    "si_ground_distributions",
    "sf_solve",
    "sf_levels",
    "sf_ground_distributions",
    "bdg_oracle_check",
]
