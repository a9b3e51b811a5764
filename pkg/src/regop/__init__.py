"""Desk-scale laboratory for regular operators on extensions of the compacts.

Submodules: :mod:`~regop.spectral` (linear-algebra kernel),
:mod:`~regop.zcalc` (z-transform calculus), :mod:`~regop.algebras`
(quantum plane and crossed product), :mod:`~regop.hilsum` (fibers of the
twisted-derivative family), :mod:`~regop.experiments` (report-producing
runners) and :mod:`~regop.cli`.
"""
from .spectral import (
    OperatorMatrix, apply_spectral_function, herm_eig, operator_norm, subspace_residual,
)
from .zcalc import (
    Contraction, decompose_adjoint_domain, decompose_domain, gamma_membership,
    inclusion_residuals, multiplier_residual, center_condition_residual,
    operator_from_z, z_transform,
)
from .experiments import ResidualReport

__version__ = "0.1.0"
