"""Quantum spectra and classical normal modes of systems defined by a prepotential.

The prepotential ``W`` fixes the ground state ``exp(W/hbar)``, the quantum
potential and the classical potential. At the maximum of ``W`` the
eigenvalues of ``-hess W`` are the normal-mode frequencies, and the O(hbar)
part of every quantum level is a non-negative integer combination of them.
"""

__version__ = "0.1.0"

from .classical_spectrum import (
    OperatorResidual,
    apply_operator,
    check_gradient_eigenvector,
    check_vanishing,
    constant_eigenfunction,
    elementary_candidates,
    product,
    verify_eigenfunction,
)
from .correspondence import (
    CorrespondenceReport,
    decompose,
    extrapolate_calE,
    run_correspondence,
)
from .equilibrium import EquilibriumReport, find_equilibrium, normal_modes
from .errors import (
    CatalogError,
    ConvergenceError,
    DomainError,
    PreconditionError,
    SolverError,
    ValidationError,
)
from .quantum_1d import GridSpec, SpectrumTable, converge_spectrum, default_grid, solve_spectrum
from .systems import (
    ClassicalEigenfunction,
    PrepotentialSystem,
    classical_potential,
    custom_system,
    make_system,
    quantum_potential,
)
