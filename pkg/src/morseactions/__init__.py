"""Action-angle data for 1D mechanical Hamiltonians p^2 + G(q) with Morse
non-degenerate periodic potentials: Morse certification, standard-form
normalization of momentum-dependent perturbations, singularity-aware action
integrals, separatrix log decompositions, and energy-from-action inversion.
"""

__version__ = "0.1.0"

from .actions import (
    ActionBranch,
    action,
    action_deriv,
    branch_invert,
    cosine_like_check,
    lower_bound_report,
    region_table,
    split_identities,
    sqrt_factor,
)
from .constants import PaperConstants, cosine_like_threshold
from .cosine import CosineRef, action_star, action_star_derivs, twist_star
from .errors import MorseActionsError
from .inversion import ActionDomain, EnergyMap, energy_derivs, invert, twist, twist_at_energy
from .morse import CriticalContinuation, MorseData, continue_critical, morse_check
from .potential import (
    FourierPotential,
    ParamPolynomial,
    TrigSeries,
    evaluate,
    make_potential,
    pendulum_potential,
    strip_sup_bound,
    sup_fourier_norm,
)
from .singularity import (
    SingularityFit,
    bottom_analyticity_check,
    fit_log_singularity,
    perturbation_scaling,
)
from .standard_form import (
    PerturbedHamiltonian,
    StandardFormSystem,
    build_b_dag,
    build_b_sharp,
    normalize,
    solve_momentum,
    standard_form_system,
    tilde_b,
)
from .system import OneDSystem, RegionTable, RegionWindow, perturbed_system, pure_system

__all__ = [name for name in dir() if not name.startswith("_")]
