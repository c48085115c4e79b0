"""Ground states of fractional NLS with sign-changing nonlinearity on a periodic box."""

from .analysis import (
    ProfileBundle,
    WaveState,
    decomposition_energy_check,
    evolve,
    standing_wave_check,
    translation_suite,
)
from .constants import HardyConstants, c_N_alpha, critical_exponent, gamma_fn, mu_star
from .errors import *  # noqa: F401,F403
from .functional import EnergyReport, ProblemSpec, energy, gradient, nehari_residual, split_energies
from .grid import Field, TorusGrid, forward_transform, inverse_transform, l2_inner, lp_norm, translate
from .inequalities import epsilon_bound_check, gn_check, hardy_check, hardy_translation_decay
from .nehari import (
    GroundStateReport,
    ProjectionResult,
    SolverOptions,
    dichotomy_probe,
    lipschitz_check,
    minimize,
    project,
)
from .operators import (
    Bump,
    Lattice,
    NonlinearitySpec,
    PotentialSpec,
    PowerWell,
    frac_laplacian_fourier,
    frac_laplacian_pv,
    hardy_weight,
)

__version__ = "0.1.0"
