"""Semiclassical ray tracing and spectral diagnostics for oceanic waves.

Traces slow-mode (Rossby) rays of the rotating shallow-water system,
classifies their reduced latitude motion, decides trapping, constructs
trapped seed sets, quantizes the fast (inertia-gravity) branch, and
transports particle ensembles to exhibit the trapping/dispersion dichotomy.
"""

__version__ = "0.1.0"

from .classification import (
    AsymptoticRates,
    MarginReport,
    TrajectoryClass,
    asymptotic_rates,
    classify,
    sigma_margin,
)
from .dynamics import (
    EventSpec,
    PhasePoint,
    Trajectory,
    integrate,
    rossby_symbol,
    rossby_vector_field,
    wind_up_x1,
)
from .errors import OceanrayError
from .mode_algebra import (
    ModeMatrices,
    a0,
    det_p0_modulus,
    poincare_symbol,
    polarization_matrices,
    polarization_residuals,
)
from .profiles import (
    CoriolisProfile,
    Profiles,
    ZonalProfile,
    check_symbol_condition,
    make_betaplane,
    make_bump,
    make_signed_zonal,
    make_zero_zonal,
    zeros_in,
)
from .reduced_phase import (
    PotentialReport,
    bracket,
    energy_surface_points,
    period,
    potential,
    rho,
)
from .spectral import (
    ActionProfile,
    DispersionTriple,
    action_integral,
    bohr_sommerfeld,
    count_eigenvalues_below,
    dispersion_roots,
    group_speed,
    make_action_profile,
    rossby_root_asymptotics,
)
from .transport import Ensemble, mass_in_box, propagate, sample_initial
from .trapping import (
    LambdaPerSetup,
    ScanRow,
    TrappingVerdict,
    critper,
    critper_verdict,
    drift_velocity,
    h_of_xi1,
    lambda_per_G,
    lambda_per_root,
    lambda_per_setup,
    lambda_sing_point,
    rho_threshold,
    scan_lambda,
)
