"""Numerics for the Henon problem -Delta u = |x|^alpha u^p on the unit ball.

The package computes the positive radial solution for 1 < p < p_alpha, the
spectrum of its linearization mode by mode, the Morse index and its
degeneracy points across the exponent range, the endpoint asymptotics at
p -> 1 and p -> p_alpha, and the nonradial symmetry-breaking branch that
bifurcates where the Morse index changes.
"""

from .asymptotics import (
    BlowupTable,
    EmdenFowlerTransform,
    LimitProfile,
    PToOneReport,
    RescaledProfile,
    WeightedEigenpair,
    blowup_table,
    emden_fowler,
    rescale_profile,
    verify_p_to_1,
    weighted_first_eigen,
)
from .continuation import (
    AxisymGrid,
    AxisymState,
    Branch,
    BranchPoint,
    continue_branch,
    embed_radial,
    kernel_direction,
    make_grid,
    newton_solve,
    residual,
    sector_crossing,
    sector_eigenvalue,
)
from .errors import HenonError, ParameterError, SolverError
from .morse_scan import (
    DegeneracyPoint,
    ScanResult,
    ScanRow,
    default_grid,
    find_degeneracy_points,
    quadform_R4,
    quadform_terms,
    random_radial_test_functions,
    scan,
)
from .params import HenonParams, critical_exponent
from .radial import (
    NormalizedProfile,
    RadialProfile,
    derived_functions,
    graded_mesh,
    integrate_normalized,
    solve_radial,
)
from .spectral import (
    ModeProblem,
    ModeSpectrum,
    MorseReport,
    angular_eigenvalue,
    morse_index,
    multiplicity,
    prufer_count,
    solve_mode_spectrum,
)

__version__ = "0.1.0"
