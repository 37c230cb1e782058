"""Invariant-density toolkit for the Hurwitz complex continued fraction.

Expansion and convergents over the Gaussian integers, the analyticity
regions of the invariant density with their digit-admissibility
automaton, bit-packed rasterization of the dual regions, Taylor-jet
kernel derivatives, and the resolution-extrapolated derivative
estimates with their consistency checks.
"""

from .core import (
    DomainError,
    GaussianInt,
    I,
    ONE,
    UNITS,
    ZERO,
    in_fundamental_domain,
    is_digit,
    nearest_gaussian,
)
from .dynamics import (
    ApproximationReport,
    Convergent,
    DEFAULT_SEED,
    ExpansionStep,
    LengthMismatch,
    NatExtState,
    OrbitTerminated,
    StepCheck,
    check_approximation,
    convergents,
    expand,
    gauss_step,
    invariance_residual,
    natext_step,
    orbit_chunks,
)
from .regions import (
    ALL_REGIONS,
    ALL_SUBREGIONS,
    BOUNDARY_EPS,
    Digit,
    FULL,
    IllegalMark,
    MARKABLE_VALUES,
    NotAdmissible,
    RegionId,
    SubregionId,
    SuccessorSet,
    alpha_translates,
    classify,
    classify_batch,
    count_orbit_violations,
    digit_region,
    is_admissible,
    mark_for,
    next_subregion,
    orbit_digits,
    rotate_region,
    successor_set,
)
from .pixelgrid import (
    FormatError,
    IndexOutOfRange,
    OutOfRange,
    PixelGrid,
    SymmetryUnsupported,
    downsample,
    export_pbm,
    fill_mirror,
    fill_neighbors,
    fill_symmetry,
    flood_fill,
    flood_fill_symmetric,
    load_grid,
    pixel_center,
    pixel_index,
    populate_boundary,
    populate_many,
    populate_orbit,
    rotate_grid,
    save_grid,
)
from .taylor import (
    SingularJet,
    SingularKernel,
    TaylorJet,
    derivative_scale,
    jet_add,
    jet_const,
    jet_mul,
    jet_recip,
    jet_scale,
    jet_var,
    kernel_jet,
    kernel_matrix,
    kernel_matrix_fd_check,
    kernel_weighted_sums,
)
from .estimator import (
    BoundaryPoint,
    CoeffTable,
    DensityEvaluator,
    FitResult,
    InsufficientData,
    MissingGrid,
    StencilCrossesBoundary,
    density_at,
    deviation_ratios,
    estimate_coeffs,
    estimate_coeffs_detailed,
    finite_difference_density,
    fit_exponential,
    fits_to_json,
    functional_eq_residual,
    region_frequency,
    smoothing_weight,
)

__version__ = "0.1.0"
