"""Exact and high-precision geometry of the rank-(n+1) lattice with the
signature-(1, n) intersection form: reflection-group chamber reduction,
self-intersection volumes, section counts, cusp excursions, constructive
boundary points, and the finite-horizon scans that estimate their growth
exponents."""

__version__ = "0.1.0"

from .asymptotics import (
    RayScanRow,
    RayScanTable,
    SectionScanRow,
    SectionScanTable,
    SubsequenceDesignation,
    designated_subsequences,
    fitted_slope,
    h0_scan,
    kappa_estimates,
    nu_vol_estimate,
    ray_scan,
    rounddown,
    slope_estimates,
    windowed_slopes,
)
from .boundary import (
    BoundaryPointSpec,
    Decomposition,
    EmbeddingMap,
    ExplicitIsotropic,
    boundary_curve,
    cusp_triangle_arc,
    decompose,
    embed,
    materialize,
    materialize_with_certificate,
    parabolic_scan,
)
from .chamber import (
    ConeLocation,
    ReductionResult,
    Word,
    apply_word,
    classify_cone,
    pair_power_apply,
    reduce_to_chamber,
    reflect,
    reflection_matrix,
    simplify_word,
)
from .cusp import (
    ConvergenceCertificate,
    CuspId,
    ExcursionSchedule,
    ExcursionTimes,
    build_recurrent_point,
    delta_inf_target,
    excursion_times,
    excursion_word,
    geometric_schedule,
    height,
    in_horoball,
    limsup_ratio,
    phi_offset,
    phi_proxy,
    polynomial_schedule,
    s_to_t,
    schedule_limit_vector,
    supergeometric_schedule,
    t_to_s,
)
from .errors import (
    AmbiguousAtDepth,
    BackendMismatch,
    DegenerateSpan,
    DimensionMismatch,
    InvalidSpec,
    NonConvergent,
    NonTimelike,
    NotBig,
    NotIntegral,
    NotNef,
    ResourceError,
    RingGuard,
    StepCapExceeded,
    WehlerError,
    WordTooLong,
    ZeroPairing,
)
from .lattice import (
    LatticeVector,
    alpha_vector,
    as_int_coords,
    form_constants,
    gram_matrix,
    is_isotropic,
    is_timelike_positive,
    norm_sq,
    omega,
    omega_hat,
    pair,
    pair_with_u,
    to_context,
    u_vector,
    vector,
    zero_vector,
)
from .oracle import SquareFreePoly, brute_force_reduce, chi_oracle, todd_class
from .scalars import EXACT_CTX, FLOAT_CTX, Context, float_ctx
from .volume import (
    h0_nef_big,
    sandwich_constant,
    symmetric_profile,
    top_intersection,
    vol_k,
    volume,
)
