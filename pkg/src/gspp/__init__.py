"""Graphene surface-plasmon quantum state transfer simulator."""

from .material import (
    CONSTANTS,
    Conductivity,
    GrapheneParams,
    LogSingularityError,
    PhysicalConstants,
    QuadratureError,
    conductivity,
    conductivity_full,
    conductivity_lowT,
    sigma_min,
)
from .dispersion import (
    SppMode,
    UnsupportedModeError,
    effective_wavelength,
    group_velocity,
    propagation_length,
    solve_mode,
    supported_polarization,
    te_wavenumber,
    tm_wavenumber,
    transverse_q0,
)
from .quantize import (
    QuantizationGeometry,
    mode_function,
    mode_normalization,
    quantize_mode,
    vector_potential_amplitude,
)
from .qstate import (
    DensityMatrix,
    StateVector,
    annihilation,
    coherent_overlap,
    coherent_state,
    fidelity,
    number,
    parity,
    truncation_dimension,
)
from .coupling import (
    CoherentMixture,
    CouplerSpec,
    excite_cat,
    excite_code,
    heisenberg_transform,
)
from .channel import (
    ChannelSpec,
    damp_fock,
    fidelity_vs_distance,
    flux_damping,
    propagate_cat,
)
from .prism import (
    AtrSolution,
    NotResonant,
    PrismGeometry,
    atr_solve,
    coupling_from_beta,
    critical_angle,
    matching_frequency,
    overlap_beta,
    prism_mode_normalization,
    reflectance_map,
)
from .qec import (
    CatCode,
    QecRunConfig,
    TrajectoryRecord,
    apply_annihilation,
    average_fidelity,
    code_states,
    kraus_pair,
    no_jump,
    orthogonality_monitor,
    parity_check,
    recover,
    run_trajectory,
)

__version__ = "0.1.0"
