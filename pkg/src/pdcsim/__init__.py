"""Collinear type-I parametric down-conversion numerics.

Dispersion and phase matching in uniaxial crystals, sampled spectral
grids with a detection model, and the first- and second-order
spatiotemporal correlation maps those spectra imply, including
azimuthal phase shaping and ring fitting.
"""

from .correlations import (
    CorrMap,
    PhaseMask,
    RingFitResult,
    WidthsReport,
    apply_phase_mask,
    correlation_transform,
    default_mask,
    direct_transform_oracle,
    g1_map,
    g2_map,
    ring_fit,
    ring_scales,
    widths_and_fedorov,
)
from .dispersion import (
    EXTRAORDINARY_PRINCIPAL,
    ORDINARY,
    SPEED_OF_LIGHT,
    CrystalSpec,
    Polarization,
    SellmeierSet,
    bbo,
    gvd,
    load_crystal,
    omega_from_wavelength_um,
    refractive_index,
    wavelength_um_from_omega,
    wavevector_magnitude,
    zero_dispersion_wavelength,
)
from .errors import (
    AllZeroField,
    AlreadyWeighted,
    DegenerateInput,
    EmptyOverlap,
    GridTooLarge,
    NonUniformGrid,
    NoSignChange,
    OutOfValidityRange,
    PdcError,
    PeakNotResolved,
)
from .phasematch import (
    MismatchPoint,
    PumpSpec,
    collinear_degenerate_angle,
    delta_k,
    mismatch_grid,
    spectral_amplitude,
    spectrum_value,
    tuning_curve,
)
from .spectra import (
    KIND_AMPLITUDE,
    KIND_INTENSITY,
    AngleWavelengthMap,
    FieldGrid,
    GridSpec,
    apply_mode_density,
    boundary_contact,
    build_amplitude_grid,
    build_intensity_grid,
    classify_topology,
    default_grid,
    instrument_convolution,
    to_angle_wavelength,
)

__version__ = "0.1.0"
