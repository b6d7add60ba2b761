"""Single-excitation dynamics and photon emission of a qubit chain coupled to
an open waveguide.

The heavy lifting lives in the compiled extension ``_qchain``; this package
re-exports its public names.
"""

from ._qchain import (
    AmplitudeTrajectory,
    ChainConfig,
    CollectiveStateSet,
    DefectiveEigenbasisError,
    DegenerateSpectrumError,
    EffectiveMatrix,
    EvolveMethod,
    EvolveOptions,
    ModalExpansion,
    ModeClass,
    ModeSet,
    PlateauInterval,
    PlateauScan,
    RateMatrices,
    ResonantParity,
    ResonantState,
    SolverError,
    SpectralPeak,
    SpectrumNormalization,
    SpectrumResult,
    __version__,
    analytic_amplitudes_resonant,
    build_effective_matrix,
    characteristic_roots,
    coherent_dissipative_rates,
    collective_state_decomposition,
    dark_state_count,
    evolve,
    find_plateaus,
    find_spectral_peaks,
    lorentzian_reference,
    make_spectrum,
    measure_fwhm,
    modal_expansion,
    photon_amplitude_modal,
    photon_amplitude_numeric,
    photon_emission_probability,
    required_time_step,
    reduced_central_cubic_roots,
    uniform_time_grid,
)

__all__ = [
    "AmplitudeTrajectory",
    "ChainConfig",
    "CollectiveStateSet",
    "DefectiveEigenbasisError",
    "DegenerateSpectrumError",
    "EffectiveMatrix",
    "EvolveMethod",
    "EvolveOptions",
    "ModalExpansion",
    "ModeClass",
    "ModeSet",
    "PlateauInterval",
    "PlateauScan",
    "RateMatrices",
    "ResonantParity",
    "ResonantState",
    "SolverError",
    "SpectralPeak",
    "SpectrumNormalization",
    "SpectrumResult",
    "__version__",
    "analytic_amplitudes_resonant",
    "build_effective_matrix",
    "characteristic_roots",
    "coherent_dissipative_rates",
    "collective_state_decomposition",
    "dark_state_count",
    "evolve",
    "find_plateaus",
    "find_spectral_peaks",
    "lorentzian_reference",
    "make_spectrum",
    "measure_fwhm",
    "modal_expansion",
    "photon_amplitude_modal",
    "photon_amplitude_numeric",
    "photon_emission_probability",
    "required_time_step",
    "reduced_central_cubic_roots",
    "uniform_time_grid",
]
