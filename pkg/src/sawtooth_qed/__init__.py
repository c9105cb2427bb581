"""Quantum optics of emitters coupled to a photonic sawtooth lattice.

The package covers the single-excitation physics of quantum emitters
locally coupled to a two-band sawtooth bath with a tunable hopping
phase: band structure, exact emitter self-energies, emission dynamics
and directionality, photon bound states, bath-mediated spin couplings,
and a validation model for the parametric coupler that realizes the
complex hopping in circuit hardware.
"""

__version__ = "0.1.0"

from .bloch import (
    BandEdgeSet,
    DegenerateDispersionError,
    LatticeParams,
    TangencyError,
    band_coupling,
    band_energies,
    band_extrema,
    bloch_transform,
    group_velocity,
    resonant_momenta,
    wrap_angle,
)
from .bound_states import (
    BoundStateRecord,
    ExistenceReport,
    FitQualityError,
    GapRegion,
    bound_state_energy,
    bound_state_exists,
    bound_state_wavefunction,
    bs_phase,
    dominant_momentum,
    find_bound_states,
    gap_regions,
    localization_length,
    momentum_density,
)
from .dynamics import (
    HAVE_COMPILED_KERNELS,
    EmitterSpec,
    NormDriftError,
    SawtoothHamiltonian,
    Trajectory,
    build_hamiltonian,
    directional_fractions,
    emitter_amplitude,
    emitter_excitation,
    evolve,
    left_fraction,
    markov_prediction,
    photon_populations,
)
from .emission import (
    ChannelDivergenceError,
    DecayChannel,
    DirectionalityReport,
    decay_channels,
    directionality,
    directionality_ratio,
    sweep_map,
    total_rate,
)
from .greens import (
    DegeneratePoleError,
    SpectralPoint,
    collective_self_energy,
    pole_locations,
    self_energy,
    self_energy_ksum,
    spectral_parameters,
)
from .parametric import (
    ParametricPairConfig,
    ParametricTrajectory,
    extract_effective_hopping,
    simulate_parametric_pair,
    swap_time,
)
from .spin_model import (
    EffectiveSpinModel,
    MarkovValidityError,
    effective_couplings,
    loop_phase,
    unit_plaquette_phase,
    validate_exchange,
)

__all__ = [
    "__version__",
    "HAVE_COMPILED_KERNELS",
    # bloch
    "BandEdgeSet", "DegenerateDispersionError", "LatticeParams",
    "TangencyError", "band_coupling", "band_energies", "band_extrema",
    "bloch_transform", "group_velocity", "resonant_momenta", "wrap_angle",
    # greens
    "DegeneratePoleError", "SpectralPoint", "collective_self_energy",
    "pole_locations", "self_energy", "self_energy_ksum",
    "spectral_parameters",
    # bound states
    "BoundStateRecord", "ExistenceReport", "FitQualityError", "GapRegion",
    "bound_state_energy", "bound_state_exists", "bound_state_wavefunction",
    "bs_phase", "dominant_momentum", "find_bound_states", "gap_regions",
    "localization_length", "momentum_density",
    # dynamics
    "EmitterSpec", "NormDriftError", "SawtoothHamiltonian", "Trajectory",
    "build_hamiltonian", "directional_fractions", "emitter_amplitude",
    "emitter_excitation", "evolve", "left_fraction", "markov_prediction",
    "photon_populations",
    # emission
    "ChannelDivergenceError", "DecayChannel", "DirectionalityReport",
    "decay_channels", "directionality", "directionality_ratio",
    "sweep_map", "total_rate",
    # parametric
    "ParametricPairConfig", "ParametricTrajectory",
    "extract_effective_hopping", "simulate_parametric_pair", "swap_time",
    # spin model
    "EffectiveSpinModel", "MarkovValidityError", "effective_couplings",
    "loop_phase", "unit_plaquette_phase", "validate_exchange",
]
