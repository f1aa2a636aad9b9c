"""Simulation toolkit for single-excitation-subspace (SES) quantum processing.

An array of n coupled qubits restricted to states with exactly one
excitation realizes an n-dimensional Hilbert space whose Hamiltonian matrix
elements are directly programmable: diagonal entries from qubit frequencies,
off-diagonal entries from tunable couplers.  This package simulates that
mode of operation end to end: Hamiltonian construction and rescaling onto
hardware limits, state propagation with several numerical kernels, pulse
protocols (uniform prep, search, phase estimation, adiabatic prep),
decoherence and control-error models, a full-Hilbert-space validation
oracle, a semiclassical collision application, and benchmarking tools.
"""

__version__ = "0.1.0"

from .core import (
    CouplerDesign,
    CouplerParams,
    StandardForm,
    TimeDependentHamiltonian,
    basis_state,
    build_ses_hamiltonian,
    build_ses_hamiltonian_general,
    coupler_strength,
    hamiltonian_from_json,
    hamiltonian_to_json,
    load_hamiltonian,
    mhz_to_rad_s,
    qubit_basis_index,
    qubit_basis_map,
    rad_s_to_mhz,
    standard_form,
    uniform_state,
)
from .propagators import (
    Diagonalization,
    Krylov,
    PadeExpm,
    PropagationResult,
    RungeKutta,
    TimeSliced,
    expm_pade,
    propagate_const,
    propagate_td,
)
from .ensemble import (
    SIGMA_K,
    SpectralSummary,
    bandwidth_stats,
    fit_power_law,
    level_spacing_stats,
    sample_k,
    spectral_stats,
    wigner_bandwidth,
    wigner_spacing,
)
from .protocols import (
    Adiabatic,
    AdiabaticPrepResult,
    ExactEigenstate,
    IpeResult,
    MeasureProtocol,
    MeasurementRecord,
    PhaseFlip,
    PulseSchedule,
    PulseStep,
    adiabatic_prep,
    apply_area_theorem,
    controlled_evolution_pulse,
    embed_controlled_hamiltonian,
    grover_iterations,
    grover_schedule,
    grover_success_probability,
    hadamard_pulse,
    ipe_run,
    k_full,
    k_star,
    k_z,
    measure,
    pulse_unitary,
    run_schedule,
    rz_pulse,
    uniform_prep_pulse,
)
from .rescaler import (
    RescalePlan,
    StaticRescale,
    invert_time_map,
    plan_from_json,
    plan_to_json,
    rescale_static,
    rescale_td,
)
from .collision import (
    CollisionParams,
    CollisionResult,
    PotentialCurveTable,
    load_potential_table,
    run_collision,
    save_potential_table,
    scattering_hamiltonian,
    synthetic_table,
    trajectory_r,
)
from .noise import (
    ControlNoiseSpec,
    SesDensity,
    amplitude_damping,
    control_error_mc,
    control_error_perturbative,
    control_error_scan,
    damping_error,
    dephasing,
    dephasing_error,
    fidelity_error,
    noisy_evolution,
    sample_perturbation,
)
from .fullspace import (
    LeakageResult,
    ProtocolComparison,
    build_full_hamiltonian,
    compare_protocol,
    leakage_run,
    project_to_ses,
    ses_indices,
)
from .bench import (
    BenchReport,
    bench_const,
    bench_td,
    timeslice_overhead,
)
