//! Bath-engineering Monte Carlo: random-phase multi-tone dephasing fields,
//! exact trajectory phases, ensemble readout, and the Gaussian-limit and
//! spectral-density descriptions of the same noise.

mod ensemble;
mod fit;
mod noise;
mod setup;
mod spectrum;

pub use ensemble::{control_phase, run_ensemble, sci, trajectory_phases, EnsembleResult};
pub use fit::{fit_decoherence_factor, fit_power_law, DecoherenceEstimate, PowerLawFit, NOISE_FLOOR_SIGMAS};
pub use noise::{accumulated_phase, noise_amplitude, NoiseChannel, NoiseShape, NoiseSpec, PhasePolicy, PhaseSet};
pub use setup::{
    uniform_grid, NoiseRegime, SimulationSetup, DEFAULT_FREQUENCY, DEFAULT_GRID_END, DEFAULT_GRID_STEP, DEFAULT_WORKING,
};
pub use spectrum::{
    analytic_chi, analytic_chi_for, calibrate_working_amplitude, chi_from_psd, gaussian_probability, psd_components,
    total_psd, PsdComb, PsdPair, Scenario, SpectralLine,
};
