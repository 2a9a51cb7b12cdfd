//! Decoherence laws, bath correlation structure and discrete-mode spectral
//! functions.

mod law;
mod modes;
mod topology;

pub use law::{decoherence_factor, DephasingLaw, TabulatedLaw};
pub use modes::{lamb_shift_coeff, mode_correlation, occupation, spectral_function, BathMode, ModeBath};
pub use topology::{
    collective_factor, optimal_aux_coupling, partial_corr_factor, partial_corr_factor_with_range, AuxOptimum,
    BathTopology, CorrelationKernel, CorrelationSums, QubitId, SumRange,
};
