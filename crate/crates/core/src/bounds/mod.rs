//! Error system, Fourier split of the input, steady-state moments and the
//! a posteriori error bound.

mod certificate;
mod error_system;
mod fourier;
mod steady_state;

pub use certificate::{
    aposteriori_bound, measured_error, offline_precompute, refined_output, rom_error, BoundReport,
    OfflineBound,
};
pub use error_system::{
    build_error_system, error_gramian, initial_condition_bound, ErrorGramian, ErrorSystem,
};
pub use fourier::{
    fourier_approximation, remainder_norm, FourierApproximation, MIN_POINTS_PER_ORDER,
};
pub use steady_state::{steady_state_moments, ErrorMoments, SteadyStateData};
