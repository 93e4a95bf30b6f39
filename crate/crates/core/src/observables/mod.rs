//! Entanglement, purity and fidelity functionals, plus the estimators that
//! reduce trajectories to scaling exponents and thresholds.

mod fit;
mod measures;
mod threshold;

pub use fit::{fit_power_law, PowerLawFit, FIT_FLOOR};
pub use measures::{concurrence, concurrence_unclamped, fidelity, purity, wootters_values};
pub use threshold::{
    analytic_threshold, central_difference_slope, early_growth_rate, threshold_scan, ThresholdResult,
};
