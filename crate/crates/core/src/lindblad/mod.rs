//! Effective GKSL dynamics of the pair with an additive two-site dissipator.
//!
//! States are propagated as the 16 Pauli coefficients r_{μν} (index `4μ + ν`,
//! site A first). The per-site dissipator acts on the Bloch components of its
//! own site as dr_λ/dt = −2 Σ_μ D_{λμ} r_μ, so with K_x = K_y = λ the single-site
//! coherences decay as e^{−2λt}.

mod closed_form;
mod dissipator;
mod generator;
mod propagate;

pub use closed_form::{dephasing_closed_form, dephasing_purity, dephasing_time_dependent, lindblad_concurrence_rate};
pub use dissipator::{positivity_probe, validate_dissipator, DissipatorMatrix};
pub use generator::gksl_generator;
pub use propagate::{evolve, evolve_trajectory, evolve_trajectory_with, EvolveOptions, Propagator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time profile λ(t) multiplying both dissipators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSchedule {
    Constant { lambda: f64 },
    /// λ(t) = λ̃ t
    Linear { lambda_tilde: f64 },
    /// Piecewise-linear through (time, rate) points, held flat outside.
    Tabulated { points: Vec<(f64, f64)> },
}

impl LambdaSchedule {
    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Constant { lambda } => *lambda,
            Self::Linear { lambda_tilde } => lambda_tilde * t,
            Self::Tabulated { points } => {
                let (first, last) = (points[0], points[points.len() - 1]);
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let i = points.partition_point(|p| p.0 <= t);
                let (t0, r0) = points[i - 1];
                let (t1, r1) = points[i];
                r0 + (r1 - r0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Upper bound of λ(s) for s ∈ [0, t].
    pub fn max_rate_until(&self, t: f64) -> f64 {
        match self {
            Self::Constant { lambda } => *lambda,
            Self::Linear { lambda_tilde } => lambda_tilde * t.max(0.0),
            Self::Tabulated { points } => points.iter().map(|p| p.1).fold(0.0, f64::max),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    fn check(&self) -> Result<()> {
        match self {
            Self::Constant { lambda } if !(lambda.is_finite() && *lambda >= 0.0) => {
                Err(Error::InvalidInput(format!("rate λ = {lambda} must be finite and nonnegative")))
            }
            Self::Linear { lambda_tilde } if !(lambda_tilde.is_finite() && *lambda_tilde >= 0.0) => Err(
                Error::InvalidInput(format!("slope λ̃ = {lambda_tilde} must be finite and nonnegative")),
            ),
            Self::Tabulated { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidInput("tabulated schedule needs at least one point".into()));
                }
                if points.iter().any(|&(t, r)| !t.is_finite() || !r.is_finite() || r < 0.0) {
                    return Err(Error::InvalidInput("tabulated rates must be finite and nonnegative".into()));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidInput("tabulated times must be strictly increasing".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    omega: f64,
    dissipator_a: DissipatorMatrix,
    dissipator_b: DissipatorMatrix,
    schedule: LambdaSchedule,
    local_fields: [f64; 2],
}

impl LindbladModel {
    /// Validates both dissipators (including the positivity probe) and the schedule.
    pub fn new(
        omega: f64,
        dissipator_a: DissipatorMatrix,
        dissipator_b: DissipatorMatrix,
        schedule: LambdaSchedule,
    ) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidInput("ω must be finite".into()));
        }
        validate_dissipator(&dissipator_a)?;
        if dissipator_b != dissipator_a {
            validate_dissipator(&dissipator_b)?;
        }
        schedule.check()?;
        Ok(Self { omega, dissipator_a, dissipator_b, schedule, local_fields: [0.0; 2] })
    }

    /// K_x = K_y = 1 on both sites, scaled by a constant λ.
    pub fn dephasing(omega: f64, lambda: f64) -> Result<Self> {
        let d = DissipatorMatrix::dephasing(1.0);
        Self::new(omega, d, d, LambdaSchedule::Constant { lambda })
    }

    /// Dephasing with λ(t) = λ̃ t.
    pub fn dephasing_linear(omega: f64, lambda_tilde: f64) -> Result<Self> {
        let d = DissipatorMatrix::dephasing(1.0);
        Self::new(omega, d, d, LambdaSchedule::Linear { lambda_tilde })
    }

    /// Adds c_A σᶻ⊗I + c_B I⊗σᶻ to the Hamiltonian.
    pub fn with_local_fields(mut self, c_a: f64, c_b: f64) -> Self {
        self.local_fields = [c_a, c_b];
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn schedule(&self) -> &LambdaSchedule {
        &self.schedule
    }

    pub fn dissipators(&self) -> (&DissipatorMatrix, &DissipatorMatrix) {
        (&self.dissipator_a, &self.dissipator_b)
    }

    pub fn local_fields(&self) -> [f64; 2] {
        self.local_fields
    }
}
