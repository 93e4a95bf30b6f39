//! Exact microscopic engine: two qubits with diagonal couplings to an
//! environment of M = 2^N basis states.
//!
//! Everything here uses H = −ω σᶻ⊗σᶻ + H_Ae + H_Be + H_E with all terms
//! diagonal in the product basis, so evolution is pure phase accumulation
//! and the reduced state has closed form.

mod brute;
mod closed_form;
mod gravity;
mod moments;

pub use brute::{
    brute_force_reduced_state, brute_force_reduced_state_with_fields,
    mixed_environment_reduced_state, LocalFields, MAX_ENV_DIM,
};
pub use closed_form::{gamma, isolated_concurrence, lambda_pm, offdiagonals, reduced_state, OffDiagonals};
pub use gravity::{gravitational_model, GravitationalModel, GravitationalSpec, Weighting, MAX_GRAVITY_SITES};
pub use moments::{env_moments, gaussian_offdiagonals, micro_shorttime_purity, EnvMoments};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Couplings and initial environment for the exact engine.
///
/// `h_a[i][k]` is the energy of |a_{i+1} e_k⟩ (likewise `h_b`); `weights[k]`
/// is |f_k|², `phases[k]` is arg f_k and `energies[k]` is ε_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroModel {
    pub omega: f64,
    pub h_a: [Vec<f64>; 2],
    pub h_b: [Vec<f64>; 2],
    pub weights: Vec<f64>,
    pub phases: Vec<f64>,
    pub energies: Vec<f64>,
}

impl MicroModel {
    pub fn new(
        omega: f64,
        h_a: [Vec<f64>; 2],
        h_b: [Vec<f64>; 2],
        weights: Vec<f64>,
        phases: Vec<f64>,
        energies: Vec<f64>,
    ) -> Result<Self> {
        let model = Self { omega, h_a, h_b, weights, phases, energies };
        model.check()?;
        Ok(model)
    }

    /// Environment without phases or internal energies.
    pub fn from_couplings(omega: f64, h_a: [Vec<f64>; 2], h_b: [Vec<f64>; 2], weights: Vec<f64>) -> Result<Self> {
        let m = weights.len();
        Self::new(omega, h_a, h_b, weights, vec![0.0; m], vec![0.0; m])
    }

    fn check(&self) -> Result<()> {
        let m = self.weights.len();
        if m == 0 {
            return Err(Error::InvalidInput("environment dimension must be at least 1".into()));
        }
        let rows = self.h_a.iter().chain(&self.h_b);
        if rows.clone().any(|r| r.len() != m) || self.phases.len() != m || self.energies.len() != m {
            return Err(Error::InvalidInput(format!(
                "coupling tables, phases and energies must all have length M = {m}"
            )));
        }
        let finite = rows
            .flatten()
            .chain(&self.weights)
            .chain(&self.phases)
            .chain(&self.energies)
            .all(|x| x.is_finite());
        if !finite || !self.omega.is_finite() {
            return Err(Error::InvalidInput("model parameters must be finite".into()));
        }
        if self.weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidInput("environment weights must be nonnegative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidInput(format!("environment weights sum to {total}, expected 1")));
        }
        Ok(())
    }

    /// Seeded random model with N environment qubits: couplings uniform on
    /// [−1, 1], weights flat on the simplex, phases uniform on [0, 2π),
    /// energies uniform on [−1, 1].
    pub fn random(n_env: u32, omega: f64, seed: u64) -> Result<Self> {
        if n_env > brute::MAX_ENV_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "N = {n_env} exceeds the environment guard of {}",
                brute::MAX_ENV_QUBITS
            )));
        }
        let m = 1usize << n_env;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect() };
        let h_a = [table(&mut rng), table(&mut rng)];
        let h_b = [table(&mut rng), table(&mut rng)];
        let weights = flat_simplex(m, &mut rng);
        let phases = (0..m).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        let energies = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::new(omega, h_a, h_b, weights, phases, energies)
    }

    pub fn env_dim(&self) -> usize {
        self.weights.len()
    }

    /// χ_{site,k} = h^site_{1k} − h^site_{2k}
    pub fn chi(&self, site: Site, k: usize) -> f64 {
        let h = match site {
            Site::A => &self.h_a,
            Site::B => &self.h_b,
        };
        h[0][k] - h[1][k]
    }

    /// Same couplings with the environment energies replaced.
    pub fn with_energies(&self, energies: Vec<f64>) -> Result<Self> {
        Self::new(self.omega, self.h_a.clone(), self.h_b.clone(), self.weights.clone(), self.phases.clone(), energies)
    }

    /// Uniformly rescales all environment couplings (σ scales linearly).
    pub fn scaled_couplings(&self, factor: f64) -> Result<Self> {
        let scale = |rows: &[Vec<f64>; 2]| [0, 1].map(|i| rows[i].iter().map(|x| x * factor).collect());
        Self::new(
            self.omega,
            scale(&self.h_a),
            scale(&self.h_b),
            self.weights.clone(),
            self.phases.clone(),
            self.energies.clone(),
        )
    }
}

/// Uniform sample from the probability simplex (normalized exponentials).
pub(crate) fn flat_simplex(m: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}
