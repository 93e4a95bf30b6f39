//! Short-time statistics of the coupling differences χ_{A,k}, χ_{B,k}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MicroModel, OffDiagonals, Site};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvMoments {
    pub mu_a: f64,
    pub mu_b: f64,
    pub sigma_a2: f64,
    pub sigma_b2: f64,
    /// Cross-covariance of χ_A and χ_B.
    pub sigma_c2: f64,
}

impl EnvMoments {
    /// σ² = (σ_A² + σ_B²)/2, the coefficient of the t² purity deficit.
    pub fn mean_variance(&self) -> f64 {
        0.5 * (self.sigma_a2 + self.sigma_b2)
    }
}

pub fn env_moments(model: &MicroModel) -> EnvMoments {
    let w = &model.weights;
    let chi_a: Vec<f64> = (0..w.len()).map(|k| model.chi(Site::A, k)).collect();
    let chi_b: Vec<f64> = (0..w.len()).map(|k| model.chi(Site::B, k)).collect();
    let mean = |x: &[f64]| -> f64 { w.iter().zip(x).map(|(w, x)| w * x).sum() };
    let mu_a = mean(&chi_a);
    let mu_b = mean(&chi_b);
    let mut sigma_a2 = 0.0;
    let mut sigma_b2 = 0.0;
    let mut sigma_c2 = 0.0;
    for k in 0..w.len() {
        let da = chi_a[k] - mu_a;
        let db = chi_b[k] - mu_b;
        sigma_a2 += w[k] * da * da;
        sigma_b2 += w[k] * db * db;
        sigma_c2 += w[k] * da * db;
    }
    EnvMoments { mu_a, mu_b, sigma_a2, sigma_b2, sigma_c2 }
}

/// Second-order (Gaussian) approximants of Γ_A, Γ_B, Λ_± built from the
/// moments only; accurate up to O(t³).
pub fn gaussian_offdiagonals(m: &EnvMoments, t: f64) -> OffDiagonals {
    let approx = |mu: f64, var: f64| Complex64::from_polar(1.0, -mu * t) + ((-var * t * t / 2.0).exp() - 1.0);
    OffDiagonals {
        gamma_a: approx(m.mu_a, m.sigma_a2),
        gamma_b: approx(m.mu_b, m.sigma_b2),
        lambda_plus: approx(m.mu_a + m.mu_b, m.sigma_a2 + m.sigma_b2 + 2.0 * m.sigma_c2),
        lambda_minus: approx(m.mu_a - m.mu_b, m.sigma_a2 + m.sigma_b2 - 2.0 * m.sigma_c2),
    }
}

/// Leading-order purity 1 − ((σ_A² + σ_B²)/2) t².
pub fn micro_shorttime_purity(m: &EnvMoments, t: f64) -> f64 {
    1.0 - m.mean_variance() * t * t
}
