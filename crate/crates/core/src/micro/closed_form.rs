use num_complex::Complex64;

use super::{MicroModel, Sign, Site};
use crate::density::DensityMatrix;
use crate::matrix::ComplexMatrix;

/// The four environment functions that dress the off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonals {
    pub gamma_a: Complex64,
    pub gamma_b: Complex64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

fn weighted_phase_sum(model: &MicroModel, t: f64, chi: impl Fn(usize) -> f64) -> Complex64 {
    model
        .weights
        .iter()
        .enumerate()
        .map(|(k, &w)| Complex64::from_polar(w, -chi(k) * t))
        .sum()
}

/// Γ_site(t) = Σ_k |f_k|² exp(−i χ_{site,k} t)
pub fn gamma(model: &MicroModel, site: Site, t: f64) -> Complex64 {
    weighted_phase_sum(model, t, |k| model.chi(site, k))
}

/// Λ_±(t) = Σ_k |f_k|² exp(−i (χ_{A,k} ± χ_{B,k}) t)
pub fn lambda_pm(model: &MicroModel, sign: Sign, t: f64) -> Complex64 {
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    weighted_phase_sum(model, t, |k| model.chi(Site::A, k) + s * model.chi(Site::B, k))
}

pub fn offdiagonals(model: &MicroModel, t: f64) -> OffDiagonals {
    OffDiagonals {
        gamma_a: gamma(model, Site::A, t),
        gamma_b: gamma(model, Site::B, t),
        lambda_plus: lambda_pm(model, Sign::Plus, t),
        lambda_minus: lambda_pm(model, Sign::Minus, t),
    }
}

impl OffDiagonals {
    pub const UNIT: Self = Self {
        gamma_a: Complex64::new(1.0, 0.0),
        gamma_b: Complex64::new(1.0, 0.0),
        lambda_plus: Complex64::new(1.0, 0.0),
        lambda_minus: Complex64::new(1.0, 0.0),
    };

    /// Assembles ρ_AB for coherent strength ω at time t from |++⟩.
    ///
    /// Layout (upper triangle, times 1/4, with e = e^{2iωt}):
    ///
    /// ```text
    ///   (0,1) e·Γ_B   (0,2) e·Γ_A   (0,3) Λ+
    ///   (1,2) Λ−      (1,3) e*·Γ_A  (2,3) e*·Γ_B
    /// ```
    ///
    /// fixed against the full-space evolution under H = −ω σᶻ⊗σᶻ.
    pub fn assemble(&self, omega: f64, t: f64) -> ComplexMatrix {
        let e = Complex64::from_polar(1.0, 2.0 * omega * t);
        let q = 0.25;
        let mut m = ComplexMatrix::zeros(4);
        let upper = [
            ((0, 1), e * self.gamma_b),
            ((0, 2), e * self.gamma_a),
            ((0, 3), self.lambda_plus),
            ((1, 2), self.lambda_minus),
            ((1, 3), e.conj() * self.gamma_a),
            ((2, 3), e.conj() * self.gamma_b),
        ];
        for i in 0..4 {
            m[(i, i)] = Complex64::new(q, 0.0);
        }
        for ((i, j), z) in upper {
            m[(i, j)] = z * q;
            m[(j, i)] = (z * q).conj();
        }
        m
    }

    /// Inverse of [`assemble`](Self::assemble): strips the coherent phase
    /// from the off-diagonal slots of any state on this layout.
    pub fn extract(rho: &ComplexMatrix, omega: f64, t: f64) -> Self {
        let e = Complex64::from_polar(1.0, -2.0 * omega * t);
        Self {
            gamma_a: rho[(0, 2)] * e * 4.0,
            gamma_b: rho[(0, 1)] * e * 4.0,
            lambda_plus: rho[(0, 3)] * 4.0,
            lambda_minus: rho[(1, 2)] * 4.0,
        }
    }
}

/// Closed-form reduced state of the AB pair at time t.
pub fn reduced_state(model: &MicroModel, t: f64) -> DensityMatrix {
    DensityMatrix::from_engine(offdiagonals(model, t).assemble(model.omega, t))
}

/// Concurrence of the decoupled pair started in |++⟩: |sin(2|ω|t)|.
pub fn isolated_concurrence(omega: f64, t: f64) -> f64 {
    (2.0 * omega.abs() * t).sin().abs().clamp(0.0, 1.0)
}
