//! Two-qubit Pauli basis.
//!
//! Single-qubit index order is fixed as (0, x, y, z). A two-qubit coefficient
//! is addressed by (μ, ν) with μ acting on site A and ν on site B; the flat
//! index is `4μ + ν`. The 4×4 computational basis is
//! |a₁b₁⟩, |a₁b₂⟩, |a₂b₁⟩, |a₂b₂⟩ with σᶻ|a₁⟩ = +|a₁⟩.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, I, ONE, ZERO};

pub const TRACE_TOL: f64 = 1e-12;

/// Single-qubit Pauli matrix by index in (0, x, y, z) order.
pub fn sigma(mu: usize) -> ComplexMatrix {
    match mu {
        0 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, ONE]]),
        1 => ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]),
        3 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index {mu} out of range"),
    }
}

/// σ^μ ⊗ σ^ν
pub fn sigma_pair(mu: usize, nu: usize) -> ComplexMatrix {
    sigma(mu).kron(&sigma(nu))
}

/// r_{μν} = Tr(ρ σ^μ⊗σ^ν), stored flat at `4μ + ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliCoefficients {
    pub r: [f64; 16],
}

impl PauliCoefficients {
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.r[4 * mu + nu]
    }

    pub fn set(&mut self, mu: usize, nu: usize, value: f64) {
        self.r[4 * mu + nu] = value;
    }

    pub fn identity_component() -> Self {
        let mut r = [0.0; 16];
        r[0] = 1.0;
        Self { r }
    }
}

/// Coefficients of any Hermitian 4×4 matrix, with no trace requirement.
pub fn pauli_coefficients(m: &ComplexMatrix) -> [f64; 16] {
    let mut r = [0.0; 16];
    for mu in 0..4 {
        for nu in 0..4 {
            r[4 * mu + nu] = m.trace_product(&sigma_pair(mu, nu)).re;
        }
    }
    r
}

pub fn pauli_decompose(m: &ComplexMatrix) -> Result<PauliCoefficients> {
    if m.dim() != 4 {
        return Err(Error::InvalidInput(format!("expected a 4x4 matrix, got {0}x{0}", m.dim())));
    }
    let defect = m.hermiticity_defect();
    if defect > TRACE_TOL {
        return Err(Error::NotHermitian { defect, tol: TRACE_TOL });
    }
    let tr = m.trace();
    if (tr - ONE).norm() > TRACE_TOL {
        return Err(Error::NonUnitTrace { trace: tr.re, tol: TRACE_TOL });
    }
    let mut r = pauli_coefficients(m);
    // Trace is already verified; pin the identity component exactly.
    r[0] = 1.0;
    Ok(PauliCoefficients { r })
}

/// (1/4) Σ r_{μν} σ^μ⊗σ^ν
pub fn pauli_reconstruct(coeffs: &PauliCoefficients) -> ComplexMatrix {
    reconstruct_flat(&coeffs.r)
}

pub(crate) fn reconstruct_flat(r: &[f64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for mu in 0..4 {
        for nu in 0..4 {
            let c = r[4 * mu + nu];
            if c == 0.0 {
                continue;
            }
            let p = sigma_pair(mu, nu);
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] += p[(i, j)] * Complex64::new(0.25 * c, 0.0);
                }
            }
        }
    }
    out
}
