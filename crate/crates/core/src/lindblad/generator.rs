//! Generator G(t) with dr/dt = G(t)·r on the 16 Pauli coefficients.

use num_complex::Complex64;

use super::{DissipatorMatrix, LindbladModel};
use crate::matrix::{ComplexMatrix, RealMatrix, I};
use crate::pauli::{pauli_coefficients, sigma, sigma_pair};

/// Time-independent pieces; G(t) = coherent + λ(t)·dissipative.
#[derive(Debug, Clone)]
pub(crate) struct GeneratorParts {
    pub coherent: RealMatrix,
    pub dissipative: RealMatrix,
}

impl GeneratorParts {
    pub fn new(model: &LindbladModel) -> Self {
        let [c_a, c_b] = model.local_fields();
        let (d_a, d_b) = model.dissipators();
        Self { coherent: coherent_part(model.omega(), c_a, c_b), dissipative: dissipative_part(d_a, d_b) }
    }

    pub fn at(&self, rate: f64) -> RealMatrix {
        let mut g = self.coherent.clone();
        g.axpy(rate, &self.dissipative);
        g
    }
}

/// Hamiltonian −ω σᶻ⊗σᶻ + c_A σᶻ⊗I + c_B I⊗σᶻ.
pub(crate) fn hamiltonian(omega: f64, c_a: f64, c_b: f64) -> ComplexMatrix {
    let z = sigma(3);
    let id = sigma(0);
    let zz = z.kron(&z).scale(Complex64::new(-omega, 0.0));
    let za = z.kron(&id).scale(Complex64::new(c_a, 0.0));
    let zb = id.kron(&z).scale(Complex64::new(c_b, 0.0));
    &(&zz + &za) + &zb
}

/// Pauli-space matrix of ρ ↦ −i[H, ρ].
pub(crate) fn coherent_part(omega: f64, c_a: f64, c_b: f64) -> RealMatrix {
    let h = hamiltonian(omega, c_a, c_b);
    let mut g = RealMatrix::zeros(16);
    for b in 0..16 {
        let x = sigma_pair(b / 4, b % 4).scale(Complex64::new(0.25, 0.0));
        let comm = &(&h * &x) - &(&x * &h);
        let image = pauli_coefficients(&comm.scale(-I));
        for (a, v) in image.iter().enumerate() {
            g[(a, b)] = *v;
        }
    }
    g
}

/// Additive dissipator −2(D_A ⊗ 1 + 1 ⊗ D_B) on the Bloch indices.
pub(crate) fn dissipative_part(d_a: &DissipatorMatrix, d_b: &DissipatorMatrix) -> RealMatrix {
    let (da, db) = (d_a.matrix(), d_b.matrix());
    let mut g = RealMatrix::zeros(16);
    for partner in 0..4 {
        for l in 1..4 {
            for m in 1..4 {
                g[(4 * l + partner, 4 * m + partner)] += -2.0 * da[l][m];
                g[(4 * partner + l, 4 * partner + m)] += -2.0 * db[l][m];
            }
        }
    }
    g
}

/// G(t) for the model, including the schedule factor λ(t).
pub fn gksl_generator(model: &LindbladModel, t: f64) -> RealMatrix {
    GeneratorParts::new(model).at(model.schedule().rate(t))
}
