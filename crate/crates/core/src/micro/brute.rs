//! Full-space oracle: evolves |ψ_A⟩|ψ_B⟩|ψ_E⟩ in the 4M-dimensional product
//! basis and traces out the environment.

use num_complex::Complex64;

use super::MicroModel;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub(crate) const MAX_ENV_QUBITS: u32 = 12;
pub const MAX_ENV_DIM: usize = 1 << MAX_ENV_QUBITS;

/// Optional local terms c_A σᶻ_A + c_B σᶻ_B added to the full Hamiltonian.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LocalFields {
    pub c_a: f64,
    pub c_b: f64,
}

const SZ: [f64; 2] = [1.0, -1.0];

fn guard(model: &MicroModel) -> Result<()> {
    if model.env_dim() > MAX_ENV_DIM {
        return Err(Error::ResourceLimit(format!(
            "environment dimension {} exceeds brute-force guard {MAX_ENV_DIM}",
            model.env_dim()
        )));
    }
    Ok(())
}

/// Energy of |a_i b_j e_k⟩.
fn energy(model: &MicroModel, fields: LocalFields, i: usize, j: usize, k: usize) -> f64 {
    -model.omega * SZ[i] * SZ[j]
        + fields.c_a * SZ[i]
        + fields.c_b * SZ[j]
        + model.h_a[i][k]
        + model.h_b[j][k]
        + model.energies[k]
}

/// Amplitudes ψ[(2i + j)·M + k] at time t for environment amplitudes `env`.
fn evolve_full(model: &MicroModel, env: &[Complex64], fields: LocalFields, t: f64) -> Vec<Complex64> {
    let m = model.env_dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); 4 * m];
    for i in 0..2 {
        for j in 0..2 {
            for (k, &fk) in env.iter().enumerate() {
                if fk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let phase = Complex64::from_polar(1.0, -energy(model, fields, i, j, k) * t);
                psi[(2 * i + j) * m + k] = fk * 0.5 * phase;
            }
        }
    }
    psi
}

/// ρ_AB = Tr_E |ψ⟩⟨ψ|
fn trace_out_env(psi: &[Complex64], m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |a, b| {
        psi[a * m..(a + 1) * m]
            .iter()
            .zip(&psi[b * m..(b + 1) * m])
            .map(|(x, y)| x * y.conj())
            .sum()
    })
}

fn pure_env(model: &MicroModel) -> Vec<Complex64> {
    model
        .weights
        .iter()
        .zip(&model.phases)
        .map(|(&w, &phi)| Complex64::from_polar(w.sqrt(), phi))
        .collect()
}

pub fn brute_force_reduced_state(model: &MicroModel, t: f64) -> Result<DensityMatrix> {
    brute_force_reduced_state_with_fields(model, t, LocalFields::default())
}

pub fn brute_force_reduced_state_with_fields(
    model: &MicroModel,
    t: f64,
    fields: LocalFields,
) -> Result<DensityMatrix> {
    guard(model)?;
    let psi = evolve_full(model, &pure_env(model), fields, t);
    Ok(DensityMatrix::from_engine(trace_out_env(&psi, model.env_dim())))
}

/// Environment prepared as the diagonal mixture Σ_k |f_k|² |e_k⟩⟨e_k|.
pub fn mixed_environment_reduced_state(model: &MicroModel, t: f64) -> Result<DensityMatrix> {
    guard(model)?;
    let m = model.env_dim();
    let mut rho = ComplexMatrix::zeros(4);
    let mut basis = vec![Complex64::new(0.0, 0.0); m];
    for (k, &w) in model.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        basis[k] = Complex64::new(1.0, 0.0);
        let psi = evolve_full(model, &basis, LocalFields::default(), t);
        basis[k] = Complex64::new(0.0, 0.0);
        rho = &rho + &trace_out_env(&psi, m).scale(Complex64::new(w, 0.0));
    }
    Ok(DensityMatrix::from_engine(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::micro::reduced_state;

    #[test]
    fn initial_state_all_quarter() {
        let m = MicroModel::random(3, 1.0, 1).unwrap();
        let rho = brute_force_reduced_state(&m, 0.0).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix::plus_plus().matrix()) < 1e-15);
    }

    #[test]
    fn zero_hamiltonian_keeps_plus_plus() {
        let m = MicroModel::new(
            0.0,
            [vec![0.0; 4], vec![0.0; 4]],
            [vec![0.0; 4], vec![0.0; 4]],
            vec![0.25; 4],
            vec![0.1, 0.2, 0.3, 0.4],
            vec![1.0, -2.0, 3.0, 0.5],
        )
        .unwrap();
        for t in [0.3, 2.0, 11.0] {
            let rho = brute_force_reduced_state(&m, t).unwrap();
            assert!(rho.matrix().max_abs_diff(DensityMatrix::plus_plus().matrix()) < 1e-15);
        }
    }

    #[test]
    fn matches_closed_form() {
        for seed in 0..5 {
            let m = MicroModel::random(4, 0.9, seed).unwrap();
            for t in [0.1, 0.5, 1.0] {
                let a = reduced_state(&m, t);
                let b = brute_force_reduced_state(&m, t).unwrap();
                assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn single_state_environment_mixed_equals_pure() {
        let m = MicroModel::new(1.0, [vec![0.4], vec![-0.1]], [vec![0.2], vec![0.7]], vec![1.0], vec![1.1], vec![0.3]).unwrap();
        let t = 0.9;
        let a = mixed_environment_reduced_state(&m, t).unwrap();
        let b = brute_force_reduced_state(&m, t).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn mixed_environment_at_time_zero() {
        let m = MicroModel::random(5, 1.0, 8).unwrap();
        let rho = mixed_environment_reduced_state(&m, 0.0).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix::plus_plus().matrix()) < 1e-15);
    }
}
