use num_complex::Complex64;

use crate::density::{psd_sqrt, DensityMatrix};
use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pauli::sigma;

/// States handed to the functionals must pass validation at this level.
const INPUT_TOL: f64 = 1e-9;

fn check(rho: &DensityMatrix) -> Result<()> {
    let report = rho.validate(INPUT_TOL);
    if report.passed() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("not a valid density matrix: {report}")))
    }
}

/// Square roots of the eigenvalues of √ρ ρ̃ √ρ, descending, where
/// ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ).
///
/// These are the singular values of A = √ρ (σʸ⊗σʸ) √ρ*, read off from the
/// Hermitian dilation [[0, A], [A†, 0]] so that small values keep full
/// absolute precision instead of passing through a square root of rounding
/// noise.
pub fn wootters_values(rho: &DensityMatrix) -> Result<[f64; 4]> {
    check(rho)?;
    let s = psd_sqrt(rho.matrix())?;
    let yy = sigma(2).kron(&sigma(2));
    let a = &(&s * &yy) * &s.conj();
    let a_dag = a.dagger();
    let dilation = ComplexMatrix::from_fn(8, |i, j| match (i < 4, j < 4) {
        (true, false) => a[(i, j - 4)],
        (false, true) => a_dag[(i - 4, j)],
        _ => Complex64::new(0.0, 0.0),
    });
    let es = hermitian_eigensystem(&dilation)?;
    Ok([0, 1, 2, 3].map(|k| es.values[k].max(0.0)))
}

/// λ₁ − λ₂ − λ₃ − λ₄ before clamping.
pub fn concurrence_unclamped(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_values(rho)?;
    Ok(l[0] - l[1] - l[2] - l[3])
}

/// Wootters concurrence in [0, 1]; negative differences clamp to exactly 0.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence_unclamped(rho)?.clamp(0.0, 1.0))
}

/// Tr ρ² = Σ |ρ_ij|²
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))².
pub fn fidelity(rho: &DensityMatrix, sigma_state: &DensityMatrix) -> Result<f64> {
    check(rho)?;
    check(sigma_state)?;
    let s = psd_sqrt(rho.matrix())?;
    let inner = &(&s * sigma_state.matrix()) * &s;
    let es = hermitian_eigensystem(&inner)?;
    let root_trace: f64 = es.values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_pure(v: &[f64]) -> ([Complex64; 4], DensityMatrix) {
        let amps = [c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7])];
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps = amps.map(|a| a / norm);
        (amps, DensityMatrix::pure(amps).unwrap())
    }

    fn random_mixed(v: &[f64]) -> DensityMatrix {
        let b = ComplexMatrix::from_fn(4, |i, j| c(v[2 * (4 * i + j)], v[2 * (4 * i + j) + 1]));
        let m = &b * &b.dagger();
        let tr = m.trace().re;
        DensityMatrix::new(m.scale(c(1.0 / tr, 0.0))).unwrap()
    }

    fn random_unitary(v: &[f64]) -> ComplexMatrix {
        // exp(iH) via the eigensystem of a random Hermitian H.
        let mut h = ComplexMatrix::zeros(4);
        let mut k = 0;
        for i in 0..4 {
            h[(i, i)] = c(v[k], 0.0);
            k += 1;
            for j in i + 1..4 {
                h[(i, j)] = c(v[k], v[k + 1]);
                h[(j, i)] = c(v[k], -v[k + 1]);
                k += 2;
            }
        }
        let es = hermitian_eigensystem(&h).unwrap();
        let n = 4;
        let mut u = ComplexMatrix::zeros(n);
        for (idx, &lam) in es.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, 3.0 * lam);
            for i in 0..n {
                for j in 0..n {
                    u[(i, j)] += phase * es.vectors[(i, idx)] * es.vectors[(j, idx)].conj();
                }
            }
        }
        u
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        assert_eq!(concurrence(&DensityMatrix::plus_plus()).unwrap(), 0.0);
    }

    #[test]
    fn bell_state_is_maximally_entangled() {
        assert!((concurrence(&DensityMatrix::bell_phi_plus()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_values() {
        let m = DensityMatrix::maximally_mixed();
        assert_eq!(concurrence(&m).unwrap(), 0.0);
        assert!((purity(&m) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn fidelity_examples() {
        let pp = DensityMatrix::plus_plus();
        assert!((fidelity(&pp, &pp).unwrap() - 1.0).abs() < 1e-10);
        let mixed = DensityMatrix::maximally_mixed();
        assert!((fidelity(&pp, &mixed).unwrap() - 0.25).abs() < 1e-7);
        assert!((fidelity(&mixed, &pp).unwrap() - 0.25).abs() < 1e-7);
        assert!((fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_state() {
        let mut m = DensityMatrix::maximally_mixed().into_matrix();
        m[(0, 0)] = c(0.75, 0.0);
        m[(1, 1)] = c(-0.25, 0.0);
        let bad = DensityMatrix::from_engine(m);
        assert!(concurrence(&bad).is_err());
        assert!(fidelity(&bad, &DensityMatrix::plus_plus()).is_err());
    }

    #[test]
    fn pure_product_projector_purity() {
        let (_, rho) = random_pure(&[0.3, 0.1, -0.2, 0.5, 0.7, 0.0, 0.1, -0.4]);
        assert!((purity(&rho) - 1.0).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn pure_state_concurrence_identity(v in proptest::collection::vec(-1.0f64..1.0, 8)) {
            prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-2);
            let (a, rho) = random_pure(&v);
            let expected = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
            prop_assert!((concurrence(&rho).unwrap() - expected).abs() < 1e-10);
        }

        #[test]
        fn wootters_spectrum_matches_product_form(v in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let rho = random_mixed(&v);
            let s = psd_sqrt(rho.matrix()).unwrap();
            let yy = sigma(2).kron(&sigma(2));
            let tilde = &(&yy * &rho.matrix().conj()) * &yy;
            let r = &(&s * &tilde) * &s;
            let eig = hermitian_eigensystem(&r).unwrap().values;
            let l = wootters_values(&rho).unwrap();
            for k in 0..4 {
                prop_assert!((l[k] * l[k] - eig[k].max(0.0)).abs() < 1e-10);
            }
        }

        #[test]
        fn concurrence_invariant_under_local_z_rotations(
            v in proptest::collection::vec(-1.0f64..1.0, 32),
            phi_a in 0.0f64..6.3,
            phi_b in 0.0f64..6.3,
        ) {
            let rho = random_mixed(&v);
            let rz = |phi: f64| ComplexMatrix::diagonal(&[Complex64::from_polar(1.0, -phi / 2.0), Complex64::from_polar(1.0, phi / 2.0)]);
            let u = rz(phi_a).kron(&rz(phi_b));
            let rotated = rho.conjugate_by(&u);
            prop_assert!((concurrence(&rotated).unwrap() - concurrence(&rho).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn purity_unitarily_invariant(
            v in proptest::collection::vec(-1.0f64..1.0, 32),
            h in proptest::collection::vec(-1.0f64..1.0, 16),
        ) {
            let rho = random_mixed(&v);
            let u = random_unitary(&h);
            prop_assert!((purity(&rho.conjugate_by(&u)) - purity(&rho)).abs() < 1e-12);
        }

        #[test]
        fn fidelity_symmetric(
            v in proptest::collection::vec(-1.0f64..1.0, 32),
            w in proptest::collection::vec(-1.0f64..1.0, 32),
        ) {
            let a = random_mixed(&v);
            let b = random_mixed(&w);
            let fab = fidelity(&a, &b).unwrap();
            prop_assert!((fab - fidelity(&b, &a).unwrap()).abs() < 1e-10);
            prop_assert!((0.0..=1.0).contains(&fab));
        }
    }
}
