//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Input must be Hermitian to this max-abs-entry tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending; `vectors` holds the matching eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// Σ f(λ_i) v_i v_i†
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect, tol: HERMITIAN_TOL });
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = m.dim();
    let mut a = ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAGONAL_TOL * scale.max(1.0) {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

/// Annihilates a[p][q] with the unitary V = diag-phase · real rotation,
/// applying A ← V†AV and W ← WV.
fn rotate(a: &mut ComplexMatrix, w: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that are below rounding relative to the diagonal.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let vpp = Complex64::new(c, 0.0);
    let vpq = Complex64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = wkp * vpp + wkq * vqp;
        w[(k, q)] = wkp * vpq + wkq * vqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ZERO;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorted_descending() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0, 0.0]);
        let es = hermitian_eigensystem(&m).unwrap();
        assert_eq!(es.values, vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let m = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        let es = hermitian_eigensystem(&m).unwrap();
        assert!(es.values.iter().all(|&v| (v - 0.25).abs() < 1e-16));
    }

    #[test]
    fn pauli_y_has_plus_minus_one() {
        let y = ComplexMatrix::from_rows([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]);
        let es = hermitian_eigensystem(&y).unwrap();
        assert!((es.values[0] - 1.0).abs() < 1e-15);
        assert!((es.values[1] + 1.0).abs() < 1e-15);
        let v = es.vector(0);
        let yv = y.mul_vec(&v);
        assert!((yv[0] - v[0]).norm() < 1e-15 && (yv[1] - v[1]).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows([[ZERO, c(1.0, 0.0)], [ZERO, ZERO]]);
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NotHermitian { .. })));
    }

    fn random_hermitian(n: usize, seed: &[f64]) -> ComplexMatrix {
        let mut k = 0;
        let mut next = || {
            k += 1;
            seed[k % seed.len()] * (1.0 + 0.37 * k as f64).sin()
        };
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(next(), 0.0);
            for j in i + 1..n {
                let z = c(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    proptest! {
        #[test]
        fn reconstructs_random_hermitian(
            seed in proptest::collection::vec(-2.0f64..2.0, 8..40),
            n in 2usize..9,
        ) {
            let h = random_hermitian(n, &seed);
            let es = hermitian_eigensystem(&h).unwrap();
            let back = es.map_spectrum(|x| x);
            prop_assert!(back.max_abs_diff(&h) < 1e-11);
            // Orthonormal eigenvectors.
            let vv = &es.vectors.dagger() * &es.vectors;
            prop_assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-11);
            for k in 0..n {
                let v = es.vector(k);
                let hv = h.mul_vec(&v);
                for i in 0..n {
                    prop_assert!((hv[i] - v[i] * es.values[k]).norm() < 1e-11);
                }
            }
            prop_assert!(es.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
