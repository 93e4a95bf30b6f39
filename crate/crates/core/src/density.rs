use std::fmt;

use num_complex::Complex64;

use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Hermiticity and trace tolerance applied at construction.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Default floor for the minimum eigenvalue.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub tol: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.hermiticity_defect <= self.tol
            && self.trace_defect <= self.tol
            && self.min_eigenvalue >= -self.tol
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e} (tol {:.1e})",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue, self.tol
        )
    }
}

/// Measures how far `m` is from a valid 4×4 density matrix.
///
/// The eigenvalue check runs on the Hermitian part so that a report is
/// produced even for badly non-Hermitian input.
pub fn validate_density_matrix(m: &ComplexMatrix, tol: f64) -> ValidationReport {
    let hermiticity_defect = m.hermiticity_defect();
    let trace_defect = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    let sym = ComplexMatrix::from_fn(m.dim(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let min_eigenvalue = hermitian_eigensystem(&sym)
        .map(|es| *es.values.last().unwrap())
        .unwrap_or(f64::NAN);
    ValidationReport { hermiticity_defect, trace_defect, min_eigenvalue, tol }
}

/// 4×4 Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates with the default tolerances.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_positivity_tol(m, POSITIVITY_TOL)
    }

    pub fn with_positivity_tol(m: ComplexMatrix, positivity_tol: f64) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::InvalidInput(format!("density matrix must be 4x4, got {0}x{0}", m.dim())));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("density matrix has non-finite entries".into()));
        }
        let report = validate_density_matrix(&m, STRUCTURE_TOL);
        if report.hermiticity_defect > STRUCTURE_TOL {
            return Err(Error::NotHermitian { defect: report.hermiticity_defect, tol: STRUCTURE_TOL });
        }
        if report.trace_defect > STRUCTURE_TOL {
            return Err(Error::NonUnitTrace { trace: m.trace().re, tol: STRUCTURE_TOL });
        }
        if !(report.min_eigenvalue >= -positivity_tol) {
            return Err(Error::Integrity(format!(
                "state is not positive semi-definite: min eigenvalue {:.3e}",
                report.min_eigenvalue
            )));
        }
        Ok(Self(m))
    }

    /// Wraps engine output that is correct by construction; callers that
    /// need a guarantee run [`validate_density_matrix`] on the result.
    pub(crate) fn from_engine(m: ComplexMatrix) -> Self {
        debug_assert_eq!(m.dim(), 4);
        Self(m)
    }

    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput("state vector must be nonzero and finite".into()));
        }
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    /// |++⟩⟨++|, the product initial state used throughout.
    pub fn plus_plus() -> Self {
        Self(ComplexMatrix::from_fn(4, |_, _| Complex64::new(0.25, 0.0)))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).scale(Complex64::new(0.25, 0.0)))
    }

    /// (|00⟩ + |11⟩)/√2
    pub fn bell_phi_plus() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self(ComplexMatrix::outer(&[s, ZERO, ZERO, s], &[s, ZERO, ZERO, s]))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_density_matrix(&self.0, tol)
    }

    /// U ρ U†
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self(&(u * &self.0) * &u.dagger())
    }
}

/// Principal square root of a positive semi-definite Hermitian matrix;
/// eigenvalues below zero (rounding) are clamped.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let es = hermitian_eigensystem(m)?;
    Ok(es.map_spectrum(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_passes() {
        let r = validate_density_matrix(DensityMatrix::maximally_mixed().matrix(), 1e-12);
        assert!(r.passed());
        assert!((r.min_eigenvalue - 0.25).abs() < 1e-15);
    }

    #[test]
    fn negative_eigenvalue_fails() {
        let m = ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0]);
        let r = validate_density_matrix(&m, 1e-10);
        assert!(!r.passed());
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-15);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Integrity(_))));
    }

    #[test]
    fn non_unit_trace_rejected() {
        let m = ComplexMatrix::from_real_diagonal(&[0.5, 0.5, 0.5, 0.0]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NonUnitTrace { .. })));
    }

    #[test]
    fn non_hermitian_reported() {
        let mut m = DensityMatrix::maximally_mixed().into_matrix();
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        let r = validate_density_matrix(&m, 1e-12);
        assert!(!r.passed());
        assert!((r.hermiticity_defect - 0.1).abs() < 1e-15);
    }

    #[test]
    fn sqrt_of_projector_is_projector() {
        let p = DensityMatrix::plus_plus();
        let s = psd_sqrt(p.matrix()).unwrap();
        assert!(s.max_abs_diff(p.matrix()) < 1e-7);
        let sq = &s * &s;
        assert!(sq.max_abs_diff(p.matrix()) < 1e-14);
    }
}
