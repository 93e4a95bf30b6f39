//! Reduced dynamics of two qubits coupled to a commuting many-body
//! environment, computed exactly and with an effective GKSL model.
//!
//! * [`micro`]: closed-form reduced state, full-space oracle, short-time moments.
//! * [`lindblad`]: Pauli-space generator, propagators and closed forms.
//! * [`observables`]: concurrence, purity, fidelity, power-law fits, threshold scans.
//!
//! Shared conventions: ħ = 1, product basis |a₁b₁⟩, |a₁b₂⟩, |a₂b₁⟩, |a₂b₂⟩,
//! initial state |++⟩, entangling Hamiltonian −ω σᶻ⊗σᶻ. See [`pauli`] for the
//! Pauli index order.

pub mod couplings;
pub mod density;
pub mod eigen;
pub mod error;
pub mod lindblad;
pub mod matrix;
pub mod micro;
pub mod observables;
pub mod pauli;

pub use couplings::{reduce_couplings, CouplingTable, ReducedCouplings};
pub use density::{validate_density_matrix, DensityMatrix, ValidationReport};
pub use eigen::{hermitian_eigensystem, Eigensystem};
pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use pauli::{pauli_decompose, pauli_reconstruct, PauliCoefficients};
