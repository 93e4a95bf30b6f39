//! Reduction of a diagonal two-site coupling table to identity, local and
//! entangling parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// g_ij: energy of the product basis state |a_i b_j⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub g: [[f64; 2]; 2],
}

/// H = c0 I⊗I + cA σᶻ⊗I + cB I⊗σᶻ − ω σᶻ⊗σᶻ
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCouplings {
    pub c0: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub omega: f64,
}

impl ReducedCouplings {
    /// Diagonal of the Hamiltonian in the product basis, as the 2×2 table g_ij.
    pub fn diagonal(&self) -> [[f64; 2]; 2] {
        let s = [1.0, -1.0];
        let mut g = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = self.c0 + self.c_a * s[i] + self.c_b * s[j] - self.omega * s[i] * s[j];
            }
        }
        g
    }
}

pub fn reduce_couplings(table: &CouplingTable) -> Result<ReducedCouplings> {
    let [[g11, g12], [g21, g22]] = table.g;
    if table.g.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("coupling table has non-finite entries".into()));
    }
    Ok(ReducedCouplings {
        c0: (g11 + g12 + g21 + g22) / 4.0,
        c_a: (g11 + g12 - g21 - g22) / 4.0,
        c_b: (g11 - g12 + g21 - g22) / 4.0,
        omega: (g12 + g21 - g11 - g22) / 4.0,
    })
}
