use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generator::dissipative_part;
use crate::density::validate_density_matrix;
use crate::error::{Error, Result};
use crate::matrix::{expm, ComplexMatrix};
use crate::pauli::{pauli_coefficients, reconstruct_flat};

const PROBE_SEED: u64 = 0x5eed;
const PROBE_RANDOM_STATES: usize = 24;
const PROBE_TIMES: usize = 25;
const PROBE_TOL: f64 = 1e-9;

/// Symmetric single-site dissipator in the (0, x, y, z) basis with zero first
/// row and column.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipatorMatrix {
    #[serde(default)]
    pub k_x: f64,
    #[serde(default)]
    pub k_y: f64,
    #[serde(default)]
    pub k_z: f64,
    #[serde(default)]
    pub f_xy: f64,
    #[serde(default)]
    pub f_xz: f64,
    #[serde(default)]
    pub f_yz: f64,
}

impl DissipatorMatrix {
    /// K_x = K_y = λ, everything else zero.
    pub fn dephasing(lambda: f64) -> Self {
        Self { k_x: lambda, k_y: lambda, ..Self::default() }
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, self.k_x, self.f_xy, self.f_xz],
            [0.0, self.f_xy, self.k_y, self.f_yz],
            [0.0, self.f_xz, self.f_yz, self.k_z],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        [self.k_x, self.k_y, self.k_z, self.f_xy, self.f_xz, self.f_yz]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }
}

/// Accepts iff the diagonal rates are nonnegative, every pairwise minor
/// f_ab² ≤ K_a K_b holds, and [`positivity_probe`] finds no negative
/// eigenvalue.
pub fn validate_dissipator(d: &DissipatorMatrix) -> Result<()> {
    let entries = [d.k_x, d.k_y, d.k_z, d.f_xy, d.f_xz, d.f_yz];
    if entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidDissipator("entries must be finite".into()));
    }
    for (name, k) in [("K_x", d.k_x), ("K_y", d.k_y), ("K_z", d.k_z)] {
        if k < 0.0 {
            return Err(Error::InvalidDissipator(format!("negative rate {name} = {k}")));
        }
    }
    for (name, f, ka, kb) in [
        ("f_xy² ≤ K_x K_y", d.f_xy, d.k_x, d.k_y),
        ("f_xz² ≤ K_x K_z", d.f_xz, d.k_x, d.k_z),
        ("f_yz² ≤ K_y K_z", d.f_yz, d.k_y, d.k_z),
    ] {
        if f * f > ka * kb {
            return Err(Error::InvalidDissipator(format!("pairwise condition {name} violated")));
        }
    }
    if let Some(min_eig) = positivity_probe(d) {
        return Err(Error::InvalidDissipator(format!(
            "propagated state lost positivity (min eigenvalue {min_eig:.3e})"
        )));
    }
    Ok(())
}

/// Propagates the single-site map (tensored with the identity on a partner
/// qubit) over Bell states and seeded random pure states for
/// t ∈ (0, 5/max rate]. Returns the most negative eigenvalue found if any
/// falls below −1e-9.
pub fn positivity_probe(d: &DissipatorMatrix) -> Option<f64> {
    let scale = d.max_abs();
    if scale == 0.0 {
        return None;
    }
    let generator = dissipative_part(d, &DissipatorMatrix::default());
    let probes = probe_states();
    let t_max = 5.0 / scale;
    let mut worst = f64::INFINITY;
    for step in 1..=PROBE_TIMES {
        let t = t_max * step as f64 / PROBE_TIMES as f64;
        let prop = expm(&generator.scale(t));
        for r0 in &probes {
            let r = prop.mul_vec(r0);
            let report = validate_density_matrix(&reconstruct_flat(&r), PROBE_TOL);
            worst = worst.min(report.min_eigenvalue);
        }
    }
    (worst < -PROBE_TOL).then_some(worst)
}

fn probe_states() -> Vec<Vec<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut vectors: Vec<[Complex64; 4]> = vec![
        [c(s), z, z, c(s)],
        [c(s), z, z, c(-s)],
        [z, c(s), c(s), z],
        [z, c(s), c(-s), z],
        [c(s), Complex64::new(0.0, s), z, z],
        [c(0.5); 4],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..PROBE_RANDOM_STATES {
        let mut v = [z; 4];
        for a in &mut v {
            *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        vectors.push(v.map(|a| a / norm));
    }
    vectors
        .iter()
        .map(|v| pauli_coefficients(&ComplexMatrix::outer(v, v)).to_vec())
        .collect()
}
