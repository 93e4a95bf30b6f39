//! Environment of N two-mass-state particles coupled to A and B by a
//! Newtonian pair potential.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{flat_simplex, MicroModel};
use crate::couplings::{reduce_couplings, CouplingTable};
use crate::error::{Error, Result};

pub const MAX_GRAVITY_SITES: usize = 12;

/// Units are whatever `g` is expressed in; distances must be positive.
/// Environment particle n sits at `dist_a[n]` from A and `dist_b[n]` from B;
/// A and B are `d_ab` apart. Mass state 1 is `m1`, state 2 is `m2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravitationalSpec {
    pub g: f64,
    pub m1: f64,
    pub m2: f64,
    pub d_ab: f64,
    pub dist_a: Vec<f64>,
    pub dist_b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    /// |f_k|² = 2^{−N}
    Uniform,
    /// Weights drawn flat on the simplex from the given seed.
    RandomSimplex { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GravitationalModel {
    pub model: MicroModel,
    /// (G²/4)(m1 − m2)⁴ Σ_n d_{nA}^{−2}; exact for uniform weights.
    pub predicted_sigma_a2: f64,
    pub predicted_sigma_b2: f64,
}

impl GravitationalSpec {
    pub fn n_sites(&self) -> usize {
        self.dist_a.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.n_sites();
        if n == 0 || self.dist_b.len() != n {
            return Err(Error::InvalidInput("dist_a and dist_b must be nonempty and of equal length".into()));
        }
        if n > MAX_GRAVITY_SITES {
            return Err(Error::ResourceLimit(format!(
                "N = {n} exceeds the enumeration guard of {MAX_GRAVITY_SITES}"
            )));
        }
        let finite = [self.g, self.m1, self.m2, self.d_ab].iter().chain(&self.dist_a).chain(&self.dist_b).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("gravitational parameters must be finite".into()));
        }
        if self.d_ab <= 0.0 || self.dist_a.iter().chain(&self.dist_b).any(|&d| d <= 0.0) {
            return Err(Error::InvalidInput("all distances must be positive".into()));
        }
        Ok(())
    }

    /// Closed-form variance of χ_site under uniform weights.
    pub fn predicted_sigma2(&self, distances: &[f64]) -> f64 {
        let dm = self.m1 - self.m2;
        let inv_sq: f64 = distances.iter().map(|d| 1.0 / (d * d)).sum();
        self.g * self.g / 4.0 * dm.powi(4) * inv_sq
    }
}

pub fn gravitational_model(spec: &GravitationalSpec, weighting: Weighting) -> Result<GravitationalModel> {
    spec.check()?;
    let n = spec.n_sites();
    let m = 1usize << n;
    let masses = [spec.m1, spec.m2];

    // A–B pair potential reduced to its entangling part.
    let pair = |i: usize, j: usize| -spec.g * masses[i] * masses[j] / spec.d_ab;
    let omega = reduce_couplings(&CouplingTable { g: [[pair(0, 0), pair(0, 1)], [pair(1, 0), pair(1, 1)]] })?.omega;

    // h_{ik} = −G Σ_n m_i m_{s_n(k)} / d_n, with s_n(k) the n-th bit of k.
    let table = |dist: &[f64]| -> [Vec<f64>; 2] {
        [0, 1].map(|i| {
            (0..m)
                .map(|k| {
                    -spec.g
                        * dist
                            .iter()
                            .enumerate()
                            .map(|(site, d)| masses[i] * masses[(k >> site) & 1] / d)
                            .sum::<f64>()
                })
                .collect()
        })
    };
    let weights = match weighting {
        Weighting::Uniform => vec![1.0 / m as f64; m],
        Weighting::RandomSimplex { seed } => flat_simplex(m, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let model = MicroModel::from_couplings(omega, table(&spec.dist_a), table(&spec.dist_b), weights)?;
    Ok(GravitationalModel {
        model,
        predicted_sigma_a2: spec.predicted_sigma2(&spec.dist_a),
        predicted_sigma_b2: spec.predicted_sigma2(&spec.dist_b),
    })
}
