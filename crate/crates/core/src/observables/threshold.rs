use serde::{Deserialize, Serialize};

use super::concurrence;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::lindblad::{evolve_trajectory, lindblad_concurrence_rate, LindbladModel, Propagator};

/// Evaluation point of the early-time estimator, in units of 1/|ω|.
const EARLY_TIME: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub lambda_star: f64,
    pub bracket: (f64, f64),
    /// Every (λ, growth rate) evaluated, in evaluation order.
    pub scan_points: Vec<(f64, f64)>,
}

/// (f(t₀ + h) − f(t₀ − h)) / 2h with h = t₀/10.
pub fn central_difference_slope(t0: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let h = t0 / 10.0;
    Ok((f(t0 + h)? - f(t0 - h)?) / (2.0 * h))
}

/// dC/dt of the dephasing model from |++⟩, by central difference at
/// t₀ = 10⁻³/|ω|.
pub fn early_growth_rate(omega: f64, lambda: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::Usage("growth-rate estimate needs a finite nonzero ω".into()));
    }
    let model = LindbladModel::dephasing(omega, lambda)?;
    let t0 = EARLY_TIME / omega.abs();
    let h = t0 / 10.0;
    let states = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &[t0 - h, t0 + h], Propagator::Exponential)?;
    Ok((concurrence(&states[1])? - concurrence(&states[0])?) / (2.0 * h))
}

fn bisect(
    (low, high): (f64, f64),
    resolution: f64,
    mut rate: impl FnMut(f64) -> Result<f64>,
) -> Result<ThresholdResult> {
    if !(low < high) || !(resolution > 0.0) {
        return Err(Error::Usage(format!("invalid scan range ({low}, {high}) or resolution {resolution}")));
    }
    let mut scan_points = Vec::new();
    let mut eval = |lambda: f64, points: &mut Vec<(f64, f64)>| -> Result<f64> {
        let r = rate(lambda)?;
        points.push((lambda, r));
        Ok(r)
    };
    let r_low = eval(low, &mut scan_points)?;
    let r_high = eval(high, &mut scan_points)?;
    if !(r_low > 0.0 && r_high <= 0.0) {
        return Err(Error::Usage(format!(
            "range ({low}, {high}) does not bracket the threshold: rates {r_low:.3e} and {r_high:.3e}"
        )));
    }
    let (mut lo, mut hi) = (low, high);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if eval(mid, &mut scan_points)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult { lambda_star: 0.5 * (lo + hi), bracket: (lo, hi), scan_points })
}

/// Bisects on the numerically estimated growth rate for the λ where
/// entanglement stops being generated.
pub fn threshold_scan(omega: f64, range: (f64, f64), resolution: f64) -> Result<ThresholdResult> {
    bisect(range, resolution, |lambda| early_growth_rate(omega, lambda))
}

/// Same bisection on the analytic leading-order rate.
pub fn analytic_threshold(omega: f64, range: (f64, f64), resolution: f64) -> Result<ThresholdResult> {
    bisect(range, resolution, |lambda| Ok(lindblad_concurrence_rate(omega, lambda)))
}
