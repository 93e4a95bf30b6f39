use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples below this are dominated by rounding in purity arithmetic and
/// are dropped before fitting.
pub const FIT_FLOOR: f64 = 1e-13;
const MIN_SAMPLES: usize = 5;

/// y ≈ prefactor · t^exponent over `window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// Least-squares line through (ln t, ln y).
///
/// Requires every y > 0 and t > 0; after dropping y < [`FIT_FLOOR`] at least
/// five samples spanning a decade of t must remain.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if let Some(&(t, y)) = samples.iter().find(|(t, y)| !(*t > 0.0 && *y > 0.0 && t.is_finite() && y.is_finite())) {
        return Err(Error::Usage(format!("power-law fit needs positive samples, got ({t}, {y})")));
    }
    let kept: Vec<(f64, f64)> = samples.iter().copied().filter(|&(_, y)| y >= FIT_FLOOR).collect();
    if kept.len() < MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "power-law fit needs at least {MIN_SAMPLES} samples above {FIT_FLOOR:e}, got {}",
            kept.len()
        )));
    }
    let t_min = kept.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let t_max = kept.iter().map(|s| s.0).fold(0.0, f64::max);
    if t_max < 10.0 * t_min * (1.0 - 1e-12) {
        return Err(Error::Usage(format!("fit window [{t_min:e}, {t_max:e}] spans less than a decade")));
    }

    let n = kept.len() as f64;
    let xs: Vec<f64> = kept.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|s| s.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let syy: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(PowerLawFit { exponent: slope, prefactor: intercept.exp(), r_squared, window: (t_min, t_max) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn exact_quadratic() {
        let s: Vec<_> = log_grid(1e-4, 1e-2, 51).into_iter().map(|t| (t, 3.0 * t * t)).collect();
        let fit = fit_power_law(&s).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-6);
        assert!((fit.prefactor - 3.0).abs() < 1e-6);
        assert!(fit.r_squared > 0.999999);
    }

    #[test]
    fn planted_exponents() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let s: Vec<_> = log_grid(1e-3, 1.0, 40).into_iter().map(|t| (t, 0.7 * t.powf(p))).collect();
            let fit = fit_power_law(&s).unwrap();
            assert!((fit.exponent - p).abs() <= 1e-6, "p = {p}: {}", fit.exponent);
        }
    }

    #[test]
    fn rejects_nonpositive_and_short_inputs() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0), (50.0, 1.0)]).is_err());
        let narrow: Vec<_> = log_grid(1.0, 5.0, 10).into_iter().map(|t| (t, t)).collect();
        assert!(matches!(fit_power_law(&narrow), Err(Error::Usage(_))));
        assert!(fit_power_law(&[(1.0, 1.0), (10.0, 10.0)]).is_err());
    }

    #[test]
    fn drops_samples_below_floor() {
        let mut s: Vec<_> = log_grid(1e-3, 1e-1, 20).into_iter().map(|t| (t, t * t)).collect();
        s.push((1e-9, 1e-18));
        let fit = fit_power_law(&s).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9);
        assert!((fit.window.0 - 1e-3).abs() < 1e-15);
    }
}
