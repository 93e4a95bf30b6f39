use super::generator::GeneratorParts;
use super::LindbladModel;
use crate::density::{validate_density_matrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::matrix::{expm, RealMatrix};
use crate::pauli::{pauli_decompose, reconstruct_flat};

/// Step size is at most this fraction of the fastest timescale.
const STEP_FRACTION: f64 = 1e-3;
const STEP_DOUBLING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagator {
    /// exp(G t) by scaling and squaring; constant schedules only.
    Exponential,
    /// Fixed-step classical RK4 with a step-halving self-check.
    Stepped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Tolerance for the integrity check on every output state.
    pub tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9 }
    }
}

pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, t: f64, method: Propagator) -> Result<DensityMatrix> {
    let mut states = evolve_trajectory(model, rho0, &[t], method)?;
    Ok(states.pop().expect("one time requested"))
}

pub fn evolve_trajectory(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    method: Propagator,
) -> Result<Vec<DensityMatrix>> {
    evolve_trajectory_with(model, rho0, times, method, &EvolveOptions::default())
}

/// States at each of `times` (nonnegative, nondecreasing).
pub fn evolve_trajectory_with(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    method: Propagator,
    options: &EvolveOptions,
) -> Result<Vec<DensityMatrix>> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput("evolution times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("evolution times must be nondecreasing".into()));
    }
    let r0 = pauli_decompose(rho0.matrix())?.r.to_vec();
    let parts = GeneratorParts::new(model);
    let coefficients = match method {
        Propagator::Exponential => {
            if !model.schedule().is_constant() {
                return Err(Error::Usage(
                    "the exponential propagator requires a constant schedule; use the stepped method".into(),
                ));
            }
            let g = parts.at(model.schedule().rate(0.0));
            times.iter().map(|&t| expm(&g.scale(t)).mul_vec(&r0)).collect::<Vec<_>>()
        }
        Propagator::Stepped => stepped(model, &parts, &r0, times)?,
    };
    coefficients
        .into_iter()
        .zip(times)
        .map(|(r, &t)| {
            let m = reconstruct_flat(&r);
            let report = validate_density_matrix(&m, options.tolerance);
            if !report.passed() {
                return Err(Error::Integrity(format!("state at t = {t} is unphysical: {report}")));
            }
            Ok(DensityMatrix::from_engine(m))
        })
        .collect()
}

fn stepped(model: &LindbladModel, parts: &GeneratorParts, r0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let t_end = times.last().copied().unwrap_or(0.0);
    let (d_a, d_b) = model.dissipators();
    let [c_a, c_b] = model.local_fields();
    let scale = [
        model.omega().abs(),
        c_a.abs(),
        c_b.abs(),
        model.schedule().max_rate_until(t_end) * d_a.max_abs().max(d_b.max_abs()),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let h_max = if scale > 0.0 { STEP_FRACTION / scale } else { f64::INFINITY };

    let coarse = integrate(model, parts, r0, times, h_max);
    let fine = integrate(model, parts, r0, times, h_max / 2.0);
    for ((a, b), t) in coarse.iter().zip(&fine).zip(times) {
        let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if diff > STEP_DOUBLING_TOL {
            return Err(Error::Integrity(format!(
                "step-halving check failed at t = {t}: coefficient difference {diff:.3e}"
            )));
        }
    }
    Ok(fine)
}

fn integrate(model: &LindbladModel, parts: &GeneratorParts, r0: &[f64], times: &[f64], h_max: f64) -> Vec<Vec<f64>> {
    let schedule = model.schedule();
    let generator = |t: f64| -> RealMatrix { parts.at(schedule.rate(t)) };
    let mut r = r0.to_vec();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; 16], vec![0.0; 16], vec![0.0; 16], vec![0.0; 16]);
    let mut tmp = vec![0.0; 16];
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = if h_max.is_finite() { (span / h_max).ceil().max(1.0) as usize } else { 1 };
            let h = span / steps as f64;
            let constant = schedule.is_constant();
            let g_const = constant.then(|| generator(0.0));
            for step in 0..steps {
                let s = t + h * step as f64;
                let (g0, gm, g1);
                let (ga, gb, gc) = match &g_const {
                    Some(g) => (g, g, g),
                    None => {
                        g0 = generator(s);
                        gm = generator(s + 0.5 * h);
                        g1 = generator(s + h);
                        (&g0, &gm, &g1)
                    }
                };
                ga.mul_vec_into(&r, &mut k1);
                axpy_into(&r, 0.5 * h, &k1, &mut tmp);
                gb.mul_vec_into(&tmp, &mut k2);
                axpy_into(&r, 0.5 * h, &k2, &mut tmp);
                gb.mul_vec_into(&tmp, &mut k3);
                axpy_into(&r, h, &k3, &mut tmp);
                gc.mul_vec_into(&tmp, &mut k4);
                for i in 0..16 {
                    r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            t = target;
        }
        out.push(r.clone());
    }
    out
}

fn axpy_into(x: &[f64], a: f64, y: &[f64], out: &mut [f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}
