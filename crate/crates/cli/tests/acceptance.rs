//! Acceptance suite: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Runs without the libtest harness so the lines always print.

use std::path::Path;
use std::process::Command;

use pairdyn::lindblad::{
    dephasing_closed_form, dephasing_time_dependent, evolve_trajectory, lindblad_concurrence_rate, LindbladModel,
    Propagator,
};
use pairdyn::micro::{
    brute_force_reduced_state, env_moments, gravitational_model, mixed_environment_reduced_state, reduced_state,
    GravitationalSpec, MicroModel, Weighting,
};
use pairdyn::observables::{analytic_threshold, concurrence, early_growth_rate, fit_power_law, purity, threshold_scan};
use pairdyn::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Ordinary least squares of ln y on ln t: (slope, exp(intercept)).
fn loglog_line(ts: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let zs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, mz) = (xs.iter().sum::<f64>() / n, zs.iter().sum::<f64>() / n);
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxz / sxx;
    (slope, (mz - slope * mx).exp())
}

fn check(cond: bool, pass: String, fail: String) -> Outcome {
    if cond {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_model(i: u64) -> MicroModel {
    let n = 2 + (i % 7) as u32;
    let omega = 0.4 + 0.15 * (i % 9) as f64;
    MicroModel::random(n, omega, 9000 + i).expect("valid random model")
}

fn c1_isolated() -> Outcome {
    let mut worst_c: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for omega in [0.25, 1.0, 3.0] {
        let free = MicroModel::from_couplings(omega, [vec![0.0], vec![0.0]], [vec![0.0], vec![0.0]], vec![1.0])
            .map_err(err)?;
        for t in linspace(0.0, std::f64::consts::PI / (2.0 * omega), 101) {
            let rho = reduced_state(&free, t);
            worst_c = worst_c.max((concurrence(&rho).map_err(err)? - (2.0 * omega * t).sin()).abs());
            worst_p = worst_p.max((purity(&rho) - 1.0).abs());
        }
    }
    let msg = format!("max |C - sin 2wt| = {worst_c:.2e} (≤ 1e-10), max |P - 1| = {worst_p:.2e} (≤ 1e-12)");
    check(worst_c <= 1e-10 && worst_p <= 1e-12, msg.clone(), msg)
}

fn c2_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let model = random_model(i);
        for t in linspace(0.0, 6.0 / model.omega, 20) {
            let brute = brute_force_reduced_state(&model, t).map_err(err)?;
            worst = worst.max(reduced_state(&model, t).matrix().max_abs_diff(brute.matrix()));
        }
    }
    let msg = format!("20 models, N = 2..8, 20 times each: max entry difference {worst:.2e} (≤ 1e-10)");
    check(worst <= 1e-10, msg.clone(), msg)
}

/// Random couplings with the B table a permutation of the A table under
/// uniform weights, so σ_A = σ_B.
fn symmetric_model(seed: u64, n_env: u32) -> MicroModel {
    let base = MicroModel::random(n_env, 1.0, seed).expect("valid random model");
    let m = base.env_dim();
    let reversed = |row: &Vec<f64>| row.iter().rev().copied().collect::<Vec<f64>>();
    let h_b = [reversed(&base.h_a[0]), reversed(&base.h_a[1])];
    MicroModel::from_couplings(base.omega, base.h_a.clone(), h_b, vec![1.0 / m as f64; m]).expect("valid model")
}

fn c3_micro_purity_law() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (seed, n) in [(31, 4), (32, 6), (33, 8)] {
        let model = symmetric_model(seed, n);
        let mo = env_moments(&model);
        if (mo.sigma_a2 - mo.sigma_b2).abs() > 1e-12 {
            return Err(format!("construction failed: σ_A² = {}, σ_B² = {}", mo.sigma_a2, mo.sigma_b2));
        }
        let sigma2 = mo.sigma_a2;
        let sigma = sigma2.sqrt();
        let ts = logspace(1e-3 / sigma, 1e-2 / sigma, 26);
        let ys: Vec<f64> = ts.iter().map(|&t| 1.0 - purity(&reduced_state(&model, t))).collect();
        let (k, a) = loglog_line(&ts, &ys);
        let lib = fit_power_law(&ts.iter().copied().zip(ys.iter().copied()).collect::<Vec<_>>()).map_err(err)?;
        let good = (k - 2.0).abs() <= 0.05
            && (a / sigma2 - 1.0).abs() <= 0.05
            && (lib.exponent - k).abs() < 1e-9
            && (lib.prefactor / a - 1.0).abs() < 1e-9;
        ok &= good;
        lines.push(format!("N={n}: k = {k:.4}, a/σ² = {:.4}", a / sigma2));
    }
    let msg = format!("{} (k = 2 ± 0.05, a = σ² ± 5%)", lines.join("; "));
    check(ok, msg.clone(), msg)
}

fn c4_micro_concurrence_slope() -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..10 {
        let model = random_model(100 + i).scaled_couplings(0.5 + 0.5 * i as f64).map_err(err)?;
        let sigma = env_moments(&model).mean_variance().sqrt();
        let t = 1e-3 / model.omega.abs().max(sigma);
        let ratio = concurrence(&reduced_state(&model, t)).map_err(err)? / (2.0 * model.omega.abs() * t);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let msg = format!("C/(2|w|t) over 10 models in [{lo:.5}, {hi:.5}] (within [0.95, 1.05])");
    check(lo >= 0.95 && hi <= 1.05, msg.clone(), msg)
}

fn c5_lindblad_purity_law() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for lambda in [0.1, 0.5, 2.0] {
        for t in linspace(0.0, 4.0 / lambda, 60) {
            let p = purity(&dephasing_closed_form(1.0, lambda, t));
            let law = (2.0 * lambda * t).cosh().powi(2) * (-4.0 * lambda * t).exp();
            worst = worst.max((p - law).abs());
        }
        let model = LindbladModel::dephasing(1.0, lambda).map_err(err)?;
        let ts = logspace(1e-5 / lambda, 1e-3 / lambda, 51);
        let states = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &ts, Propagator::Exponential).map_err(err)?;
        let ys: Vec<f64> = states.iter().map(|r| 1.0 - purity(r)).collect();
        let (k, a) = loglog_line(&ts, &ys);
        ok &= (k - 1.0).abs() <= 0.05 && (a / (4.0 * lambda) - 1.0).abs() <= 0.05;
        lines.push(format!("λ={lambda}: k = {k:.4}, a/4λ = {:.4}", a / (4.0 * lambda)));
    }
    ok &= worst <= 1e-12;
    let msg = format!("purity law error {worst:.2e} (≤ 1e-12); {}", lines.join("; "));
    check(ok, msg.clone(), msg)
}

fn c6_integrators() -> Outcome {
    let omega = 1.0;
    let mut worst: f64 = 0.0;
    for ratio in [0.1, 0.5, 1.0, 2.0] {
        let lambda = ratio * omega;
        let model = LindbladModel::dephasing(omega, lambda).map_err(err)?;
        let ts = linspace(0.0, 3.0 / lambda.max(omega), 50);
        let rho0 = DensityMatrix::plus_plus();
        let a = evolve_trajectory(&model, &rho0, &ts, Propagator::Exponential).map_err(err)?;
        let b = evolve_trajectory(&model, &rho0, &ts, Propagator::Stepped).map_err(err)?;
        for ((x, y), &t) in a.iter().zip(&b).zip(&ts) {
            let exact = dephasing_closed_form(omega, lambda, t);
            worst = worst
                .max(x.matrix().max_abs_diff(y.matrix()))
                .max(x.matrix().max_abs_diff(exact.matrix()))
                .max(y.matrix().max_abs_diff(exact.matrix()));
        }
    }
    let msg = format!("exponential / stepped / closed form, 4 ratios × 50 points: max pairwise difference {worst:.2e} (≤ 1e-9)");
    check(worst <= 1e-9, msg.clone(), msg)
}

fn c7_threshold() -> Outcome {
    let resolution = 1e-3;
    let numeric = threshold_scan(1.0, (0.5, 1.5), resolution).map_err(err)?;
    let analytic = analytic_threshold(1.0, (0.5, 1.5), resolution).map_err(err)?;
    let model = LindbladModel::dephasing(1.0, 1.1).map_err(err)?;
    let ts: Vec<f64> = (1..=200).map(|i| 0.2 * i as f64 / 200.0).collect();
    let states = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &ts, Propagator::Exponential).map_err(err)?;
    let mut max_c: f64 = 0.0;
    for (rho, &t) in states.iter().zip(&ts) {
        max_c = max_c.max(concurrence(rho).map_err(err)?).max(concurrence(&dephasing_closed_form(1.0, 1.1, t)).map_err(err)?);
    }
    let gap = (numeric.lambda_star - analytic.lambda_star).abs();
    let msg = format!(
        "λ* = {:.5} (1 ± 0.01), analytic λ* = {:.5}, gap {gap:.1e} (≤ {resolution:e}); max C at λ = 1.1|w| on (0, 0.2] = {max_c:.1e} (≤ 1e-10)",
        numeric.lambda_star, analytic.lambda_star
    );
    check((numeric.lambda_star - 1.0).abs() <= 0.01 && gap <= resolution && max_c <= 1e-10, msg.clone(), msg)
}

fn c8_rate_formula() -> Outcome {
    let omega = 1.0;
    let mut worst: f64 = 0.0;
    for ratio in [0.0, 0.25, 0.5, 0.9] {
        let lambda = ratio * omega;
        let expected = lindblad_concurrence_rate(omega, lambda).max(0.0);
        // Library estimator and an independent central difference on the closed form.
        let lib = early_growth_rate(omega, lambda).map_err(err)?;
        let (t0, h) = (1e-3 / omega, 1e-4 / omega);
        let c = |t: f64| concurrence(&dephasing_closed_form(omega, lambda, t));
        let fd = (c(t0 + h).map_err(err)? - c(t0 - h).map_err(err)?) / (2.0 * h);
        worst = worst.max((lib / expected - 1.0).abs()).max((fd / expected - 1.0).abs());
    }
    let mut exact: f64 = 0.0;
    for w in [0.5, 1.0, 3.0, -2.0] {
        exact = exact
            .max((lindblad_concurrence_rate(w, 0.0) - 2.0 * f64::abs(w)).abs())
            .max(lindblad_concurrence_rate(w, w.abs()).abs());
        // The formula reduces to 2(|w| - λ) identically.
        for l in [0.1, 0.3, 0.7] {
            let lambda = l * w.abs();
            exact = exact.max((lindblad_concurrence_rate(w, lambda) - 2.0 * (w.abs() - lambda)).abs());
        }
    }
    let msg = format!("max relative FD error {worst:.2e} (≤ 1e-2); exact-point error {exact:.1e}");
    check(worst <= 0.01 && exact <= 1e-12, msg.clone(), msg)
}

fn c9_gravitational() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let n = 3 + i;
        let g = rng.gen_range(0.5..1.5);
        let (m1, m2) = (rng.gen_range(1.0..2.0), rng.gen_range(0.2..1.0));
        let dist_a: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..4.0)).collect();
        let dist_b: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..4.0)).collect();
        let formula = |d: &[f64]| g * g / 4.0 * f64::powi(m1 - m2, 4) * d.iter().map(|x| 1.0 / (x * x)).sum::<f64>();
        let spec = GravitationalSpec { g, m1, m2, d_ab: 1.0, dist_a: dist_a.clone(), dist_b: dist_b.clone() };
        let mo = env_moments(&gravitational_model(&spec, Weighting::Uniform).map_err(err)?.model);
        worst = worst.max((mo.sigma_a2 - formula(&dist_a)).abs()).max((mo.sigma_b2 - formula(&dist_b)).abs());
    }
    let equal = GravitationalSpec { g: 1.0, m1: 1.3, m2: 1.3, d_ab: 1.0, dist_a: vec![1.0, 2.0, 3.0], dist_b: vec![2.0, 2.0, 1.0] };
    let mo = env_moments(&gravitational_model(&equal, Weighting::Uniform).map_err(err)?.model);
    let msg = format!(
        "10 geometries, N = 3..12: max |σ² - formula| = {worst:.2e} (≤ 1e-12); m1 = m2 gives σ² = ({}, {})",
        mo.sigma_a2, mo.sigma_b2
    );
    check(worst <= 1e-12 && mo.sigma_a2 == 0.0 && mo.sigma_b2 == 0.0, msg.clone(), msg)
}

fn c10_environment_insensitivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut d_energy, mut d_mixed): (f64, f64) = (0.0, 0.0);
    for i in 0..6 {
        let model = random_model(200 + i);
        let energies: Vec<f64> = (0..model.env_dim()).map(|_| rng.gen_range(-20.0..20.0)).collect();
        let shifted = model.with_energies(energies).map_err(err)?;
        for t in [0.3, 1.1, 4.7] {
            let base = brute_force_reduced_state(&model, t).map_err(err)?;
            d_energy = d_energy.max(base.matrix().max_abs_diff(brute_force_reduced_state(&shifted, t).map_err(err)?.matrix()));
            d_mixed = d_mixed.max(base.matrix().max_abs_diff(mixed_environment_reduced_state(&model, t).map_err(err)?.matrix()));
        }
    }
    let msg = format!("ε_k change: {d_energy:.2e}; pure vs mixture: {d_mixed:.2e} (both ≤ 1e-12)");
    check(d_energy <= 1e-12 && d_mixed <= 1e-12, msg.clone(), msg)
}

fn c11_time_dependent_variant() -> Outcome {
    let omega = 1.0;
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for lambda_tilde in [0.1, 0.5, 2.0] {
        let model = LindbladModel::dephasing_linear(omega, lambda_tilde).map_err(err)?;
        let ts = linspace(0.0, 3.0, 50);
        let stepped = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &ts, Propagator::Stepped).map_err(err)?;
        for (rho, &t) in stepped.iter().zip(&ts) {
            worst = worst.max(rho.matrix().max_abs_diff(dephasing_time_dependent(omega, lambda_tilde, t).matrix()));
        }
        let scale = omega.max(lambda_tilde.sqrt());
        let fit_ts = logspace(1e-3 / scale, 1e-2 / scale, 26);
        let ys: Vec<f64> = fit_ts.iter().map(|&t| 1.0 - purity(&dephasing_time_dependent(omega, lambda_tilde, t))).collect();
        let (k, _) = loglog_line(&fit_ts, &ys);
        let t0 = 1e-3 / scale;
        let slope = concurrence(&dephasing_time_dependent(omega, lambda_tilde, t0)).map_err(err)? / t0;
        ok &= (k - 2.0).abs() <= 0.05 && (slope / (2.0 * omega) - 1.0).abs() <= 0.01;
        lines.push(format!("λ̃={lambda_tilde}: k = {k:.4}, slope/2|w| = {:.5}", slope / (2.0 * omega)));
    }
    ok &= worst <= 1e-8;
    let msg = format!("closed form vs stepped {worst:.2e} (≤ 1e-8); {}", lines.join("; "));
    check(ok, msg.clone(), msg)
}

fn c12_determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dirs = [tempfile::TempDir::new().map_err(err)?, tempfile::TempDir::new().map_err(err)?];
    let mut names: Vec<_> = std::fs::read_dir(&configs)
        .map_err(err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("json"))
        .collect();
    names.sort();
    for dir in &dirs {
        for cfg in &names {
            let text = std::fs::read_to_string(cfg).map_err(err)?;
            let sub = if text.contains("\"compare\"") {
                "compare"
            } else if text.contains("\"threshold_scan\"") {
                "scan-threshold"
            } else {
                "simulate"
            };
            let mut runs = vec![sub];
            if text.contains("\"sweep\"") {
                runs.push("sweep");
            }
            for sub in runs {
                let status = Command::new(env!("CARGO_BIN_EXE_pairdyn"))
                    .args(["--out-dir", dir.path().to_str().unwrap(), sub, cfg.to_str().unwrap()])
                    .output()
                    .map_err(err)?;
                if !status.status.success() {
                    return Err(format!("{sub} {} failed: {}", cfg.display(), String::from_utf8_lossy(&status.stderr)));
                }
            }
        }
    }
    let mut files: Vec<_> = std::fs::read_dir(dirs[0].path()).map_err(err)?.filter_map(|e| e.ok().map(|e| e.file_name())).collect();
    files.sort();
    let (mut csv, mut svg) = (0, 0);
    for f in &files {
        let a = std::fs::read(dirs[0].path().join(f)).map_err(err)?;
        let b = std::fs::read(dirs[1].path().join(f)).map_err(|e| format!("{}: {e}", f.to_string_lossy()))?;
        if a != b {
            return Err(format!("{} differs between runs", f.to_string_lossy()));
        }
        match Path::new(f).extension().and_then(|e| e.to_str()) {
            Some("csv") => csv += 1,
            Some("svg") => svg += 1,
            _ => {}
        }
    }
    let msg = format!("{} configs run twice: {} files byte-identical ({csv} CSV, {svg} SVG)", names.len(), files.len());
    check(csv > 0 && svg > 0, msg.clone(), msg)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("isolated baseline", c1_isolated),
        ("oracle equivalence", c2_oracle_equivalence),
        ("microscopic purity law", c3_micro_purity_law),
        ("microscopic concurrence slope", c4_micro_concurrence_slope),
        ("Lindblad purity law", c5_lindblad_purity_law),
        ("integrator agreement", c6_integrators),
        ("threshold", c7_threshold),
        ("rate formula cross-check", c8_rate_formula),
        ("gravitational variance formula", c9_gravitational),
        ("environment insensitivity", c10_environment_insensitivity),
        ("linear-in-time rate variant", c11_time_dependent_variant),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}  {name}: {detail}", i + 1);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
