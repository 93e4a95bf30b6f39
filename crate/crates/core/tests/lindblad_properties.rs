use pairdyn::lindblad::{
    dephasing_closed_form, dephasing_purity, dephasing_time_dependent, evolve, evolve_trajectory,
    lindblad_concurrence_rate, validate_dissipator, DissipatorMatrix, LambdaSchedule, LindbladModel, Propagator,
};
use pairdyn::observables::{concurrence, early_growth_rate, purity};
use pairdyn::DensityMatrix;

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn trajectories_preserve_trace_hermiticity_positivity() {
    let d = DissipatorMatrix { k_x: 0.5, k_y: 0.4, k_z: 0.3, f_xy: 0.05, f_xz: 0.0, f_yz: 0.0 };
    let model = LindbladModel::new(0.8, d, DissipatorMatrix::dephasing(0.4), LambdaSchedule::Constant { lambda: 1.0 })
        .unwrap();
    let bell = DensityMatrix::bell_phi_plus();
    for rho0 in [DensityMatrix::plus_plus(), bell] {
        for method in [Propagator::Exponential, Propagator::Stepped] {
            for rho in evolve_trajectory(&model, &rho0, &grid(6.0, 25), method).unwrap() {
                let report = rho.validate(1e-9);
                assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
                assert!(report.hermiticity_defect < 1e-11);
                assert!(report.min_eigenvalue >= -1e-9);
            }
        }
    }
}

#[test]
fn probe_rejects_dissipator_passing_pairwise_minors() {
    let d = DissipatorMatrix { k_x: 0.5, k_y: 0.3, k_z: 0.2, f_xy: 0.1, f_xz: -0.05, f_yz: 0.0 };
    assert!(d.f_xy * d.f_xy <= d.k_x * d.k_y && d.f_xz * d.f_xz <= d.k_x * d.k_z);
    let err = validate_dissipator(&d).unwrap_err().to_string();
    assert!(err.contains("positivity"), "{err}");
}

#[test]
fn exponential_matches_closed_form_across_ratios() {
    let omega = 1.0;
    for ratio in [0.1, 0.5, 1.0, 2.0] {
        let lambda = ratio * omega;
        let model = LindbladModel::dephasing(omega, lambda).unwrap();
        let times = grid(3.0 / lambda, 50);
        let states = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &times, Propagator::Exponential).unwrap();
        for (rho, &t) in states.iter().zip(&times) {
            let exact = dephasing_closed_form(omega, lambda, t);
            assert!(rho.matrix().max_abs_diff(exact.matrix()) <= 1e-9, "λ/ω = {ratio}, t = {t}");
            for i in 0..4 {
                assert!((rho.entry(i, i).re - 0.25).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn closed_form_purity_law() {
    for lambda in [0.05, 0.5, 2.0] {
        for t in grid(4.0, 30) {
            let p = purity(&dephasing_closed_form(1.0, lambda, t));
            assert!((p - dephasing_purity(lambda, t)).abs() < 1e-12);
        }
    }
}

#[test]
fn purity_loss_is_linear_at_short_times() {
    for lambda in [0.2, 0.5, 3.0] {
        let t = 1e-3 / lambda;
        let deficit = 1.0 - purity(&dephasing_closed_form(1.0, lambda, t));
        assert!((deficit / t / (4.0 * lambda) - 1.0).abs() < 0.02);
    }
}

#[test]
fn unitary_limit_reproduces_isolated_concurrence() {
    let omega = 0.7;
    let model = LindbladModel::dephasing(omega, 0.0).unwrap();
    let times = grid(std::f64::consts::PI / (2.0 * omega), 30);
    let states = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &times, Propagator::Exponential).unwrap();
    for (rho, &t) in states.iter().zip(&times) {
        assert!((concurrence(rho).unwrap() - (2.0 * omega * t).sin().abs()).abs() < 1e-9);
    }
}

#[test]
fn no_entanglement_at_or_above_threshold() {
    for (omega, lambda) in [(1.0, 1.0), (1.0, 1.1), (0.5, 2.0)] {
        let t_max = 3.0 / lambda;
        for t in grid(t_max, 120).into_iter().skip(1) {
            let c = concurrence(&dephasing_closed_form(omega, lambda, t)).unwrap();
            assert!(c <= 1e-10, "ω = {omega}, λ = {lambda}, t = {t}: {c}");
        }
    }
}

#[test]
fn strong_dephasing_blocks_entanglement_in_evolution() {
    let model = LindbladModel::dephasing(1.0, 2.0).unwrap();
    let times: Vec<f64> = (1..=20).map(|i| 0.01 * i as f64).collect();
    for rho in evolve_trajectory(&model, &DensityMatrix::plus_plus(), &times, Propagator::Exponential).unwrap() {
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
    }
}

#[test]
fn growth_rate_tracks_formula() {
    for ratio in [0.0, 0.25, 0.5, 0.9, 1.1, 2.0] {
        let est = early_growth_rate(1.0, ratio).unwrap();
        let expected = lindblad_concurrence_rate(1.0, ratio).max(0.0);
        if expected > 0.0 {
            assert!((est / expected - 1.0).abs() < 0.01, "λ = {ratio}: {est} vs {expected}");
        } else {
            assert_eq!(est, 0.0);
        }
    }
}

#[test]
fn linear_schedule_matches_substitution_closed_form() {
    let (omega, lambda_tilde) = (1.0, 0.8);
    let model = LindbladModel::dephasing_linear(omega, lambda_tilde).unwrap();
    let times = grid(3.0, 31);
    let states = evolve_trajectory(&model, &DensityMatrix::plus_plus(), &times, Propagator::Stepped).unwrap();
    for (rho, &t) in states.iter().zip(&times) {
        let exact = dephasing_time_dependent(omega, lambda_tilde, t);
        assert!(rho.matrix().max_abs_diff(exact.matrix()) < 1e-8, "t = {t}");
    }
}

#[test]
fn local_fields_do_not_change_concurrence_or_purity() {
    let plain = LindbladModel::dephasing(0.9, 0.3).unwrap();
    let dressed = plain.clone().with_local_fields(0.4, -1.2);
    for t in [0.2, 0.9, 2.5] {
        let a = evolve(&plain, &DensityMatrix::plus_plus(), t, Propagator::Exponential).unwrap();
        let b = evolve(&dressed, &DensityMatrix::plus_plus(), t, Propagator::Exponential).unwrap();
        assert!((concurrence(&a).unwrap() - concurrence(&b).unwrap()).abs() < 1e-10);
        assert!((purity(&a) - purity(&b)).abs() < 1e-12);
    }
}
