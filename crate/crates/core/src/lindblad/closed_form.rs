use crate::density::DensityMatrix;
use crate::micro::OffDiagonals;
use num_complex::Complex64;

/// Dephasing state from |++⟩ where single-site coherences carry e^{−d}
/// and two-site coherences e^{−2d}; same slot layout as the exact engine.
fn dephased(omega: f64, d: f64, t: f64) -> DensityMatrix {
    let single = Complex64::new((-d).exp(), 0.0);
    let double = Complex64::new((-2.0 * d).exp(), 0.0);
    let od = OffDiagonals { gamma_a: single, gamma_b: single, lambda_plus: double, lambda_minus: double };
    DensityMatrix::from_engine(od.assemble(omega, t))
}

/// Closed-form state for K_x = K_y = λ, constant λ.
pub fn dephasing_closed_form(omega: f64, lambda: f64, t: f64) -> DensityMatrix {
    dephased(omega, 2.0 * lambda * t, t)
}

/// Closed-form state for λ(t) = λ̃ t: every 2λt becomes 2∫₀ᵗ λ̃ s ds = λ̃ t².
pub fn dephasing_time_dependent(omega: f64, lambda_tilde: f64, t: f64) -> DensityMatrix {
    dephased(omega, lambda_tilde * t * t, t)
}

/// cosh²(2λt) e^{−4λt}, evaluated as ((1 + e^{−4λt})/2)² so that large λt
/// does not overflow.
pub fn dephasing_purity(lambda: f64, t: f64) -> f64 {
    let half = 0.5 * (1.0 + (-4.0 * lambda * t).exp());
    half * half
}

/// Leading-order concurrence growth rate
/// √(λ²+2ω²+Δ) − √(λ²+2ω²−Δ) − 2λ with Δ = 2√(ω²(λ²+ω²)).
///
/// Not clamped; negative values mean no entanglement is generated.
pub fn lindblad_concurrence_rate(omega: f64, lambda: f64) -> f64 {
    let w2 = omega * omega;
    let l2 = lambda * lambda;
    let delta = 2.0 * (w2 * (l2 + w2)).sqrt();
    let base = l2 + 2.0 * w2;
    (base + delta).sqrt() - (base - delta).max(0.0).sqrt() - 2.0 * lambda
}
