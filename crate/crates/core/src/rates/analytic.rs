//! Closed-form rates for Gaussian inputs.

use crate::spectra::{CoherentSpectrum, GaussianJointSpectrum};

/// Asymptotic BP coincidence probability of every lossless configuration.
pub const BP_PLATEAU: f64 = 0.5;

/// Asymptotic CP rate, `A²`.
pub fn cp_plateau(c: &CoherentSpectrum) -> f64 {
    c.total_intensity().powi(2)
}

fn g(s: &GaussianJointSpectrum, tau: f64) -> f64 {
    let dm = s.d_omega_minus();
    (-2.0 * dm * dm * tau * tau).exp()
}

fn e4(c: &CoherentSpectrum, tau: f64) -> f64 {
    let dw = c.d_omega();
    (-4.0 * dw * dw * tau * tau).exp()
}

/// Standard HOM, BP input: `(1 − e^{−2ΔΩ₋²τ²})/2`.
pub fn hom_bp_analytic(tau: f64, s: &GaussianJointSpectrum) -> f64 {
    (1.0 - g(s, tau)) / 2.0
}

/// Standard HOM, CP input: `A²(1 − cos²(2ω₀τ)e^{−4Δω²τ²})`.
pub fn hom_cp_analytic(tau: f64, c: &CoherentSpectrum) -> f64 {
    let carrier = (2.0 * c.omega0() * tau).cos();
    cp_plateau(c) * (1.0 - carrier * carrier * e4(c, tau))
}

/// Standard HOM, CP input, carrier averaged out: `A²(1 − ½e^{−4Δω²τ²})`.
pub fn hom_cp_coarse_analytic(tau: f64, c: &CoherentSpectrum) -> f64 {
    cp_plateau(c) * (1.0 - 0.5 * e4(c, tau))
}

/// Modified HOM, BP input.
pub fn mhom_bp_analytic(tau1: f64, tau2: f64, theta: f64, s: &GaussianJointSpectrum) -> f64 {
    let dp = s.d_omega_plus();
    let envelope = (-8.0 * dp * dp * tau2 * tau2).exp();
    let fringe = 2.0 * envelope * (1.0 + g(s, tau1)) * (4.0 * tau2 * s.omega0() + 2.0 * theta).cos();
    (4.0 + 2.0 * g(s, tau2) - g(s, tau1 + tau2) - g(s, tau1 - tau2) + fringe) / 8.0
}

/// Modified HOM, CP input.
pub fn mhom_cp_analytic(tau1: f64, tau2: f64, theta: f64, c: &CoherentSpectrum) -> f64 {
    let w0 = c.omega0();
    let dw = c.d_omega();
    let sum = tau1 + tau2;
    let diff = tau1 - tau2;
    let bracket = (theta + 2.0 * w0 * sum).cos() * (-2.0 * dw * dw * sum * sum).exp()
        - (theta + 2.0 * w0 * (tau2 - tau1)).cos() * (-2.0 * dw * dw * diff * diff).exp();
    cp_plateau(c) * (1.0 - 0.25 * bracket * bracket)
}

/// Modified HOM, BP input, averaged over carrier-scale delay fluctuations.
pub fn mhom_bp_coarse_analytic(tau1: f64, tau2: f64, s: &GaussianJointSpectrum) -> f64 {
    (4.0 + 2.0 * g(s, tau2) - g(s, tau1 + tau2) - g(s, tau1 - tau2)) / 8.0
}

/// Modified HOM, CP input, averaged over carrier-scale delay fluctuations.
pub fn mhom_cp_coarse_analytic(tau1: f64, tau2: f64, c: &CoherentSpectrum) -> f64 {
    cp_plateau(c) * (1.0 - (e4(c, tau1 + tau2) + e4(c, tau1 - tau2)) / 8.0)
}
