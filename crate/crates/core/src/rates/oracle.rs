//! Direct quadrature of the coincidence integrals for an arbitrary network.
//! These make no use of any closed form and serve as the reference.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{hom_network, mhom_network, OpticalNetwork, TransferMatrix};
use crate::rates::LossParams;
use crate::spectra::{
    sized_grid, AmplitudeTable, CoherentSpectrum, FrequencyGrid, GaussianJointSpectrum, JointAmplitudeTable,
    DEFAULT_SIGMAS,
};

const NORM_TOL: f64 = 1e-6;
const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Default oracle grid for a BP input through `net`: `±6Δω` with enough
/// nodes to resolve every delay-induced fringe of the integrand.
pub fn oracle_grid_bp(s: &GaussianJointSpectrum, net: &OpticalNetwork) -> FrequencyGrid {
    sized_grid(s.omega0(), DEFAULT_SIGMAS * s.local_spread(), s.narrowest_width(), net.total_delay())
}

pub fn oracle_grid_cp(c: &CoherentSpectrum, net: &OpticalNetwork) -> FrequencyGrid {
    sized_grid(c.omega0(), DEFAULT_SIGMAS * c.d_omega(), c.d_omega(), net.total_delay())
}

fn transfers(grid: &FrequencyGrid, net: &OpticalNetwork) -> Vec<TransferMatrix> {
    grid.nodes().iter().map(|&w| net.transfer_at(w)).collect()
}

/// Two-photon coincidence probability
/// `∫∫ |Ψ(ω,ω')S₁₁(ω)S₂₂(ω') + Ψ(ω',ω)S₁₂(ω)S₂₁(ω')|² dω dω'`.
///
/// Rows are summed in parallel and then combined in a fixed order, so the
/// result is independent of thread scheduling.
pub fn bp_rate_oracle(amp: &JointAmplitudeTable, net: &OpticalNetwork) -> Result<f64> {
    let norm = amp.norm();
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(Error::NotNormalized { norm });
    }
    let grid = amp.grid();
    let w = grid.weights();
    let s = transfers(grid, net);
    let n = grid.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (s11, s12) = (s[i].0[0][0], s[i].0[0][1]);
            let row: f64 = (0..n)
                .map(|j| {
                    let direct = amp.get(i, j) * s11 * s[j].0[1][1];
                    let swapped = amp.get(j, i) * s12 * s[j].0[1][0];
                    w[j] * (direct + swapped).norm_sqr()
                })
                .sum();
            w[i] * row
        })
        .collect();
    Ok(rows.iter().sum())
}

/// Coherent-pulse coincidence rate `∏ᵢ ∫ |Sᵢ₁(ω)α(ω) + Sᵢ₂(ω)α(ω)|² dω`
/// for the same `α` on both input ports.
pub fn cp_rate_oracle(alpha: &AmplitudeTable, net: &OpticalNetwork) -> f64 {
    let grid = alpha.grid();
    let mut port = [0.0; 2];
    for ((&w, &x), a) in grid.weights().iter().zip(grid.nodes()).zip(alpha.values()) {
        let m = net.transfer_at(x);
        for (i, p) in port.iter_mut().enumerate() {
            *p += w * ((m.0[i][0] + m.0[i][1]) * a).norm_sqr();
        }
    }
    port[0] * port[1]
}

/// Two-port form of [`cp_rate_oracle`]; only symmetric inputs are supported.
pub fn cp_rate_oracle_two_port(alpha1: &AmplitudeTable, alpha2: &AmplitudeTable, net: &OpticalNetwork) -> Result<f64> {
    if alpha1.grid() != alpha2.grid() {
        return Err(Error::GridMismatch);
    }
    if alpha1.values() != alpha2.values() {
        return Err(Error::AsymmetricInput);
    }
    Ok(cp_rate_oracle(alpha1, net))
}

pub fn hom_bp_oracle(tau: f64, s: &GaussianJointSpectrum) -> Result<f64> {
    let net = hom_network(tau);
    bp_rate_oracle(&JointAmplitudeTable::from_spectrum(s, oracle_grid_bp(s, &net)), &net)
}

pub fn mhom_bp_oracle(
    tau1: f64,
    tau2: f64,
    theta: f64,
    s: &GaussianJointSpectrum,
    loss: Option<&LossParams>,
) -> Result<f64> {
    let net = mhom_network(tau1, tau2, theta, loss);
    bp_rate_oracle(&JointAmplitudeTable::from_spectrum(s, oracle_grid_bp(s, &net)), &net)
}

pub fn hom_cp_oracle(tau: f64, c: &CoherentSpectrum) -> f64 {
    let net = hom_network(tau);
    cp_rate_oracle(&AmplitudeTable::from_spectrum(c, oracle_grid_cp(c, &net)), &net)
}

pub fn mhom_cp_oracle(tau1: f64, tau2: f64, theta: f64, c: &CoherentSpectrum, loss: Option<&LossParams>) -> f64 {
    let net = mhom_network(tau1, tau2, theta, loss);
    cp_rate_oracle(&AmplitudeTable::from_spectrum(c, oracle_grid_cp(c, &net)), &net)
}

/// Modified-HOM rate of a classical mixture of coherent pulses,
/// `∑ₖ wₖ[(∫|αₖ|²)² − (∫|αₖ|² sin(2ωτ₂+θ) sin(2ωτ₁) dω)²]`.
pub fn cl_s_rate(mixture: &[(f64, AmplitudeTable)], tau1: f64, tau2: f64, theta: f64) -> Result<f64> {
    if mixture.is_empty() {
        return Err(Error::invalid("mixture", "needs at least one component"));
    }
    if let Some((w, _)) = mixture.iter().find(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::invalid("mixture", format!("weights must be non-negative, got {w}")));
    }
    let total: f64 = mixture.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::invalid("mixture", format!("weights must sum to 1, got {total}")));
    }
    Ok(mixture
        .iter()
        .map(|(weight, alpha)| {
            let grid = alpha.grid();
            let (mut intensity, mut overlap) = (0.0, 0.0);
            for ((&w, &x), a) in grid.weights().iter().zip(grid.nodes()).zip(alpha.values()) {
                let p = w * a.norm_sqr();
                intensity += p;
                overlap += p * (2.0 * x * tau2 + theta).sin() * (2.0 * x * tau1).sin();
            }
            weight * (intensity * intensity - overlap * overlap)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{hom_bp_analytic, hom_cp_analytic, mhom_bp_analytic, mhom_cp_analytic};
    use crate::spectra::{make_grid, DEFAULT_NODES};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn fig_bp() -> GaussianJointSpectrum {
        GaussianJointSpectrum::new(5.0, 0.2, 1.0).unwrap()
    }

    fn scaled_table(s: &GaussianJointSpectrum, grid: FrequencyGrid, k: f64) -> JointAmplitudeTable {
        JointAmplitudeTable::from_fn(grid, |a, b| s.joint_amplitude(a, b) * Complex64::new(k, 0.0))
    }

    fn fig_cp() -> CoherentSpectrum {
        CoherentSpectrum::new(1.5, 5.0, 0.5).unwrap()
    }

    #[test]
    fn bp_zero_points() {
        let s = fig_bp();
        assert!(hom_bp_oracle(0.0, &s).unwrap().abs() <= 1e-8);
        assert!(mhom_bp_oracle(0.0, 0.0, FRAC_PI_2, &s, None).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn bp_hom_matches_closed_form() {
        let s = fig_bp();
        let expected = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((hom_bp_oracle(1.0, &s).unwrap() - expected).abs() <= 1e-6);
        for tau in [-2.5, -0.3, 0.7, 1.9, 3.0] {
            assert!((hom_bp_oracle(tau, &s).unwrap() - hom_bp_analytic(tau, &s)).abs() <= 1e-8);
        }
    }

    #[test]
    fn bp_reduces_to_difference_distribution() {
        let s = GaussianJointSpectrum::new(4.0, 0.35, 0.8).unwrap();
        let nu_grid = make_grid(0.0, 8.0 * s.d_omega_minus(), 2001).unwrap();
        for tau in [0.25, 0.9, 1.7, 2.8] {
            let one_d = nu_grid.integrate(|nu| s.difference_distribution(nu) * (nu * tau).sin().powi(2));
            let two_d = hom_bp_oracle(tau, &s).unwrap();
            assert!((one_d - two_d).abs() <= 1e-6, "tau={tau}: {one_d} vs {two_d}");
        }
    }

    #[test]
    fn bp_mhom_spot_checks() {
        let s = fig_bp();
        for &(t1, t2) in &[(0.4, -1.2), (2.0, 2.0), (-3.0, 0.5), (1.1, 0.05)] {
            for th in [0.0, FRAC_PI_2] {
                let o = mhom_bp_oracle(t1, t2, th, &s, None).unwrap();
                let a = mhom_bp_analytic(t1, t2, th, &s);
                assert!((o - a).abs() <= 1e-5 * 0.5, "({t1},{t2},{th}): {o} vs {a}");
            }
        }
    }

    #[test]
    fn bp_rejects_unnormalized() {
        let s = fig_bp();
        let net = hom_network(0.3);
        let table = scaled_table(&s, oracle_grid_bp(&s, &net), 1.01);
        assert!(matches!(bp_rate_oracle(&table, &net), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn cp_hom_values() {
        let c = fig_cp();
        let a2 = 2.25;
        assert!(hom_cp_oracle(0.0, &c).abs() <= 1e-8 * a2);
        let quarter = FRAC_PI_4 / c.omega0();
        assert!((hom_cp_oracle(quarter, &c) - a2).abs() <= 1e-6 * a2);
        for tau in [-1.3, 0.11, 0.5, 2.2] {
            let o = hom_cp_oracle(tau, &c);
            assert!((o - hom_cp_analytic(tau, &c)).abs() <= 1e-6 * a2);
        }
    }

    #[test]
    fn cp_mhom_values() {
        let c = fig_cp();
        let a2 = 2.25;
        for th in [0.0, FRAC_PI_4, FRAC_PI_2, 2.0] {
            assert!((mhom_cp_oracle(0.0, 0.0, th, &c, None) - a2).abs() <= 1e-8 * a2);
        }
        for &(t1, t2) in &[(0.3, 0.2), (-1.0, 0.9), (2.5, -0.1)] {
            let o = mhom_cp_oracle(t1, t2, 0.7, &c, None);
            assert!((o - mhom_cp_analytic(t1, t2, 0.7, &c)).abs() <= 1e-5 * a2);
        }
    }

    #[test]
    fn cp_two_port_checks() {
        let c = fig_cp();
        let net = hom_network(0.2);
        let grid = oracle_grid_cp(&c, &net);
        let a = AmplitudeTable::from_spectrum(&c, grid.clone());
        assert!(cp_rate_oracle_two_port(&a, &a, &net).is_ok());
        let other = CoherentSpectrum::new(1.0, 5.0, 0.5).unwrap();
        let b = AmplitudeTable::from_spectrum(&other, grid);
        assert_eq!(cp_rate_oracle_two_port(&a, &b, &net), Err(Error::AsymmetricInput));
        let c2 = AmplitudeTable::from_spectrum(&c, make_grid(5.0, 2.0, 64).unwrap());
        assert_eq!(cp_rate_oracle_two_port(&a, &c2, &net), Err(Error::GridMismatch));
    }

    fn mixture() -> Vec<(f64, AmplitudeTable)> {
        [(0.2, 1.0, 4.0, 0.3), (0.5, 2.0, 5.0, 0.5), (0.3, 0.7, 6.0, 0.9)]
            .iter()
            .map(|&(w, a, w0, dw)| {
                let c = CoherentSpectrum::new(a, w0, dw).unwrap();
                (w, AmplitudeTable::from_spectrum(&c, c.default_grid()))
            })
            .collect()
    }

    #[test]
    fn cl_s_origin_positive() {
        let m = mixture();
        let expected: f64 = m.iter().map(|(w, a)| w * a.intensity().powi(2)).sum();
        let r = cl_s_rate(&m, 0.0, 0.0, FRAC_PI_2).unwrap();
        assert!(r > 0.0);
        assert!((r - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn cl_s_single_component_is_cp_rate() {
        let c = fig_cp();
        let single = vec![(1.0, AmplitudeTable::from_spectrum(&c, c.default_grid()))];
        for &(t1, t2, th) in &[(0.3, -0.4, 0.0), (1.0, 0.8, FRAC_PI_2), (-0.2, 0.25, 1.0)] {
            let r = cl_s_rate(&single, t1, t2, th).unwrap();
            assert!((r - mhom_cp_oracle(t1, t2, th, &c, None)).abs() <= 1e-6 * 2.25);
            assert!((r - mhom_cp_analytic(t1, t2, th, &c)).abs() <= 1e-6 * 2.25);
        }
    }

    #[test]
    fn cl_s_validates_weights() {
        let mut m = mixture();
        m[0].0 = -0.2;
        m[1].0 = 0.9;
        assert!(cl_s_rate(&m, 0.0, 0.0, 0.0).is_err());
        let mut m = mixture();
        m[0].0 = 0.3;
        assert!(cl_s_rate(&m, 0.0, 0.0, 0.0).is_err());
        assert!(cl_s_rate(&[], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn cl_s_non_negative() {
        let m = mixture();
        for k in 0..40 {
            let t1 = -2.0 + 0.1 * k as f64;
            let t2 = 1.5 - 0.077 * k as f64;
            assert!(cl_s_rate(&m, t1, t2, 0.3 * k as f64).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn oracle_is_deterministic() {
        let s = fig_bp();
        let a = mhom_bp_oracle(0.9, -1.4, 0.3, &s, None).unwrap();
        let b = mhom_bp_oracle(0.9, -1.4, 0.3, &s, None).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn grid_grows_with_delay() {
        let s = fig_bp();
        assert_eq!(oracle_grid_bp(&s, &hom_network(0.5)).len(), DEFAULT_NODES);
        assert!(oracle_grid_bp(&s, &hom_network(200.0)).len() > DEFAULT_NODES);
    }
}
