//! White-noise path losses and the coarse-grained lossy rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{CoherentSpectrum, GaussianJointSpectrum};

/// Frequency-flat loss amplitudes: `ξ₁, ξ₂` on the input arms (before the
/// first beam splitter), `χ₁, χ₂` on the internal arms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLoss")]
pub struct LossParams {
    #[serde(with = "crate::amp_serde")]
    xi1: Complex64,
    #[serde(with = "crate::amp_serde")]
    xi2: Complex64,
    #[serde(with = "crate::amp_serde")]
    chi1: Complex64,
    #[serde(with = "crate::amp_serde")]
    chi2: Complex64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoss {
    #[serde(with = "crate::amp_serde")]
    xi1: Complex64,
    #[serde(with = "crate::amp_serde")]
    xi2: Complex64,
    #[serde(with = "crate::amp_serde")]
    chi1: Complex64,
    #[serde(with = "crate::amp_serde")]
    chi2: Complex64,
}

impl TryFrom<RawLoss> for LossParams {
    type Error = Error;
    fn try_from(r: RawLoss) -> Result<Self> {
        Self::new(r.xi1, r.xi2, r.chi1, r.chi2)
    }
}

fn check_amp(name: &'static str, a: Complex64) -> Result<()> {
    if a.re.is_finite() && a.im.is_finite() && a.norm() <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("loss amplitude must satisfy |a| <= 1, got {a}")))
    }
}

fn mismatch(a: Complex64, b: Complex64) -> f64 {
    let (p, q) = (a.norm_sqr(), b.norm_sqr());
    if p + q == 0.0 {
        0.0
    } else {
        ((p - q) / (p + q)).powi(2)
    }
}

/// Amplitude `√((1−√η)/(1+√η))` that, paired with a unit amplitude, gives mismatch `η`.
fn partner_amplitude(eta: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", format!("must lie in [0, 1], got {eta}")));
    }
    let s = eta.sqrt();
    Ok(Complex64::new(((1.0 - s) / (1.0 + s)).sqrt(), 0.0))
}

impl LossParams {
    pub fn new(xi1: Complex64, xi2: Complex64, chi1: Complex64, chi2: Complex64) -> Result<Self> {
        check_amp("xi1", xi1)?;
        check_amp("xi2", xi2)?;
        check_amp("chi1", chi1)?;
        check_amp("chi2", chi2)?;
        Ok(Self { xi1, xi2, chi1, chi2 })
    }

    pub fn lossless() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { xi1: one, xi2: one, chi1: one, chi2: one }
    }

    /// `ξ₁ = χ₁ = 1` with `ξ₂, χ₂` chosen to produce the requested mismatches.
    pub fn from_mismatch(eta_a: f64, eta_b: f64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, partner_amplitude(eta_a)?, one, partner_amplitude(eta_b)?)
    }

    pub fn xi1(&self) -> Complex64 {
        self.xi1
    }

    pub fn xi2(&self) -> Complex64 {
        self.xi2
    }

    pub fn chi1(&self) -> Complex64 {
        self.chi1
    }

    pub fn chi2(&self) -> Complex64 {
        self.chi2
    }

    fn chi_sum(&self) -> f64 {
        self.chi1.norm_sqr() + self.chi2.norm_sqr()
    }

    fn xi_sum(&self) -> f64 {
        self.xi1.norm_sqr() + self.xi2.norm_sqr()
    }

    /// `|ξ₁ξ₂|²(|χ₁|²+|χ₂|²)²/32`.
    pub fn a_bp_loss(&self) -> f64 {
        (self.xi1 * self.xi2).norm_sqr() * self.chi_sum().powi(2) / 32.0
    }

    /// `[A(|χ₁|²+|χ₂|²)(|ξ₁|²+|ξ₂|²)/4]²` for photon number `A` per port.
    pub fn a_cp_loss(&self, total_intensity: f64) -> f64 {
        (total_intensity * self.chi_sum() * self.xi_sum() / 4.0).powi(2)
    }

    /// Input-stage mismatch `((|ξ₁|²−|ξ₂|²)/(|ξ₁|²+|ξ₂|²))²`.
    pub fn eta_a(&self) -> f64 {
        mismatch(self.xi1, self.xi2)
    }

    /// Internal-stage mismatch `((|χ₁|²−|χ₂|²)/(|χ₁|²+|χ₂|²))²`.
    pub fn eta_b(&self) -> f64 {
        mismatch(self.chi1, self.chi2)
    }

    /// Lossy BP plateau with both delays far from zero, `4·A_BP`.
    pub fn bp_plateau(&self) -> f64 {
        4.0 * self.a_bp_loss()
    }
}

/// Coarse-grained modified-HOM BP rate with losses.
pub fn mhom_bp_loss_coarse(tau1: f64, tau2: f64, s: &GaussianJointSpectrum, lp: &LossParams) -> f64 {
    let dm = s.d_omega_minus();
    let g = |t: f64| (-2.0 * dm * dm * t * t).exp();
    let (g1, g2, gp, gm) = (g(tau1), g(tau2), g(tau1 + tau2), g(tau1 - tau2));
    let base = 4.0 + 2.0 * g2 - gp - gm;
    let imbalance = -2.0 * g2 + 4.0 * g1 + gp + gm;
    lp.a_bp_loss() * (base + lp.eta_b() * imbalance)
}

/// Coarse-grained modified-HOM CP rate with losses.
pub fn mhom_cp_loss_coarse(tau1: f64, tau2: f64, c: &CoherentSpectrum, lp: &LossParams) -> f64 {
    let dw = c.d_omega();
    let e = |t: f64| (-4.0 * dw * dw * t * t).exp();
    let (e1, e2) = (e(tau1), e(tau2));
    let d = (e(tau1 - tau2) + e(tau1 + tau2)) / 8.0;
    let (ea, eb) = (lp.eta_a(), lp.eta_b());
    let bracket = 1.0 - d + ea * (d - 0.5 * e2) + eb * (d + 0.5 * e1) + ea * eb * (0.5 * (e2 - e1) - d);
    lp.a_cp_loss(c.total_intensity()) * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{
        linspace, mhom_bp_coarse_analytic, mhom_cp_coarse_analytic, mhom_cp_oracle, CoarseGrainer, RateSurface,
    };

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bp() -> GaussianJointSpectrum {
        GaussianJointSpectrum::new(5.0, 0.2, 1.0).unwrap()
    }

    #[test]
    fn derived_factors() {
        let lp = LossParams::new(c(0.9), c(0.5), c(1.0), c(0.6)).unwrap();
        let chi = 1.0 + 0.36;
        assert!((lp.a_bp_loss() - 0.81 * 0.25 * chi * chi / 32.0).abs() < 1e-15);
        assert!((lp.eta_b() - ((1.0 - 0.36) / chi).powi(2)).abs() < 1e-15);
        assert!((lp.eta_a() - ((0.81 - 0.25) / 1.06f64).powi(2)).abs() < 1e-15);
        assert!((lp.a_cp_loss(2.0) - (2.0 * chi * 1.06 / 4.0f64).powi(2)).abs() < 1e-14);
        let none = LossParams::lossless();
        assert_eq!(none.a_bp_loss(), 0.125);
        assert_eq!(none.bp_plateau(), 0.5);
        assert_eq!(none.eta_a(), 0.0);
    }

    #[test]
    fn from_mismatch_round_trip() {
        for eta in [0.0, 0.3, 0.6, 0.9, 1.0] {
            let lp = LossParams::from_mismatch(0.0, eta).unwrap();
            assert!((lp.eta_b() - eta).abs() < 1e-12);
        }
        assert!(LossParams::from_mismatch(1.2, 0.0).is_err());
    }

    #[test]
    fn validation_and_serde() {
        assert!(LossParams::new(c(1.1), c(1.0), c(1.0), c(1.0)).is_err());
        assert!(LossParams::new(Complex64::new(0.8, 0.7), c(1.0), c(1.0), c(1.0)).is_err());
        let lp: LossParams =
            serde_json::from_str(r#"{"xi1": 1.0, "xi2": [0.6, 0.0], "chi1": 0.9, "chi2": [0.0, 0.5]}"#).unwrap();
        assert_eq!(lp.chi2(), Complex64::new(0.0, 0.5));
        let back: LossParams = serde_json::from_str(&serde_json::to_string(&lp).unwrap()).unwrap();
        assert_eq!(back, lp);
        assert!(serde_json::from_str::<LossParams>(r#"{"xi1":1,"xi2":1,"chi1":1,"chi2":2}"#).is_err());
        assert!(serde_json::from_str::<LossParams>(r#"{"xi1":1,"xi2":1,"chi1":1,"chi2":1,"k":0}"#).is_err());
    }

    #[test]
    fn bp_lossless_limit() {
        let s = bp();
        let lp = LossParams::new(c(0.7), c(0.9), c(0.8), c(0.8)).unwrap();
        for &(t1, t2) in &[(0.0, 0.0), (1.2, -0.4), (3.0, 2.9)] {
            let expected = 8.0 * lp.a_bp_loss() * mhom_bp_coarse_analytic(t1, t2, &s);
            assert!((mhom_bp_loss_coarse(t1, t2, &s, &lp) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn bp_visibility_scales_with_mismatch() {
        let s = bp();
        for eta in [0.0, 0.3, 0.6, 0.9] {
            let lp = LossParams::from_mismatch(0.0, eta).unwrap();
            let plateau = mhom_bp_loss_coarse(30.0, 1e3, &s, &lp);
            let peak = mhom_bp_loss_coarse(30.0, 0.0, &s, &lp);
            let dip = mhom_bp_loss_coarse(30.0, 30.0, &s, &lp);
            assert!(((peak - plateau) / plateau - 0.5 * (1.0 - eta)).abs() < 1e-12);
            assert!(((plateau - dip) / plateau - 0.25 * (1.0 - eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn bp_input_losses_only_rescale() {
        let s = bp();
        let a = LossParams::new(c(1.0), c(1.0), c(1.0), c(0.5)).unwrap();
        let b = LossParams::new(c(0.3), c(0.95), c(1.0), c(0.5)).unwrap();
        let axis = linspace(-3.0, 3.0, 61);
        let sa =
            RateSurface::sample(axis.clone(), axis.clone(), a.bp_plateau(), |x, y| mhom_bp_loss_coarse(x, y, &s, &a))
                .unwrap();
        let sb =
            RateSurface::sample(axis.clone(), axis, b.bp_plateau(), |x, y| mhom_bp_loss_coarse(x, y, &s, &b)).unwrap();
        let k = b.a_bp_loss() / a.a_bp_loss();
        for (va, vb) in sa.values.iter().zip(&sb.values) {
            assert!((vb - k * va).abs() <= 1e-14 * va.abs().max(1e-300) + 1e-300);
        }
        assert_eq!(sa.argmax(), sb.argmax());
        assert_eq!(sa.argmin(), sb.argmin());
    }

    #[test]
    fn cp_limits() {
        let cs = CoherentSpectrum::new(1.5, 5.0, 0.5).unwrap();
        let lp = LossParams::new(c(0.8), c(0.8), c(0.6), c(0.6)).unwrap();
        for &(t1, t2) in &[(0.0, 0.0), (1.0, 1.0), (0.3, -2.0)] {
            let expected = mhom_cp_coarse_analytic(t1, t2, &cs) / 2.25 * lp.a_cp_loss(1.5);
            assert!((mhom_cp_loss_coarse(t1, t2, &cs, &lp) - expected).abs() < 1e-14);
        }
        let full = LossParams::new(c(1.0), c(0.0), c(1.0), c(0.4)).unwrap();
        assert_eq!(full.eta_a(), 1.0);
        let eb = full.eta_b();
        let plateau = full.a_cp_loss(1.5);
        for &t2 in &[0.0f64, 0.3, 1.0] {
            let expected = plateau * (1.0 - 0.5 * (1.0 - eb) * (-4.0 * 0.25 * t2 * t2).exp());
            let reference = mhom_cp_loss_coarse(0.0, t2, &cs, &full);
            assert!((reference - expected).abs() < 1e-14);
            for &t1 in &[-2.0, -0.5, 0.7, 3.0] {
                assert!((mhom_cp_loss_coarse(t1, t2, &cs, &full) - reference).abs() <= 1e-10 * plateau);
            }
        }
    }

    #[test]
    fn cp_signs_match_lossy_oracle() {
        // Window spans a whole number of carrier periods, so only envelope smearing remains.
        let w0 = 50.0 * std::f64::consts::PI;
        let cs = CoherentSpectrum::new(1.0, w0, 1.0).unwrap();
        let lp = LossParams::new(c(1.0), c(0.8), c(0.9), c(0.55)).unwrap();
        let g = CoarseGrainer::new(0.2, w0, 1.0).unwrap();
        let scale = lp.a_cp_loss(1.0);
        for &(t1, t2) in &[(0.0, 0.0), (0.6, 0.0), (0.0, 0.5), (0.5, 0.45)] {
            let numeric = g.surface(|a, b| mhom_cp_oracle(a, b, 0.3, &cs, Some(&lp)), t1, t2);
            let closed = mhom_cp_loss_coarse(t1, t2, &cs, &lp);
            assert!((numeric - closed).abs() <= 0.05 * scale, "({t1},{t2}): {numeric} vs {closed}");
        }
    }
}
