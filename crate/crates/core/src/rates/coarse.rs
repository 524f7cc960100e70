//! Box averaging of rates over delay fluctuations of width `T`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{require_positive, RegimeViolation, Result};

/// Lower bound on `T·ω₀`.
pub const MIN_CARRIER_CYCLES: f64 = 20.0;
/// Upper bound on `T·spread`.
pub const MAX_ENVELOPE_FRACTION: f64 = 0.2;

const POINTS_PER_PANEL: usize = 8;

/// Normalized composite Gauss–Legendre rule on `[−T/2, T/2]`, one panel per
/// carrier fringe of the rate (period `π/(2ω₀)`) plus two spare.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseGrainer {
    window: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl CoarseGrainer {
    /// Checked constructor: rejects windows outside
    /// `T·ω₀ ≥ MIN_CARRIER_CYCLES` and `T·spread ≤ MAX_ENVELOPE_FRACTION`.
    pub fn new(window: f64, omega0: f64, spread: f64) -> Result<Self> {
        require_positive("spread", spread)?;
        let grainer = Self::unchecked(window, omega0)?;
        Self::check_regime(window, omega0, spread)?;
        Ok(grainer)
    }

    /// Builds the averaging rule without the regime check.
    pub fn unchecked(window: f64, omega0: f64) -> Result<Self> {
        require_positive("window", window)?;
        require_positive("omega0", omega0)?;
        let panels = (2.0 * omega0 * window / PI).ceil() as usize + 2;
        let rule = GaussLegendre::new(NonZeroUsize::new(POINTS_PER_PANEL).expect("non-zero"));
        let width = window / panels as f64;
        let mut offsets = Vec::with_capacity(panels * POINTS_PER_PANEL);
        let mut weights = Vec::with_capacity(panels * POINTS_PER_PANEL);
        for p in 0..panels {
            let mid = -window / 2.0 + width * (p as f64 + 0.5);
            for &(x, w) in rule.as_node_weight_pairs() {
                offsets.push(mid + 0.5 * width * x);
                weights.push(0.5 * w / panels as f64);
            }
        }
        Ok(Self { window, offsets, weights })
    }

    pub fn check_regime(window: f64, omega0: f64, spread: f64) -> std::result::Result<(), RegimeViolation> {
        let carrier_cycles = window * omega0;
        let envelope_fraction = window * spread;
        if carrier_cycles >= MIN_CARRIER_CYCLES && envelope_fraction <= MAX_ENVELOPE_FRACTION {
            Ok(())
        } else {
            Err(RegimeViolation {
                window,
                carrier_cycles,
                envelope_fraction,
                min_carrier_cycles: MIN_CARRIER_CYCLES,
                max_envelope_fraction: MAX_ENVELOPE_FRACTION,
            })
        }
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// Number of averaging nodes per axis.
    pub fn nodes(&self) -> usize {
        self.offsets.len()
    }

    /// `(1/T)∫ R(τ') dτ'` over `[τ − T/2, τ + T/2]`.
    pub fn curve(&self, f: impl Fn(f64) -> f64, tau: f64) -> f64 {
        self.offsets.iter().zip(&self.weights).map(|(o, w)| w * f(tau + o)).sum()
    }

    /// Box average over `[τ₁ ± T/2] × [τ₂ ± T/2]`.
    pub fn surface(&self, f: impl Fn(f64, f64) -> f64, tau1: f64, tau2: f64) -> f64 {
        self.offsets.iter().zip(&self.weights).map(|(o1, w1)| w1 * self.curve(|t2| f(tau1 + o1, t2), tau2)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{
        hom_bp_analytic, hom_cp_analytic, hom_cp_coarse_analytic, mhom_bp_analytic, mhom_bp_coarse_analytic,
        mhom_cp_analytic, mhom_cp_coarse_analytic, BP_PLATEAU,
    };
    use crate::spectra::{CoherentSpectrum, GaussianJointSpectrum};
    use std::f64::consts::FRAC_PI_2;

    const W0: f64 = 1000.0;
    const T: f64 = 0.05;

    #[test]
    fn regime_enforced() {
        assert!(CoarseGrainer::new(T, W0, 1.0).is_ok());
        let err = CoarseGrainer::new(0.8, 50.0, 1.0).unwrap_err();
        assert!(err.is_numerical());
        assert!(CoarseGrainer::new(0.01, 50.0, 1.0).is_err());
        assert!(CoarseGrainer::unchecked(0.8, 50.0).is_ok());
        assert!(CoarseGrainer::unchecked(-1.0, 50.0).is_err());
    }

    #[test]
    fn constant_and_weights() {
        let g = CoarseGrainer::new(T, W0, 1.0).unwrap();
        assert!((g.curve(|_| 3.25, 0.7) - 3.25).abs() < 1e-13);
        assert!((g.surface(|_, _| -2.0, 0.1, 0.2) + 2.0).abs() < 1e-13);
        assert!((g.curve(|t| t, 0.7) - 0.7).abs() < 1e-13);
    }

    #[test]
    fn hom_curves() {
        let c = CoherentSpectrum::new(1.0, W0, 1.0).unwrap();
        let s = GaussianJointSpectrum::new(W0, 0.2, 1.0).unwrap();
        let g = CoarseGrainer::new(T, W0, c.d_omega()).unwrap();
        for k in 0..=30 {
            let tau = -1.5 + 0.1 * k as f64;
            let cp = g.curve(|t| hom_cp_analytic(t, &c), tau);
            assert!((cp - hom_cp_coarse_analytic(tau, &c)).abs() <= 0.02);
            let bp = g.curve(|t| hom_bp_analytic(t, &s), tau);
            assert!((bp - hom_bp_analytic(tau, &s)).abs() <= 0.02 * BP_PLATEAU);
        }
    }

    #[test]
    fn mhom_surfaces() {
        let s = GaussianJointSpectrum::new(W0, 0.2, 1.0).unwrap();
        let c = CoherentSpectrum::new(1.0, W0, 1.0).unwrap();
        let g = CoarseGrainer::new(T, W0, 1.0).unwrap();
        let axis = crate::rates::linspace(-3.0, 3.0, 7);
        for &t1 in &axis {
            for &t2 in &axis {
                let b0 = g.surface(|a, b| mhom_bp_analytic(a, b, 0.0, &s), t1, t2);
                let b1 = g.surface(|a, b| mhom_bp_analytic(a, b, FRAC_PI_2, &s), t1, t2);
                let expected = mhom_bp_coarse_analytic(t1, t2, &s);
                assert!((b0 - expected).abs() <= 0.02 * BP_PLATEAU);
                assert!((b0 - b1).abs() <= 0.02 * BP_PLATEAU);
                let cp = g.surface(|a, b| mhom_cp_analytic(a, b, FRAC_PI_2, &c), t1, t2);
                assert!((cp - mhom_cp_coarse_analytic(t1, t2, &c)).abs() <= 0.02);
            }
        }
    }
}
