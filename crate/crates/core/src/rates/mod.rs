//! Coincidence-rate engines: quadrature oracles valid for any network, the
//! closed forms for Gaussian inputs, coarse graining over delay fluctuations,
//! and lossy coarse-grained forms.

mod analytic;
mod coarse;
mod loss;
mod oracle;

pub use analytic::*;
pub use coarse::{CoarseGrainer, MAX_ENVELOPE_FRACTION, MIN_CARRIER_CYCLES};
pub use loss::{mhom_bp_loss_coarse, mhom_cp_loss_coarse, LossParams};
pub use oracle::{
    bp_rate_oracle, cl_s_rate, cp_rate_oracle, cp_rate_oracle_two_port, hom_bp_oracle, hom_cp_oracle, mhom_bp_oracle,
    mhom_cp_oracle, oracle_grid_bp, oracle_grid_cp,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Delay at which no Gaussian envelope survives, in units of `1/ΔΩ₋`.
pub const FAR_DELAY: f64 = 12.0;

/// Relative tolerance below which two sampled values count as tied.
const TIE_RTOL: f64 = 1e-12;

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (n - 1) as f64;
            (0..n).map(|i| lo + (hi - lo) * (i as f64) / last).collect()
        }
    }
}

fn clamp_negative(v: f64, clamped: &mut usize) -> f64 {
    if v < 0.0 {
        *clamped += 1;
        0.0
    } else {
        v
    }
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::invalid(name, "axis is empty"));
    }
    if axis.iter().any(|x| !x.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(name, "axis must be finite and strictly increasing"));
    }
    Ok(())
}

/// Pick the index whose value is extreme under `better`, treating values
/// within `TIE_RTOL` as equal and then preferring smaller `|key|`.
fn pick_extreme(values: &[f64], key: impl Fn(usize) -> f64, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if better(values[i], values[best]) {
            best = i;
        }
    }
    let target = values[best];
    let tol = TIE_RTOL * target.abs().max(f64::MIN_POSITIVE);
    (0..values.len())
        .filter(|&i| (values[i] - target).abs() <= tol)
        .min_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)))
        .unwrap_or(best)
}

/// Rate sampled along one delay axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
    /// Asymptotic rate used for rescaling.
    pub plateau: f64,
    /// Samples that came out negative and were clamped to zero.
    pub clamped: usize,
}

impl RateCurve {
    pub fn new(axis: Vec<f64>, values: Vec<f64>, plateau: f64) -> Result<Self> {
        check_axis("axis", &axis)?;
        require_positive("plateau", plateau)?;
        if values.len() != axis.len() {
            return Err(Error::invalid("values", "length differs from axis"));
        }
        let mut clamped = 0;
        let values = values.into_iter().map(|v| clamp_negative(v, &mut clamped)).collect();
        Ok(Self { axis, values, plateau, clamped })
    }

    /// Evaluate `f` at every axis point in parallel.
    pub fn sample(axis: Vec<f64>, plateau: f64, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        check_axis("axis", &axis)?;
        let values = axis.par_iter().map(|&x| f(x)).collect();
        Self::new(axis, values, plateau)
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    pub fn rescaled(&self) -> Vec<f64> {
        self.values.iter().map(|v| v / self.plateau).collect()
    }

    pub fn argmin(&self) -> usize {
        pick_extreme(&self.values, |i| self.axis[i].abs(), |a, b| a < b)
    }

    pub fn argmax(&self) -> usize {
        pick_extreme(&self.values, |i| self.axis[i].abs(), |a, b| a > b)
    }
}

/// Rate sampled on a `(τ₁, τ₂)` lattice, row-major over `tau1_axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSurface {
    pub tau1_axis: Vec<f64>,
    pub tau2_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub plateau: f64,
    pub clamped: usize,
}

impl RateSurface {
    /// Evaluate `f(τ₁, τ₂)` on the lattice in parallel. The result does not
    /// depend on scheduling.
    pub fn sample(
        tau1_axis: Vec<f64>,
        tau2_axis: Vec<f64>,
        plateau: f64,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<Self> {
        check_axis("tau1_axis", &tau1_axis)?;
        check_axis("tau2_axis", &tau2_axis)?;
        require_positive("plateau", plateau)?;
        let m = tau2_axis.len();
        let raw: Vec<f64> =
            (0..tau1_axis.len() * m).into_par_iter().map(|k| f(tau1_axis[k / m], tau2_axis[k % m])).collect();
        let mut clamped = 0;
        let values = raw.into_iter().map(|v| clamp_negative(v, &mut clamped)).collect();
        Ok(Self { tau1_axis, tau2_axis, values, plateau, clamped })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.tau1_axis.len(), self.tau2_axis.len())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.tau2_axis.len() + j]
    }

    pub fn rescaled(&self) -> Vec<f64> {
        self.values.iter().map(|v| v / self.plateau).collect()
    }

    /// Values along `τ₂` at fixed `τ₁ = tau1_axis[i]`.
    pub fn row(&self, i: usize) -> RateCurve {
        let m = self.tau2_axis.len();
        RateCurve {
            axis: self.tau2_axis.clone(),
            values: self.values[i * m..(i + 1) * m].to_vec(),
            plateau: self.plateau,
            clamped: 0,
        }
    }

    /// Values along `τ₁` at fixed `τ₂ = tau2_axis[j]`.
    pub fn column(&self, j: usize) -> RateCurve {
        let m = self.tau2_axis.len();
        RateCurve {
            axis: self.tau1_axis.clone(),
            values: (0..self.tau1_axis.len()).map(|i| self.values[i * m + j]).collect(),
            plateau: self.plateau,
            clamped: 0,
        }
    }

    fn index_key(&self, k: usize) -> f64 {
        let m = self.tau2_axis.len();
        self.tau1_axis[k / m].hypot(self.tau2_axis[k % m])
    }

    /// `(i, j)` of the smallest value; near-ties go to the point closest to the origin.
    pub fn argmin(&self) -> (usize, usize) {
        let k = pick_extreme(&self.values, |k| self.index_key(k), |a, b| a < b);
        (k / self.tau2_axis.len(), k % self.tau2_axis.len())
    }

    pub fn argmax(&self) -> (usize, usize) {
        let k = pick_extreme(&self.values, |k| self.index_key(k), |a, b| a > b);
        (k / self.tau2_axis.len(), k % self.tau2_axis.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-3.0, 3.0, 121);
        assert_eq!(v[0], -3.0);
        assert_eq!(v[120], 3.0);
        assert_eq!(v[60], 0.0);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn curve_clamps_and_counts() {
        let c = RateCurve::new(vec![0.0, 1.0, 2.0], vec![0.5, -1e-15, 0.25], 0.5).unwrap();
        assert_eq!(c.values, vec![0.5, 0.0, 0.25]);
        assert_eq!(c.clamped, 1);
        assert_eq!(c.rescaled(), vec![1.0, 0.0, 0.5]);
        assert!(RateCurve::new(vec![0.0], vec![1.0], 0.0).is_err());
        assert!(RateCurve::new(vec![1.0, 0.0], vec![1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn ties_prefer_origin() {
        let c = RateCurve::sample(linspace(-2.0, 2.0, 5), 1.0, |x| (x * x - 1.0).powi(2)).unwrap();
        assert_eq!(c.axis[c.argmin()], -1.0);
        assert_eq!(c.axis[c.argmax()], -2.0);
        let s = RateSurface::sample(linspace(-1.0, 1.0, 3), linspace(-1.0, 1.0, 3), 1.0, |a, b| a * a + b * b).unwrap();
        assert_eq!(s.argmin(), (1, 1));
        assert_eq!(s.argmax(), (0, 0));
    }

    #[test]
    fn surface_rows_and_columns() {
        let s = RateSurface::sample(vec![0.0, 1.0], vec![0.0, 1.0, 2.0], 2.0, |a, b| 1.0 + a + 10.0 * b).unwrap();
        assert_eq!(s.shape(), (2, 3));
        assert_eq!(s.row(1).values, vec![2.0, 12.0, 22.0]);
        assert_eq!(s.column(2).values, vec![21.0, 22.0]);
        assert_eq!(s.get(1, 2), 22.0);
    }
}
