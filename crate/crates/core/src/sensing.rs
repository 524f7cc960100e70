//! Delay sensing: scan one control delay, locate the rate features, and
//! invert their positions into the unknown path-length offsets.
//!
//! Scan frame: `τⱼ = (Δℓⱼ⁰ + xⱼ)/(2c)`, with `x₁` fixed and `x₂` swept. In
//! that frame the BP maximum sits at `x₂ = −Δℓ₂⁰` and the dips at
//! `−Δℓ₂⁰ ± Δℓ₁⁰`.

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::rates::{
    cp_plateau, hom_bp_analytic, hom_cp_coarse_analytic, linspace, mhom_bp_coarse_analytic, mhom_bp_loss_coarse,
    mhom_cp_coarse_analytic, mhom_cp_loss_coarse, LossParams, RateCurve, BP_PLATEAU,
};
use crate::spectra::{CoherentSpectrum, GaussianJointSpectrum};

pub const DEFAULT_SCAN_SAMPLES: usize = 2001;
/// Sweep margin beyond the outermost feature, in feature widths `c/spread`.
pub const SWEEP_MARGIN: f64 = 6.0;
/// Features whose prominence, or whose distance from the plateau, is below
/// this fraction of the plateau are ignored.
pub const MIN_PROMINENCE: f64 = 0.005;
const MIN_SCAN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingScenario {
    pub dl1_0: f64,
    pub dl2_0: f64,
    #[serde(default)]
    pub control_x1: f64,
    #[serde(default)]
    pub control_x2: f64,
    #[serde(default = "unit_c")]
    pub c: f64,
}

fn unit_c() -> f64 {
    1.0
}

impl SensingScenario {
    pub fn new(dl1_0: f64, dl2_0: f64, c: f64) -> Result<Self> {
        let s = Self { dl1_0, dl2_0, control_x1: 0.0, control_x2: 0.0, c };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("dl1_0", self.dl1_0)?;
        require_finite("dl2_0", self.dl2_0)?;
        require_finite("control_x1", self.control_x1)?;
        require_finite("control_x2", self.control_x2)?;
        require_positive("c", self.c)
    }

    pub fn tau1(&self, x1: f64) -> f64 {
        (self.dl1_0 + x1) / (2.0 * self.c)
    }

    pub fn tau2(&self, x2: f64) -> f64 {
        (self.dl2_0 + x2) / (2.0 * self.c)
    }

    /// Half-width of the default `x₂` sweep.
    pub fn sweep_half_width(&self, spread: f64) -> f64 {
        self.dl2_0.abs() + 2.0 * (self.dl1_0 + self.control_x1).abs() + SWEEP_MARGIN * self.c / spread
    }
}

/// Light source feeding the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Bp(GaussianJointSpectrum),
    Cp(CoherentSpectrum),
}

impl Source {
    /// Width that sets the feature size: `ΔΩ₋` for BP, `Δω` for CP.
    pub fn spread(&self) -> f64 {
        match self {
            Source::Bp(s) => s.d_omega_minus(),
            Source::Cp(c) => c.d_omega(),
        }
    }

    /// Coarse-grained modified-HOM rate.
    pub fn coarse_rate(&self, tau1: f64, tau2: f64, loss: Option<&LossParams>) -> f64 {
        match (self, loss) {
            (Source::Bp(s), None) => mhom_bp_coarse_analytic(tau1, tau2, s),
            (Source::Bp(s), Some(lp)) => mhom_bp_loss_coarse(tau1, tau2, s, lp),
            (Source::Cp(c), None) => mhom_cp_coarse_analytic(tau1, tau2, c),
            (Source::Cp(c), Some(lp)) => mhom_cp_loss_coarse(tau1, tau2, c, lp),
        }
    }

    /// Rate with `τ₂` far outside every envelope.
    pub fn plateau(&self, tau1: f64, loss: Option<&LossParams>) -> f64 {
        self.coarse_rate(tau1, f64::INFINITY, loss)
    }

    /// Coarse-grained modified-HOM rate with both delays far from zero.
    pub fn far_plateau(&self, loss: Option<&LossParams>) -> f64 {
        match (self, loss) {
            (Source::Bp(_), None) => BP_PLATEAU,
            (Source::Bp(_), Some(lp)) => lp.bp_plateau(),
            (Source::Cp(c), None) => cp_plateau(c),
            (Source::Cp(c), Some(lp)) => lp.a_cp_loss(c.total_intensity()),
        }
    }

    /// Standard-HOM rate (carrier-averaged for CP).
    pub fn hom_rate(&self, tau: f64) -> f64 {
        match self {
            Source::Bp(s) => hom_bp_analytic(tau, s),
            Source::Cp(c) => hom_cp_coarse_analytic(tau, c),
        }
    }

    pub fn hom_plateau(&self) -> f64 {
        self.hom_rate(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingScan {
    pub curve: RateCurve,
    /// Set when `spread·|τ₁| ≤ 1`, where the dips overlap the central feature.
    pub regime_warning: Option<String>,
}

/// Sample the coarse-grained rate along `x₂` at fixed `x₁ = control_x1`.
pub fn scan_f(scenario: &SensingScenario, source: &Source, loss: Option<&LossParams>, n: usize) -> Result<SensingScan> {
    scenario.validate()?;
    if n < MIN_SCAN_SAMPLES {
        return Err(Error::GridTooSmall { n, min: MIN_SCAN_SAMPLES });
    }
    let spread = source.spread();
    let tau1 = scenario.tau1(scenario.control_x1);
    let half = scenario.sweep_half_width(spread);
    let plateau = source.plateau(tau1, loss);
    if !(plateau > 0.0) {
        return Err(Error::NonPositivePlateau(plateau));
    }
    let curve =
        RateCurve::sample(linspace(-half, half, n), plateau, |x2| source.coarse_rate(tau1, scenario.tau2(x2), loss))?;
    let separation = spread * tau1.abs();
    let regime_warning = (separation <= 1.0)
        .then(|| format!("spread*|tau1| = {separation:.3} <= 1: dips are not separated from the central feature"));
    Ok(SensingScan { curve, regime_warning })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremaKind {
    /// Two deepest minima.
    Dips,
    /// Highest maximum and the deepest minimum on each side of it.
    PeakAndDips,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub x_max: Option<f64>,
    pub x_min_left: f64,
    pub x_min_right: f64,
    pub v_max: Option<f64>,
    pub v_min_left: f64,
    pub v_min_right: f64,
    /// Full widths at half depth (half height for the maximum).
    pub width_max: Option<f64>,
    pub width_left: Option<f64>,
    pub width_right: Option<f64>,
    pub plateau: f64,
}

impl ExtremaReport {
    pub fn v_min(&self) -> f64 {
        0.5 * (self.v_min_left + self.v_min_right)
    }
}

#[derive(Debug, Clone, Copy)]
struct Feature {
    index: usize,
    peak: bool,
    prominence: f64,
}

/// Local extrema of `y`, with runs of equal values collapsed to their centre.
fn discrete_features(y: &[f64]) -> Vec<Feature> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for i in 0..y.len() {
        match runs.last_mut() {
            Some((_, end)) if y[*end] == y[i] => *end = i,
            _ => runs.push((i, i)),
        }
    }
    let mut out = Vec::new();
    for k in 1..runs.len().saturating_sub(1) {
        let (start, end) = runs[k];
        let v = y[start];
        let (prev, next) = (y[runs[k - 1].0], y[runs[k + 1].0]);
        let peak = v > prev && v > next;
        if !(peak || (v < prev && v < next)) {
            continue;
        }
        let index = (start + end) / 2;
        out.push(Feature { index, peak, prominence: prominence(y, start, end, peak) });
    }
    out
}

/// Topographic prominence of the run `start..=end`.
fn prominence(y: &[f64], start: usize, end: usize, peak: bool) -> f64 {
    let v = y[start];
    // Orient so that a dip is handled like a peak of the negated curve.
    let s = if peak { 1.0 } else { -1.0 };
    let mut left_base = s * v;
    for &u in y[..start].iter().rev() {
        if s * u > s * v {
            break;
        }
        left_base = left_base.min(s * u);
    }
    let mut right_base = s * v;
    for &u in &y[end + 1..] {
        if s * u > s * v {
            break;
        }
        right_base = right_base.min(s * u);
    }
    s * v - left_base.max(right_base)
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when they are collinear.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let (d0, d2) = (x[1] - x[0], x[1] - x[2]);
    let num = d0 * d0 * (y[1] - y[2]) - d2 * d2 * (y[1] - y[0]);
    let den = d0 * (y[1] - y[2]) - d2 * (y[1] - y[0]);
    if den == 0.0 {
        return x[1];
    }
    (x[1] - 0.5 * num / den).clamp(x[0], x[2])
}

fn quadratic_at(x: [f64; 3], y: [f64; 3], t: f64) -> f64 {
    let l0 = (t - x[1]) * (t - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = (t - x[0]) * (t - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = (t - x[0]) * (t - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
    y[0] * l0 + y[1] * l1 + y[2] * l2
}

fn stencil(curve: &RateCurve, i: usize) -> ([f64; 3], [f64; 3]) {
    let c = i.clamp(1, curve.len() - 2);
    ([curve.axis[c - 1], curve.axis[c], curve.axis[c + 1]], [curve.values[c - 1], curve.values[c], curve.values[c + 1]])
}

fn refine(curve: &RateCurve, i: usize) -> f64 {
    if i == 0 || i + 1 == curve.len() {
        return curve.axis[i];
    }
    let (x, y) = stencil(curve, i);
    parabola_vertex(x, y)
}

/// Full width of the feature at index `i` at the level halfway between its
/// value and the plateau, by linear interpolation between samples.
fn half_depth_width(curve: &RateCurve, i: usize, peak: bool) -> Option<f64> {
    let (x, y) = (&curve.axis, &curve.values);
    let level = 0.5 * (curve.plateau + y[i]);
    let beyond = |v: f64| if peak { v <= level } else { v >= level };
    let cross = |a: usize, b: usize| x[a] + (level - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let left = (0..i).rev().find(|&j| beyond(y[j])).map(|j| cross(j, j + 1))?;
    let right = (i + 1..y.len()).find(|&j| beyond(y[j])).map(|j| cross(j - 1, j))?;
    Some(right - left)
}

/// `|plateau − R(x)|/plateau`, with `R(x)` from a local quadratic through
/// the three samples nearest `x`.
pub fn visibility(curve: &RateCurve, x: f64) -> Result<f64> {
    if !(curve.plateau > 0.0) {
        return Err(Error::NonPositivePlateau(curve.plateau));
    }
    let (lo, hi) = (curve.axis[0], curve.axis[curve.len() - 1]);
    if curve.len() < 3 || !(lo..=hi).contains(&x) {
        return Err(Error::invalid("x", format!("{x} is outside the sampled range [{lo}, {hi}]")));
    }
    let nearest = curve.axis.partition_point(|&a| a < x).min(curve.len() - 1);
    let nearest =
        if nearest > 0 && (x - curve.axis[nearest - 1]) < (curve.axis[nearest] - x) { nearest - 1 } else { nearest };
    let (xs, ys) = stencil(curve, nearest);
    Ok((curve.plateau - quadratic_at(xs, ys, x)).abs() / curve.plateau)
}

fn best(features: &[Feature], curve: &RateCurve, peak: bool) -> Option<Feature> {
    let key = |f: &Feature| if peak { -curve.values[f.index] } else { curve.values[f.index] };
    features
        .iter()
        .copied()
        .filter(|f| f.peak == peak)
        .min_by(|a, b| key(a).total_cmp(&key(b)).then(curve.axis[a.index].abs().total_cmp(&curve.axis[b.index].abs())))
}

fn significant_features(curve: &RateCurve) -> Result<Vec<Feature>> {
    if !(curve.plateau > 0.0) {
        return Err(Error::NonPositivePlateau(curve.plateau));
    }
    Ok(discrete_features(&curve.values)
        .into_iter()
        .filter(|f| {
            let depth = (curve.values[f.index] - curve.plateau).abs();
            f.prominence.min(depth) >= MIN_PROMINENCE * curve.plateau
        })
        .collect())
}

/// Refined position of the most prominent feature, and whether it is a peak.
pub(crate) fn dominant_feature(curve: &RateCurve) -> Result<(f64, bool)> {
    let features = significant_features(curve)?;
    let f = features
        .iter()
        .max_by(|a, b| a.prominence.total_cmp(&b.prominence))
        .ok_or(Error::FeatureCount { requested: 1, found: 0 })?;
    Ok((refine(curve, f.index), f.peak))
}

/// Locate the features of a scan with sub-sample precision.
pub fn find_extrema(curve: &RateCurve, kind: ExtremaKind) -> Result<ExtremaReport> {
    let features = significant_features(curve)?;
    let (peak, left, right) = match kind {
        ExtremaKind::PeakAndDips => {
            let dips = || features.iter().filter(|f| !f.peak).count();
            let Some(peak) = best(&features, curve, true) else {
                return Err(Error::FeatureCount { requested: 3, found: dips().min(2) });
            };
            let before: Vec<Feature> = features.iter().copied().filter(|f| f.index < peak.index).collect();
            let after: Vec<Feature> = features.iter().copied().filter(|f| f.index > peak.index).collect();
            match (best(&before, curve, false), best(&after, curve, false)) {
                (Some(l), Some(r)) => (Some(peak), l, r),
                (l, r) => {
                    let found = 1 + usize::from(l.is_some()) + usize::from(r.is_some());
                    return Err(Error::FeatureCount { requested: 3, found });
                }
            }
        }
        ExtremaKind::Dips => {
            let mut dips: Vec<Feature> = features.iter().copied().filter(|f| !f.peak).collect();
            dips.sort_by(|a, b| {
                curve.values[a.index]
                    .total_cmp(&curve.values[b.index])
                    .then(curve.axis[a.index].abs().total_cmp(&curve.axis[b.index].abs()))
            });
            if dips.len() < 2 {
                return Err(Error::FeatureCount { requested: 2, found: dips.len() });
            }
            let (a, b) = (dips[0], dips[1]);
            if a.index < b.index {
                (None, a, b)
            } else {
                (None, b, a)
            }
        }
    };
    let x_max = peak.map(|f| refine(curve, f.index));
    let x_min_left = refine(curve, left.index);
    let x_min_right = refine(curve, right.index);
    Ok(ExtremaReport {
        x_max,
        x_min_left,
        x_min_right,
        v_max: x_max.map(|x| visibility(curve, x)).transpose()?,
        v_min_left: visibility(curve, x_min_left)?,
        v_min_right: visibility(curve, x_min_right)?,
        width_max: peak.and_then(|f| half_depth_width(curve, f.index, true)),
        width_left: half_depth_width(curve, left.index, false),
        width_right: half_depth_width(curve, right.index, false),
        plateau: curve.plateau,
    })
}

/// BP inversion from the central maximum and either dip (scan frame).
/// Returns `(|Δℓ₁⁰|, Δℓ₂⁰)`; the sign of `Δℓ₁⁰` is not observable.
pub fn invert_bp(x_max: f64, x_min: f64) -> (f64, f64) {
    ((x_min - x_max).abs(), -x_max)
}

/// CP inversion from the two dips (scan frame). Returns `(|Δℓ₁⁰|, Δℓ₂⁰)`.
pub fn invert_cp(x_min_left: f64, x_min_right: f64) -> Result<(f64, f64)> {
    if !(x_min_left < x_min_right) {
        return Err(Error::MergedDips { left: x_min_left, right: x_min_right });
    }
    Ok((0.5 * (x_min_right - x_min_left), -0.5 * (x_min_right + x_min_left)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingOutcome {
    pub report: ExtremaReport,
    pub dl1: f64,
    pub dl2: f64,
    /// Dip-only estimate, available for both sources.
    pub dl1_from_dips: f64,
    pub dl2_from_dips: f64,
    pub regime_warning: Option<String>,
}

/// Scan, extract features and invert: `PeakAndDips` + [`invert_bp`] for BP,
/// `Dips` + [`invert_cp`] for CP.
pub fn sense(
    scenario: &SensingScenario,
    source: &Source,
    loss: Option<&LossParams>,
    n: usize,
) -> Result<SensingOutcome> {
    let scan = scan_f(scenario, source, loss, n)?;
    let kind = match source {
        Source::Bp(_) => ExtremaKind::PeakAndDips,
        Source::Cp(_) => ExtremaKind::Dips,
    };
    let report = find_extrema(&scan.curve, kind)?;
    let (dl1_from_dips, dl2_from_dips) = invert_cp(report.x_min_left, report.x_min_right)?;
    let (dl1, dl2) = match report.x_max {
        Some(x_max) => invert_bp(x_max, report.x_min_right),
        None => (dl1_from_dips, dl2_from_dips),
    };
    Ok(SensingOutcome { report, dl1, dl2, dl1_from_dips, dl2_from_dips, regime_warning: scan.regime_warning })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomScenario {
    pub dl0: f64,
    #[serde(default = "unit_c")]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomZero {
    /// Recovered `Δℓ⁰ = −x̂`.
    pub estimate: f64,
    pub x_min: f64,
    /// Rescaled rate at the minimum: 0 for BP, ½ for carrier-averaged CP.
    pub floor: f64,
    pub curve: RateCurve,
}

/// Single-delay HOM: locate the minimum of `R((Δℓ⁰ + x)/(2c))`.
pub fn hom_zero_locate(scenario: &HomScenario, source: &Source, n: usize) -> Result<HomZero> {
    require_finite("dl0", scenario.dl0)?;
    require_positive("c", scenario.c)?;
    if n < MIN_SCAN_SAMPLES {
        return Err(Error::GridTooSmall { n, min: MIN_SCAN_SAMPLES });
    }
    let half = scenario.dl0.abs() + SWEEP_MARGIN * scenario.c / source.spread();
    let curve = RateCurve::sample(linspace(-half, half, n), source.hom_plateau(), |x| {
        source.hom_rate((scenario.dl0 + x) / (2.0 * scenario.c))
    })?;
    let i = curve.argmin();
    let x_min = refine(&curve, i);
    let floor = 1.0 - visibility(&curve, x_min)?;
    let estimate = if x_min == 0.0 { 0.0 } else { -x_min };
    Ok(HomZero { estimate, x_min, floor, curve })
}
