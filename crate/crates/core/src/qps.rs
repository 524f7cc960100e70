//! Two-baseline positioning: a target on a sphere of radius `r` above the
//! detector plane is mapped to two control delays, one per baseline.
//!
//! With `u = cosγ·cosϑ` and `v = cosγ·sinϑ` the round-trip path lengths are
//! `L₁,₂ = r√(2(1 ± u))` and `L₃,₄ = r√(2(1 ∓ v))`. Zero delay on the first
//! baseline is reached at the signed control `S₁′₀ = (L₂ − L₁)/2`, on the
//! second at `S₂′₀ = (L₄ − L₃)/2`; `S₁ = |S₁′₀|`, `S₂ = |S₂′₀|`.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::rates::{linspace, mhom_bp_coarse_analytic, mhom_bp_loss_coarse, LossParams, RateSurface, BP_PLATEAU};
use crate::sensing::{dominant_feature, find_extrema, ExtremaKind, ExtremaReport};
use crate::spectra::GaussianJointSpectrum;

/// Slack allowed on `u² + v² ≤ 1` before the delays are called inconsistent.
pub const CONSISTENCY_SLACK: f64 = 1e-9;
/// Minimum `|τ₁|·ΔΩ₋` for a row of the surface to resolve peak and dips.
pub const MIN_ROW_SEPARATION: f64 = 1.5;
/// Length error, in `c/ΔΩ₋`, that defines the angular tolerance of a scan.
pub const LENGTH_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget", deny_unknown_fields)]
pub struct QpsTarget {
    r: f64,
    gamma: f64,
    vartheta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    r: f64,
    gamma: f64,
    vartheta: f64,
}

impl TryFrom<RawTarget> for QpsTarget {
    type Error = Error;
    fn try_from(raw: RawTarget) -> Result<Self> {
        Self::new(raw.r, raw.gamma, raw.vartheta)
    }
}

impl QpsTarget {
    /// `r > 0`, elevation `γ ∈ [0, π/2]`, azimuth `ϑ ∈ [0, 2π)`.
    pub fn new(r: f64, gamma: f64, vartheta: f64) -> Result<Self> {
        require_positive("r", r)?;
        require_finite("gamma", gamma)?;
        require_finite("vartheta", vartheta)?;
        if !(0.0..=FRAC_PI_2).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("{gamma} is outside [0, pi/2]")));
        }
        if !(0.0..TAU).contains(&vartheta) {
            return Err(Error::invalid("vartheta", format!("{vartheta} is outside [0, 2pi)")));
        }
        Ok(Self { r, gamma, vartheta })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn u(&self) -> f64 {
        self.gamma.cos() * self.vartheta.cos()
    }

    pub fn v(&self) -> f64 {
        self.gamma.cos() * self.vartheta.sin()
    }

    /// Cartesian position `(r cosγ sinϑ, r cosγ cosϑ, r sinγ)`.
    pub fn position(&self) -> [f64; 3] {
        [self.r * self.v(), self.r * self.u(), self.r * self.gamma.sin()]
    }

    /// Azimuth difference folded into `[0, π]`.
    pub fn azimuth_distance(&self, other: &QpsTarget) -> f64 {
        let d = (self.vartheta - other.vartheta).rem_euclid(TAU);
        d.min(TAU - d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpsDelays {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub s1: f64,
    pub s2: f64,
    /// Signed zero-delay controls `S₁′₀`, `S₂′₀`.
    pub s1_zero: f64,
    pub s2_zero: f64,
}

impl QpsDelays {
    pub fn quadrant(&self) -> Quadrant {
        Quadrant { u_positive: self.s1_zero <= 0.0, v_positive: self.s2_zero >= 0.0 }
    }
}

/// Signs of `u` and `v`, which the delays alone do not fix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrant {
    pub u_positive: bool,
    pub v_positive: bool,
}

impl Quadrant {
    pub fn of(t: &QpsTarget) -> Self {
        Self { u_positive: t.u() >= 0.0, v_positive: t.v() >= 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpsInversion {
    pub target: QpsTarget,
    /// Zenith target: the azimuth is undefined and reported as 0.
    pub degenerate: bool,
}

pub fn qps_forward(t: &QpsTarget) -> QpsDelays {
    let (r, u, v) = (t.r, t.u(), t.v());
    let path = |w: f64| r * (2.0 * (1.0 + w)).max(0.0).sqrt();
    let (l1, l2, l3, l4) = (path(u), path(-u), path(-v), path(v));
    // (L₂ − L₁)/2 written without the cancellation of the difference.
    let s1_zero = -2.0 * r * r * u / (l1 + l2);
    let s2_zero = 2.0 * r * r * v / (l3 + l4);
    QpsDelays { l1, l2, l3, l4, s1: s1_zero.abs(), s2: s2_zero.abs(), s1_zero, s2_zero }
}

fn check_delay(name: &'static str, s: f64, r: f64) -> Result<()> {
    require_finite(name, s)?;
    if !(0.0..=r).contains(&s) {
        return Err(Error::invalid(name, format!("{s} is outside [0, r = {r}]")));
    }
    Ok(())
}

/// Recover the target from the unsigned delays and the quadrant.
pub fn qps_invert(r: f64, s1: f64, s2: f64, quadrant: Quadrant) -> Result<QpsInversion> {
    require_positive("r", r)?;
    check_delay("s1", s1, r)?;
    check_delay("s2", s2, r)?;
    // p = 1 − s₁²/r² = √(1 − u²), q likewise for v.
    let p = 1.0 - (s1 / r).powi(2);
    let q = 1.0 - (s2 / r).powi(2);
    let sin2 = p * p + q * q - 1.0;
    if sin2 < -CONSISTENCY_SLACK {
        return Err(Error::InconsistentDelays(1.0 - sin2));
    }
    let sign = |positive: bool| if positive { 1.0 } else { -1.0 };
    let u = sign(quadrant.u_positive) * (1.0 - p * p).max(0.0).sqrt();
    let v = sign(quadrant.v_positive) * (1.0 - q * q).max(0.0).sqrt();
    let cos_gamma = u.hypot(v);
    let gamma = sin2.max(0.0).sqrt().atan2(cos_gamma).clamp(0.0, FRAC_PI_2);
    let degenerate = cos_gamma == 0.0;
    let mut vartheta = if degenerate { 0.0 } else { v.atan2(u) };
    if vartheta < 0.0 {
        vartheta += TAU;
    }
    if vartheta >= TAU {
        vartheta = 0.0;
    }
    Ok(QpsInversion { target: QpsTarget { r, gamma, vartheta }, degenerate })
}

/// Inversion from signed zero-delay controls; magnitudes are clipped to `[0, r]`.
pub fn qps_invert_signed(r: f64, s1_zero: f64, s2_zero: f64) -> Result<QpsInversion> {
    require_positive("r", r)?;
    require_finite("s1_zero", s1_zero)?;
    require_finite("s2_zero", s2_zero)?;
    let quadrant = Quadrant { u_positive: s1_zero <= 0.0, v_positive: s2_zero >= 0.0 };
    qps_invert(r, s1_zero.abs().min(r), s2_zero.abs().min(r), quadrant)
}

/// Largest `|Δγ|` and azimuth distance produced by moving the signed controls
/// of `t` by up to `dl` on either baseline.
pub fn angular_tolerance(t: &QpsTarget, dl: f64) -> Result<(f64, f64)> {
    require_positive("dl", dl)?;
    let d = qps_forward(t);
    let mut tol = (0.0f64, 0.0f64);
    for (a, b) in [(-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (0.0, -1.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)]
    {
        let moved = qps_invert_signed(t.r, d.s1_zero + a * dl, d.s2_zero + b * dl)?.target;
        tol.0 = tol.0.max((moved.gamma - t.gamma).abs());
        tol.1 = tol.1.max(moved.azimuth_distance(t));
    }
    Ok(tol)
}

/// Control-scan lattice: `samples` points per axis over
/// `S′ ∈ ±(r + margin·c/ΔΩ₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpsScanGrid {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "unit_c")]
    pub c: f64,
}

fn default_samples() -> usize {
    801
}

fn default_margin() -> f64 {
    8.0
}

fn unit_c() -> f64 {
    1.0
}

impl Default for QpsScanGrid {
    fn default() -> Self {
        Self { samples: default_samples(), margin: default_margin(), c: unit_c() }
    }
}

/// Coarsest lattice step accepted, in `c/ΔΩ₋`.
const MAX_STEP: f64 = 0.25;

impl QpsScanGrid {
    fn axis(&self, r: f64, spread: f64) -> Result<Vec<f64>> {
        require_positive("margin", self.margin)?;
        require_positive("c", self.c)?;
        let half = r + self.margin * self.c / spread;
        let needed = (2.0 * half * spread / (MAX_STEP * self.c)).ceil() as usize + 1;
        if self.samples < needed {
            return Err(Error::GridTooSmall { n: self.samples, min: needed });
        }
        Ok(linspace(-half, half, self.samples))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpsScan {
    pub recovered: QpsInversion,
    /// Measured signed zero-delay controls.
    pub s1_zero: f64,
    pub s2_zero: f64,
    /// `S₁′` of the row used to locate the second baseline.
    pub row_s1: f64,
    /// Peak and dips along `S₂′` on that row.
    pub row_report: ExtremaReport,
    /// Whether the first-baseline feature is a peak (`η_B > 1/3`).
    pub column_peak: bool,
    /// `||S₁′_row − S₁′₀| − c|τ₁|_measured|`.
    pub residual: f64,
    /// Rate over `(S₁′, S₂′)`; the axis fields hold control lengths.
    pub surface: RateSurface,
}

/// Synthesize the coarse-grained BP surface over both control scans and
/// recover the target from it.
pub fn qps_scan(
    t: &QpsTarget,
    s: &GaussianJointSpectrum,
    loss: Option<&LossParams>,
    grid: &QpsScanGrid,
) -> Result<QpsScan> {
    let spread = s.d_omega_minus();
    let axis = grid.axis(t.r, spread)?;
    let d = qps_forward(t);
    let c = grid.c;
    let plateau = loss.map_or(BP_PLATEAU, LossParams::bp_plateau);
    let rate = |t1: f64, t2: f64| match loss {
        Some(lp) => mhom_bp_loss_coarse(t1, t2, s, lp),
        None => mhom_bp_coarse_analytic(t1, t2, s),
    };
    let surface =
        RateSurface::sample(axis.clone(), axis, plateau, |a, b| rate((a - d.s1_zero) / c, (b - d.s2_zero) / c))?;
    let measured = from_surface(&surface, c, spread)?;
    let recovered = qps_invert_signed(t.r, measured.s1_zero, measured.s2_zero)?;
    Ok(measured.with(recovered, surface))
}

struct Measured {
    s1_zero: f64,
    s2_zero: f64,
    row_s1: f64,
    row_report: ExtremaReport,
    column_peak: bool,
    residual: f64,
}

impl Measured {
    fn with(self, recovered: QpsInversion, surface: RateSurface) -> QpsScan {
        QpsScan {
            recovered,
            s1_zero: self.s1_zero,
            s2_zero: self.s2_zero,
            row_s1: self.row_s1,
            row_report: self.row_report,
            column_peak: self.column_peak,
            residual: self.residual,
            surface,
        }
    }
}

fn from_surface(surface: &RateSurface, c: f64, spread: f64) -> Result<Measured> {
    let axis = &surface.tau1_axis;
    let mut rows: Vec<usize> = (0..axis.len()).collect();
    rows.sort_by(|&a, &b| axis[a].abs().total_cmp(&axis[b].abs()));
    let (row, report) = rows
        .iter()
        .find_map(|&i| {
            let report = find_extrema(&surface.row(i), ExtremaKind::PeakAndDips).ok()?;
            let half_split = 0.5 * (report.x_min_right - report.x_min_left);
            (half_split * spread / c >= MIN_ROW_SEPARATION).then_some((i, report))
        })
        .ok_or(Error::FeatureCount { requested: 3, found: 0 })?;
    let s2_zero = report.x_max.expect("peak requested");

    let j = surface.tau2_axis.partition_point(|&b| b < s2_zero).min(surface.tau2_axis.len() - 1);
    let j = if j > 0 && s2_zero - surface.tau2_axis[j - 1] < surface.tau2_axis[j] - s2_zero { j - 1 } else { j };
    let mut column = surface.column(j);
    column.plateau = 0.5 * (column.values[0] + column.values[column.len() - 1]);
    let (s1_zero, column_peak) = dominant_feature(&column)?;

    let half_split = 0.5 * (report.x_min_right - report.x_min_left);
    let residual = ((axis[row] - s1_zero).abs() - half_split).abs();
    Ok(Measured { s1_zero, s2_zero, row_s1: axis[row], row_report: report, column_peak, residual })
}
