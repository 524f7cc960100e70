//! Spectral inputs: the Gaussian bi-photon joint spectrum, coherent-pulse
//! spectra, and the fixed-node frequency grids the quadrature oracles use.
//!
//! All frequencies are angular (rad/s). Amplitudes are real and non-negative;
//! none of the implemented rates depends on a spectral phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Half-width of default grids, in standard deviations of the marginal.
pub const DEFAULT_SIGMAS: f64 = 6.0;
/// Default node count per axis.
pub const DEFAULT_NODES: usize = 257;
/// Smallest grid `make_grid` accepts.
pub const MIN_NODES: usize = 16;
/// Aliasing margin of the trapezoid lattice, in units of the narrowest width.
const ALIAS_MARGIN: f64 = 7.0;

/// Gaussian joint spectral density
///
/// ```text
/// |Ψ(ω,ω')|² = N(ω+ω'; 2ω₀, 2ΔΩ₊) · N(ω−ω'; 0, ΔΩ₋) · 2
/// ```
///
/// i.e. the sum frequency has spread `2·d_omega_plus` around `2·omega0`, the
/// difference frequency has spread `d_omega_minus`, and the density integrates
/// to one over the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGaussian", deny_unknown_fields)]
pub struct GaussianJointSpectrum {
    omega0: f64,
    d_omega_plus: f64,
    d_omega_minus: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaussian {
    omega0: f64,
    d_omega_plus: f64,
    d_omega_minus: f64,
}

impl TryFrom<RawGaussian> for GaussianJointSpectrum {
    type Error = Error;
    fn try_from(raw: RawGaussian) -> Result<Self> {
        Self::new(raw.omega0, raw.d_omega_plus, raw.d_omega_minus)
    }
}

impl GaussianJointSpectrum {
    pub fn new(omega0: f64, d_omega_plus: f64, d_omega_minus: f64) -> Result<Self> {
        require_positive("omega0", omega0)?;
        require_positive("d_omega_plus", d_omega_plus)?;
        require_positive("d_omega_minus", d_omega_minus)?;
        Ok(Self { omega0, d_omega_plus, d_omega_minus })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn d_omega_plus(&self) -> f64 {
        self.d_omega_plus
    }

    pub fn d_omega_minus(&self) -> f64 {
        self.d_omega_minus
    }

    /// `|Ψ(ω,ω')|²`. Exactly symmetric under `ω ↔ ω'`.
    pub fn joint_density(&self, w: f64, w_prime: f64) -> f64 {
        let sum = w + w_prime - 2.0 * self.omega0;
        let diff = w - w_prime;
        let dp = self.d_omega_plus;
        let dm = self.d_omega_minus;
        (-(sum * sum) / (8.0 * dp * dp) - (diff * diff) / (2.0 * dm * dm)).exp() / (2.0 * PI * dp * dm)
    }

    /// Real, non-negative joint amplitude `Ψ(ω,ω') = sqrt(|Ψ|²)`.
    pub fn joint_amplitude(&self, w: f64, w_prime: f64) -> Complex64 {
        Complex64::new(self.joint_density(w, w_prime).sqrt(), 0.0)
    }

    /// Density of the frequency difference `ν = ω − ω'`: a centered normal
    /// with standard deviation `ΔΩ₋`.
    pub fn difference_distribution(&self, nu: f64) -> f64 {
        let dm = self.d_omega_minus;
        (-(nu * nu) / (2.0 * dm * dm)).exp() / ((2.0 * PI).sqrt() * dm)
    }

    /// Single-photon spectral spread `sqrt(ΔΩ₋² + 4ΔΩ₊²) / 2`.
    pub fn local_spread(&self) -> f64 {
        let dm = self.d_omega_minus;
        let dp = self.d_omega_plus;
        (dm * dm + 4.0 * dp * dp).sqrt() / 2.0
    }

    /// Grid spanning `±DEFAULT_SIGMAS` marginal standard deviations around
    /// `omega0` with at least `DEFAULT_NODES` nodes, more when the joint
    /// density is too narrow along some lattice direction.
    pub fn default_grid(&self) -> FrequencyGrid {
        sized_grid(self.omega0, DEFAULT_SIGMAS * self.local_spread(), self.narrowest_width(), 0.0)
    }

    /// Narrowest Gaussian width of the joint density along the grid lattice
    /// directions (axis, anti-diagonal, diagonal).
    pub(crate) fn narrowest_width(&self) -> f64 {
        self.local_spread().min(self.d_omega_minus).min(2.0 * self.d_omega_plus)
    }
}

/// Symmetric multimode coherent pulse: both ports carry `α(ω)` with
/// `∫|α|² = total_intensity` and a normal frequency distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoherent", deny_unknown_fields)]
pub struct CoherentSpectrum {
    total_intensity: f64,
    omega0: f64,
    d_omega: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoherent {
    total_intensity: f64,
    omega0: f64,
    d_omega: f64,
}

impl TryFrom<RawCoherent> for CoherentSpectrum {
    type Error = Error;
    fn try_from(raw: RawCoherent) -> Result<Self> {
        Self::new(raw.total_intensity, raw.omega0, raw.d_omega)
    }
}

impl CoherentSpectrum {
    pub fn new(total_intensity: f64, omega0: f64, d_omega: f64) -> Result<Self> {
        require_positive("total_intensity", total_intensity)?;
        require_positive("omega0", omega0)?;
        require_positive("d_omega", d_omega)?;
        Ok(Self { total_intensity, omega0, d_omega })
    }

    /// Coherent pulse iso-spectral with the single-photon marginal of `s`.
    pub fn matching(s: &GaussianJointSpectrum, total_intensity: f64) -> Result<Self> {
        Self::new(total_intensity, s.omega0(), s.local_spread())
    }

    pub fn total_intensity(&self) -> f64 {
        self.total_intensity
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    /// Normalized frequency distribution `P_α(ω) = |α(ω)|² / A`.
    pub fn probability(&self, w: f64) -> f64 {
        let x = w - self.omega0;
        let s = self.d_omega;
        (-(x * x) / (2.0 * s * s)).exp() / ((2.0 * PI).sqrt() * s)
    }

    pub fn amplitude(&self, w: f64) -> Complex64 {
        Complex64::new((self.total_intensity * self.probability(w)).sqrt(), 0.0)
    }

    pub fn default_grid(&self) -> FrequencyGrid {
        sized_grid(self.omega0, DEFAULT_SIGMAS * self.d_omega, self.d_omega, 0.0)
    }
}

/// Fixed-node quadrature rule (composite trapezoid on a uniform lattice).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Uniform trapezoid rule on `[center − half_width, center + half_width]`.
///
/// Trapezoid on a uniform lattice converges spectrally for integrands that
/// decay to negligible values at both ends, which is the case for every
/// Gaussian-weighted integrand used here.
pub fn make_grid(center: f64, half_width: f64, n: usize) -> Result<FrequencyGrid> {
    if n < MIN_NODES {
        return Err(Error::GridTooSmall { n, min: MIN_NODES });
    }
    require_positive("half_width", half_width)?;
    if !center.is_finite() {
        return Err(Error::invalid("center", "must be finite"));
    }
    let lo = center - half_width;
    let span = 2.0 * half_width;
    let last = (n - 1) as f64;
    let step = span / last;
    let nodes = (0..n).map(|i| lo + span * (i as f64) / last).collect();
    let mut weights = vec![step; n];
    weights[0] *= 0.5;
    weights[n - 1] *= 0.5;
    Ok(FrequencyGrid { nodes, weights })
}

/// Uniform grid whose spacing resolves Gaussian features of standard
/// deviation `width` modulated by fringes up to `2·delay_content` in frequency.
pub(crate) fn sized_grid(center: f64, half_width: f64, width: f64, delay_content: f64) -> FrequencyGrid {
    let h_max = 2.0 * PI / (2.0 * delay_content + ALIAS_MARGIN / width);
    let needed = (2.0 * half_width / h_max).ceil() as usize + 1;
    make_grid(center, half_width, needed.max(DEFAULT_NODES)).expect("grid parameters are valid")
}

impl FrequencyGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Tensor-product rule over the square `grid × grid`.
    pub fn integrate_2d(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &wx)| wx * self.nodes.iter().zip(&self.weights).map(|(&y, &wy)| wy * f(x, y)).sum::<f64>())
            .sum()
    }
}

/// Joint amplitude sampled on `grid × grid`, row-major: `values[i*n + j] = Ψ(ωᵢ, ωⱼ)`.
#[derive(Debug, Clone)]
pub struct JointAmplitudeTable {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl JointAmplitudeTable {
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = grid
            .nodes()
            .iter()
            .flat_map(|&w| grid.nodes().iter().map(move |&wp| (w, wp)))
            .map(|(w, wp)| f(w, wp))
            .collect();
        Self { grid, values }
    }

    pub fn from_spectrum(s: &GaussianJointSpectrum, grid: FrequencyGrid) -> Self {
        Self::from_fn(grid, |w, wp| s.joint_amplitude(w, wp))
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.len() + j]
    }

    /// `∑ wᵢ wⱼ |Ψᵢⱼ|²`.
    pub fn norm(&self) -> f64 {
        let n = self.grid.len();
        let w = self.grid.weights();
        (0..n).map(|i| w[i] * (0..n).map(|j| w[j] * self.get(i, j).norm_sqr()).sum::<f64>()).sum()
    }
}

/// Single-port amplitude `α(ω)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl AmplitudeTable {
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&w| f(w)).collect();
        Self { grid, values }
    }

    pub fn from_spectrum(c: &CoherentSpectrum, grid: FrequencyGrid) -> Self {
        Self::from_fn(grid, |w| c.amplitude(w))
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `∫|α|²`, the photon number per port.
    pub fn intensity(&self) -> f64 {
        self.values.iter().zip(self.grid.weights()).map(|(a, w)| w * a.norm_sqr()).sum()
    }
}
