//! Figure presets: the curves and surfaces of the standard plots, on the
//! default parameter set `ω₀ = 5`, `ΔΩ₊ = 0.2`, `ΔΩ₋ = 1`.

use std::f64::consts::FRAC_PI_2;

use clap::ValueEnum;
use homlab::rates::{
    cp_plateau, hom_bp_analytic, hom_cp_analytic, hom_cp_coarse_analytic, linspace, mhom_bp_analytic,
    mhom_bp_coarse_analytic, mhom_bp_loss_coarse, mhom_cp_analytic, mhom_cp_coarse_analytic, BP_PLATEAU,
};
use homlab::{CoherentSpectrum, GaussianJointSpectrum, LossParams, RateCurve, RateSurface};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{units, Artifact, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Standard HOM: BP, CP and carrier-averaged CP curves.
    Fig2,
    /// Modified HOM, BP surface and diagonal.
    Fig3,
    /// Modified HOM, CP surface and diagonal.
    Fig4,
    /// Carrier-averaged BP and CP surfaces.
    Fig5,
    /// Carrier-averaged BP and CP along τ₂ at fixed τ₁.
    Fig6,
    /// Lossy carrier-averaged BP surfaces for several η_B.
    Fig7,
    /// Lossy carrier-averaged BP along τ₂ at fixed τ₁ for several η_B.
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 7] =
        [Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6, Preset::Fig7, Preset::Fig8];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }
}

/// Parameters shared by every preset. Unset optional fields fall back to
/// the preset's own choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureParams {
    #[serde(default = "default_spectrum")]
    pub spectrum: GaussianJointSpectrum,
    /// Coherent pulse; defaults to the BP single-photon marginal (fig6:
    /// `Δω = ΔΩ₋`).
    #[serde(default)]
    pub coherent: Option<CoherentSpectrum>,
    /// Achromatic phase; fig3 and fig4 emit both 0 and π/2 when unset.
    #[serde(default)]
    pub theta: Option<f64>,
    /// Fixed `τ₁` of the fig6 and fig8 cuts.
    #[serde(default = "default_tau1")]
    pub tau1: f64,
    /// Delays span `[−range, range]`.
    #[serde(default = "default_range")]
    pub range: f64,
    #[serde(default = "default_curve_samples")]
    pub curve_samples: usize,
    #[serde(default = "default_surface_samples")]
    pub surface_samples: usize,
    /// Internal-stage loss mismatches of fig7 and fig8.
    #[serde(default = "default_etas")]
    pub eta_b: Vec<f64>,
}

fn default_spectrum() -> GaussianJointSpectrum {
    GaussianJointSpectrum::new(5.0, 0.2, 1.0).expect("valid preset")
}

fn default_tau1() -> f64 {
    2.0
}

fn default_range() -> f64 {
    3.0
}

fn default_curve_samples() -> usize {
    601
}

fn default_surface_samples() -> usize {
    241
}

fn default_etas() -> Vec<f64> {
    vec![0.0, 0.3, 0.6, 0.9]
}

impl Default for FigureParams {
    fn default() -> Self {
        Self {
            spectrum: default_spectrum(),
            coherent: None,
            theta: None,
            tau1: default_tau1(),
            range: default_range(),
            curve_samples: default_curve_samples(),
            surface_samples: default_surface_samples(),
            eta_b: default_etas(),
        }
    }
}

enum Series {
    Curve { name: String, axis: &'static str, curve: RateCurve, meta: Value },
    Surface { name: String, surface: RateSurface, meta: Value },
}

impl FigureParams {
    fn validate(&self) -> Result<(), CliError> {
        let bad =
            |name: &'static str, reason: String| CliError::Validation(homlab::Error::InvalidParameter { name, reason });
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(bad("range", format!("must be finite and > 0, got {}", self.range)));
        }
        if !self.tau1.is_finite() {
            return Err(bad("tau1", format!("must be finite, got {}", self.tau1)));
        }
        if self.theta.is_some_and(|t| !t.is_finite()) {
            return Err(bad("theta", "must be finite".into()));
        }
        if self.curve_samples < 3 || self.surface_samples < 3 {
            return Err(bad("samples", "need at least 3 samples per axis".into()));
        }
        for &eta in &self.eta_b {
            LossParams::from_mismatch(0.0, eta)?;
        }
        Ok(())
    }

    fn coherent_or(
        &self,
        fallback: impl FnOnce() -> homlab::Result<CoherentSpectrum>,
    ) -> Result<CoherentSpectrum, CliError> {
        Ok(match self.coherent {
            Some(c) => c,
            None => fallback()?,
        })
    }

    fn curve_axis(&self) -> Vec<f64> {
        linspace(-self.range, self.range, self.curve_samples)
    }

    fn surface_axis(&self) -> Vec<f64> {
        linspace(-self.range, self.range, self.surface_samples)
    }

    fn thetas(&self) -> Vec<f64> {
        match self.theta {
            Some(t) => vec![t],
            None => vec![0.0, FRAC_PI_2],
        }
    }
}

fn theta_label(theta: f64) -> String {
    if theta == 0.0 {
        "theta0".into()
    } else if theta == FRAC_PI_2 {
        "theta_pi2".into()
    } else {
        format!("theta{theta:.6}").replace('.', "p").replace('-', "m")
    }
}

fn eta_label(eta: f64) -> String {
    format!("eta{eta:.3}").replace('.', "p")
}

/// Data files and sidecar for one preset.
pub fn run_figure(preset: Preset, p: &FigureParams) -> Result<Vec<Artifact>, CliError> {
    p.validate()?;
    let s = p.spectrum;
    let series = match preset {
        Preset::Fig2 => {
            let c = p.coherent_or(|| CoherentSpectrum::matching(&s, 1.0))?;
            let a2 = cp_plateau(&c);
            vec![
                curve("bp", p.curve_axis(), BP_PLATEAU, |t| hom_bp_analytic(t, &s), json!({"source": "bp"}))?,
                curve("cp", p.curve_axis(), a2, |t| hom_cp_analytic(t, &c), json!({"source": "cp"}))?,
                curve("cp_coarse", p.curve_axis(), a2, |t| hom_cp_coarse_analytic(t, &c), json!({"source": "cp"}))?,
            ]
        }
        Preset::Fig3 => {
            let mut out = Vec::new();
            for theta in p.thetas() {
                let meta = json!({"source": "bp", "theta": theta});
                let label = theta_label(theta);
                out.push(surface(
                    &label,
                    p.surface_axis(),
                    BP_PLATEAU,
                    |a, b| mhom_bp_analytic(a, b, theta, &s),
                    meta.clone(),
                )?);
                out.push(curve(
                    &format!("{label}_diagonal"),
                    p.curve_axis(),
                    BP_PLATEAU,
                    |t| mhom_bp_analytic(t, t, theta, &s),
                    meta,
                )?);
            }
            out
        }
        Preset::Fig4 => {
            let c = p.coherent_or(|| CoherentSpectrum::matching(&s, 1.0))?;
            let a2 = cp_plateau(&c);
            let mut out = Vec::new();
            for theta in p.thetas() {
                let meta = json!({"source": "cp", "theta": theta});
                let label = theta_label(theta);
                out.push(surface(
                    &label,
                    p.surface_axis(),
                    a2,
                    |a, b| mhom_cp_analytic(a, b, theta, &c),
                    meta.clone(),
                )?);
                out.push(curve(
                    &format!("{label}_diagonal"),
                    p.curve_axis(),
                    a2,
                    |t| mhom_cp_analytic(t, t, theta, &c),
                    meta,
                )?);
            }
            out
        }
        Preset::Fig5 => {
            let c = p.coherent_or(|| CoherentSpectrum::matching(&s, 1.0))?;
            vec![
                surface(
                    "bp",
                    p.surface_axis(),
                    BP_PLATEAU,
                    |a, b| mhom_bp_coarse_analytic(a, b, &s),
                    json!({"source": "bp"}),
                )?,
                surface(
                    "cp",
                    p.surface_axis(),
                    cp_plateau(&c),
                    |a, b| mhom_cp_coarse_analytic(a, b, &c),
                    json!({"source": "cp"}),
                )?,
            ]
        }
        Preset::Fig6 => {
            let c = p.coherent_or(|| CoherentSpectrum::new(1.0, s.omega0(), s.d_omega_minus()))?;
            let t1 = p.tau1;
            let meta = |src: &str| json!({"source": src, "tau1": t1});
            vec![
                cut("bp", p.curve_axis(), BP_PLATEAU, |t| mhom_bp_coarse_analytic(t1, t, &s), meta("bp"))?,
                cut("cp", p.curve_axis(), cp_plateau(&c), |t| mhom_cp_coarse_analytic(t1, t, &c), meta("cp"))?,
            ]
        }
        Preset::Fig7 => {
            let mut out = Vec::new();
            for &eta in &p.eta_b {
                let lp = LossParams::from_mismatch(0.0, eta)?;
                let meta = json!({"source": "bp", "eta_b": eta, "eta_a": 0.0});
                out.push(surface(
                    &eta_label(eta),
                    p.surface_axis(),
                    lp.bp_plateau(),
                    |a, b| mhom_bp_loss_coarse(a, b, &s, &lp),
                    meta,
                )?);
            }
            out
        }
        Preset::Fig8 => {
            let mut out = Vec::new();
            let t1 = p.tau1;
            for &eta in &p.eta_b {
                let lp = LossParams::from_mismatch(0.0, eta)?;
                let meta = json!({"source": "bp", "eta_b": eta, "eta_a": 0.0, "tau1": t1});
                out.push(cut(
                    &eta_label(eta),
                    p.curve_axis(),
                    lp.bp_plateau(),
                    |t| mhom_bp_loss_coarse(t1, t, &s, &lp),
                    meta,
                )?);
            }
            out
        }
    };
    Ok(package(preset, p, series))
}

fn curve(
    name: &str,
    axis: Vec<f64>,
    plateau: f64,
    f: impl Fn(f64) -> f64 + Sync,
    meta: Value,
) -> Result<Series, CliError> {
    Ok(Series::Curve { name: name.into(), axis: "delay", curve: RateCurve::sample(axis, plateau, f)?, meta })
}

fn cut(
    name: &str,
    axis: Vec<f64>,
    plateau: f64,
    f: impl Fn(f64) -> f64 + Sync,
    meta: Value,
) -> Result<Series, CliError> {
    Ok(Series::Curve { name: name.into(), axis: "tau2", curve: RateCurve::sample(axis, plateau, f)?, meta })
}

fn surface(
    name: &str,
    axis: Vec<f64>,
    plateau: f64,
    f: impl Fn(f64, f64) -> f64 + Sync,
    meta: Value,
) -> Result<Series, CliError> {
    Ok(Series::Surface { name: name.into(), surface: RateSurface::sample(axis.clone(), axis, plateau, f)?, meta })
}

fn package(preset: Preset, p: &FigureParams, series: Vec<Series>) -> Vec<Artifact> {
    let stem = preset.name();
    let mut artifacts = Vec::new();
    let mut index = Vec::new();
    for s in series {
        let (name, table, plateau, kind, mut meta) = match s {
            Series::Curve { name, axis, curve, meta } => {
                (name, Table::curve(axis, &curve), curve.plateau, "curve", meta)
            }
            Series::Surface { name, surface, meta } => {
                (name, Table::surface(["tau1", "tau2"], &surface), surface.plateau, "surface", meta)
            }
        };
        let file = format!("{stem}_{name}.csv");
        meta["file"] = json!(file);
        meta["kind"] = json!(kind);
        meta["plateau"] = json!(plateau);
        meta["columns"] = json!(table.columns);
        artifacts.push(Artifact::csv(file, &table));
        index.push(meta);
    }
    let sidecar = json!({
        "preset": stem,
        "units": units(p.spectrum.d_omega_minus(), 1.0),
        "parameters": p,
        "series": index,
    });
    artifacts.push(Artifact::json(format!("{stem}.json"), &sidecar));
    artifacts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value_at(a: &Artifact, key: &[f64]) -> f64 {
        let text = String::from_utf8(a.contents.clone()).unwrap();
        for line in text.lines().skip(1) {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            if cells[..key.len()] == *key {
                return cells[key.len()];
            }
        }
        panic!("{key:?} not in {}", a.name);
    }

    fn find<'a>(arts: &'a [Artifact], name: &str) -> &'a Artifact {
        arts.iter().find(|a| a.name == name).unwrap_or_else(|| panic!("missing {name}"))
    }

    #[test]
    fn fig2_spot_values() {
        let arts = run_figure(Preset::Fig2, &FigureParams::default()).unwrap();
        assert_eq!(value_at(find(&arts, "fig2_bp.csv"), &[0.0]), 0.0);
        assert_eq!(value_at(find(&arts, "fig2_cp_coarse.csv"), &[0.0]), 0.5);
        assert_eq!(arts.len(), 4);
    }

    #[test]
    fn fig3_and_fig4_origin() {
        let arts = run_figure(Preset::Fig3, &FigureParams::default()).unwrap();
        assert_eq!(value_at(find(&arts, "fig3_theta_pi2_diagonal.csv"), &[0.0]), 0.0);
        assert!(value_at(find(&arts, "fig3_theta0_diagonal.csv"), &[0.0]) > 1.0);
        let arts = run_figure(Preset::Fig4, &FigureParams { theta: Some(FRAC_PI_2), ..Default::default() }).unwrap();
        assert!((value_at(find(&arts, "fig4_theta_pi2.csv"), &[0.0, 0.0]) - 1.0).abs() < 1e-12);
        assert_eq!(arts.len(), 3);
    }

    #[test]
    fn loss_presets() {
        let arts = run_figure(Preset::Fig8, &FigureParams::default()).unwrap();
        let peak0 = value_at(find(&arts, "fig8_eta0p000.csv"), &[0.0]) - 1.0;
        let peak6 = value_at(find(&arts, "fig8_eta0p600.csv"), &[0.0]) - 1.0;
        assert!((peak6 / peak0 - 0.4).abs() < 0.01, "{peak0} {peak6}");
        let bad = FigureParams { eta_b: vec![1.5], ..Default::default() };
        assert!(matches!(run_figure(Preset::Fig7, &bad), Err(CliError::Validation(_))));
    }
}
