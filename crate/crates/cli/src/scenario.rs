//! Dispatch of a scenario document to the library pipelines.

use homlab::qps::{angular_tolerance, qps_forward, qps_scan, QpsTarget, LENGTH_TOLERANCE};
use homlab::rates::{
    hom_bp_analytic, hom_cp_analytic, linspace, mhom_bp_analytic, mhom_bp_coarse_analytic, mhom_cp_analytic,
    mhom_cp_coarse_analytic, CoarseGrainer,
};
use homlab::sensing::{hom_zero_locate, sense, Source, DEFAULT_SCAN_SAMPLES};
use homlab::{RateCurve, RateSurface};
use serde_json::{json, Value};

use crate::config::{Mode, ScenarioConfig, SourceKind};
use crate::error::CliError;
use crate::figures::run_figure;
use crate::output::{units, Artifact, Table};

/// Everything a run produces, held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub report: Value,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    if cfg.mode == Mode::Figure {
        let f = cfg.require("figure", &cfg.figure)?;
        let artifacts = run_figure(f.preset, &f.params)?;
        let report = json!({"mode": "figure", "preset": f.preset.name(), "files": names(&artifacts)});
        return Ok(RunOutput { artifacts, report });
    }
    let source = match cfg.source {
        SourceKind::Bp => Source::Bp(cfg.spectrum()),
        SourceKind::Cp => Source::Cp(cfg.coherent()?),
    };
    let stem = cfg.stem();
    let (tables, result) = match cfg.mode {
        Mode::Hom => hom(cfg, &source)?,
        Mode::Mhom => mhom(cfg, &source)?,
        Mode::Coarse => coarse(cfg, &source)?,
        Mode::Loss => loss(cfg, &source)?,
        Mode::Sense => sensing(cfg, &source)?,
        Mode::Qps => qps(cfg)?,
        Mode::Figure => unreachable!("handled above"),
    };
    let mut artifacts: Vec<Artifact> =
        tables.iter().map(|(suffix, table)| Artifact::csv(format!("{stem}{suffix}.csv"), table)).collect();
    let report = json!({
        "mode": cfg.mode.name(),
        "units": units(cfg.spectrum().d_omega_minus(), 1.0),
        "config": cfg,
        "files": names(&artifacts),
        "result": result,
    });
    artifacts.push(Artifact::json(format!("{stem}.json"), &report));
    Ok(RunOutput { artifacts, report })
}

fn names(artifacts: &[Artifact]) -> Vec<String> {
    artifacts.iter().map(|a| a.name.clone()).collect()
}

type Produced = (Vec<(String, Table)>, Value);

fn axis(cfg: &ScenarioConfig, default_samples: usize) -> Result<Vec<f64>, CliError> {
    let s = cfg.scan;
    let n = s.samples.unwrap_or(default_samples);
    if !(s.min.is_finite() && s.max.is_finite() && s.min < s.max) || n < 3 {
        return Err(CliError::config("scan", format!("need finite min < max and at least 3 samples, got {s:?}")));
    }
    Ok(linspace(s.min, s.max, n))
}

fn theta(cfg: &ScenarioConfig) -> Result<f64, CliError> {
    if cfg.theta.is_finite() {
        Ok(cfg.theta)
    } else {
        Err(CliError::config("theta", "must be finite"))
    }
}

fn hom(cfg: &ScenarioConfig, source: &Source) -> Result<Produced, CliError> {
    let axis = axis(cfg, 601)?;
    let curve = match source {
        Source::Bp(s) => RateCurve::sample(axis, source.hom_plateau(), |t| hom_bp_analytic(t, s))?,
        Source::Cp(c) => RateCurve::sample(axis, homlab::rates::cp_plateau(c), |t| hom_cp_analytic(t, c))?,
    };
    let result = json!({"plateau": curve.plateau, "min_rescaled": curve.rescaled()[curve.argmin()], "argmin": curve.axis[curve.argmin()]});
    Ok((vec![(String::new(), Table::curve("delay", &curve))], result))
}

fn exact_surface(axis: Vec<f64>, source: &Source, theta: f64) -> Result<RateSurface, CliError> {
    Ok(match source {
        Source::Bp(s) => RateSurface::sample(axis.clone(), axis, 0.5, |a, b| mhom_bp_analytic(a, b, theta, s))?,
        Source::Cp(c) => RateSurface::sample(axis.clone(), axis, homlab::rates::cp_plateau(c), |a, b| {
            mhom_cp_analytic(a, b, theta, c)
        })?,
    })
}

fn extremes(surface: &RateSurface) -> Value {
    let (i, j) = surface.argmin();
    let (k, l) = surface.argmax();
    json!({
        "plateau": surface.plateau,
        "min_rescaled": surface.get(i, j) / surface.plateau,
        "argmin": [surface.tau1_axis[i], surface.tau2_axis[j]],
        "max_rescaled": surface.get(k, l) / surface.plateau,
        "argmax": [surface.tau1_axis[k], surface.tau2_axis[l]],
        "clamped": surface.clamped,
    })
}

fn mhom(cfg: &ScenarioConfig, source: &Source) -> Result<Produced, CliError> {
    let surface = exact_surface(axis(cfg, 121)?, source, theta(cfg)?)?;
    let result = extremes(&surface);
    Ok((vec![(String::new(), Table::surface(["tau1", "tau2"], &surface))], result))
}

fn coarse(cfg: &ScenarioConfig, source: &Source) -> Result<Produced, CliError> {
    let window = *cfg.require("window", &cfg.window)?;
    let omega0 = match source {
        Source::Bp(s) => s.omega0(),
        Source::Cp(c) => c.omega0(),
    };
    let grainer = CoarseGrainer::new(window, omega0, source.spread())?;
    let theta = theta(cfg)?;
    let axis = axis(cfg, 41)?;
    let (averaged, closed) = match source {
        Source::Bp(s) => (
            RateSurface::sample(axis.clone(), axis.clone(), 0.5, |a, b| {
                grainer.surface(|x, y| mhom_bp_analytic(x, y, theta, s), a, b)
            })?,
            RateSurface::sample(axis.clone(), axis, 0.5, |a, b| mhom_bp_coarse_analytic(a, b, s))?,
        ),
        Source::Cp(c) => {
            let p = homlab::rates::cp_plateau(c);
            (
                RateSurface::sample(axis.clone(), axis.clone(), p, |a, b| {
                    grainer.surface(|x, y| mhom_cp_analytic(x, y, theta, c), a, b)
                })?,
                RateSurface::sample(axis.clone(), axis, p, |a, b| mhom_cp_coarse_analytic(a, b, c))?,
            )
        }
    };
    let deviation =
        averaged.values.iter().zip(&closed.values).map(|(a, b)| (a - b).abs() / averaged.plateau).fold(0.0, f64::max);
    let result = json!({
        "window": window,
        "nodes_per_axis": grainer.nodes(),
        "max_deviation_rescaled": deviation,
        "averaged": extremes(&averaged),
        "closed_form": extremes(&closed),
    });
    Ok((
        vec![
            ("_averaged".into(), Table::surface(["tau1", "tau2"], &averaged)),
            ("_closed_form".into(), Table::surface(["tau1", "tau2"], &closed)),
        ],
        result,
    ))
}

fn loss(cfg: &ScenarioConfig, source: &Source) -> Result<Produced, CliError> {
    let lp = cfg.require("loss", &cfg.loss)?;
    let plateau = source.far_plateau(Some(lp));
    let axis = axis(cfg, 121)?;
    let surface = RateSurface::sample(axis.clone(), axis, plateau, |a, b| source.coarse_rate(a, b, Some(lp)))?;
    let mut result = extremes(&surface);
    result["eta_a"] = json!(lp.eta_a());
    result["eta_b"] = json!(lp.eta_b());
    Ok((vec![(String::new(), Table::surface(["tau1", "tau2"], &surface))], result))
}

fn sensing(cfg: &ScenarioConfig, source: &Source) -> Result<Produced, CliError> {
    let n = cfg.scan.samples.unwrap_or(DEFAULT_SCAN_SAMPLES);
    if let Some(sc) = &cfg.sensing {
        let out = sense(sc, source, cfg.loss.as_ref(), n)?;
        let curve = homlab::sensing::scan_f(sc, source, cfg.loss.as_ref(), n)?.curve;
        let result = json!({
            "dl1": out.dl1,
            "dl2": out.dl2,
            "dl1_from_dips": out.dl1_from_dips,
            "dl2_from_dips": out.dl2_from_dips,
            "error_dl1": (out.dl1 - sc.dl1_0.abs()).abs(),
            "error_dl2": (out.dl2 - sc.dl2_0).abs(),
            "tolerance": 0.1 * sc.c / source.spread(),
            "report": out.report,
            "regime_warning": out.regime_warning,
        });
        return Ok((vec![(String::new(), Table::curve("x2", &curve))], result));
    }
    let sc = cfg.require("sensing", &cfg.hom)?;
    let z = hom_zero_locate(sc, source, n)?;
    let result = json!({"dl0": z.estimate, "x_min": z.x_min, "floor": z.floor, "error": (z.estimate - sc.dl0).abs()});
    Ok((vec![(String::new(), Table::curve("x", &z.curve))], result))
}

fn qps(cfg: &ScenarioConfig) -> Result<Produced, CliError> {
    let spec = cfg.require("qps", &cfg.qps)?;
    let truth = QpsTarget::new(spec.r, spec.gamma, spec.vartheta)?;
    let s = cfg.spectrum();
    let scan = qps_scan(&truth, &s, cfg.loss.as_ref(), &spec.grid)?;
    let delays = qps_forward(&truth);
    let length_tol = LENGTH_TOLERANCE * spec.grid.c / s.d_omega_minus();
    let (gamma_tol, vartheta_tol) = angular_tolerance(&truth, length_tol)?;
    let got = scan.recovered.target;
    let gamma_error = (got.gamma() - truth.gamma()).abs();
    let vartheta_error = got.azimuth_distance(&truth);
    let result = json!({
        "target": truth,
        "delays": delays,
        "recovered": scan.recovered,
        "measured_s1_zero": scan.s1_zero,
        "measured_s2_zero": scan.s2_zero,
        "residuals": {
            "s1_zero": (scan.s1_zero - delays.s1_zero).abs(),
            "s2_zero": (scan.s2_zero - delays.s2_zero).abs(),
            "gamma": gamma_error,
            "vartheta": vartheta_error,
            "consistency": scan.residual,
        },
        "tolerance": {"length": length_tol, "gamma": gamma_tol, "vartheta": vartheta_tol},
        "within_tolerance": gamma_error <= gamma_tol && vartheta_error <= vartheta_tol,
        "row_s1": scan.row_s1,
        "row_report": scan.row_report,
        "column_peak": scan.column_peak,
    });
    let tables = if spec.emit_surface {
        vec![(String::new(), Table::surface(["s1_control", "s2_control"], &scan.surface))]
    } else {
        Vec::new()
    };
    Ok((tables, result))
}
