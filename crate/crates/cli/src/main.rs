use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use homlab::{CoherentSpectrum, GaussianJointSpectrum};
use homlab_cli::{run_figure, run_scenario, write_all, CliError, FigureParams, Preset, ScenarioConfig};

/// Coincidence rates, sensing and positioning for HOM interferometers.
///
/// Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical regime.
#[derive(Parser)]
#[command(name = "homlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the data of a figure preset.
    Figure {
        preset: Preset,
        #[command(flatten)]
        overrides: FigureOverrides,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a JSON scenario document.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FigureOverrides {
    /// Achromatic phase, e.g. `0`, `pi/2`, `1.2`.
    #[arg(long, value_parser = parse_angle)]
    theta: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    d_omega_plus: Option<f64>,
    #[arg(long)]
    d_omega_minus: Option<f64>,
    /// Coherent intensity `A`.
    #[arg(long)]
    intensity: Option<f64>,
    /// Coherent spectral width `Δω`.
    #[arg(long)]
    d_omega: Option<f64>,
    /// Fixed `τ₁` of the cut presets.
    #[arg(long)]
    tau1: Option<f64>,
    /// Delays span `[−range, range]`.
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    curve_samples: Option<usize>,
    #[arg(long)]
    surface_samples: Option<usize>,
    /// Comma-separated internal loss mismatches.
    #[arg(long, value_delimiter = ',')]
    eta_b: Option<Vec<f64>>,
}

fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    let value = match t.split_once("pi") {
        Some((k, rest)) => {
            let k = match k.trim_end_matches('*') {
                "" => 1.0,
                "-" => -1.0,
                n => n.parse::<f64>().map_err(|e| e.to_string())?,
            };
            let d = match rest.strip_prefix('/') {
                Some(d) => d.parse::<f64>().map_err(|e| e.to_string())?,
                None if rest.is_empty() => 1.0,
                None => return Err(format!("cannot read angle `{text}`")),
            };
            k * std::f64::consts::PI / d
        }
        None => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    Ok(value)
}

impl FigureOverrides {
    fn apply(self, mut p: FigureParams) -> Result<FigureParams, CliError> {
        let s = p.spectrum;
        p.spectrum = GaussianJointSpectrum::new(
            self.omega0.unwrap_or(s.omega0()),
            self.d_omega_plus.unwrap_or(s.d_omega_plus()),
            self.d_omega_minus.unwrap_or(s.d_omega_minus()),
        )?;
        if self.intensity.is_some() || self.d_omega.is_some() {
            let base = CoherentSpectrum::matching(&p.spectrum, 1.0)?;
            p.coherent = Some(CoherentSpectrum::new(
                self.intensity.unwrap_or(1.0),
                p.spectrum.omega0(),
                self.d_omega.unwrap_or(base.d_omega()),
            )?);
        }
        p.theta = self.theta.or(p.theta);
        p.tau1 = self.tau1.unwrap_or(p.tau1);
        p.range = self.range.unwrap_or(p.range);
        p.curve_samples = self.curve_samples.unwrap_or(p.curve_samples);
        p.surface_samples = self.surface_samples.unwrap_or(p.surface_samples);
        if let Some(etas) = self.eta_b {
            p.eta_b = etas;
        }
        Ok(p)
    }
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Figure { preset, overrides, out } => {
            let params = overrides.apply(FigureParams::default())?;
            write_all(&out, &run_figure(preset, &params)?)
        }
        Command::Run { config, out } => {
            let text =
                std::fs::read_to_string(&config).map_err(|e| CliError::Io { path: config.clone(), source: e })?;
            let cfg = ScenarioConfig::from_json(&text)?;
            let run = run_scenario(&cfg)?;
            write_all(&out.unwrap_or_else(|| cfg.output.dir.clone()), &run.artifacts)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_angle;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pix").is_err());
    }
}
