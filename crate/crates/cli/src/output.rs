//! CSV tables, JSON sidecars and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use homlab::{RateCurve, RateSurface};
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::error::CliError;

const SIGNIFICANT: usize = 12;

/// `printf("%.12g")`.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Rescaled curve: `<axis>, rate_rescaled`.
    pub fn curve(axis_name: &str, curve: &RateCurve) -> Self {
        let mut t = Self::new(&[axis_name, "rate_rescaled"]);
        t.rows = curve.axis.iter().zip(curve.rescaled()).map(|(&x, r)| vec![x, r]).collect();
        t
    }

    /// Rescaled surface, row-major over the first axis.
    pub fn surface(names: [&str; 2], surface: &RateSurface) -> Self {
        let mut t = Self::new(&[names[0], names[1], "rate_rescaled"]);
        let rescaled = surface.rescaled();
        let m = surface.tau2_axis.len();
        for (i, &a) in surface.tau1_axis.iter().enumerate() {
            for (j, &b) in surface.tau2_axis.iter().enumerate() {
                t.rows.push(vec![a, b, rescaled[i * m + j]]);
            }
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_g(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Unit system stamped into every sidecar.
pub fn units(d_omega_minus: f64, c: f64) -> Value {
    json!({
        "system": "dimensionless",
        "d_omega_minus": d_omega_minus,
        "c": c,
        "delay": "1/d_omega_minus",
        "length": "c/d_omega_minus",
        "rates": "divided by the plateau of each series",
    })
}

/// A file to be written, held in memory until every output is ready.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    pub fn csv(name: impl Into<String>, table: &Table) -> Self {
        Self { name: name.into(), contents: table.to_csv().into_bytes() }
    }

    pub fn json(name: impl Into<String>, value: &Value) -> Self {
        let mut contents = serde_json::to_vec_pretty(value).expect("JSON values serialize");
        contents.push(b'\n');
        Self { name: name.into(), contents }
    }
}

/// Write each artifact to a temporary file in `dir`, then rename them all
/// into place. Nothing is renamed unless every temporary write succeeded.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let target = dir.join(&a.name);
        let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
        tmp.write_all(&a.contents).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        staged.push((tmp, target));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
        written.push(target);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printf_g() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(0.5), "0.5");
        assert_eq!(format_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_g(123456.0), "123456");
        assert_eq!(format_g(1e-5), "1e-05");
        assert_eq!(format_g(1.5e-7), "1.5e-07");
        assert_eq!(format_g(0.0001234), "0.0001234");
        assert_eq!(format_g(1e12), "1e+12");
        assert_eq!(format_g(999999999999.0), "999999999999");
        assert_eq!(format_g(9.9999999999999e-5), "0.0001");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["delay", "rate_rescaled"]);
        t.rows.push(vec![-1.0, 0.25]);
        assert_eq!(t.to_csv(), "delay,rate_rescaled\n-1,0.25\n");
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        let files = write_all(&out, &[Artifact::json("a.json", &json!({"x": 1}))]).unwrap();
        assert_eq!(files, vec![out.join("a.json")]);
        let names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
