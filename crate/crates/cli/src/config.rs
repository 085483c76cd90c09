use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::output::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

/// Flags shared by every command. Each one may also come from `--config`.
#[derive(Args, Debug, Clone, Default)]
pub struct Overrides {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// RK4 step.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    /// Command-specific tolerance (grouping, boundary, drift or zone width).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of series coefficients.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// Sample count for curves, monodromy points and trajectory rows.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// JSON file holding defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    format: Option<Format>,
    dt: Option<f64>,
    t_end: Option<f64>,
    tol: Option<f64>,
    terms: Option<usize>,
    samples: Option<usize>,
}

/// Flags merged over the config file, validated.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub tol: Option<f64>,
    pub terms: Option<usize>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => load(path)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format),
            dt: flags.dt.or(file.dt),
            t_end: flags.t_end.or(file.t_end),
            tol: flags.tol.or(file.tol),
            terms: flags.terms.or(file.terms),
            samples: flags.samples.or(file.samples),
        };
        for (name, v) in [("dt", cfg.dt), ("t-end", cfg.t_end), ("tol", cfg.tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::validation(format!(
                        "--{name} must be positive, got {v}"
                    )));
                }
            }
        }
        for (name, v) in [("terms", cfg.terms), ("samples", cfg.samples)] {
            if v == Some(0) {
                return Err(CliError::validation(format!("--{name} must be positive")));
            }
        }
        Ok(cfg)
    }

    /// The requested format if `allowed` contains it, else the first entry.
    pub fn format_among(&self, allowed: &[Format]) -> Result<Format, CliError> {
        match self.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => {
                let names: Vec<_> = allowed.iter().map(|f| f.name()).collect();
                Err(CliError::validation(format!(
                    "format {} not available here (use {})",
                    f.name(),
                    names.join(", ")
                )))
            }
        }
    }
}

fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}
