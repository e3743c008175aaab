use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fraclap::grid::fmt17;
use fraclap::{Complex64, GridFunction};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
    Both,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat key = value run file; command-line flags win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory receiving the artifacts.
    #[arg(long, short = 'o', default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub emit: Emit,
    /// Run the built-in sanity examples of this command instead.
    #[arg(long)]
    pub self_test: bool,
}

pub enum Artifact {
    Csv(String, String),
    /// The run summary as JSON.
    Summary(String),
    Binary(String, Vec<u8>),
}

/// Files, the summary printed on stdout, and an optional tolerance failure.
pub struct Outcome {
    pub files: Vec<Artifact>,
    pub summary: Value,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn new(summary: Value) -> Self {
        Outcome {
            files: vec![],
            summary,
            failure: None,
        }
    }

    pub fn csv(mut self, name: &str, text: String) -> Self {
        self.files.push(Artifact::Csv(name.into(), text));
        self
    }

    pub fn json(mut self, name: &str) -> Self {
        self.files.push(Artifact::Summary(name.into()));
        self
    }

    pub fn binary(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.files.push(Artifact::Binary(name.into(), bytes));
        self
    }

    /// Marks the run as failed when `value > limit` (or is NaN).
    pub fn check(mut self, what: &str, value: f64, limit: f64) -> Self {
        if !(value <= limit) && self.failure.is_none() {
            self.failure = Some(format!("{what} = {} exceeds {}", fmt17(value), fmt17(limit)));
        }
        self
    }

    pub fn fail_if(mut self, failed: bool, reason: &str) -> Self {
        if failed && self.failure.is_none() {
            self.failure = Some(reason.into());
        }
        self
    }

    pub fn write(&self, dir: &Path, emit: Emit) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)?;
        let mut written = vec![];
        for f in &self.files {
            let (name, bytes) = match f {
                Artifact::Csv(n, t) if emit != Emit::Json => (n, t.clone().into_bytes()),
                Artifact::Summary(n) if emit != Emit::Csv => (n, pretty(&self.summary).into_bytes()),
                Artifact::Binary(n, b) => (n, b.clone()),
                _ => continue,
            };
            let path = dir.join(name);
            std::fs::write(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value");
    s.push('\n');
    s
}

pub fn complex(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn grid_csv(u: &GridFunction) -> String {
    u.to_csv_string()
}

/// `x,re,im` on interval nodes.
pub fn interval_csv(m: usize, xs: &[f64], u: &[Complex64]) -> String {
    let mut s = format!("# interval m={m}\nx,re,im\n");
    for (x, z) in xs.iter().zip(u) {
        let _ = writeln!(s, "{},{},{}", fmt17(*x), fmt17(z.re), fmt17(z.im));
    }
    s
}

pub fn real_interval_csv(m: usize, xs: &[f64], u: &[f64]) -> String {
    let z: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    interval_csv(m, xs, &z)
}
