//! Experiment runner: config in, CSV/JSON artifacts and a manifest out.

mod cavity;
pub mod config;
mod crack;
pub mod plot;
mod vacuum;

pub use config::{ExperimentConfig, Kind, ModelConfig, OutputConfig, TestSpec, Tol, Tolerances};
pub use plot::emit_plot_data;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable naming the root of all output directories.
pub const OUT_ENV: &str = "SLICLAB_OUT";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// an expected infinite energy or cost
    Sentinel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub value: Option<f64>,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            value: None,
            target: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    /// Pass iff |value - target| <= tolerance.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = (value - target).abs() <= tolerance;
        Self {
            value: Some(value),
            target: Some(target),
            tolerance: Some(tolerance),
            ..Self::new(
                name,
                pass,
                format!("|{value:e} - {target:e}| <= {tolerance:e}"),
            )
        }
    }

    /// Pass iff value <= bound.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            value: Some(value),
            tolerance: Some(bound),
            ..Self::new(name, value <= bound, format!("{value:e} <= {bound:e}"))
        }
    }

    /// An infinite quantity: a sentinel unless the config expected it finite.
    pub fn infinite(
        name: impl Into<String>,
        expect_infinite: Option<bool>,
        detail: impl Into<String>,
    ) -> Self {
        let mut c = Self::new(name, expect_infinite != Some(false), detail);
        if c.verdict == Verdict::Pass {
            c.verdict = Verdict::Sentinel;
        }
        c
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }
}

/// What an artifact holds, for plot-data extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactRole {
    /// self-similar profile; first column the similarity variable, second the displacement
    Profile,
    /// columns n, residual, ...
    Residual,
    /// first column t, the rest energies or energy rates
    EnergyVsT,
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// path relative to the manifest
    pub path: String,
    pub role: ArtifactRole,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub version: String,
    pub seed: u64,
    /// the config with every default filled in
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "manifest schema {} is not {SCHEMA_VERSION}",
                m.schema_version
            )));
        }
        Ok(m)
    }
}

/// Collects checks and artifacts while a pipeline runs.
pub(crate) struct Run {
    pub dir: PathBuf,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl Run {
    /// Absolute path of a new artifact, recorded in the manifest.
    pub fn artifact(&mut self, name: &str, role: ArtifactRole) -> PathBuf {
        self.artifacts.push(Artifact {
            path: name.to_string(),
            role,
        });
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.artifact(name, ArtifactRole::Json);
        write_text(&path, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(Error::from)
}

/// Output directory: the override if given, else $SLICLAB_OUT (or `out`)
/// joined with the config's `output.dir` (or the kind).
pub fn resolve_out_dir(cfg: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    if let Some(d) = override_dir {
        return d.to_path_buf();
    }
    let root = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| "out".into());
    let leaf = cfg.output.dir.clone().unwrap_or_else(|| {
        match cfg.kind {
            Kind::Crack1d => "crack1d",
            Kind::Cavity3d => "cavity3d",
            Kind::Vacuum => "vacuum",
        }
        .to_string()
    });
    root.join(leaf)
}

/// Run the pipeline of the config's kind, writing artifacts and
/// `manifest.json` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    cfg.validate()?;
    let cfg = cfg.resolved();
    let start = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let mut run = Run {
        dir: out_dir.to_path_buf(),
        checks: Vec::new(),
        artifacts: Vec::new(),
    };
    match cfg.kind {
        Kind::Crack1d => crack::run(&cfg, &mut run)?,
        Kind::Cavity3d => cavity::run(&cfg, &mut run)?,
        Kind::Vacuum => vacuum::run(&cfg, &mut run)?,
    }
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg,
        checks: run.checks,
        artifacts: run.artifacts,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    write_text(
        &out_dir.join(MANIFEST_NAME),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    Ok(manifest)
}

/// Standard float formatting for every CSV cell.
pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}
