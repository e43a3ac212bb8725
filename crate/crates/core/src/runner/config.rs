//! Experiment configuration: one TOML file with a few sections.
//!
//! ```toml
//! kind = "crack1d"
//! seed = 7
//! kernel = "bump"
//! scales = [8, 16, 32, 64, 128, 256, 512]
//!
//! [model]
//! law = "saturating"
//! lambda = 4.0
//! alpha = 2.0
//!
//! [[tests]]
//! center = [0.1, 1.0]
//! half = [0.5, 0.6]
//!
//! [tolerances]
//! residual = 1e-4
//!
//! [output]
//! dir = "crack"
//! ```

use crate::error::{Error, Result};
use crate::mollify::{scale_ladder, Mollifier};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Crack1d,
    Cavity3d,
    Vacuum,
}

/// Model parameters; unset fields take the defaults of the kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub law: Option<String>,
    pub energy: Option<String>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub d: Option<usize>,
    pub u_bar: Option<f64>,
    pub v_bar: Option<f64>,
    pub gamma: Option<f64>,
    /// whether the energy or crack cost is expected to be infinite; unset
    /// accepts whatever the constitutive law implies
    pub expect_infinite: Option<bool>,
}

/// A bump test function: one (center, half-width) per variable.
/// crack1d: (x, t); cavity3d: t, with the radial cutoff; vacuum: xi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSpec {
    pub center: Vec<f64>,
    pub half: Vec<f64>,
    pub inner: Option<f64>,
    pub outer: Option<f64>,
}

/// Tolerances; unset fields take the defaults of the kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// |limit| for residuals that must vanish
    pub residual: Option<f64>,
    /// relative tolerance on a nonzero residual limit
    pub residual_rel: Option<f64>,
    /// agreement of independent routes for closed-form quantities
    pub closed_form: Option<f64>,
    /// tolerance on energies and energy rates
    pub energy: Option<f64>,
    /// random sample points for bound checks
    pub samples: Option<usize>,
}

/// Tolerances with every default applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub residual: f64,
    pub residual_rel: f64,
    pub closed_form: f64,
    pub energy: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default)]
    pub scales: Vec<f64>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub tests: Vec<TestSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_kernel() -> String {
    "bump".into()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Defaults for a kind; the same values a config with only `kind` gets.
    pub fn defaults(kind: Kind) -> Self {
        let cfg = Self {
            kind,
            seed: default_seed(),
            kernel: default_kernel(),
            scales: Vec::new(),
            model: ModelConfig::default(),
            tests: Vec::new(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        };
        cfg.resolved()
    }

    /// Fill in every default so the manifest echoes what actually ran.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let m = &mut c.model;
        match c.kind {
            Kind::Crack1d => {
                m.law.get_or_insert_with(|| "saturating".into());
                m.lambda.get_or_insert(4.0);
                m.alpha.get_or_insert(2.0);
                if c.scales.is_empty() {
                    c.scales = scale_ladder(7);
                }
                if c.tests.is_empty() {
                    c.tests = [
                        ((0.1, 1.0), (0.5, 0.6)),
                        ((-0.2, 0.8), (0.4, 0.5)),
                        ((0.15, 1.2), (0.6, 0.7)),
                    ]
                    .iter()
                    .map(|&((x, t), (hx, ht))| TestSpec {
                        center: vec![x, t],
                        half: vec![hx, ht],
                        inner: None,
                        outer: None,
                    })
                    .collect();
                }
            }
            Kind::Cavity3d => {
                m.energy.get_or_insert_with(|| "reciprocal".into());
                m.lambda.get_or_insert(2.0);
                m.d.get_or_insert(3);
                if c.scales.is_empty() {
                    c.scales = scale_ladder(6);
                }
                if c.tests.is_empty() {
                    c.tests = vec![TestSpec {
                        center: vec![1.0],
                        half: vec![0.5],
                        inner: Some(1.0),
                        outer: Some(2.0),
                    }];
                }
            }
            Kind::Vacuum => {
                m.u_bar.get_or_insert(1.0);
                m.v_bar.get_or_insert(4.0);
                m.gamma.get_or_insert(2.0);
                if c.scales.is_empty() {
                    c.scales = scale_ladder(7)[2..].to_vec();
                }
                if c.tests.is_empty() {
                    c.tests = [(0.0, 0.9), (0.2, 0.7), (0.5, 0.4)]
                        .iter()
                        .map(|&(x, h)| TestSpec {
                            center: vec![x],
                            half: vec![h],
                            inner: None,
                            outer: None,
                        })
                        .collect();
                }
            }
        }
        let (res, en) = match c.kind {
            Kind::Crack1d | Kind::Vacuum => (1e-4, 1e-6),
            Kind::Cavity3d => (1e-3, 1e-2),
        };
        let t = &mut c.tolerances;
        t.residual.get_or_insert(res);
        t.residual_rel.get_or_insert(0.02);
        t.closed_form.get_or_insert(1e-9);
        t.energy.get_or_insert(en);
        t.samples.get_or_insert(10_000);
        c
    }

    /// Tolerances of the resolved config.
    pub fn tol(&self) -> Tol {
        let t = self.resolved().tolerances;
        Tol {
            residual: t.residual.unwrap_or_default(),
            residual_rel: t.residual_rel.unwrap_or_default(),
            closed_form: t.closed_form.unwrap_or_default(),
            energy: t.energy.unwrap_or_default(),
            samples: t.samples.unwrap_or_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        Mollifier::from_label(&self.kernel)?;
        let r = self.resolved();
        if r.scales.len() < 3 {
            return bad("at least three scales are needed for extrapolation".into());
        }
        if r.scales.iter().any(|n| !(*n >= 1.0)) || r.scales.windows(2).any(|w| w[1] <= w[0]) {
            return bad("scales must be >= 1 and strictly increasing".into());
        }
        let dims = match r.kind {
            Kind::Crack1d => 2,
            Kind::Cavity3d | Kind::Vacuum => 1,
        };
        for (k, t) in r.tests.iter().enumerate() {
            if t.center.len() != dims || t.half.len() != dims {
                return bad(format!(
                    "test {k} needs {dims} centre and half-width entries"
                ));
            }
            if t.half.iter().any(|h| !(*h > 0.0)) {
                return bad(format!("test {k} has a nonpositive half-width"));
            }
            if (t.inner.is_some() || t.outer.is_some()) && r.kind != Kind::Cavity3d {
                return bad(format!("test {k}: radial cutoffs only apply to cavity3d"));
            }
        }
        let tol = r.tol();
        if [tol.residual, tol.residual_rel, tol.closed_form, tol.energy]
            .iter()
            .any(|x| !(*x > 0.0))
            || tol.samples == 0
        {
            return bad("tolerances must be positive".into());
        }
        let m = &r.model;
        let unused = match r.kind {
            Kind::Crack1d => {
                m.energy.is_some()
                    || m.d.is_some()
                    || m.u_bar.is_some()
                    || m.v_bar.is_some()
                    || m.gamma.is_some()
            }
            Kind::Cavity3d => {
                m.law.is_some()
                    || m.alpha.is_some()
                    || m.u_bar.is_some()
                    || m.v_bar.is_some()
                    || m.gamma.is_some()
            }
            Kind::Vacuum => {
                m.law.is_some()
                    || m.energy.is_some()
                    || m.lambda.is_some()
                    || m.alpha.is_some()
                    || m.d.is_some()
            }
        };
        if unused {
            return bad(format!(
                "model has parameters that do not apply to {:?}",
                r.kind
            ));
        }
        Ok(())
    }
}
