//! Sampled checks of the a priori bounds on the mollified cavity fields:
//! the bulk envelope of v^n, the global bound on w^n_t, the boundary-layer
//! bounds for R < 1/n and the collapse of v^n for kernels with phi(0) = 0.

use super::fields::MollifiedCavity;
use super::profile::SimilarityProfile;
use crate::error::{Error, Result};
use crate::mollify::Mollifier;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

/// Sampling window in time.
pub const T_RANGE: (f64, f64) = (0.25, 2.0);
/// Relative slack for the sampled inequalities.
const SLACK: f64 = 1e-9;

/// Per-level envelopes and failure counts.
#[derive(Debug, Clone, Serialize)]
pub struct LevelBounds {
    pub n: f64,
    /// min / max of v^n on R > 1/n
    pub bulk_v_min: f64,
    pub bulk_v_max: f64,
    /// min / max of v^n on R < 1/n
    pub core_v_min: f64,
    pub core_v_max: f64,
    /// max of v^n / (1 + t^d n^d) on R < 1/n
    pub c2: f64,
    /// max |w^n_t| / r(0)
    pub wt_ratio: f64,
    /// failures of the four boundary-layer assertions
    pub layer_failures: [usize; 4],
    pub bulk_samples: usize,
    pub core_samples: usize,
}

impl LevelBounds {
    /// The empirical lower bound for det grad y^n at this level.
    pub fn v_min(&self) -> f64 {
        self.bulk_v_min.min(self.core_v_min)
    }
}

/// Outcome of [`verify_layer_bounds`].
#[derive(Debug, Clone, Serialize)]
pub struct LayerReport {
    pub kernel: String,
    /// phi >= delta on |x| < eps
    pub eps: f64,
    pub delta: f64,
    pub levels: Vec<LevelBounds>,
    /// (max - min) / min of the bulk minimum over the top three levels
    pub c1_spread: f64,
    pub bulk_stable: bool,
    pub wt_bounded: bool,
    pub layer_ok: [bool; 4],
    pub pass: bool,
}

/// v^n on R > 1/n must keep a positive n-independent floor; |w^n_t| <= r(0);
/// for R < 1/n, with w0 = t r(0):
///   (1) 2 phi_n(R) w0 <= lam1 <= 2 phi_n(R) w0 + lambda
///   (2) 2 Phi(nR) w0 / R <= lam2 <= 2 Phi(nR) w0 / R + lambda
///   (3) v >= (2 n delta w0)^d on R < eps/n
///   (4) c1 <= v <= c2 (1 + t^d n^d) with c2 not growing in n.
/// `budget` points go to each of the bulk and the layer, split over levels;
/// every level reuses the same unit samples so envelopes are comparable.
pub fn verify_layer_bounds(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    ns: &[f64],
    budget: usize,
    seed: u64,
) -> Result<LayerReport> {
    phi.require_positive_center()?;
    if ns.len() < 3 {
        return Err(Error::InvalidParameter(
            "layer bounds need at least three levels".into(),
        ));
    }
    let eps = 0.5;
    let delta = (0..=100)
        .map(|k| phi.phi(eps * k as f64 / 100.0))
        .fold(f64::INFINITY, f64::min);
    let per = budget.div_ceil(ns.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units: Vec<[f64; 3]> = (0..per).map(|_| rng.gen::<[f64; 3]>()).collect();
    let levels = ns
        .par_iter()
        .map(|&n| level_bounds(profile, phi, n, &units, eps, delta))
        .collect::<Result<Vec<_>>>()?;

    let top: Vec<f64> = levels.iter().rev().take(3).map(|l| l.bulk_v_min).collect();
    let lo = top.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c1_spread = (hi - lo) / lo;
    let bulk_stable = lo > 0.0 && c1_spread < 0.1;
    let wt_bounded = levels.iter().all(|l| l.wt_ratio <= 1.0 + SLACK);
    let mut layer_ok = [true; 4];
    for l in &levels {
        for (ok, f) in layer_ok.iter_mut().zip(l.layer_failures) {
            *ok &= f == 0;
        }
    }
    let c2_first = levels[0].c2;
    let c2_last = levels[levels.len() - 1].c2;
    layer_ok[3] &= levels.iter().all(|l| l.core_v_min > 0.0) && c2_last <= 1.1 * c2_first;
    let pass = bulk_stable && wt_bounded && layer_ok.iter().all(|b| *b);
    Ok(LayerReport {
        kernel: phi.label().to_string(),
        eps,
        delta,
        levels,
        c1_spread,
        bulk_stable,
        wt_bounded,
        layer_ok,
        pass,
    })
}

fn level_bounds(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    n: f64,
    units: &[[f64; 3]],
    eps: f64,
    delta: f64,
) -> Result<LevelBounds> {
    let m = MollifiedCavity::new(profile, phi, n);
    let d = profile.d as i32;
    let lam = profile.lambda;
    let (ta, tb) = T_RANGE;
    let mut out = LevelBounds {
        n,
        bulk_v_min: f64::INFINITY,
        bulk_v_max: f64::NEG_INFINITY,
        core_v_min: f64::INFINITY,
        core_v_max: f64::NEG_INFINITY,
        c2: 0.0,
        wt_ratio: 0.0,
        layer_failures: [0; 4],
        bulk_samples: units.len(),
        core_samples: units.len(),
    };
    for u in units {
        let t = ta + (tb - ta) * u[0];
        let h = 1.0 / n;

        let r = h + (profile.sigma * t + 1.0) * u[1];
        let f = m.fields(r, t)?;
        out.bulk_v_min = out.bulk_v_min.min(f.v);
        out.bulk_v_max = out.bulk_v_max.max(f.v);
        out.wt_ratio = out.wt_ratio.max(f.wt.abs() / profile.r0);

        let r = h * u[2].max(1e-6);
        let f = m.fields(r, t)?;
        out.core_v_min = out.core_v_min.min(f.v);
        out.core_v_max = out.core_v_max.max(f.v);
        out.wt_ratio = out.wt_ratio.max(f.wt.abs() / profile.r0);
        let w0 = t * profile.r0;
        let below = |x: f64, lo: f64| x < lo - SLACK * (1.0 + lo.abs());
        let a1 = 2.0 * phi.phi_n(n, r) * w0;
        if below(f.lam1, a1) || below(a1 + lam, f.lam1) {
            out.layer_failures[0] += 1;
        }
        let a2 = 2.0 * phi.primitive(n * r) * w0 / r;
        if below(f.lam2, a2) || below(a2 + lam, f.lam2) {
            out.layer_failures[1] += 1;
        }
        if r < eps * h && below(f.v, (2.0 * n * delta * w0).powi(d)) {
            out.layer_failures[2] += 1;
        }
        if f.v <= 0.0 {
            out.layer_failures[3] += 1;
        }
        out.c2 = out.c2.max(f.v / (1.0 + (t * n).powi(d)));
    }
    Ok(out)
}

/// sup of v^n over 0 < R <= 1/n^2 at time t on a uniform grid; decays along n
/// when phi(0) = 0 because the kernel cannot see the cavity there.
pub fn center_sup(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    n: f64,
    t: f64,
    grid: usize,
) -> Result<f64> {
    let m = MollifiedCavity::new(profile, phi, n);
    let top = 1.0 / (n * n);
    let mut sup = f64::NEG_INFINITY;
    for k in 1..=grid {
        let f = m.fields(top * k as f64 / grid as f64, t)?;
        sup = sup.max(f.v);
    }
    Ok(sup)
}

/// Collapse of the centre for a degenerate kernel along a scale ladder.
#[derive(Debug, Clone, Serialize)]
pub struct CenterCollapse {
    pub kernel: String,
    pub ns: Vec<f64>,
    pub sups: Vec<f64>,
    /// sup(n) / sup(2n) for consecutive levels
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// The sup must fall by at least `factor` per doubling of n.
pub fn center_collapse(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    ns: &[f64],
    t: f64,
    factor: f64,
) -> Result<CenterCollapse> {
    let sups = ns
        .par_iter()
        .map(|&n| center_sup(profile, phi, n, t, 64))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = sups.windows(2).map(|w| w[0] / w[1]).collect();
    let pass = !ratios.is_empty() && ratios.iter().all(|r| *r >= factor);
    Ok(CenterCollapse {
        kernel: phi.label().to_string(),
        ns: ns.to_vec(),
        sups,
        ratios,
        pass,
    })
}

impl LayerReport {
    /// One row per level.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "n",
            "bulk_v_min",
            "bulk_v_max",
            "core_v_min",
            "core_v_max",
            "c2",
            "wt_ratio",
            "fail_1",
            "fail_2",
            "fail_3",
            "fail_4",
        ])?;
        for l in &self.levels {
            let mut row = vec![
                format!("{}", l.n),
                format!("{:.12e}", l.bulk_v_min),
                format!("{:.12e}", l.bulk_v_max),
                format!("{:.12e}", l.core_v_min),
                format!("{:.12e}", l.core_v_max),
                format!("{:.12e}", l.c2),
                format!("{:.12e}", l.wt_ratio),
            ];
            row.extend(l.layer_failures.iter().map(|f| f.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
