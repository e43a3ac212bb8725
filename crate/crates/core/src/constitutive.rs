//! Constitutive laws: the 1-D stress/stored-energy pairs and the isotropic
//! radial stored energies W(F) = 1/2 |lambda|^2 + h(det F).

use crate::error::{Error, Result};
use crate::extrapolate::extrapolate_limit;
use crate::quadrature::Quad;
use serde::Serialize;

/// Value of a limit at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Asymptote {
    Finite(f64),
    Infinite,
}

impl Asymptote {
    pub fn finite(self) -> Option<f64> {
        match self {
            Asymptote::Finite(v) => Some(v),
            Asymptote::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Asymptote::Finite(_))
    }
}

/// A 1-D stress law tau(u) with its stored energy W(u) = int_1^u tau.
#[derive(Debug, Clone, Copy)]
pub struct StressLaw1D {
    pub label: &'static str,
    pub tau: fn(f64) -> f64,
    pub tau_prime: fn(f64) -> f64,
    pub tau_second: fn(f64) -> f64,
    pub energy: fn(f64) -> f64,
    /// lim tau(u) as u -> infinity
    pub tau_inf: Asymptote,
    /// lim tau(u)/u as u -> infinity
    pub growth: f64,
}

fn sat_tau(u: f64) -> f64 {
    1.0 - 1.0 / u
}
fn sat_tau_p(u: f64) -> f64 {
    1.0 / (u * u)
}
fn sat_tau_pp(u: f64) -> f64 {
    -2.0 / (u * u * u)
}
fn sat_w(u: f64) -> f64 {
    (u - 1.0) - u.ln()
}
fn nonsat_tau(u: f64) -> f64 {
    u - 1.0 / u
}
fn nonsat_tau_p(u: f64) -> f64 {
    1.0 + 1.0 / (u * u)
}
fn nonsat_w(u: f64) -> f64 {
    0.5 * (u * u - 1.0) - u.ln()
}

impl StressLaw1D {
    /// tau(u) = 1 - 1/u: the stress saturates at 1.
    pub fn saturating() -> Self {
        Self {
            label: "saturating",
            tau: sat_tau,
            tau_prime: sat_tau_p,
            tau_second: sat_tau_pp,
            energy: sat_w,
            tau_inf: Asymptote::Finite(1.0),
            growth: 0.0,
        }
    }

    /// tau(u) = u - 1/u: linear growth, L = 1.
    pub fn nonsaturating() -> Self {
        Self {
            label: "nonsaturating",
            tau: nonsat_tau,
            tau_prime: nonsat_tau_p,
            tau_second: sat_tau_pp,
            energy: nonsat_w,
            tau_inf: Asymptote::Infinite,
            growth: 1.0,
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "saturating" => Ok(Self::saturating()),
            "nonsaturating" => Ok(Self::nonsaturating()),
            other => Err(Error::UnknownLabel {
                kind: "stress law",
                label: other.to_string(),
            }),
        }
    }

    #[inline]
    pub fn tau(&self, u: f64) -> f64 {
        (self.tau)(u)
    }
    #[inline]
    pub fn tau_prime(&self, u: f64) -> f64 {
        (self.tau_prime)(u)
    }
    #[inline]
    pub fn w(&self, u: f64) -> f64 {
        (self.energy)(u)
    }
}

/// Sampled check of the structural hypotheses on a 1-D law.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport1D {
    pub points: usize,
    pub tau_prime_positive: bool,
    pub tau_second_negative: bool,
    /// tau at the smallest grid point; very negative when the law blows up in compression
    pub compressive_sample: f64,
    /// max |W(u) - int_1^u tau| over the grid
    pub energy_mismatch: f64,
    pub growth_estimate: f64,
    pub growth_error: f64,
    /// true when tau(u)/u decreases along the grid tail
    pub growth_monotone: bool,
}

impl HypothesisReport1D {
    pub fn all_hold(&self) -> bool {
        self.tau_prime_positive && self.tau_second_negative && self.energy_mismatch < 1e-8
    }
}

/// log-spaced grid of `count` points on [lo, hi]
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn check_hypotheses_1d(law: &StressLaw1D, grid: &[f64]) -> Result<HypothesisReport1D> {
    if grid.is_empty() || grid.iter().any(|&u| u <= 0.0) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "strain grid must be positive and sorted".into(),
        ));
    }
    let q = Quad::with_tol(1e-12, 1e-13);
    let mut mismatch: f64 = 0.0;
    for &u in grid {
        let int = q.integrate(law.tau, 1.0, u, &[])?;
        mismatch = mismatch.max((law.w(u) - int).abs() / (1.0 + int.abs()));
    }
    let tail = &grid[grid.len().saturating_sub(20)..];
    let growth_monotone = tail
        .windows(2)
        .all(|w| law.tau(w[1]) / w[1] <= law.tau(w[0]) / w[0] + 1e-15);
    let ks: Vec<f64> = (0..=40).map(|k| 2f64.powi(k)).collect();
    let ratios: Vec<f64> = ks.iter().map(|&u| law.tau(u) / u).collect();
    let fit = extrapolate_limit(&ks, &ratios)?;
    Ok(HypothesisReport1D {
        points: grid.len(),
        tau_prime_positive: grid.iter().all(|&u| (law.tau_prime)(u) > 0.0),
        tau_second_negative: grid.iter().all(|&u| (law.tau_second)(u) < 0.0),
        compressive_sample: law.tau(grid[0]),
        energy_mismatch: mismatch,
        growth_estimate: fit.limit,
        growth_error: (fit.limit - ratios[ratios.len() - 1]).abs(),
        growth_monotone,
    })
}

/// Which closed-form h(v) is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyKind {
    /// h = v + 1/v
    Reciprocal,
    /// h = v ln(1 + v) + 1/v
    Superlinear,
    /// h = d/(d+1) v^((d+1)/d) + 1/v
    Power,
}

/// Isotropic stored energy Phi = 1/2 sum lambda_i^2 + h(prod lambda_i).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StoredEnergy3D {
    pub kind: EnergyKind,
    pub d: usize,
    /// root of h'
    pub big_h: f64,
    /// lim h(v)/v
    pub growth: Asymptote,
    /// lim h'(v^d)/v
    pub cavity_slope: f64,
    /// true when lim h'(v^d)/v = 0
    pub sublinear: bool,
}

impl StoredEnergy3D {
    pub fn new(kind: EnergyKind, d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!(
                "radial energies need d >= 3, got {d}"
            )));
        }
        let mut e = Self {
            kind,
            d,
            big_h: 1.0,
            growth: Asymptote::Finite(1.0),
            cavity_slope: 0.0,
            sublinear: true,
        };
        match kind {
            EnergyKind::Reciprocal => {}
            EnergyKind::Superlinear => {
                e.growth = Asymptote::Infinite;
                let mut conv = roots::SimpleConvergency {
                    eps: 1e-15,
                    max_iter: 200,
                };
                e.big_h = roots::find_root_brent(0.1, 10.0, |v| e.h_prime(v), &mut conv)
                    .map_err(|err| Error::Root(format!("{err:?}")))?;
            }
            EnergyKind::Power => {
                e.growth = Asymptote::Infinite;
                e.cavity_slope = 1.0;
                e.sublinear = false;
            }
        }
        Ok(e)
    }

    pub fn from_label(label: &str, d: usize) -> Result<Self> {
        let kind = match label {
            "reciprocal" => EnergyKind::Reciprocal,
            "superlinear" => EnergyKind::Superlinear,
            "power" => EnergyKind::Power,
            other => {
                return Err(Error::UnknownLabel {
                    kind: "stored energy",
                    label: other.to_string(),
                })
            }
        };
        Self::new(kind, d)
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            EnergyKind::Reciprocal => "reciprocal",
            EnergyKind::Superlinear => "superlinear",
            EnergyKind::Power => "power",
        }
    }

    fn q(&self) -> f64 {
        1.0 / self.d as f64
    }

    pub fn h(&self, v: f64) -> f64 {
        match self.kind {
            EnergyKind::Reciprocal => v + 1.0 / v,
            EnergyKind::Superlinear => v * v.ln_1p() + 1.0 / v,
            EnergyKind::Power => {
                let q = self.q();
                v.powf(1.0 + q) / (1.0 + q) + 1.0 / v
            }
        }
    }

    pub fn h_prime(&self, v: f64) -> f64 {
        match self.kind {
            EnergyKind::Reciprocal => 1.0 - 1.0 / (v * v),
            EnergyKind::Superlinear => v.ln_1p() + v / (1.0 + v) - 1.0 / (v * v),
            EnergyKind::Power => v.powf(self.q()) - 1.0 / (v * v),
        }
    }

    pub fn h_second(&self, v: f64) -> f64 {
        match self.kind {
            EnergyKind::Reciprocal => 2.0 / (v * v * v),
            EnergyKind::Superlinear => {
                let w = 1.0 / (1.0 + v);
                w + w * w + 2.0 / (v * v * v)
            }
            EnergyKind::Power => {
                let q = self.q();
                q * v.powf(q - 1.0) + 2.0 / (v * v * v)
            }
        }
    }

    pub fn h_third(&self, v: f64) -> f64 {
        let v4 = v * v * v * v;
        match self.kind {
            EnergyKind::Reciprocal => -6.0 / v4,
            EnergyKind::Superlinear => {
                let w = 1.0 / (1.0 + v);
                -w * w - 2.0 * w * w * w - 6.0 / v4
            }
            EnergyKind::Power => {
                let q = self.q();
                q * (q - 1.0) * v.powf(q - 2.0) - 6.0 / v4
            }
        }
    }

    /// Phi(lambda_1, lambda_2, ..., lambda_2).
    pub fn stored(&self, l1: f64, l2: f64) -> f64 {
        let d = self.d as i32;
        0.5 * (l1 * l1 + (d - 1) as f64 * l2 * l2) + self.h(l1 * l2.powi(d - 1))
    }

    /// Principal stresses (dPhi/dlambda_1, dPhi/dlambda_2).
    pub fn radial_stress(&self, l1: f64, l2: f64) -> Result<RadialStress> {
        if !(l1 > 0.0 && l2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eigenvalues must be positive, got ({l1}, {l2})"
            )));
        }
        Ok(self.stress_unchecked(l1, l2))
    }

    #[inline]
    pub fn stress_unchecked(&self, l1: f64, l2: f64) -> RadialStress {
        let d = self.d as i32;
        let l2p = l2.powi(d - 2);
        let v = l1 * l2p * l2;
        let hp = self.h_prime(v);
        RadialStress {
            phi1: l1 + l2p * l2 * hp,
            phi2: l2 + l1 * l2p * hp,
        }
    }

    /// dPhi1/dlambda_1 and dPhi1/dlambda_2.
    pub fn stress_jacobian(&self, l1: f64, l2: f64) -> (f64, f64) {
        let d = self.d as i32;
        let l2p = l2.powi(d - 2);
        let v = l1 * l2p * l2;
        let h2 = self.h_second(v);
        let dl1 = 1.0 + (l2p * l2) * (l2p * l2) * h2;
        let dl2 = (d - 1) as f64 * l2p * (self.h_prime(v) + v * h2);
        (dl1, dl2)
    }
}

/// Principal Piola–Kirchhoff stresses of a radial motion: radial and hoop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialStress {
    pub phi1: f64,
    pub phi2: f64,
}

/// Sampled check of the hypotheses on h.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport3D {
    pub points: usize,
    pub h_second_positive: bool,
    pub h_third_negative: bool,
    pub root_residual: f64,
    pub sign_split_at_root: bool,
    /// when L is finite: h' increases towards L from below on the grid
    pub slope_approaches_growth: bool,
}

impl HypothesisReport3D {
    pub fn all_hold(&self) -> bool {
        self.h_second_positive
            && self.h_third_negative
            && self.root_residual < 1e-12
            && self.sign_split_at_root
            && self.slope_approaches_growth
    }
}

pub fn check_hypotheses_3d(e: &StoredEnergy3D, grid: &[f64]) -> HypothesisReport3D {
    let split = grid.iter().all(|&v| {
        let hp = e.h_prime(v);
        if v < e.big_h * (1.0 - 1e-12) {
            hp < 0.0
        } else if v > e.big_h * (1.0 + 1e-12) {
            hp > 0.0
        } else {
            true
        }
    });
    let approach = match e.growth {
        Asymptote::Finite(l) => grid
            .windows(2)
            .all(|w| e.h_prime(w[0]) <= e.h_prime(w[1]) && e.h_prime(w[1]) < l),
        Asymptote::Infinite => true,
    };
    HypothesisReport3D {
        points: grid.len(),
        h_second_positive: grid.iter().all(|&v| e.h_second(v) > 0.0),
        h_third_negative: grid.iter().all(|&v| e.h_third(v) < 0.0),
        root_residual: e.h_prime(e.big_h).abs(),
        sign_split_at_root: split,
        slope_approaches_growth: approach,
    }
}

/// Surface area of the unit sphere in R^d.
pub fn omega(d: usize) -> f64 {
    // Gamma(d/2) by recursion from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi)
    let mut g = if d.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < d as f64 / 2.0 - 0.25 {
        g *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_values() {
        let law = StressLaw1D::saturating();
        assert_eq!(law.tau(1.0), 0.0);
        assert_eq!(law.tau(4.0), 0.75);
        assert!((law.w(4.0) - (3.0 - 4f64.ln())).abs() < 1e-15);
        assert!((law.w(4.0) - 1.613_706).abs() < 1e-6);
    }

    #[test]
    fn unknown_labels() {
        assert!(StressLaw1D::from_label("plastic").is_err());
        assert!(StoredEnergy3D::from_label("neo", 3).is_err());
        assert!(StoredEnergy3D::from_label("reciprocal", 2).is_err());
    }

    #[test]
    fn omega_values() {
        assert!((omega(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((omega(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-13);
        assert!((omega(5) - 8.0 * std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-13);
    }

    #[test]
    fn radial_stress_examples() {
        let e = StoredEnergy3D::from_label("reciprocal", 3).unwrap();
        let s = e.radial_stress(1.0, 1.0).unwrap();
        assert_eq!((s.phi1, s.phi2), (1.0, 1.0));
        let s = e.radial_stress(2.0, 1.0).unwrap();
        assert!((s.phi1 - 2.75).abs() < 1e-15);
        assert!((s.phi2 - 2.5).abs() < 1e-15);
        assert!(e.radial_stress(0.0, 1.0).is_err());
    }

    #[test]
    fn superlinear_root() {
        let e = StoredEnergy3D::from_label("superlinear", 3).unwrap();
        assert!(e.h_prime(e.big_h).abs() < 1e-14);
        assert!(e.big_h > 0.5 && e.big_h < 1.0);
    }
}
