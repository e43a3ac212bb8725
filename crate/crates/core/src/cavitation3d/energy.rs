//! Energy of the cavitating solution: the closed-form audit (shock
//! dissipation J, cavity cost, excess D), the mollified energy along n and
//! the divergence witness when h grows superlinearly.

use super::fields::{ExactCavity, MollifiedCavity};
use super::profile::SimilarityProfile;
use crate::constitutive::{omega, Asymptote};
use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_limit, LimitEstimate};
use crate::mollify::Mollifier;
use crate::quadrature::Quad;
use crate::weakform::RadialMotion;
use rayon::prelude::*;
use serde::Serialize;

/// Closed-form energy bookkeeping at time t in the ball of radius b.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyAudit3D {
    pub t: f64,
    pub b_radius: f64,
    pub sigma: f64,
    pub r0: f64,
    pub rp_minus: f64,
    /// shock dissipation coefficient
    pub j: f64,
    /// (t^d omega_d / d) r0^d L
    pub cavity_term: f64,
    /// sigma^d J + r0^d L
    pub d_excess: f64,
    /// r(sigma)^d (1 - r'(sigma-)/lambda) - r0^d, nonpositive
    pub volume_defect: f64,
    /// energy of the homogeneous state lambda x in the ball
    pub e_hom: f64,
    /// e_hom + (t^d sigma^d omega_d / d) J + cavity_term
    pub e_total: f64,
    /// energy of the unmollified motion by quadrature; no cavity term
    pub e_exact_motion: f64,
}

impl EnergyAudit3D {
    pub fn holds(&self) -> bool {
        self.d_excess > 0.0 && self.volume_defect <= 0.0 && self.cavity_term >= 0.0
    }
}

/// Growth of the energy stored near the centre when h is superlinear.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceWitness {
    pub t: f64,
    pub ns: Vec<f64>,
    /// h((2 delta n)^d w0^d) / n^d
    pub lower_bound: Vec<f64>,
    /// omega_d int_0^{eps/n} h(v^n) R^{d-1} dR
    pub ball_energy: Vec<f64>,
    pub growing: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EnergyOutcome {
    Finite(EnergyAudit3D),
    Infinite(DivergenceWitness),
}

impl EnergyOutcome {
    pub fn finite(&self) -> Option<&EnergyAudit3D> {
        match self {
            Self::Finite(a) => Some(a),
            Self::Infinite(_) => None,
        }
    }
}

/// E[lambda x, B] = omega_d b^d / d (d lambda^2 / 2 + h(lambda^d)).
pub fn homogeneous_energy(profile: &SimilarityProfile, b_radius: f64) -> f64 {
    let d = profile.d;
    let df = d as f64;
    let l = profile.lambda;
    omega(d) * b_radius.powi(d as i32) / df
        * (0.5 * df * l * l + profile.energy.h(l.powi(d as i32)))
}

/// Shock dissipation coefficient with r_p = r'(sigma-):
///   J = r_p^2/2 + h(r_p lambda^(d-1)) - lambda^2/2 - h(lambda^d)
///     + 1/2 [r_p + h'(r_p lambda^(d-1)) lambda^(d-1) + lambda + h'(lambda^d) lambda^(d-1)] (lambda - r_p).
pub fn shock_dissipation(profile: &SimilarityProfile) -> f64 {
    let e = &profile.energy;
    let d = profile.d as i32;
    let l = profile.lambda;
    let rp = profile.rp_minus;
    let ld1 = l.powi(d - 1);
    0.5 * rp * rp + e.h(rp * ld1) - 0.5 * l * l - e.h(l.powi(d))
        + 0.5 * (rp + e.h_prime(rp * ld1) * ld1 + l + e.h_prime(l.powi(d)) * ld1) * (l - rp)
}

/// omega_d int_0^b [w_t^2/2 + Phi(lam1, lam2)] R^(d-1) dR for a radial motion
/// given by its state and time derivative.
fn ball_energy<M: RadialMotion>(
    motion: &M,
    wt: impl Fn(f64) -> Result<f64>,
    profile: &SimilarityProfile,
    t: f64,
    a: f64,
    b: f64,
    q: &Quad,
) -> Result<f64> {
    let d = profile.d as i32;
    let pts: Vec<f64> = motion
        .r_breaks(t)
        .into_iter()
        .filter(|p| *p > a && *p < b)
        .collect();
    let body = q.try_integrate(
        |r| {
            let [_, l1, l2] = motion.state(r, t)?;
            let v = wt(r)?;
            let val = (0.5 * v * v + profile.energy.stored(l1, l2)) * r.powi(d - 1);
            if val.is_finite() {
                Ok(val)
            } else {
                Err(Error::NonFinite { at: r })
            }
        },
        a,
        b,
        &pts,
    )?;
    Ok(omega(profile.d) * body)
}

/// Energy of the unmollified motion w = t r(R/t) in the ball; finite, and
/// missing exactly the cavity term.
pub fn exact_motion_energy(profile: &SimilarityProfile, t: f64, b_radius: f64) -> Result<f64> {
    let m = ExactCavity { profile };
    let wt = |r: f64| {
        let (rr, rp) = profile.extended(r / t);
        Ok(rr - r / t * rp)
    };
    ball_energy(
        &m,
        wt,
        profile,
        t,
        0.0,
        b_radius,
        &Quad::with_tol(1e-11, 1e-11),
    )
}

/// The closed-form audit when L is finite; the divergence witness otherwise.
pub fn energy_fan_3d(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    t: f64,
    b_radius: f64,
    ns: &[f64],
) -> Result<EnergyOutcome> {
    if !(t > 0.0) || b_radius <= profile.sigma * t {
        return Err(Error::InvalidParameter(format!(
            "ball radius {b_radius} must exceed the shock radius {}",
            profile.sigma * t
        )));
    }
    let l = match profile.energy.growth {
        Asymptote::Finite(l) => l,
        Asymptote::Infinite => {
            return divergence_witness(profile, phi, t, ns).map(EnergyOutcome::Infinite)
        }
    };
    let d = profile.d;
    let k = d as i32;
    let df = d as f64;
    let j = shock_dissipation(profile);
    let r0d = profile.r0.powi(k);
    let cavity_term = t.powi(k) * omega(d) / df * r0d * l;
    let d_excess = profile.sigma.powi(k) * j + r0d * l;
    let rs = profile.lambda * profile.sigma;
    let volume_defect = rs.powi(k) * (1.0 - profile.rp_minus / profile.lambda) - r0d;
    let e_hom = homogeneous_energy(profile, b_radius);
    let e_total = e_hom + (t * profile.sigma).powi(k) * omega(d) / df * j + cavity_term;
    Ok(EnergyOutcome::Finite(EnergyAudit3D {
        t,
        b_radius,
        sigma: profile.sigma,
        r0: profile.r0,
        rp_minus: profile.rp_minus,
        j,
        cavity_term,
        d_excess,
        volume_defect,
        e_hom,
        e_total,
        e_exact_motion: exact_motion_energy(profile, t, b_radius)?,
    }))
}

/// Energy of the mollified motion at scale n split as [whole ball, R < 1/n].
pub fn mollified_energy(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    n: f64,
    t: f64,
    b_radius: f64,
) -> Result<[f64; 2]> {
    let m = MollifiedCavity::new(profile, phi, n);
    let q = Quad::with_tol(1e-10, 1e-11);
    let wt = |r: f64| Ok(m.fields(r, t)?.wt);
    let core = ball_energy(&m, wt, profile, t, 0.0, 1.0 / n, &q)?;
    let rest = ball_energy(&m, wt, profile, t, 1.0 / n, b_radius, &q)?;
    Ok([core + rest, core])
}

/// Mollified energies along n and their extrapolated limits.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyLimit {
    pub t: f64,
    pub b_radius: f64,
    pub ns: Vec<f64>,
    pub totals: Vec<f64>,
    pub cores: Vec<f64>,
    pub total: LimitEstimate,
    pub core: LimitEstimate,
}

pub fn energy_limit_numeric(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    t: f64,
    b_radius: f64,
    ns: &[f64],
) -> Result<EnergyLimit> {
    phi.require_positive_center()?;
    if !profile.energy.growth.is_finite() {
        return Err(Error::InvalidParameter(
            "energy is infinite when h grows superlinearly".into(),
        ));
    }
    let rows = ns
        .par_iter()
        .map(|&n| mollified_energy(profile, phi, n, t, b_radius))
        .collect::<Result<Vec<_>>>()?;
    let totals: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let cores: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    Ok(EnergyLimit {
        t,
        b_radius,
        ns: ns.to_vec(),
        total: extrapolate_limit(ns, &totals)?,
        core: extrapolate_limit(ns, &cores)?,
        totals,
        cores,
    })
}

/// Lower bound h((2 delta n w0)^d)/n^d from the layer estimate and the stored
/// energy in the ball R < eps/n, both along n; they grow without bound when
/// h(v)/v is unbounded.
pub fn divergence_witness(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    t: f64,
    ns: &[f64],
) -> Result<DivergenceWitness> {
    phi.require_positive_center()?;
    let d = profile.d as i32;
    let eps = 0.5;
    let delta = (0..=100)
        .map(|k| phi.phi(eps * k as f64 / 100.0))
        .fold(f64::INFINITY, f64::min);
    let w0 = t * profile.r0;
    let lower_bound: Vec<f64> = ns
        .iter()
        .map(|&n| profile.energy.h((2.0 * delta * n * w0).powi(d)) / n.powi(d))
        .collect();
    let ball_energy = ns
        .par_iter()
        .map(|&n| {
            let m = MollifiedCavity::new(profile, phi, n);
            let body = Quad::with_tol(1e-10, 1e-10).try_integrate(
                |r| Ok(profile.energy.h(m.fields(r, t)?.v) * r.powi(d - 1)),
                0.0,
                eps / n,
                &[],
            )?;
            Ok(omega(profile.d) * body)
        })
        .collect::<Result<Vec<_>>>()?;
    let inc = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let growing = ns.len() >= 2 && inc(&lower_bound) && inc(&ball_energy);
    Ok(DivergenceWitness {
        t,
        ns: ns.to_vec(),
        lower_bound,
        ball_energy,
        growing,
    })
}
