//! The self-similar cavitating profile w(R, t) = t r(R/t): shooting from the
//! traction-free cavity out to the Rankine–Hugoniot shock.

use crate::constitutive::StoredEnergy3D;
use crate::error::{Error, Result};
use crate::ode::{Crossing, Dopri5, Event, Stop, Trajectory};
use rayon::prelude::*;
use serde::Serialize;

/// Below this |s^2 - dPhi1/dlambda1| the ODE is treated as sonic.
const SONIC_GAP: f64 = 1e-12;

/// Last abscissa a shot may reach before it counts as shock-free.
const S_MAX: f64 = 100.0;

/// r'' from s^2 r'' = d/ds Phi1(r', r/s) + ((d-1)/s)(Phi1 - Phi2), solved
/// for r'' after expanding the s-derivative by the chain rule:
///   (s^2 - dPhi1/dl1) r'' = dPhi1/dl2 (r's - r)/s^2 + ((d-1)/s)(Phi1 - Phi2).
pub fn selfsim_ode_rhs(e: &StoredEnergy3D, s: f64, r: f64, rp: f64) -> Result<f64> {
    if !(s > 0.0 && r > 0.0 && rp > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "profile ODE needs s, r, r' > 0, got ({s}, {r}, {rp})"
        )));
    }
    let d = e.d as f64;
    let l2 = r / s;
    let v = rp * l2.powi(e.d as i32 - 1);
    let (p11, p12) = e.stress_jacobian(rp, l2);
    let den = s * s - p11;
    if den.abs() < SONIC_GAP * (1.0 + p11) {
        return Err(Error::Sonic { s });
    }
    // Phi1 - Phi2 = (l1 - l2)(1 - l2^(d-2) h'(v))
    let diff = (rp - l2) * (1.0 - l2.powi(e.d as i32 - 2) * e.h_prime(v));
    Ok((p12 * (rp * s - r) / (s * s) + (d - 1.0) / s * diff) / den)
}

/// Right-hand side in the state (r, v), v = r' (r/s)^(d-1). Near the cavity
/// r' is of size (s/r0)^(d-1) while v stays close to H, so this state keeps
/// its relative accuracy where (r, r') would not.
pub fn state_rhs(e: &StoredEnergy3D, s: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
    let [r, v] = *y;
    if !(r > 0.0 && v > 0.0 && s > 0.0) {
        return Err(Error::Ode {
            at: s,
            reason: format!("left the physical region: r = {r}, v = {v}"),
        });
    }
    let dm1 = e.d as i32 - 1;
    let l2 = r / s;
    let l2p = l2.powi(dm1);
    let rp = v / l2p;
    let rpp = selfsim_ode_rhs(e, s, r, rp)?;
    let vp = rpp * l2p + rp * dm1 as f64 * l2.powi(dm1 - 1) * (rp * s - r) / (s * s);
    Ok([rp, vp])
}

/// Leading-order cavity asymptotics v(s) = H + ((d-1)/(d-2)) (s/r0)^(d-2) / h''(H).
pub fn cavity_v(e: &StoredEnergy3D, r0: f64, s: f64) -> f64 {
    let d = e.d as f64;
    e.big_h + (d - 1.0) / (d - 2.0) * (s / r0).powi(e.d as i32 - 2) / e.h_second(e.big_h)
}

/// Outcome of one shot from the cavity.
#[derive(Debug, Clone)]
pub enum Shot {
    /// r - lambda s changed sign at sigma.
    Shock {
        sigma: f64,
        rp_minus: f64,
        v_minus: f64,
        /// sigma^2 (lambda - r') - [Phi1(lambda, lambda) - Phi1(r', lambda)]
        mismatch: f64,
        traj: Trajectory<2>,
    },
    /// the sonic guard s^2 = dPhi1/dl1 fired first
    Sonic { s: f64 },
    /// no shock before S_MAX, or the integration broke down
    Failed { reason: String },
}

impl Shot {
    pub fn mismatch(&self) -> Option<f64> {
        match self {
            Shot::Shock { mismatch, .. } => Some(*mismatch),
            _ => None,
        }
    }
}

/// Shooting settings.
#[derive(Debug, Clone, Copy)]
pub struct ShootSettings {
    pub eps: f64,
    pub ode: Dopri5,
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub scan_points: usize,
    pub rh_tol: f64,
}

impl Default for ShootSettings {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            ode: Dopri5::with_rtol(1e-11),
            scan_lo: 0.05,
            scan_hi: 60.0,
            scan_points: 48,
            rh_tol: 1e-9,
        }
    }
}

fn rh_mismatch(e: &StoredEnergy3D, lambda: f64, sigma: f64, rp: f64) -> f64 {
    let phi_l = e.stress_unchecked(lambda, lambda).phi1;
    let phi_m = e.stress_unchecked(rp, lambda).phi1;
    sigma * sigma * (lambda - rp) - (phi_l - phi_m)
}

pub fn shoot_once(e: &StoredEnergy3D, lambda: f64, r0: f64, set: &ShootSettings) -> Shot {
    let eps = set.eps;
    let y0 = [r0, cavity_v(e, r0, eps)];
    let dm1 = e.d as i32 - 1;
    let shock = Event::new(Crossing::Falling, move |s, y: &[f64; 2]| y[0] - lambda * s);
    let sonic = Event::new(Crossing::Falling, |s, y: &[f64; 2]| {
        let l2 = y[0] / s;
        1.0 + l2.powi(2 * dm1) * e.h_second(y[1]) - s * s
    });
    let run = set
        .ode
        .solve(|s, y| state_rhs(e, s, y), eps, y0, S_MAX, &[shock, sonic]);
    match run {
        Ok((traj, Stop::Event(0))) => {
            let (sigma, [r, v]) = traj.last();
            let rp = v / (r / sigma).powi(dm1);
            Shot::Shock {
                sigma,
                rp_minus: rp,
                v_minus: v,
                mismatch: rh_mismatch(e, lambda, sigma, rp),
                traj,
            }
        }
        Ok((traj, Stop::Event(_))) => Shot::Sonic { s: traj.last().0 },
        Ok((_, Stop::Reached)) => Shot::Failed {
            reason: format!("no shock before s = {S_MAX}"),
        },
        Err(Error::Sonic { s }) => Shot::Sonic { s },
        Err(err) => Shot::Failed {
            reason: err.to_string(),
        },
    }
}

/// The reconstructed profile on (0, sigma].
#[derive(Debug, Clone)]
pub struct SimilarityProfile {
    pub energy: StoredEnergy3D,
    pub d: usize,
    pub lambda: f64,
    pub r0: f64,
    pub sigma: f64,
    /// r'(sigma-)
    pub rp_minus: f64,
    pub mismatch: f64,
    pub eps: f64,
    /// shots fired by the controller
    pub shots: usize,
    traj: Trajectory<2>,
}

/// Find a sign change of the RH mismatch. Shots that end sonic mark the far
/// side of the admissible r0 range; the edge is refined by bisection.
fn bracket(
    e: &StoredEnergy3D,
    lambda: f64,
    set: &ShootSettings,
    shots: &mut usize,
) -> Result<(f64, f64, f64, f64)> {
    let k = set.scan_points;
    let ratio = (set.scan_hi / set.scan_lo).powf(1.0 / (k - 1) as f64);
    let grid: Vec<f64> = (0..k).map(|i| set.scan_lo * ratio.powi(i as i32)).collect();
    let out: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&r0| shoot_once(e, lambda, r0, set).mismatch())
        .collect();
    *shots += k;
    for i in 0..k - 1 {
        let (a, fa) = (grid[i], out[i]);
        let (b, fb) = (grid[i + 1], out[i + 1]);
        match (fa, fb) {
            (Some(fa), Some(fb)) if fa.signum() != fb.signum() => return Ok((a, fa, b, fb)),
            (Some(fa), None) => {
                // walk towards the edge of the shock-producing range
                let (mut lo, mut flo, mut hi) = (a, fa, b);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    *shots += 1;
                    match shoot_once(e, lambda, m, set).mismatch() {
                        Some(fm) if fm.signum() != flo.signum() => return Ok((lo, flo, m, fm)),
                        Some(fm) => {
                            lo = m;
                            flo = fm;
                        }
                        None => hi = m,
                    }
                    if hi - lo < 1e-13 * hi {
                        break;
                    }
                }
            }
            (None, Some(fb)) => {
                let (mut lo, mut hi, mut fhi) = (a, b, fb);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    *shots += 1;
                    match shoot_once(e, lambda, m, set).mismatch() {
                        Some(fm) if fm.signum() != fhi.signum() => return Ok((m, fm, hi, fhi)),
                        Some(fm) => {
                            hi = m;
                            fhi = fm;
                        }
                        None => lo = m,
                    }
                    if hi - lo < 1e-13 * hi {
                        break;
                    }
                }
            }
            _ => {}
        }
    }
    Err(Error::NoCavitation(format!(
        "RH mismatch keeps its sign for r0 in [{}, {}] at lambda = {lambda}",
        set.scan_lo, set.scan_hi
    )))
}

pub fn shoot_profile(e: &StoredEnergy3D, lambda: f64) -> Result<SimilarityProfile> {
    shoot_profile_with(e, lambda, &ShootSettings::default())
}

pub fn shoot_profile_with(
    e: &StoredEnergy3D,
    lambda: f64,
    set: &ShootSettings,
) -> Result<SimilarityProfile> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
    }
    let mut shots = 0;
    let (mut a, mut fa, mut b, mut fb) = bracket(e, lambda, set, &mut shots)?;
    // Illinois regula falsi; a failed shot inside the bracket is bisected away
    let mut side = 0;
    let mut best: Option<(f64, Shot)> = None;
    for it in 0..200 {
        let mut m = (a * fb - b * fa) / (fb - fa);
        if !(m > a && m < b) || it % 8 == 7 {
            m = 0.5 * (a + b);
        }
        shots += 1;
        let shot = shoot_once(e, lambda, m, set);
        let Some(fm) = shot.mismatch() else {
            // treat like the side it is closer to
            if m - a < b - m {
                a = m;
            } else {
                b = m;
            }
            continue;
        };
        let done = fm.abs() < set.rh_tol || (b - a) < 1e-14 * b;
        let replace = best
            .as_ref()
            .is_none_or(|(_, s)| fm.abs() < s.mismatch().unwrap().abs());
        if replace {
            best = Some((m, shot));
        }
        if done && fm.abs() < set.rh_tol {
            break;
        }
        if fm.signum() == fb.signum() {
            b = m;
            fb = fm;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = m;
            fa = fm;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
        if (b - a) < 1e-14 * b {
            break;
        }
    }
    let (r0, shot) = best.ok_or_else(|| Error::Root("no shock-producing shot".into()))?;
    let Shot::Shock {
        sigma,
        rp_minus,
        mismatch,
        traj,
        ..
    } = shot
    else {
        unreachable!()
    };
    if mismatch.abs() >= set.rh_tol {
        return Err(Error::Root(format!(
            "RH mismatch {mismatch:e} above {:e} at r0 = {r0}",
            set.rh_tol
        )));
    }
    Ok(SimilarityProfile {
        energy: *e,
        d: e.d,
        lambda,
        r0,
        sigma,
        rp_minus,
        mismatch,
        eps: set.eps,
        shots,
        traj,
    })
}

/// Bisect lambda between a value without and one with a cavitating profile.
pub fn critical_lambda(e: &StoredEnergy3D, fails: f64, works: f64, tol: f64) -> Result<f64> {
    let ok = |l: f64| shoot_profile(e, l).is_ok();
    if ok(fails) || !ok(works) {
        return Err(Error::InvalidParameter(format!(
            "critical lambda bracket [{fails}, {works}] does not straddle the threshold"
        )));
    }
    let (mut lo, mut hi) = (fails, works);
    while hi - lo > tol {
        let m = 0.5 * (lo + hi);
        if ok(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Structural facts about a profile, checked on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub points: usize,
    /// H <= v <= lambda^d
    pub v_in_range: bool,
    pub v_increasing: bool,
    pub rp_positive_increasing: bool,
    /// r > lambda s > r' s on (0, sigma)
    pub ordering: bool,
    /// r'(sigma-) < lambda
    pub subsonic_jump: bool,
    /// |r(sigma) - lambda sigma|
    pub shock_gap: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl ProfileReport {
    pub fn all_hold(&self) -> bool {
        self.v_in_range
            && self.v_increasing
            && self.rp_positive_increasing
            && self.ordering
            && self.subsonic_jump
            && self.shock_gap < 1e-9
    }
}

impl SimilarityProfile {
    /// (r, v) at 0 < s <= sigma.
    pub fn state(&self, s: f64) -> [f64; 2] {
        if s < self.eps {
            let e = &self.energy;
            let r = self.r0
                + e.big_h * s.powi(self.d as i32)
                    / (self.d as f64 * self.r0.powi(self.d as i32 - 1));
            return [r, cavity_v(e, self.r0, s)];
        }
        self.traj.at(s.min(self.sigma))
    }

    pub fn r(&self, s: f64) -> f64 {
        self.state(s)[0]
    }

    pub fn rp(&self, s: f64) -> f64 {
        let [r, v] = self.state(s);
        v * (s / r).powi(self.d as i32 - 1)
    }

    pub fn v(&self, s: f64) -> f64 {
        self.state(s)[1]
    }

    /// The profile continued by the homogeneous state beyond the shock:
    /// (r, r') for s < sigma and (lambda s, lambda) beyond.
    #[inline]
    pub fn extended(&self, s: f64) -> (f64, f64) {
        if s >= self.sigma {
            (self.lambda * s, self.lambda)
        } else if s <= 0.0 {
            (self.r0, 0.0)
        } else {
            let [r, v] = self.state(s);
            (r, v * (s / r).powi(self.d as i32 - 1))
        }
    }

    /// Accepted integrator nodes (s, r, v).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.traj
            .s
            .iter()
            .zip(&self.traj.y)
            .map(|(s, y)| (*s, y[0], y[1]))
    }

    /// Uniform grid on (0, sigma] of (s, r, r', v).
    pub fn table(&self, count: usize) -> Vec<[f64; 4]> {
        (1..=count)
            .map(|i| {
                let s = self.sigma * i as f64 / count as f64;
                let [r, v] = self.state(s);
                [s, r, v * (s / r).powi(self.d as i32 - 1), v]
            })
            .collect()
    }

    pub fn check(&self, count: usize) -> ProfileReport {
        let tab = self.table(count);
        let lam = self.lambda;
        let vmax = lam.powi(self.d as i32);
        let h = self.energy.big_h;
        let (mut vmin_seen, mut vmax_seen) = (f64::INFINITY, 0.0_f64);
        let mut ordering = true;
        for row in &tab[..tab.len() - 1] {
            let [s, r, rp, v] = *row;
            vmin_seen = vmin_seen.min(v);
            vmax_seen = vmax_seen.max(v);
            ordering &= r > lam * s && lam * s > rp * s;
        }
        let last = tab[tab.len() - 1];
        vmin_seen = vmin_seen.min(last[3]);
        vmax_seen = vmax_seen.max(last[3]);
        ProfileReport {
            points: count,
            v_in_range: vmin_seen >= h && vmax_seen <= vmax,
            v_increasing: tab.windows(2).all(|w| w[1][3] > w[0][3]),
            rp_positive_increasing: tab[0][2] > 0.0 && tab.windows(2).all(|w| w[1][2] > w[0][2]),
            ordering,
            subsonic_jump: self.rp_minus < lam,
            shock_gap: (self.r(self.sigma) - lam * self.sigma).abs(),
            v_min: vmin_seen,
            v_max: vmax_seen,
        }
    }

    /// Re-integrate from the cavity with tolerance `rtol`, returning the
    /// state at each of the sorted abscissae (all inside (eps, sigma]).
    pub fn exact_states(&self, points: &[f64], rtol: f64) -> Result<Vec<[f64; 2]>> {
        let e = self.energy;
        let ode = Dopri5::with_rtol(rtol);
        let mut s = self.eps;
        let mut y = [self.r0, cavity_v(&e, self.r0, self.eps)];
        let mut out = Vec::with_capacity(points.len());
        for &p in points {
            if p < s {
                return Err(Error::InvalidParameter(
                    "points must be sorted above eps".into(),
                ));
            }
            if p > s {
                let (traj, _) = ode.solve(|s, y| state_rhs(&e, s, y), s, y, p, &[])?;
                y = traj.last().1;
                s = p;
            }
            out.push(y);
        }
        Ok(out)
    }

    /// Residual of w_tt - d/dR Phi1 - ((d-1)/R)(Phi1 - Phi2) for w = t r(R/t),
    /// by central differences of w_t = r - s r' and of Phi1 at fixed t,
    /// combined over steps h and 2h into a fourth-order stencil.
    /// Returns the largest absolute value over the samples (R, t).
    pub fn pde_residual(&self, samples: &[(f64, f64)], step: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(rr, t) in samples {
            let a = self.pde_residual_at(rr, t, step)?;
            let b = self.pde_residual_at(rr, t, 2.0 * step)?;
            worst = worst.max(((4.0 * a - b) / 3.0).abs());
        }
        Ok(worst)
    }

    fn pde_residual_at(&self, rr: f64, t: f64, step: f64) -> Result<f64> {
        let e = self.energy;
        let d = self.d as i32;
        let s = rr / t;
        // w_t(R, t') at t' = t +- step lives at s' = R / t'
        let pts_t = [rr / (t + step), rr / (t - step)];
        let pts_r = [(rr - step) / t, s, (rr + step) / t];
        let mut all: Vec<f64> = pts_t.iter().chain(pts_r.iter()).copied().collect();
        all.sort_by(f64::total_cmp);
        if all[0] <= self.eps || all[all.len() - 1] >= self.sigma {
            return Err(Error::InvalidParameter(format!(
                "sample (R, t) = ({rr}, {t}) too close to the cavity or the shock"
            )));
        }
        let st = self.exact_states(&all, 1e-13)?;
        let at = |x: f64| st[all.iter().position(|p| *p == x).unwrap()];
        let rp = |y: [f64; 2], x: f64| y[1] * (x / y[0]).powi(d - 1);
        let wt = |x: f64| {
            let y = at(x);
            y[0] - x * rp(y, x)
        };
        let w_tt = (wt(pts_t[0]) - wt(pts_t[1])) / (2.0 * step);
        let phi = |x: f64| {
            let y = at(x);
            e.stress_unchecked(rp(y, x), y[0] / x)
        };
        let dphi = (phi(pts_r[2]).phi1 - phi(pts_r[0]).phi1) / (2.0 * step);
        let p = phi(s);
        Ok(w_tt - dphi - (d - 1) as f64 / rr * (p.phi1 - p.phi2))
    }
}
