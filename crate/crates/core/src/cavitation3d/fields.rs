//! Radial mollification of the cavitating motion.
//!
//! With w(R, t) = t r(R/t) the odd-extension average is again self-similar:
//! w^n(R, t) = t W_m(R/t) with m = n t and
//!   W_m(s) = int_0^inf [phi_m(s - z) - phi_m(s + z)] rbar(z) dz,
//! where rbar is the profile continued by lambda z beyond the shock.

use super::profile::SimilarityProfile;
use crate::error::Result;
use crate::mollify::{convolve_radial_odd, convolve_radial_odd_deriv, Mollifier};
use crate::quadrature::{gauss_legendre8, Quad};
use crate::weakform::RadialMotion;
use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;
use std::sync::OnceLock;

/// Mollified fields at one (R, t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialFields {
    pub w: f64,
    /// w^n_R
    pub lam1: f64,
    /// w^n / R
    pub lam2: f64,
    /// lam1 lam2^(d-1)
    pub v: f64,
    /// w^n_t
    pub wt: f64,
}

/// The profile mollified at scale n.
#[derive(Debug, Clone, Copy)]
pub struct MollifiedCavity<'a> {
    pub profile: &'a SimilarityProfile,
    pub phi: &'a Mollifier,
    pub n: f64,
    pub quad: Quad,
}

/// Below s m < SMALL the quotient W_m(s)/s is computed as the mean of W_m'.
const SMALL: f64 = 0.05;
/// Panels per smooth piece of the kernel window.
const PANELS: usize = 6;
const NODES: usize = 20;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NODES.try_into().expect("nonzero"))
            .into_iter()
            .collect()
    })
}

impl<'a> MollifiedCavity<'a> {
    pub fn new(profile: &'a SimilarityProfile, phi: &'a Mollifier, n: f64) -> Self {
        Self {
            profile,
            phi,
            n,
            quad: Quad::with_tol(1e-12, 1e-12),
        }
    }

    pub fn with_quad(mut self, quad: Quad) -> Self {
        self.quad = quad;
        self
    }

    fn breaks(&self) -> [f64; 1] {
        [self.profile.sigma]
    }

    /// W_m(s)
    fn big_w(&self, m: f64, s: f64) -> Result<f64> {
        let p = self.profile;
        convolve_radial_odd(
            &self.quad,
            self.phi,
            m,
            s,
            |z| p.extended(z).0,
            &self.breaks(),
        )
    }

    /// W_m'(s)
    fn big_w_prime(&self, m: f64, s: f64) -> Result<f64> {
        let p = self.profile;
        convolve_radial_odd_deriv(
            &self.quad,
            self.phi,
            m,
            s,
            p.r0,
            |z| p.extended(z).1,
            &self.breaks(),
        )
    }

    /// Adaptive reference for [W, W', w_t average]; slow, used for checks.
    pub fn averages_adaptive(&self, m: f64, s: f64) -> Result<[f64; 3]> {
        let p = self.profile;
        let wt = convolve_radial_odd(
            &self.quad,
            self.phi,
            m,
            s,
            |z| {
                let (r, rp) = p.extended(z);
                r - z * rp
            },
            &self.breaks(),
        )?;
        Ok([self.big_w(m, s)?, self.big_w_prime(m, s)?, wt])
    }

    /// [W_m(s), W_m'(s), average of w_t] in one pass of a fixed composite
    /// Gauss-Legendre rule split at the kernel edges, the origin and the shock.
    pub fn averages(&self, m: f64, s: f64) -> [f64; 3] {
        let p = self.profile;
        let h = 1.0 / m;
        let mut acc = [0.0; 3];
        let mut add = |a: f64, b: f64, sign: f64, mirror: bool| {
            let mut cuts = vec![a];
            if p.sigma > a && p.sigma < b {
                cuts.push(p.sigma);
            }
            cuts.push(b);
            for win in cuts.windows(2) {
                let width = (win[1] - win[0]) / PANELS as f64;
                for k in 0..PANELS {
                    let lo = win[0] + k as f64 * width;
                    let half = 0.5 * width;
                    let mid = lo + half;
                    for &(x, wgt) in rule() {
                        let z = mid + half * x;
                        let ker = if mirror {
                            self.phi.phi_n(m, s + z)
                        } else {
                            self.phi.phi_n(m, s - z)
                        } * wgt
                            * half;
                        let (r, rp) = p.extended(z);
                        acc[0] += sign * ker * r;
                        acc[1] += ker * rp;
                        acc[2] += sign * ker * (r - z * rp);
                    }
                }
            }
        };
        add((s - h).max(0.0), s + h, 1.0, false);
        if s < h {
            add(0.0, h - s, -1.0, true);
        }
        acc[1] += 2.0 * self.phi.phi_n(m, s) * p.r0;
        acc
    }

    /// Self-similar spatial fields (W, W', W/s) at scale m and s = R/t.
    pub fn spatial(&self, m: f64, s: f64) -> [f64; 3] {
        let [big_w, lam1, _] = self.averages(m, s);
        let lam2 = if s * m < SMALL {
            if s == 0.0 {
                lam1
            } else {
                gauss_legendre8(|z| self.averages(m, z)[1], 0.0, s) / s
            }
        } else {
            big_w / s
        };
        [big_w, lam1, lam2]
    }

    pub fn fields(&self, r: f64, t: f64) -> Result<RadialFields> {
        let p = self.profile;
        let d = p.d as i32;
        if t <= 0.0 {
            let l = p.lambda;
            return Ok(RadialFields {
                w: l * r,
                lam1: l,
                lam2: l,
                v: l.powi(d),
                wt: 0.0,
            });
        }
        let (m, s) = (self.n * t, r / t);
        let [big_w, lam1, lam2] = self.spatial(m, s);
        let wt = self.averages(m, s)[2];
        Ok(RadialFields {
            w: t * big_w,
            lam1,
            lam2,
            v: lam1 * lam2.powi(d - 1),
            wt,
        })
    }
}

impl RadialMotion for MollifiedCavity<'_> {
    fn state(&self, r: f64, t: f64) -> Result<[f64; 3]> {
        if t <= 0.0 {
            let l = self.profile.lambda;
            return Ok([l * r, l, l]);
        }
        let [big_w, lam1, lam2] = self.spatial(self.n * t, r / t);
        Ok([t * big_w, lam1, lam2])
    }

    fn r_breaks(&self, t: f64) -> Vec<f64> {
        let h = 1.0 / self.n;
        if t <= 0.0 {
            return Vec::new();
        }
        let st = self.profile.sigma * t;
        vec![0.5 * h, h, 2.0 * h, st - h, st, st + h]
    }

    fn t_breaks(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// The unmollified motion: w = t r(R/t), continued by lambda R.
#[derive(Debug, Clone, Copy)]
pub struct ExactCavity<'a> {
    pub profile: &'a SimilarityProfile,
}

impl RadialMotion for ExactCavity<'_> {
    fn state(&self, r: f64, t: f64) -> Result<[f64; 3]> {
        let p = self.profile;
        if t <= 0.0 {
            return Ok([p.lambda * r, p.lambda, p.lambda]);
        }
        let (rr, rp) = p.extended(r / t);
        Ok([t * rr, rp, t * rr / r])
    }

    fn r_breaks(&self, t: f64) -> Vec<f64> {
        if t <= 0.0 {
            Vec::new()
        } else {
            vec![self.profile.sigma * t]
        }
    }

    fn t_breaks(&self) -> Vec<f64> {
        vec![0.0]
    }
}
