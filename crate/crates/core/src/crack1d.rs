//! The crack fan of a 1-D elastic bar: two Lax shocks at x = -sigma t,
//! sigma t enclosing a crack at the origin that opens at speed 2 Y0.
//! Closed-form mollified fields, the split residual and the energy audit.

use crate::constitutive::{Asymptote, StressLaw1D};
use crate::error::{Error, Result};
use crate::mollify::Mollifier;
use crate::quadrature::Quad;
use crate::weakform::{pair_residual_1d, Bump1, BumpTest, Motion1D, PairingQuad};
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy)]
pub struct CrackFan {
    pub law: StressLaw1D,
    /// far-field stretch
    pub lambda: f64,
    /// strain between the shocks
    pub alpha: f64,
    pub sigma: f64,
    /// crack half-speed Y(0)
    pub y0: f64,
    /// characteristic speeds sqrt(tau'(alpha)) and sqrt(tau'(lambda))
    pub inner_speed: f64,
    pub outer_speed: f64,
}

pub fn solve_fan(law: StressLaw1D, lambda: f64, alpha: f64) -> Result<CrackFan> {
    if !(alpha > 0.0 && alpha < lambda) {
        return Err(Error::InvalidParameter(format!(
            "crack fan needs 0 < alpha < lambda, got alpha = {alpha}, lambda = {lambda}"
        )));
    }
    let jump = law.tau(lambda) - law.tau(alpha);
    if !(jump > 0.0) {
        return Err(Error::Lax(format!(
            "tau(lambda) - tau(alpha) = {jump} is not positive"
        )));
    }
    let sigma = (jump / (lambda - alpha)).sqrt();
    let y0 = (lambda - alpha) * sigma;
    let inner_speed = law.tau_prime(alpha).sqrt();
    let outer_speed = law.tau_prime(lambda).sqrt();
    if !(inner_speed > sigma && sigma > outer_speed) {
        return Err(Error::Lax(format!(
            "need {inner_speed} > {sigma} > {outer_speed}"
        )));
    }
    Ok(CrackFan {
        law,
        lambda,
        alpha,
        sigma,
        y0,
        inner_speed,
        outer_speed,
    })
}

/// Mollified fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackFields {
    pub y: f64,
    /// strain u^n = y^n_x
    pub u: f64,
    /// velocity v^n = y^n_t
    pub v: f64,
    /// acceleration a^n = v^n_t
    pub a: f64,
    /// strain rate u^n_t = v^n_x
    pub u_t: f64,
}

/// One row of the self-similar fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanRow {
    pub xi: f64,
    /// displacement Y(xi) = y(xi t, t) / t
    pub y: f64,
    pub u_bar: f64,
    pub v_bar: f64,
    pub delta_mass_at_0: f64,
}

impl CrackFan {
    pub fn from_labels(law: &str, lambda: f64, alpha: f64) -> Result<Self> {
        solve_fan(StressLaw1D::from_label(law)?, lambda, alpha)
    }

    /// y(x, t); y = lambda x for t <= 0.
    pub fn motion(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 || x.abs() >= self.sigma * t {
            self.lambda * x
        } else {
            self.alpha * x + self.y0 * t * x.signum()
        }
    }

    /// The fan in xi = x/t: strain, velocity and the mass 2 Y0 carried by the
    /// crack at xi = 0.
    pub fn profile(&self, xi: f64) -> FanRow {
        self.profile_from(xi, xi)
    }

    /// The fan at xi as a limit from the side of sign `side`; at the jumps
    /// xi = 0 and |xi| = sigma this picks the one-sided value.
    pub fn profile_from(&self, xi: f64, side: f64) -> FanRow {
        let a = xi.abs();
        let sgn = if xi != 0.0 {
            xi.signum()
        } else if side > 0.0 {
            1.0
        } else if side < 0.0 {
            -1.0
        } else {
            0.0
        };
        let inside = a < self.sigma || (a == self.sigma && side * xi < 0.0);
        FanRow {
            xi,
            y: if inside {
                self.alpha * xi + self.y0 * sgn
            } else {
                self.lambda * xi
            },
            u_bar: if inside { self.alpha } else { self.lambda },
            v_bar: if inside { self.y0 * sgn } else { 0.0 },
            delta_mass_at_0: if xi == 0.0 { 2.0 * self.y0 } else { 0.0 },
        }
    }

    /// Rows on a uniform grid of [-xi_max, xi_max]; each jump inside the
    /// window appears twice, left limit first.
    pub fn profile_rows(&self, count: usize, xi_max: f64) -> Vec<FanRow> {
        let s = self.sigma;
        let jumps = [-s, 0.0, s];
        let mut rows: Vec<FanRow> = (0..count.max(2))
            .map(|i| -xi_max + 2.0 * xi_max * i as f64 / (count.max(2) - 1) as f64)
            .filter(|xi| !jumps.iter().any(|j| (xi - j).abs() < 1e-14))
            .map(|xi| self.profile(xi))
            .collect();
        for j in jumps.into_iter().filter(|j| j.abs() < xi_max) {
            rows.push(self.profile_from(j, -1.0));
            rows.push(self.profile_from(j, 1.0));
        }
        // stable sort keeps left before right
        rows.sort_by(|a, b| a.xi.total_cmp(&b.xi));
        rows
    }

    pub fn write_profile_csv(&self, path: &Path, count: usize, xi_max: f64) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["xi", "y", "u", "v", "delta_mass_at_0"])?;
        for r in self.profile_rows(count, xi_max) {
            w.write_record(
                [r.xi, r.y, r.u_bar, r.v_bar, r.delta_mass_at_0].map(|x| format!("{x:.12e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// Closed-form mollified fields at scale n.
    pub fn fields(&self, phi: &Mollifier, n: f64, x: f64, t: f64) -> CrackFields {
        if t <= 0.0 {
            return CrackFields {
                y: self.lambda * x,
                u: self.lambda,
                v: 0.0,
                a: 0.0,
                u_t: 0.0,
            };
        }
        let st = self.sigma * t;
        let (l, al, y0, s) = (self.lambda, self.alpha, self.y0, self.sigma);
        let mid = phi.mass_between(n, x, -st, st);
        let y = l * x
            + (al - l) * phi.moment_between(n, x, -st, st)
            + t * y0 * (phi.mass_between(n, x, 0.0, st) - phi.mass_between(n, x, -st, 0.0));
        let (pm, p0, pp) = (phi.cdf_n(n, x - st), phi.cdf_n(n, x), phi.cdf_n(n, x + st));
        let (fm, f0, fp) = (phi.phi_n(n, x - st), phi.phi_n(n, x), phi.phi_n(n, x + st));
        CrackFields {
            y,
            u: 2.0 * f0 * t * y0 + l + (al - l) * mid,
            v: y0 * (2.0 * p0 - pm - pp),
            a: y0 * s * (fm - fp),
            u_t: y0 * (2.0 * f0 - fm - fp),
        }
    }

    /// Time after which the three mollified waves no longer overlap.
    pub fn separation_time(&self, n: f64) -> f64 {
        2.0 / (n * self.sigma)
    }

    pub fn x_breaks(&self, n: f64, t: f64) -> Vec<f64> {
        let h = 1.0 / n;
        let mut v = vec![0.0, -h, h];
        if t > 0.0 {
            let st = self.sigma * t;
            v.extend_from_slice(&[-st - h, -st, -st + h, st - h, st, st + h]);
        }
        v
    }

    pub fn t_breaks(&self, n: f64) -> Vec<f64> {
        vec![0.0, 0.5 * self.separation_time(n), self.separation_time(n)]
    }

    pub fn mollified<'a>(&'a self, phi: &'a Mollifier, n: f64) -> MollifiedCrack<'a> {
        MollifiedCrack { fan: self, phi, n }
    }

    /// Dissipation rate at +sigma and -sigma.
    pub fn dissipation(&self) -> (f64, f64) {
        let (s, y0) = (self.sigma, self.y0);
        let dw = self.law.w(self.lambda) - self.law.w(self.alpha);
        let ta = self.law.tau(self.alpha);
        let plus = -s * (-0.5 * y0 * y0 + dw) + y0 * ta;
        let minus = s * (0.5 * y0 * y0 - dw) + y0 * ta;
        (plus, minus)
    }

    /// Limiting cost of opening the crack, 2 (tau_inf - tau(alpha)) Y0.
    pub fn crack_cost_limit(&self) -> Asymptote {
        match self.law.tau_inf {
            Asymptote::Finite(ti) => {
                Asymptote::Finite(2.0 * (ti - self.law.tau(self.alpha)) * self.y0)
            }
            Asymptote::Infinite => Asymptote::Infinite,
        }
    }

    /// Net energy rate sigma Y0^2 + 2 Y0 (tau_inf - (W(lambda) - W(alpha))/(lambda - alpha)).
    pub fn total_rate_closed_form(&self) -> Asymptote {
        match self.law.tau_inf {
            Asymptote::Finite(ti) => {
                let dw = self.law.w(self.lambda) - self.law.w(self.alpha);
                Asymptote::Finite(
                    self.sigma * self.y0 * self.y0
                        + 2.0 * self.y0 * (ti - dw / (self.lambda - self.alpha)),
                )
            }
            Asymptote::Infinite => Asymptote::Infinite,
        }
    }

    /// Weak check of the fan kinematics -xi u' = v' with the crack mass
    /// 2 Y0 delta_0 included:
    ///   int u (psi + xi psi') + 2 Y0 psi(0) + int v psi' = 0.
    pub fn kinematic_defect(&self, psi: &Bump1, q: &Quad) -> Result<f64> {
        let (a, b) = psi.support();
        let s = self.sigma;
        let pts: Vec<f64> = [-s, 0.0, s]
            .into_iter()
            .filter(|p| *p > a && *p < b)
            .collect();
        let body = q.integrate(
            |xi| {
                let [p, dp, _] = psi.eval(xi);
                let r = self.profile(xi);
                r.u_bar * (p + xi * dp) + r.v_bar * dp
            },
            a,
            b,
            &pts,
        )?;
        Ok(body + 2.0 * self.y0 * psi.value(0.0))
    }
}

/// The fan mollified in x at a fixed scale.
#[derive(Debug, Clone, Copy)]
pub struct MollifiedCrack<'a> {
    pub fan: &'a CrackFan,
    pub phi: &'a Mollifier,
    pub n: f64,
}

impl Motion1D for MollifiedCrack<'_> {
    fn y(&self, x: f64, t: f64) -> f64 {
        self.fan.fields(self.phi, self.n, x, t).y
    }
    fn strain(&self, x: f64, t: f64) -> f64 {
        self.fan.fields(self.phi, self.n, x, t).u
    }
    fn x_breaks(&self, t: f64) -> Vec<f64> {
        self.fan.x_breaks(self.n, t)
    }
    fn t_breaks(&self) -> Vec<f64> {
        self.fan.t_breaks(self.n)
    }
}

/// Residual <f^n, psi> of the mollified fan.
pub fn pair_residual(
    fan: &CrackFan,
    phi: &Mollifier,
    n: f64,
    psi: &BumpTest,
    q: &PairingQuad,
) -> Result<f64> {
    pair_residual_1d(&fan.mollified(phi, n), |u| fan.law.tau(u), psi, q)
}

/// The residual split at t = 2/(n sigma) and |x| = 1/n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualTerms {
    /// acceleration against psi after separation
    pub j: f64,
    /// stress outside the crack layer after separation
    pub i1: f64,
    /// stress inside the crack layer after separation
    pub i2: f64,
    /// everything before separation
    pub e: f64,
}

impl ResidualTerms {
    pub fn sum(&self) -> f64 {
        self.j + self.i1 + self.i2 + self.e
    }
}

pub fn residual_terms(
    fan: &CrackFan,
    phi: &Mollifier,
    n: f64,
    psi: &BumpTest,
    q: &PairingQuad,
) -> Result<ResidualTerms> {
    let ((x0, x1), (t0, t1)) = psi.support();
    let ts = fan.separation_time(n);
    let h = 1.0 / n;
    let clip = |v: Vec<f64>, lo: f64, hi: f64| -> Vec<f64> {
        v.into_iter().filter(|p| *p > lo && *p < hi).collect()
    };
    let tau = |u: f64| fan.law.tau(u);
    // [accel * psi, tau * psi_x outside layer, tau * psi_x inside layer]
    let slab = |t: f64| -> Result<[f64; 3]> {
        let xb = clip(fan.x_breaks(n, t), x0, x1);
        let (lo, hi) = (x0.max(-h), x1.min(h));
        let acc = q
            .inner
            .integrate(|x| fan.fields(phi, n, x, t).a * psi.psi(x, t), x0, x1, &xb)?;
        let stress = |x: f64| tau(fan.fields(phi, n, x, t).u) * psi.eval(x, t).psi_x;
        let all = q.inner.integrate(stress, x0, x1, &xb)?;
        let inside = if hi > lo {
            q.inner
                .integrate(stress, lo, hi, &clip(xb.clone(), lo, hi))?
        } else {
            0.0
        };
        Ok([acc, all - inside, inside])
    };
    let late_lo = t0.max(ts);
    let late = if t1 > late_lo {
        q.outer.try_integrate_vec(slab, late_lo, t1, &[])?
    } else {
        [0.0; 3]
    };
    let (e_lo, e_hi) = (t0.max(0.0), t1.min(ts));
    let early = if e_hi > e_lo {
        q.outer
            .try_integrate(|t| slab(t).map(|v| v.iter().sum()), e_lo, e_hi, &[0.5 * ts])?
    } else {
        0.0
    };
    Ok(ResidualTerms {
        j: late[0],
        i1: late[1],
        i2: late[2],
        e: early,
    })
}

/// Limit of J^n: int_0^inf Y0 sigma (psi(sigma t, t) - psi(-sigma t, t)) dt.
pub fn j_limit(fan: &CrackFan, psi: &BumpTest, q: &Quad) -> Result<f64> {
    let (_, (t0, t1)) = psi.support();
    let (a, b) = (t0.max(0.0), t1.max(0.0));
    let s = fan.sigma;
    q.integrate(
        |t| fan.y0 * s * (psi.psi(s * t, t) - psi.psi(-s * t, t)),
        a,
        b,
        &[],
    )
}

/// Bound on the pre-separation term:
///   Y0 (4/n) |psi|_0 + max(|tau(alpha)|, |tau(lambda + 4 Y0 |phi|_0 / sigma)|) int_0^{2/(n sigma)} int |psi_x|.
pub fn e_bound(fan: &CrackFan, phi: &Mollifier, n: f64, psi: &BumpTest, q: &Quad) -> Result<f64> {
    let ts = fan.separation_time(n);
    let ((x0, x1), (t0, t1)) = psi.support();
    let (a, b) = (t0.max(0.0), t1.min(ts));
    let area = if b > a {
        q.integrate(
            |t| {
                q.integrate(|x| psi.eval(x, t).psi_x.abs(), x0, x1, &[psi.x.center])
                    .unwrap_or(f64::NAN)
            },
            a,
            b,
            &[],
        )?
    } else {
        0.0
    };
    let tmax = fan.law.tau(fan.alpha).abs().max(
        fan.law
            .tau(fan.lambda + 4.0 * fan.y0 * phi.sup / fan.sigma)
            .abs(),
    );
    Ok(fan.y0 * 4.0 / n * psi.sup() + tmax * area)
}

/// Kernel self-interaction at the forward shock,
///   A^n = int int_0^{sigma t} phi_n(x - z) phi_n(x - sigma t) dz dx,
/// by nested quadrature (no primitive tables). Equals 1/2.
pub fn kernel_a(fan: &CrackFan, phi: &Mollifier, n: f64, t: f64) -> Result<f64> {
    let q = Quad::with_tol(1e-14, 1e-14);
    let st = fan.sigma * t;
    let h = 1.0 / n;
    q.try_integrate(
        |x| {
            let lo = (x - h).max(0.0);
            let hi = (x + h).min(st);
            let inner = if hi > lo {
                q.integrate(|z| phi.phi_n(n, x - z), lo, hi, &[x])?
            } else {
                0.0
            };
            Ok(inner * phi.phi_n(n, x - st))
        },
        st - h,
        st + h,
        &[st],
    )
}

/// Stored-energy flux through the forward shock layer,
///   B^n = int tau(alpha P + lambda (1 - P)) (alpha - lambda) sigma phi_n(x - sigma t) dx.
/// Equals sigma (W(alpha) - W(lambda)).
pub fn kernel_b(fan: &CrackFan, phi: &Mollifier, n: f64, t: f64) -> Result<f64> {
    let q = Quad::with_tol(1e-14, 1e-14);
    let st = fan.sigma * t;
    let h = 1.0 / n;
    let (l, al, s) = (fan.lambda, fan.alpha, fan.sigma);
    q.integrate(
        |x| {
            let inner = phi.mass_between(n, x, 0.0, st);
            let outer = phi.mass_between(n, x, st, f64::INFINITY);
            fan.law.tau(al * inner + l * outer) * (al - l) * s * phi.phi_n(n, x - st)
        },
        st - h,
        st + h,
        &[st],
    )
}

/// Rate of work of the residual force at the crack,
///   p_c^n = int tau(alpha + 2 phi_n t Y0) 2 Y0 phi_n dx - 2 Y0 tau(alpha).
pub fn crack_cost(fan: &CrackFan, phi: &Mollifier, n: f64, t: f64) -> Result<f64> {
    let q = Quad::with_tol(1e-13, 1e-14);
    let y0 = fan.y0;
    // substitute x = z/n
    let body = q.integrate(
        |z| {
            let p = phi.phi(z);
            fan.law.tau(fan.alpha + 2.0 * n * p * t * y0) * 2.0 * y0 * p
        },
        -1.0,
        1.0,
        &[0.0],
    )?;
    Ok(body - 2.0 * y0 * fan.law.tau(fan.alpha))
}

/// d/dt of int_B 1/2 (v^n)^2 + W(u^n) dx through the integrand v a + tau(u) u_t.
pub fn energy_rate_numeric(fan: &CrackFan, phi: &Mollifier, n: f64, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let q = Quad::with_tol(1e-13, 1e-14);
    let reach = fan.sigma * t + 1.0 / n;
    q.integrate(
        |x| {
            let f = fan.fields(phi, n, x, t);
            f.v * f.a + fan.law.tau(f.u) * f.u_t
        },
        -reach,
        reach,
        &fan.x_breaks(n, t),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyAudit1D {
    pub n: f64,
    pub t_ref: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub pc_n: f64,
    /// None when tau is unbounded (infinite cost)
    pub pc_limit: Option<f64>,
    /// mu_minus + mu_plus + pc_limit
    pub total_rate: Option<f64>,
    /// closed form sigma Y0^2 + 2 Y0 (tau_inf - mean stress)
    pub total_rate_closed: Option<f64>,
    pub en_transient_bound: f64,
}

/// sup over sampled t in (0, 2/(n sigma)) of |e^n(t)|.
pub fn transient_bound(fan: &CrackFan, phi: &Mollifier, n: f64, samples: usize) -> Result<f64> {
    let ts = fan.separation_time(n);
    let mut m: f64 = 0.0;
    for k in 0..samples {
        let t = ts * (k as f64 + 0.5) / samples as f64;
        m = m.max(energy_rate_numeric(fan, phi, n, t)?.abs());
    }
    Ok(m)
}

pub fn energy_audit(
    fan: &CrackFan,
    phi: &Mollifier,
    n: f64,
    t_ref: f64,
    transient_samples: usize,
) -> Result<EnergyAudit1D> {
    if t_ref <= fan.separation_time(n) {
        return Err(Error::InvalidParameter(format!(
            "reference time {t_ref} precedes wave separation at {}",
            fan.separation_time(n)
        )));
    }
    let (mu_plus, mu_minus) = fan.dissipation();
    let pc_limit = fan.crack_cost_limit().finite();
    Ok(EnergyAudit1D {
        n,
        t_ref,
        mu_minus,
        mu_plus,
        pc_n: crack_cost(fan, phi, n, t_ref)?,
        pc_limit,
        total_rate: pc_limit.map(|p| mu_minus + mu_plus + p),
        total_rate_closed: fan.total_rate_closed_form().finite(),
        en_transient_bound: transient_bound(fan, phi, n, transient_samples)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan() -> CrackFan {
        solve_fan(StressLaw1D::saturating(), 4.0, 2.0).unwrap()
    }

    #[test]
    fn fan_numbers() {
        let f = fan();
        assert!((f.sigma - 0.125f64.sqrt()).abs() < 1e-15);
        assert!((f.y0 - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((f.inner_speed - 0.5).abs() < 1e-15);
        assert!((f.outer_speed - 0.25).abs() < 1e-15);
    }

    #[test]
    fn motion_continuity() {
        let f = fan();
        let s = f.sigma;
        assert_eq!(f.motion(0.3, -1.0), 1.2);
        assert!((f.motion(s - 1e-14, 1.0) - f.lambda * s).abs() < 1e-12);
        assert!((f.motion(1e-300, 1.0) - f.y0).abs() < 1e-12);
        assert!((f.motion(-1e-300, 1.0) + f.y0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(solve_fan(StressLaw1D::saturating(), 2.0, 4.0).is_err());
    }

    #[test]
    fn kinematics_hold_weakly() {
        let f = fan();
        let q = Quad::default();
        for (c, a) in [(0.0, 0.6), (0.1, 0.5), (-0.2, 0.3)] {
            let d = f.kinematic_defect(&Bump1::new(c, a).unwrap(), &q).unwrap();
            assert!(d.abs() < 1e-11, "{d}");
        }
    }
}
