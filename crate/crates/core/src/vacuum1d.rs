//! The p-system u_t - v_x = 0, v_t + p(u)_x = 0 with p(u) = u^(-gamma)/gamma
//! and data u = ubar, v = -vbar / +vbar. When w < 0 the fan carries a vacuum:
//! a delta of mass -4w/(gamma-1) in u at xi = 0 between two rarefactions.
//! Everything is self-similar, so the mollification acts in xi.

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_limit, richardson, LimitEstimate};
use crate::mollify::Mollifier;
use crate::quadrature::Quad;
use crate::weakform::{pair_residual_selfsim, Bump1, Expectation, ResidualReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumFan {
    pub u_bar: f64,
    pub v_bar: f64,
    pub gamma: f64,
    pub w: f64,
    /// edge of the rarefactions
    pub xi_f: f64,
    /// mass of the delta in u at xi = 0
    pub delta_mass: f64,
}

pub fn make_vacuum_fan(u_bar: f64, v_bar: f64, gamma: f64) -> Result<VacuumFan> {
    if !(u_bar > 0.0 && v_bar > 0.0 && gamma > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need ubar, vbar > 0 and gamma > 1, got {u_bar}, {v_bar}, {gamma}"
        )));
    }
    let w = u_bar.powf(0.5 * (1.0 - gamma)) + 0.5 * (1.0 - gamma) * v_bar;
    if w >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "w = {w} >= 0: the data admit a standard solution without vacuum"
        )));
    }
    Ok(VacuumFan {
        u_bar,
        v_bar,
        gamma,
        w,
        xi_f: u_bar.powf(-0.5 * (gamma + 1.0)),
        delta_mass: -4.0 * w / (gamma - 1.0),
    })
}

/// One row of the unmollified fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanRow {
    pub xi: f64,
    /// displacement r(xi)
    pub r: f64,
    pub u_ac_part: f64,
    pub v: f64,
    pub delta_mass_flag: bool,
}

impl VacuumFan {
    /// 2/(gamma+1), the singular exponent of u.
    pub fn beta(&self) -> f64 {
        2.0 / (self.gamma + 1.0)
    }

    /// (gamma-1)/(gamma+1), the Hoelder exponent of r.
    pub fn kappa(&self) -> f64 {
        (self.gamma - 1.0) / (self.gamma + 1.0)
    }

    pub fn pressure(&self, u: f64) -> f64 {
        u.powf(-self.gamma) / self.gamma
    }

    /// W(u) = u^(1-gamma) / (gamma (gamma-1))
    pub fn stored(&self, u: f64) -> f64 {
        u.powf(1.0 - self.gamma) / (self.gamma * (self.gamma - 1.0))
    }

    /// r(xi) = (gamma+1)/(gamma-1) xi^kappa - 2w/(gamma-1) in the fan, odd,
    /// continued by ubar xi + vbar.
    pub fn displacement(&self, xi: f64) -> f64 {
        let a = xi.abs();
        let g = self.gamma;
        let val = if a > self.xi_f {
            self.u_bar * a + self.v_bar
        } else if a == 0.0 {
            return 0.0;
        } else {
            (g + 1.0) / (g - 1.0) * a.powf(self.kappa()) - 2.0 * self.w / (g - 1.0)
        };
        val.copysign(xi)
    }

    /// The absolutely continuous part of u: |xi|^(-beta) in the fan, ubar outside.
    pub fn u_ac(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a > self.xi_f {
            self.u_bar
        } else {
            a.powf(-self.beta())
        }
    }

    /// v(xi) = 2/(gamma-1) sign(xi) (|xi|^kappa - w) in the fan, +-vbar outside.
    pub fn velocity(&self, xi: f64) -> f64 {
        let a = xi.abs();
        let val = if a > self.xi_f {
            self.v_bar
        } else {
            2.0 / (self.gamma - 1.0) * (a.powf(self.kappa()) - self.w)
        };
        if xi == 0.0 {
            0.0
        } else {
            val.copysign(xi)
        }
    }

    /// Rows on a symmetric grid through the origin.
    pub fn profile_rows(&self, count: usize, half_width: f64) -> Vec<FanRow> {
        let count = count.max(2) | 1;
        (0..count)
            .map(|k| {
                let xi = -half_width + 2.0 * half_width * k as f64 / (count - 1) as f64;
                let at_zero = xi.abs() < 1e-15;
                FanRow {
                    xi,
                    r: self.displacement(xi),
                    u_ac_part: if at_zero {
                        f64::INFINITY
                    } else {
                        self.u_ac(xi)
                    },
                    v: self.velocity(xi),
                    delta_mass_flag: at_zero,
                }
            })
            .collect()
    }

    /// Closed form of 2 int_0^xibar [a xi^(2k) + b (xi^k - w)^2] dxi with
    /// a = 1/(gamma (gamma-1)), b = 2/(gamma-1)^2 and k = kappa.
    pub fn closed_energy(&self, xi_bar: f64) -> f64 {
        let g = self.gamma;
        let k = self.kappa();
        let a = 1.0 / (g * (g - 1.0));
        let b = 2.0 / ((g - 1.0) * (g - 1.0));
        let w = self.w;
        let p2 = xi_bar.powf(2.0 * k + 1.0) / (2.0 * k + 1.0);
        let p1 = xi_bar.powf(k + 1.0) / (k + 1.0);
        2.0 * (a * p2 + b * (p2 - 2.0 * w * p1 + w * w * xi_bar))
    }

    /// Floor on u_n and cap on |v_n| inside the fan, as in the a priori
    /// estimate: u_n >= (xi_F + 1)^(-beta) and
    /// |v_n| <= 2/(g-1) (1 + k |phi|) (xi_F + 1)^k - 2w/(g-1) - 4w |phi| / (g-1).
    pub fn bounds(&self, phi: &Mollifier) -> (f64, f64) {
        let g = self.gamma;
        let k = self.kappa();
        let sup = phi.sup;
        let e = self.xi_f + 1.0;
        let cap = 2.0 / (g - 1.0) * (1.0 + k * sup) * e.powf(k)
            - 2.0 * self.w / (g - 1.0)
            - 4.0 * self.w * sup / (g - 1.0);
        (e.powf(-self.beta()), cap)
    }

    pub fn mollified<'a>(&'a self, phi: &'a Mollifier, n: f64) -> MollifiedFan<'a> {
        MollifiedFan {
            fan: self,
            phi,
            n,
            quad: Quad::with_tol(1e-14, 1e-14),
        }
    }

    pub fn write_profile_csv(&self, path: &Path, count: usize, half_width: f64) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["xi", "r", "u_ac_part", "v", "delta_mass_flag"])?;
        for row in self.profile_rows(count, half_width) {
            w.write_record([
                format!("{:.12e}", row.xi),
                format!("{:.12e}", row.r),
                format!("{:.12e}", row.u_ac_part),
                format!("{:.12e}", row.v),
                format!("{}", row.delta_mass_flag as u8),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mollified fan fields at one xi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanFields {
    pub r: f64,
    pub u: f64,
    pub v: f64,
}

/// r_n = phi_n * r, u_n = r_n' = phi_n * u_ac + delta_mass phi_n, v_n = r_n - xi u_n.
#[derive(Debug, Clone, Copy)]
pub struct MollifiedFan<'a> {
    pub fan: &'a VacuumFan,
    pub phi: &'a Mollifier,
    pub n: f64,
    pub quad: Quad,
}

impl MollifiedFan<'_> {
    pub fn with_quad(mut self, quad: Quad) -> Self {
        self.quad = quad;
        self
    }

    /// [phi_n * r, phi_n * u_ac] at xi. Pieces touching the origin use the
    /// substitution z = tau^p, p = 1/(1 - beta), which makes both
    /// |z|^(-beta) dz and the Hoelder part of r smooth in tau.
    fn averages(&self, xi: f64) -> Result<[f64; 2]> {
        let fan = self.fan;
        let h = 1.0 / self.n;
        let (lo, hi) = (xi - h, xi + h);
        let mut cuts = vec![lo];
        for c in [-fan.xi_f, 0.0, fan.xi_f] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        cuts.push(hi);
        let kernel = |z: f64| self.phi.phi_n(self.n, xi - z);
        let mut acc = [0.0; 2];
        for win in cuts.windows(2) {
            let (a, b) = (win[0], win[1]);
            let inside = a.abs().max(b.abs()) <= fan.xi_f;
            let part = if inside && (a == 0.0 || b == 0.0) {
                let (end, sign) = if a == 0.0 { (b, 1.0) } else { (a, -1.0) };
                let len = end.abs();
                let [r, u] = self.quad.integrate_left_singular(
                    |s| {
                        let z = sign * s;
                        let k = kernel(z);
                        [k * fan.displacement(z), k * s.powf(-fan.beta())]
                    },
                    0.0,
                    len,
                    fan.beta(),
                )?;
                [r, u]
            } else {
                self.quad.integrate_vec(
                    |z| {
                        let k = kernel(z);
                        [k * fan.displacement(z), k * fan.u_ac(z)]
                    },
                    a,
                    b,
                    &[],
                )?
            };
            acc[0] += part[0];
            acc[1] += part[1];
        }
        Ok(acc)
    }

    pub fn fields(&self, xi: f64) -> Result<FanFields> {
        let [r, u_ac] = self.averages(xi)?;
        let u = u_ac + self.fan.delta_mass * self.phi.phi_n(self.n, xi);
        Ok(FanFields {
            r,
            u,
            v: r - xi * u,
        })
    }

    /// Interior breakpoints where the fields change character.
    pub fn breaks(&self) -> Vec<f64> {
        let h = 1.0 / self.n;
        let f = self.fan.xi_f;
        let mut b = vec![
            -f - h,
            -f,
            -f + h,
            -h,
            -0.5 * h,
            0.0,
            0.5 * h,
            h,
            f - h,
            f,
            f + h,
        ];
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

fn outer_quad() -> Quad {
    Quad::with_tol(1e-12, 1e-12)
}

/// The weak residual of the second equation at scale n.
pub fn vacuum_residual_at(fan: &VacuumFan, phi: &Mollifier, n: f64, psi: &Bump1) -> Result<f64> {
    let (a, b) = psi.support();
    if a <= -fan.xi_f || b >= fan.xi_f {
        return Err(Error::InvalidParameter(format!(
            "test support ({a}, {b}) must lie inside the fan (-{f}, {f})",
            f = fan.xi_f
        )));
    }
    let m = fan.mollified(phi, n);
    pair_residual_selfsim(
        |xi| m.fields(xi).map(|f| (f.u, f.v)),
        |u| fan.pressure(u),
        psi,
        &m.breaks(),
        &outer_quad(),
    )
}

/// Residuals along the ladder with the verdict |limit| < tol.
pub fn vacuum_residual(
    fan: &VacuumFan,
    phi: &Mollifier,
    ns: &[f64],
    psi: &Bump1,
    tol: f64,
) -> Result<ResidualReport> {
    let values = ns
        .par_iter()
        .map(|&n| vacuum_residual_at(fan, phi, n, psi))
        .collect::<Result<Vec<_>>>()?;
    ResidualReport::new(
        format!("vacuum_{}_c{}", phi.label(), psi.center),
        ns.to_vec(),
        values,
        Expectation::Near { target: 0.0, tol },
    )
}

/// int (-xi u_n' - v_n') psi = int u_n (psi + xi psi') + v_n psi': zero for
/// every n because u_n and v_n come from one displacement.
pub fn first_equation_defect(fan: &VacuumFan, phi: &Mollifier, n: f64, psi: &Bump1) -> Result<f64> {
    let m = fan.mollified(phi, n);
    let (a, b) = psi.support();
    let pts: Vec<f64> = m
        .breaks()
        .into_iter()
        .filter(|p| *p > a && *p < b)
        .collect();
    outer_quad().try_integrate(
        |xi| {
            let [ps, dps, _] = psi.eval(xi);
            if ps == 0.0 && dps == 0.0 {
                return Ok(0.0);
            }
            let f = m.fields(xi)?;
            Ok(f.u * (ps + xi * dps) + f.v * dps)
        },
        a,
        b,
        &pts,
    )
}

/// int_{-xibar}^{xibar} W(u_n) + v_n^2 / 2 at scale n.
pub fn vacuum_energy_at(fan: &VacuumFan, phi: &Mollifier, n: f64, xi_bar: f64) -> Result<f64> {
    let m = fan.mollified(phi, n);
    let pts: Vec<f64> = m
        .breaks()
        .into_iter()
        .filter(|p| p.abs() < xi_bar)
        .collect();
    outer_quad().try_integrate(
        |xi| {
            let f = m.fields(xi)?;
            Ok(fan.stored(f.u) + 0.5 * f.v * f.v)
        },
        -xi_bar,
        xi_bar,
        &pts,
    )
}

/// Exponents of the error expansion of the mollified energy in 1/n: the
/// delta layer gives n^-1, the cusp xi^kappa of v inside that layer adds
/// n^-(1+kappa) and n^-(1+2 kappa), the smooth part and the fan edges n^-2.
pub fn energy_exponents(fan: &VacuumFan) -> Vec<f64> {
    let k = fan.kappa();
    let mut e = vec![1.0, 1.0 + k, 1.0 + 2.0 * k, 2.0];
    e.sort_by(f64::total_cmp);
    e.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    e
}

#[derive(Debug, Clone, Serialize)]
pub struct VacuumEnergy {
    pub xi_bar: f64,
    pub ns: Vec<f64>,
    pub values: Vec<f64>,
    pub exponents: Vec<f64>,
    /// Richardson limit with the known exponents
    pub limit: f64,
    /// three-level fit, for the observed leading rate
    pub fit: LimitEstimate,
    pub closed_form: f64,
}

pub fn vacuum_energy(
    fan: &VacuumFan,
    phi: &Mollifier,
    xi_bar: f64,
    ns: &[f64],
) -> Result<VacuumEnergy> {
    if !(xi_bar > 0.0 && xi_bar <= fan.xi_f) {
        return Err(Error::InvalidParameter(format!(
            "energy window {xi_bar} must lie in (0, {}]",
            fan.xi_f
        )));
    }
    let values = ns
        .par_iter()
        .map(|&n| vacuum_energy_at(fan, phi, n, xi_bar))
        .collect::<Result<Vec<_>>>()?;
    let exponents = energy_exponents(fan);
    let used = exponents.len().min(ns.len().saturating_sub(1));
    let limit = richardson(ns, &values, &exponents[..used])?;
    Ok(VacuumEnergy {
        xi_bar,
        ns: ns.to_vec(),
        fit: extrapolate_limit(ns, &values)?,
        values,
        exponents,
        limit,
        closed_form: fan.closed_energy(xi_bar),
    })
}

/// Sampled a priori bounds inside the fan.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumBounds {
    pub samples: usize,
    pub u_floor: f64,
    pub v_cap: f64,
    pub u_min: f64,
    pub v_abs_max: f64,
    pub pass: bool,
}

pub fn check_vacuum_bounds(
    fan: &VacuumFan,
    phi: &Mollifier,
    ns: &[f64],
    samples: usize,
    seed: u64,
) -> Result<VacuumBounds> {
    let (u_floor, v_cap) = fan.bounds(phi);
    let per = (samples + ns.len() - 1) / ns.len().max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..per)
        .map(|_| fan.xi_f * (2.0 * rng.gen::<f64>() - 1.0))
        .collect();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let m = fan.mollified(phi, n);
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for &x in &xs {
                let f = m.fields(x)?;
                lo = lo.min(f.u);
                hi = hi.max(f.v.abs());
            }
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    let u_min = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let v_abs_max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(VacuumBounds {
        samples: per * ns.len(),
        u_floor,
        v_cap,
        u_min,
        v_abs_max,
        pass: u_min >= u_floor && v_abs_max <= v_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_fan_constants() {
        let f = make_vacuum_fan(1.0, 4.0, 2.0).unwrap();
        assert!((f.w + 1.0).abs() < 1e-15);
        assert!((f.xi_f - 1.0).abs() < 1e-15);
        assert!((f.delta_mass - 4.0).abs() < 1e-15);
        assert!((f.displacement(1.0) - 5.0).abs() < 1e-14);
        assert!(make_vacuum_fan(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn fan_is_continuous_at_the_edges() {
        let f = make_vacuum_fan(0.7, 6.0, 1.4).unwrap();
        let e = f.xi_f;
        for x in [e, -e] {
            let dx = 1e-12 * x.signum();
            assert!((f.displacement(x + dx) - f.displacement(x - dx)).abs() < 1e-9);
            assert!((f.velocity(x + dx) - f.velocity(x - dx)).abs() < 1e-9);
            assert!((f.u_ac(x + dx) - f.u_ac(x - dx)).abs() < 1e-9);
        }
    }
}
