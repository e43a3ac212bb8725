//! Test functions and weak-form residual pairings <f^n, psi> of mollified
//! motions, plus the bookkeeping that turns a scale ladder of residuals into
//! an extrapolated limit with a verdict.

use crate::constitutive::{omega, StoredEnergy3D};
use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_limit, LimitEstimate};
use crate::quadrature::Quad;
use serde::Serialize;
use std::path::Path;

/// One-dimensional bump exp(-1/(1 - z^2)), z = (x - center)/half, with two
/// closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump1 {
    pub center: f64,
    pub half: f64,
}

impl Bump1 {
    pub fn new(center: f64, half: f64) -> Result<Self> {
        if !(half > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bump half-width must be positive, got {half}"
            )));
        }
        Ok(Self { center, half })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half, self.center + self.half)
    }

    /// (value, first derivative, second derivative)
    pub fn eval(&self, x: f64) -> [f64; 3] {
        let z = (x - self.center) / self.half;
        let s = 1.0 - z * z;
        if s <= 0.0 {
            return [0.0; 3];
        }
        let b = (-1.0 / s).exp();
        if b == 0.0 {
            return [0.0; 3];
        }
        let g = -2.0 * z / (s * s);
        let gp = -2.0 / (s * s) - 8.0 * z * z / (s * s * s);
        let h = self.half;
        [b, b * g / h, b * (g * g + gp) / (h * h)]
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }
}

/// Tensor bump psi(x, t) = b((x - x0)/a) b((t - t0)/b) on a space-time box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpTest {
    pub x: Bump1,
    pub t: Bump1,
}

/// Values of psi and the derivatives the pairings need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestValues {
    pub psi: f64,
    pub psi_x: f64,
    pub psi_t: f64,
    pub psi_tt: f64,
}

pub fn make_bump_test(center: (f64, f64), halfwidths: (f64, f64)) -> Result<BumpTest> {
    Ok(BumpTest {
        x: Bump1::new(center.0, halfwidths.0)?,
        t: Bump1::new(center.1, halfwidths.1)?,
    })
}

impl BumpTest {
    pub fn eval(&self, x: f64, t: f64) -> TestValues {
        let bx = self.x.eval(x);
        let bt = self.t.eval(t);
        TestValues {
            psi: bx[0] * bt[0],
            psi_x: bx[1] * bt[0],
            psi_t: bx[0] * bt[1],
            psi_tt: bx[0] * bt[2],
        }
    }

    pub fn psi(&self, x: f64, t: f64) -> f64 {
        self.x.value(x) * self.t.value(t)
    }

    /// ((x_lo, x_hi), (t_lo, t_hi))
    pub fn support(&self) -> ((f64, f64), (f64, f64)) {
        (self.x.support(), self.t.support())
    }

    /// sup |psi| = e^{-2}, attained at the centre.
    pub fn sup(&self) -> f64 {
        (-2.0f64).exp()
    }
}

/// Smooth radial cut-off: 1 on [0, inner], 0 beyond outer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

fn step_f(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        (-1.0 / z).exp()
    }
}

impl Cutoff {
    /// (chi, chi')
    pub fn eval(&self, r: f64) -> [f64; 2] {
        if r <= self.inner {
            return [1.0, 0.0];
        }
        if r >= self.outer {
            return [0.0, 0.0];
        }
        let w = self.outer - self.inner;
        let z = (self.outer - r) / w;
        let (a, b) = (step_f(z), step_f(1.0 - z));
        let den = a + b;
        let ap = if z > 0.0 { a / (z * z) } else { 0.0 };
        let bp = if z < 1.0 {
            b / ((1.0 - z) * (1.0 - z))
        } else {
            0.0
        };
        let ds = (ap * b + a * bp) / (den * den);
        [a / den, -ds / w]
    }
}

/// Vector test field psi(x, t) = zeta(t) chi(|x|) x, i.e. zeta(t) x near the
/// origin. Radially it is q(R, t) e_R with q = zeta(t) R chi(R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialTest {
    pub zeta: Bump1,
    pub cutoff: Cutoff,
}

impl RadialTest {
    pub fn new(zeta: Bump1, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::InvalidParameter(format!(
                "radial cut-off needs 0 < inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(Self {
            zeta,
            cutoff: Cutoff { inner, outer },
        })
    }

    /// (q, q_R, q_tt, q / R)
    pub fn eval(&self, r: f64, t: f64) -> [f64; 4] {
        let z = self.zeta.eval(t);
        let [c, cp] = self.cutoff.eval(r);
        [z[0] * r * c, z[0] * (c + r * cp), z[2] * r * c, z[0] * c]
    }
}

/// A scalar motion on the line that can be paired against test functions.
pub trait Motion1D: Sync {
    /// displacement y(x, t)
    fn y(&self, x: f64, t: f64) -> f64;
    /// strain y_x(x, t)
    fn strain(&self, x: f64, t: f64) -> f64;
    /// known kinks in x at time t
    fn x_breaks(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }
    /// known kinks in t
    fn t_breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Nested quadrature tolerances: the inner integral must be resolved well
/// below the outer tolerance so the outer rule sees a smooth function.
#[derive(Debug, Clone, Copy)]
pub struct PairingQuad {
    pub outer: Quad,
    pub inner: Quad,
}

impl Default for PairingQuad {
    fn default() -> Self {
        Self {
            outer: Quad::with_tol(1e-11, 1e-11),
            inner: Quad::with_tol(1e-13, 1e-13),
        }
    }
}

fn clip(points: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    points.into_iter().filter(|p| *p > lo && *p < hi).collect()
}

/// <f^n, psi> = int int y psi_tt + tau(y_x) psi_x dx dt over the support of psi.
pub fn pair_residual_1d<M: Motion1D + ?Sized>(
    motion: &M,
    tau: impl Fn(f64) -> f64,
    psi: &BumpTest,
    q: &PairingQuad,
) -> Result<f64> {
    let ((x0, x1), (t0, t1)) = psi.support();
    let tb = clip(motion.t_breaks(), t0, t1);
    q.outer.try_integrate(
        |t| {
            let xb = clip(motion.x_breaks(t), x0, x1);
            q.inner.integrate(
                |x| {
                    let p = psi.eval(x, t);
                    motion.y(x, t) * p.psi_tt + tau(motion.strain(x, t)) * p.psi_x
                },
                x0,
                x1,
                &xb,
            )
        },
        t0,
        t1,
        &tb,
    )
}

/// -2 Y0 L <d/dx delta_0, t psi> = 2 Y0 L int_0^inf t psi_x(0, t) dt.
pub fn delta_derivative_pairing(y0: f64, l: f64, psi: &BumpTest, q: &Quad) -> Result<f64> {
    if l == 0.0 {
        return Ok(0.0);
    }
    let (_, (t0, t1)) = psi.support();
    let (a, b) = (t0.max(0.0), t1.max(0.0));
    let body = q.integrate(|t| t * psi.eval(0.0, t).psi_x, a, b, &[])?;
    Ok(2.0 * y0 * l * body)
}

/// A radially symmetric motion y = w(R, t) e_R.
pub trait RadialMotion: Sync {
    /// (w, lambda_1 = w_R, lambda_2 = w / R)
    fn state(&self, r: f64, t: f64) -> Result<[f64; 3]>;
    fn r_breaks(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }
    fn t_breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Definition-level residual for radial motions. With psi = q(R, t) e_R the
/// stress pairing S : grad psi reduces to Phi1 q_R + (d - 1) Phi2 q / R, so
///   <f^n, psi> = omega_d int int [w q_tt + Phi1 q_R + (d-1) Phi2 q/R] R^{d-1} dR dt.
pub fn pair_residual_radial<M: RadialMotion + ?Sized>(
    motion: &M,
    energy: &StoredEnergy3D,
    psi: &RadialTest,
    q: &PairingQuad,
) -> Result<f64> {
    let d = energy.d;
    let (t0, t1) = psi.zeta.support();
    let r1 = psi.cutoff.outer;
    let tb = clip(motion.t_breaks(), t0, t1);
    let body = q.outer.try_integrate(
        |t| {
            let mut rb = clip(motion.r_breaks(t), 0.0, r1);
            rb.push(psi.cutoff.inner);
            q.inner.try_integrate(
                |r| {
                    let [w, l1, l2] = motion.state(r, t)?;
                    let s = energy.stress_unchecked(l1, l2);
                    let [_, qr, qtt, q_over_r] = psi.eval(r, t);
                    let val = (w * qtt + s.phi1 * qr + (d as f64 - 1.0) * s.phi2 * q_over_r)
                        * r.powi(d as i32 - 1);
                    if val.is_finite() {
                        Ok(val)
                    } else {
                        Err(Error::NonFinite { at: r })
                    }
                },
                0.0,
                r1,
                &rb,
            )
        },
        t0,
        t1,
        &tb,
    )?;
    Ok(omega(d) * body)
}

/// Residual of a self-similar p-system fan (u, v)(xi) against psi(xi):
///   int (p(u) - xi v) psi' - v psi d xi.
pub fn pair_residual_selfsim(
    uv: impl Fn(f64) -> Result<(f64, f64)>,
    p: impl Fn(f64) -> f64,
    psi: &Bump1,
    breaks: &[f64],
    q: &Quad,
) -> Result<f64> {
    let (a, b) = psi.support();
    let pts = clip(breaks.to_vec(), a, b);
    q.try_integrate(
        |xi| {
            let [ps, dps, _] = psi.eval(xi);
            if ps == 0.0 && dps == 0.0 {
                return Ok(0.0);
            }
            let (uu, vv) = uv(xi)?;
            Ok((p(uu) - xi * vv) * dps - vv * ps)
        },
        a,
        b,
        &pts,
    )
}

/// What a residual sequence is expected to do.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    /// |limit - target| <= tol
    Near { target: f64, tol: f64 },
    /// |limit - target| <= rel |target|
    Relative { target: f64, rel: f64 },
    /// limit and the last three values all exceed floor
    Positive { floor: f64 },
    /// |value| strictly decreasing at an average rate of at least n^-min_rate;
    /// for zero limits approached too slowly (logarithmically) to extrapolate
    Decaying { min_rate: f64 },
}

/// Residuals over a scale ladder with their extrapolated limit.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub label: String,
    pub ns: Vec<f64>,
    pub values: Vec<f64>,
    pub estimate: LimitEstimate,
    pub expectation: Expectation,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(
        label: impl Into<String>,
        ns: Vec<f64>,
        values: Vec<f64>,
        expectation: Expectation,
    ) -> Result<Self> {
        let estimate = extrapolate_limit(&ns, &values)?;
        let l = estimate.limit;
        let pass = match expectation {
            Expectation::Near { target, tol } => (l - target).abs() <= tol,
            Expectation::Relative { target, rel } => (l - target).abs() <= rel * target.abs(),
            Expectation::Positive { floor } => {
                l > floor && values.iter().rev().take(3).all(|v| *v > floor)
            }
            Expectation::Decaying { min_rate } => {
                let k = values.len() - 1;
                let rate = (values[0].abs() / values[k].abs()).ln() / (ns[k] / ns[0]).ln();
                values.windows(2).all(|w| w[1].abs() < w[0].abs()) && rate >= min_rate
            }
        } && l.is_finite();
        Ok(Self {
            label: label.into(),
            ns,
            values,
            estimate,
            expectation,
            pass,
        })
    }

    /// Columns n, residual, est_limit, est_rate.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["n", "residual", "est_limit", "est_rate"])?;
        for (n, v) in self.ns.iter().zip(&self.values) {
            w.write_record([
                format!("{n}"),
                format!("{v:.15e}"),
                format!("{:.15e}", self.estimate.limit),
                format!("{:.6}", self.estimate.rate),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_centre_value() {
        let p = make_bump_test((0.3, 1.0), (0.5, 0.7)).unwrap();
        assert!((p.psi(0.3, 1.0) - (-2.0f64).exp()).abs() < 1e-16);
        assert_eq!(p.psi(0.8, 1.0), 0.0);
        assert_eq!(p.psi(0.3, 1.7), 0.0);
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let b = Bump1::new(0.2, 0.9).unwrap();
        let h = 1e-5;
        for &x in &[-0.5, 0.0, 0.2, 0.6, 1.0] {
            let [_, d1, d2] = b.eval(x);
            let fd1 = (b.value(x + h) - b.value(x - h)) / (2.0 * h);
            let fd2 = (b.value(x + h) - 2.0 * b.value(x) + b.value(x - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-8, "{x}");
            assert!((d2 - fd2).abs() < 1e-5, "{x}");
        }
    }

    #[test]
    fn cutoff_derivative_matches_differences() {
        let c = Cutoff {
            inner: 1.0,
            outer: 2.0,
        };
        let h = 1e-6;
        for &r in &[1.1, 1.5, 1.9] {
            let fd = (c.eval(r + h)[0] - c.eval(r - h)[0]) / (2.0 * h);
            assert!((c.eval(r)[1] - fd).abs() < 1e-7);
        }
        assert_eq!(c.eval(0.5), [1.0, 0.0]);
        assert_eq!(c.eval(2.5), [0.0, 0.0]);
    }

    struct Affine(f64);
    impl Motion1D for Affine {
        fn y(&self, x: f64, _t: f64) -> f64 {
            self.0 * x
        }
        fn strain(&self, _x: f64, _t: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn homogeneous_motion_has_zero_residual() {
        let psi = make_bump_test((0.1, 0.4), (1.0, 0.8)).unwrap();
        let r = pair_residual_1d(
            &Affine(3.0),
            |u| 1.0 - 1.0 / u,
            &psi,
            &PairingQuad::default(),
        )
        .unwrap();
        assert!(r.abs() < 1e-12, "{r}");
    }

    #[test]
    fn delta_pairing_vanishes_for_even_psi() {
        let psi = make_bump_test((0.0, 1.0), (1.0, 0.8)).unwrap();
        let v = delta_derivative_pairing(0.7, 1.0, &psi, &Quad::default()).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn positive_expectation_checks_tail() {
        let ns = vec![8.0, 16.0, 32.0, 64.0];
        let vals: Vec<f64> = ns.iter().map(|n| 0.5 + 1.0 / n).collect();
        let r = ResidualReport::new("x", ns, vals, Expectation::Positive { floor: 0.1 }).unwrap();
        assert!(r.pass);
    }
}
