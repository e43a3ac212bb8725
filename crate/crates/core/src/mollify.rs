//! Mollifying kernels and the two averaging constructions: plain convolution
//! on the line and the odd-extension radial convolution.

use crate::error::{Error, Result};
use crate::quadrature::Quad;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// c exp(-1/(1 - x^2))
    Bump,
    /// c x^2 exp(-1/(1 - x^2)), vanishes at the origin
    BumpZeroCenter,
}

/// Nodes of the primitive tables on [0, 1].
const TABLE_NODES: usize = 2048;

/// A symmetric unit-mass kernel supported in [-1, 1].
#[derive(Debug, Clone)]
pub struct Mollifier {
    pub kind: KernelKind,
    norm: f64,
    /// sup of phi
    pub sup: f64,
    /// Phi(x) = int_0^x phi at the table nodes
    prim: Vec<f64>,
    /// M(x) = int_0^x z phi(z) dz at the table nodes
    moment: Vec<f64>,
}

fn raw_profile(kind: KernelKind, x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        return 0.0;
    }
    let e = (-1.0 / s).exp();
    match kind {
        KernelKind::Bump => e,
        KernelKind::BumpZeroCenter => x * x * e,
    }
}

fn raw_slope(kind: KernelKind, x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        return 0.0;
    }
    let e = (-1.0 / s).exp();
    let g = -2.0 * x / (s * s);
    match kind {
        KernelKind::Bump => e * g,
        KernelKind::BumpZeroCenter => e * (2.0 * x + x * x * g),
    }
}

fn quintic(h: f64, t: f64, y0: f64, y1: f64, d0: f64, d1: f64, s0: f64, s1: f64) -> f64 {
    // quintic Hermite basis on [0, 1]
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
    h0 * y0 + h1 * h * d0 + h2 * h * h * s0 + h5 * y1 + h4 * h * d1 + h3 * h * h * s1
}

impl Mollifier {
    pub fn new(kind: KernelKind) -> Result<Self> {
        let q = Quad::with_tol(1e-15, 1e-15);
        let mass = q.integrate(|x| raw_profile(kind, x), -1.0, 1.0, &[0.0])?;
        let norm = 1.0 / mass;
        let mut m = Self {
            kind,
            norm,
            sup: 0.0,
            prim: vec![0.0; TABLE_NODES + 1],
            moment: vec![0.0; TABLE_NODES + 1],
        };
        let h = 1.0 / TABLE_NODES as f64;
        let mut sup: f64 = 0.0;
        for i in 0..TABLE_NODES {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let v = q.integrate_vec(
                |x| {
                    let p = m.phi(x);
                    [p, x * p]
                },
                a,
                b,
                &[],
            )?;
            m.prim[i + 1] = m.prim[i] + v[0];
            m.moment[i + 1] = m.moment[i] + v[1];
            sup = sup.max(m.phi(a));
        }
        // refine the maximiser by golden section around the best node
        let best = (0..TABLE_NODES)
            .max_by(|&i, &j| m.phi(i as f64 * h).total_cmp(&m.phi(j as f64 * h)))
            .unwrap();
        let (mut lo, mut hi) = (((best as f64) - 1.0).max(0.0) * h, (best as f64 + 1.0) * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if m.phi(x1) < m.phi(x2) {
                lo = x1;
            } else {
                hi = x2;
            }
        }
        m.sup = sup.max(m.phi(0.5 * (lo + hi)));
        let half = m.prim[TABLE_NODES];
        if (half - 0.5).abs() > 1e-12 {
            return Err(Error::Invariant(format!(
                "kernel half mass {half} differs from 1/2"
            )));
        }
        Ok(m)
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "bump" => Self::new(KernelKind::Bump),
            "bump_zero_center" => Self::new(KernelKind::BumpZeroCenter),
            other => Err(Error::UnknownLabel {
                kind: "kernel",
                label: other.to_string(),
            }),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            KernelKind::Bump => "bump",
            KernelKind::BumpZeroCenter => "bump_zero_center",
        }
    }

    pub fn phi0_positive(&self) -> bool {
        self.phi(0.0) > 0.0
    }

    /// Refuse kernels that vanish at the origin where a cavity must be seen.
    pub fn require_positive_center(&self) -> Result<()> {
        if self.phi0_positive() {
            Ok(())
        } else {
            Err(Error::DegenerateKernel(self.label().to_string()))
        }
    }

    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        self.norm * raw_profile(self.kind, x)
    }

    #[inline]
    pub fn phi_prime(&self, x: f64) -> f64 {
        self.norm * raw_slope(self.kind, x)
    }

    /// phi_n(x) = n phi(n x)
    #[inline]
    pub fn phi_n(&self, n: f64, x: f64) -> f64 {
        n * self.phi(n * x)
    }

    /// Phi(x) = int_0^x phi, odd, equal to 1/2 for x >= 1.
    pub fn primitive(&self, x: f64) -> f64 {
        let a = x.abs();
        if a >= 1.0 {
            return 0.5f64.copysign(x);
        }
        let h = 1.0 / TABLE_NODES as f64;
        let i = ((a / h) as usize).min(TABLE_NODES - 1);
        let x0 = i as f64 * h;
        let x1 = x0 + h;
        let v = quintic(
            h,
            (a - x0) / h,
            self.prim[i],
            self.prim[i + 1],
            self.phi(x0),
            self.phi(x1),
            self.phi_prime(x0),
            self.phi_prime(x1),
        );
        v.copysign(x)
    }

    /// M(x) = int_0^x z phi(z) dz, even.
    pub fn first_moment(&self, x: f64) -> f64 {
        let a = x.abs().min(1.0);
        let h = 1.0 / TABLE_NODES as f64;
        let i = ((a / h) as usize).min(TABLE_NODES - 1);
        let x0 = i as f64 * h;
        let x1 = x0 + h;
        quintic(
            h,
            (a - x0) / h,
            self.moment[i],
            self.moment[i + 1],
            x0 * self.phi(x0),
            x1 * self.phi(x1),
            self.phi(x0) + x0 * self.phi_prime(x0),
            self.phi(x1) + x1 * self.phi_prime(x1),
        )
    }

    /// P_n(y) = int_{-inf}^{y} phi_n = 1/2 + Phi(n y)
    #[inline]
    pub fn cdf_n(&self, n: f64, y: f64) -> f64 {
        0.5 + self.primitive(n * y)
    }

    /// int_{-inf}^{y} z phi_n(z) dz = (M(n y) - M(1)) / n
    #[inline]
    pub fn moment_n(&self, n: f64, y: f64) -> f64 {
        (self.first_moment(n * y) - self.moment[TABLE_NODES]) / n
    }

    /// int_a^b phi_n(x - z) dz
    #[inline]
    pub fn mass_between(&self, n: f64, x: f64, a: f64, b: f64) -> f64 {
        self.cdf_n(n, x - a) - self.cdf_n(n, x - b)
    }

    /// int_a^b phi_n(x - z) z dz
    #[inline]
    pub fn moment_between(&self, n: f64, x: f64, a: f64, b: f64) -> f64 {
        x * self.mass_between(n, x, a, b) - (self.moment_n(n, x - a) - self.moment_n(n, x - b))
    }
}

/// int phi_n(x - z) y(z) dz on the line, splitting at the caller's breakpoints.
pub fn convolve_line<F: FnMut(f64) -> f64>(
    q: &Quad,
    phi: &Mollifier,
    n: f64,
    x: f64,
    y: F,
    breakpoints: &[f64],
) -> Result<f64> {
    let mut y = y;
    let mut pts = breakpoints.to_vec();
    pts.push(x);
    q.integrate(
        |z| phi.phi_n(n, x - z) * y(z),
        x - 1.0 / n,
        x + 1.0 / n,
        &pts,
    )
}

fn radial_breaks(n: f64, r: f64, extra: &[f64]) -> (f64, Vec<f64>) {
    let hi = r + 1.0 / n;
    let mut pts = vec![r, (1.0 / n - r).abs(), r - 1.0 / n];
    pts.extend_from_slice(extra);
    (hi, pts)
}

/// int_0^inf [phi_n(R - s) - phi_n(R + s)] w(s) ds; the mollification of the
/// odd extension of w. Vanishes at R = 0.
pub fn convolve_radial_odd<F: FnMut(f64) -> f64>(
    q: &Quad,
    phi: &Mollifier,
    n: f64,
    r: f64,
    w: F,
    breakpoints: &[f64],
) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let mut w = w;
    let (hi, pts) = radial_breaks(n, r, breakpoints);
    q.integrate(
        |s| (phi.phi_n(n, r - s) - phi.phi_n(n, r + s)) * w(s),
        (r - 1.0 / n).max(0.0),
        hi,
        &pts,
    )
}

/// d/dR of the odd mollification: 2 phi_n(R) w(0+) + int_0^inf [phi_n(R - s) + phi_n(R + s)] w_R(s) ds.
pub fn convolve_radial_odd_deriv<F: FnMut(f64) -> f64>(
    q: &Quad,
    phi: &Mollifier,
    n: f64,
    r: f64,
    w_at_zero: f64,
    w_r: F,
    breakpoints: &[f64],
) -> Result<f64> {
    let mut w_r = w_r;
    let (hi, pts) = radial_breaks(n, r, breakpoints);
    let body = q.integrate(
        |s| (phi.phi_n(n, r - s) + phi.phi_n(n, r + s)) * w_r(s),
        (r - 1.0 / n).max(0.0),
        hi,
        &pts,
    )?;
    Ok(2.0 * phi.phi_n(n, r) * w_at_zero + body)
}

/// The default scale ladder n = 8 * 2^k, k = 0..levels.
pub fn scale_ladder(levels: usize) -> Vec<f64> {
    (0..levels).map(|k| 8.0 * 2f64.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_direct_quadrature() {
        let q = Quad::with_tol(1e-15, 1e-15);
        for kind in [KernelKind::Bump, KernelKind::BumpZeroCenter] {
            let m = Mollifier::new(kind).unwrap();
            for &x in &[0.0, 0.013, 0.3, 0.5, 0.77, 0.999, 1.0] {
                let p = q.integrate(|z| m.phi(z), 0.0, x, &[]).unwrap();
                let mo = q.integrate(|z| z * m.phi(z), 0.0, x, &[]).unwrap();
                assert!((m.primitive(x) - p).abs() < 1e-14, "{kind:?} {x}");
                assert!((m.primitive(-x) + p).abs() < 1e-14);
                assert!((m.first_moment(x) - mo).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kernel_flags() {
        let b = Mollifier::from_label("bump").unwrap();
        assert!(b.phi0_positive());
        assert_eq!(b.phi(1.0), 0.0);
        assert_eq!(b.primitive(0.0), 0.0);
        assert_eq!(b.primitive(1.0), 0.5);
        assert!((b.sup - b.phi(0.0)).abs() < 1e-15);
        let z = Mollifier::from_label("bump_zero_center").unwrap();
        assert!(!z.phi0_positive());
        assert!(z.require_positive_center().is_err());
        assert!(Mollifier::from_label("gauss").is_err());
    }

    #[test]
    fn step_at_zero_gives_half() {
        let q = Quad::default();
        let m = Mollifier::new(KernelKind::Bump).unwrap();
        let v = convolve_line(
            &q,
            &m,
            16.0,
            0.0,
            |z| if z > 0.0 { 1.0 } else { 0.0 },
            &[0.0],
        )
        .unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }
}
