//! Adaptive Gauss–Kronrod (7/15) quadrature with user breakpoints.
//!
//! Integrands may be vector valued (`[f64; N]`) so several fields that share
//! a kernel are integrated in one pass, and may be fallible so nested
//! integrals can report inner failures instead of silently returning junk.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes, last entry is the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Eight-point Gauss–Legendre nodes and weights on [-1, 1] (positive half).
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quad {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
    floor: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let fc = f(c)?;
    for k in 0..N {
        kron[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let f1 = f(c - h * x)?;
        let f2 = f(c + h * x)?;
        for k in 0..N {
            let s = f1[k] + f2[k];
            kron[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut error: f64 = 0.0;
    let mut value = [0.0; N];
    for k in 0..N {
        value[k] = kron[k] * h;
        let e = ((kron[k] - gauss[k]) * h).abs();
        error = error.max(e);
        if !value[k].is_finite() {
            return Err(Error::NonFinite { at: c });
        }
    }
    // rounding level of this panel; refinement below it is pointless
    let scale = value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 50.0 * f64::EPSILON * scale;
    error = error.max(floor);
    Ok(Panel {
        a,
        b,
        value,
        error,
        floor,
    })
}

impl Quad {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Scalar integral over [a, b] honouring interior breakpoints.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64, points: &[f64]) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        self.try_integrate_vec::<1, _>(|x| Ok([f(x)]), a, b, points)
            .map(|v| v[0])
    }

    /// Vector integral over [a, b]; the error test uses the largest component.
    pub fn integrate_vec<const N: usize, F>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        points: &[f64],
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64) -> [f64; N],
    {
        self.try_integrate_vec(|x| Ok(f(x)), a, b, points)
    }

    /// Scalar integral of a fallible integrand.
    pub fn try_integrate<F>(&self, mut f: F, a: f64, b: f64, points: &[f64]) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.try_integrate_vec::<1, _>(|x| f(x).map(|v| [v]), a, b, points)
            .map(|v| v[0])
    }

    pub fn try_integrate_vec<const N: usize, F>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        points: &[f64],
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64) -> Result<[f64; N]>,
    {
        if a == b {
            return Ok([0.0; N]);
        }
        if b < a {
            let v = self.try_integrate_vec(f, b, a, points)?;
            return Ok(v.map(|x| -x));
        }
        let mut cuts: Vec<f64> = points
            .iter()
            .copied()
            .filter(|p| p.is_finite() && *p > a && *p < b)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(a);
        edges.extend(cuts);
        edges.push(b);

        let mut heap = BinaryHeap::new();
        let mut total = [0.0; N];
        let mut total_err = 0.0;
        let mut total_floor = 0.0;
        for w in edges.windows(2) {
            let p = gk15(&mut f, w[0], w[1])?;
            for k in 0..N {
                total[k] += p.value[k];
            }
            total_err += p.error;
            total_floor += p.floor;
            heap.push(p);
        }
        loop {
            let mag = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let tol = self.abs_tol.max(self.rel_tol * mag).max(1.5 * total_floor);
            if total_err <= tol {
                return Ok(total);
            }
            if heap.len() >= self.max_panels {
                return Err(Error::Quadrature {
                    estimate: total[0],
                    error: total_err,
                    panels: heap.len(),
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval at machine resolution, accept what we have
                return Ok(total);
            }
            let left = gk15(&mut f, worst.a, mid)?;
            let right = gk15(&mut f, mid, worst.b)?;
            for k in 0..N {
                total[k] += left.value[k] + right.value[k] - worst.value[k];
            }
            total_err += left.error + right.error - worst.error;
            total_floor += left.floor + right.floor - worst.floor;
            heap.push(left);
            heap.push(right);
        }
    }

    /// Integral of f over [a, b] where f behaves like |x - a|^(-beta) near a,
    /// 0 <= beta < 1. The substitution x = a + (b - a) u^m with m = 1/(1 - beta)
    /// makes the transformed integrand bounded at u = 0.
    pub fn integrate_left_singular<const N: usize, F>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        beta: f64,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64) -> [f64; N],
    {
        let m = 1.0 / (1.0 - beta);
        let len = b - a;
        self.integrate_vec(
            |u| {
                if u <= 0.0 {
                    return [0.0; N];
                }
                let jac = len * m * u.powf(m - 1.0);
                f(a + len * u.powf(m)).map(|v| v * jac)
            },
            0.0,
            1.0,
            &[],
        )
    }
}

/// Fixed eight-point Gauss–Legendre rule on [a, b].
pub fn gauss_legendre8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..4 {
        s += GL8_W[k] * (f(c - h * GL8_X[k]) + f(c + h * GL8_X[k]));
    }
    s * h
}

/// Fallible fixed eight-point Gauss–Legendre rule on [a, b].
pub fn try_gauss_legendre8<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64) -> Result<f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..4 {
        s += GL8_W[k] * (f(c - h * GL8_X[k])? + f(c + h * GL8_X[k])?);
    }
    Ok(s * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = Quad::default();
        let v = q
            .integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &[])
            .unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn kink_with_breakpoint() {
        let q = Quad::default();
        let v = q.integrate(|x: f64| x.abs(), -1.0, 3.0, &[0.0]).unwrap();
        assert!((v - 5.0).abs() < 1e-13);
    }

    #[test]
    fn kink_without_breakpoint_still_converges() {
        let q = Quad::default();
        let v = q
            .integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[])
            .unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let q = Quad::default();
        let v = q.integrate(f64::exp, 1.0, 0.0, &[]).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn singular_endpoint() {
        let q = Quad::default();
        let v = q
            .integrate_left_singular::<1, _>(|x| [x.powf(-2.0 / 3.0)], 0.0, 1.0, 2.0 / 3.0)
            .unwrap();
        assert!((v[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn vector_components_share_panels() {
        let q = Quad::default();
        let v = q
            .integrate_vec(
                |x: f64| [x.sin(), x.cos(), 1.0],
                0.0,
                std::f64::consts::PI,
                &[],
            )
            .unwrap();
        assert!((v[0] - 2.0).abs() < 1e-13);
        assert!(v[1].abs() < 1e-13);
        assert!((v[2] - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let q = Quad {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_panels: 3,
        };
        let r = q.integrate(|x: f64| (1.0 / x.max(1e-300)).sin(), 1e-3, 1.0, &[]);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn gauss_legendre_degree_fifteen() {
        let v = gauss_legendre8(|x| x.powi(14), 0.0, 1.0);
        assert!((v - 1.0 / 15.0).abs() < 1e-15);
    }
}
