//! Limits of sequences sampled over a scale ladder n_1 < n_2 < ...
//!
//! Two tools: a three-level fit of value ~ limit + C n^(-rate) with unknown
//! rate, and a linear Richardson elimination for known exponents.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Outcome of a three-level rate fit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LimitEstimate {
    pub limit: f64,
    /// Observed algebraic rate; NaN when the tail is not monotone.
    pub rate: f64,
    /// |fit(n) - value(n)| at the level just below the fitted triple, when available.
    pub fit_residual: f64,
    pub monotone_tail: bool,
}

fn ratio_for_rate(n: [f64; 3], p: f64) -> f64 {
    let a = n[0].powf(-p);
    let b = n[1].powf(-p);
    let c = n[2].powf(-p);
    (c - b) / (b - a)
}

/// Fit value ~ limit + C n^(-rate) on the last three levels.
///
/// A non-monotone tail (consecutive differences changing sign or not
/// shrinking) is flagged and the last value is returned as the limit.
pub fn extrapolate_limit(ns: &[f64], values: &[f64]) -> Result<LimitEstimate> {
    if ns.len() != values.len() || ns.len() < 3 {
        return Err(Error::Extrapolation(
            "need at least three (n, value) levels".into(),
        ));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Extrapolation("n must increase strictly".into()));
    }
    let k = ns.len();
    let n = [ns[k - 3], ns[k - 2], ns[k - 1]];
    let v = [values[k - 3], values[k - 2], values[k - 1]];
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
    if d1.abs() <= 4.0 * f64::EPSILON * scale && d2.abs() <= 4.0 * f64::EPSILON * scale {
        return Ok(LimitEstimate {
            limit: v[2],
            rate: f64::INFINITY,
            fit_residual: 0.0,
            monotone_tail: true,
        });
    }
    let rho = d2 / d1;
    if !(rho > 0.0 && rho < 1.0) {
        return Ok(LimitEstimate {
            limit: v[2],
            rate: f64::NAN,
            fit_residual: f64::NAN,
            monotone_tail: false,
        });
    }
    // ratio_for_rate decreases from (n2-n1)... towards 0 as p grows; bracket p
    let f = |p: f64| ratio_for_rate(n, p) - rho;
    let (mut lo, mut hi) = (1e-6, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Extrapolation("rate bracket exhausted".into()));
        }
    }
    if f(lo) < 0.0 {
        // ratio above the p -> 0 limit; the sequence converges slower than any power
        return Ok(LimitEstimate {
            limit: v[2],
            rate: 0.0,
            fit_residual: f64::NAN,
            monotone_tail: true,
        });
    }
    let mut conv = roots::SimpleConvergency {
        eps: 1e-14,
        max_iter: 200,
    };
    let p = roots::find_root_brent(lo, hi, f, &mut conv).unwrap_or_else(|_| {
        // fall back on plain bisection
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if f(m) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        0.5 * (lo + hi)
    });
    let c = d2 / (n[2].powf(-p) - n[1].powf(-p));
    let limit = v[2] - c * n[2].powf(-p);
    let fit_residual = if k >= 4 {
        (limit + c * ns[k - 4].powf(-p) - values[k - 4]).abs()
    } else {
        f64::NAN
    };
    Ok(LimitEstimate {
        limit,
        rate: p,
        fit_residual,
        monotone_tail: true,
    })
}

/// Richardson elimination: solve value(n) = L + sum_j c_j n^(-p_j) exactly on
/// the last (exponents.len() + 1) levels and return L.
pub fn richardson(ns: &[f64], values: &[f64], exponents: &[f64]) -> Result<f64> {
    let m = exponents.len() + 1;
    if ns.len() != values.len() || ns.len() < m {
        return Err(Error::Extrapolation(format!(
            "need {m} levels for {} exponents",
            exponents.len()
        )));
    }
    let off = ns.len() - m;
    let a = DMatrix::from_fn(m, m, |i, j| {
        if j == 0 {
            1.0
        } else {
            (ns[off + i] / ns[off + m - 1]).powf(-exponents[j - 1])
        }
    });
    let b = DVector::from_iterator(m, values[off..].iter().copied());
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Extrapolation("singular Richardson system".into()))?;
    Ok(sol[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> Vec<f64> {
        (0..7).map(|k| 8.0 * 2f64.powi(k)).collect()
    }

    #[test]
    fn one_over_n() {
        let ns = ladder();
        let vs: Vec<f64> = ns.iter().map(|n| 1.0 + 4.0 / n).collect();
        let e = extrapolate_limit(&ns, &vs).unwrap();
        assert!((e.limit - 1.0).abs() < 1e-12);
        assert!((e.rate - 1.0).abs() < 1e-9);
        assert!(e.fit_residual < 1e-12);
    }

    #[test]
    fn one_over_n_squared() {
        let ns = ladder();
        let vs: Vec<f64> = ns.iter().map(|n| 3.0 + 5.0 / (n * n)).collect();
        let e = extrapolate_limit(&ns, &vs).unwrap();
        assert!((e.limit - 3.0).abs() < 1e-12);
        assert!((e.rate - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_geometric_ladder() {
        let ns = [3.0, 7.0, 20.0, 45.0];
        let vs: Vec<f64> = ns.iter().map(|n: &f64| -2.0 + 0.3 * n.powf(-1.5)).collect();
        let e = extrapolate_limit(&ns, &vs).unwrap();
        assert!((e.limit + 2.0).abs() < 1e-11);
        assert!((e.rate - 1.5).abs() < 1e-8);
    }

    #[test]
    fn oscillating_tail_is_flagged() {
        let ns = ladder();
        let vs: Vec<f64> = ns
            .iter()
            .enumerate()
            .map(|(i, n)| 1.0 + if i % 2 == 0 { 1.0 } else { -1.0 } / n)
            .collect();
        let e = extrapolate_limit(&ns, &vs).unwrap();
        assert!(!e.monotone_tail);
        assert!(e.rate.is_nan());
    }

    #[test]
    fn richardson_two_terms() {
        let ns = ladder();
        let vs: Vec<f64> = ns
            .iter()
            .map(|n| 13.0 + 0.7 / n - 2.0 * n.powf(-4.0 / 3.0))
            .collect();
        let l = richardson(&ns, &vs, &[1.0, 4.0 / 3.0]).unwrap();
        assert!((l - 13.0).abs() < 1e-11);
    }
}
