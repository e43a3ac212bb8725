//! Dormand–Prince 5(4) integrator with terminal events.
//!
//! Accepted steps are stored with their derivatives so the trajectory can be
//! resampled by cubic Hermite interpolation. Events are located on the
//! interpolant first and then polished with real Runge–Kutta steps, so the
//! event abscissa is as accurate as the integrator itself.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Sign change that triggers an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Falling,
    Rising,
    Either,
}

/// A terminal event g(s, y) = 0.
pub struct Event<'a, const N: usize> {
    pub g: Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>,
    pub crossing: Crossing,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn new(crossing: Crossing, g: impl Fn(f64, &[f64; N]) -> f64 + 'a) -> Self {
        Self {
            g: Box::new(g),
            crossing,
        }
    }

    fn fires(&self, g0: f64, g1: f64) -> bool {
        match self.crossing {
            Crossing::Falling => g0 > 0.0 && g1 <= 0.0,
            Crossing::Rising => g0 < 0.0 && g1 >= 0.0,
            Crossing::Either => (g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0),
        }
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    Reached,
    Event(usize),
}

/// Accepted steps: abscissae, states and derivatives.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub s: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.s.last().unwrap(), *self.y.last().unwrap())
    }

    /// Cubic Hermite resampling; clamps outside the covered range.
    pub fn at(&self, s: f64) -> [f64; N] {
        let n = self.s.len();
        if s <= self.s[0] {
            return self.y[0];
        }
        if s >= self.s[n - 1] {
            return self.y[n - 1];
        }
        let k = self.s.partition_point(|&x| x <= s) - 1;
        hermite(
            self.s[k],
            self.s[k + 1],
            &self.y[k],
            &self.y[k + 1],
            &self.dy[k],
            &self.dy[k + 1],
            s,
        )
    }
}

fn hermite<const N: usize>(
    s0: f64,
    s1: f64,
    y0: &[f64; N],
    y1: &[f64; N],
    d0: &[f64; N],
    d1: &[f64; N],
    s: f64,
) -> [f64; N] {
    let h = s1 - s0;
    let t = (s - s0) / h;
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
    }
    out
}

/// Integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            h_init: 0.0,
            h_min: 1e-14,
            max_steps: 200_000,
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            ..Self::default()
        }
    }

    /// One step of size h from (s, y) with known derivative k1. Returns the
    /// fifth-order solution, its derivative and the error norm.
    fn step<const N: usize, F>(
        &self,
        f: &mut F,
        s: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> Result<([f64; N], [f64; N], f64)>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let k2 = f(s + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
        let k3 = f(s + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = f(
            s + C4 * h,
            &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = f(
            s + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            s + h,
            &axpy(
                y,
                h,
                &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = axpy(
            y,
            h,
            &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(s + h, &y_new)?;
        let mut err = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        Ok((y_new, k7, (err / N as f64).sqrt()))
    }

    /// Integrate y' = f(s, y) from s0 towards s_end, stopping at the first
    /// terminal event. A failing right-hand side inside a trial step makes
    /// the step shrink; it only propagates once the step is below `h_min`.
    pub fn solve<const N: usize, F>(
        &self,
        mut f: F,
        s0: f64,
        y0: [f64; N],
        s_end: f64,
        events: &[Event<'_, N>],
    ) -> Result<(Trajectory<N>, Stop)>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let dir = if s_end >= s0 { 1.0 } else { -1.0 };
        let span = (s_end - s0).abs();
        let k0 = f(s0, &y0)?;
        let mut traj = Trajectory {
            s: vec![s0],
            y: vec![y0],
            dy: vec![k0],
        };
        let mut h = if self.h_init > 0.0 {
            self.h_init
        } else {
            let ynorm = y0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let dnorm = k0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let guess = if dnorm > 0.0 {
                0.01 * (ynorm + self.atol) / dnorm
            } else {
                1e-6 * span
            };
            guess.min(0.1 * span).max(1e-12 * span)
        };
        let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(s0, &y0)).collect();
        let (mut s, mut y, mut k) = (s0, y0, k0);
        for _ in 0..self.max_steps {
            if (s_end - s) * dir <= 0.0 {
                return Ok((traj, Stop::Reached));
            }
            let h_try = h.min((s_end - s).abs());
            let trial = self.step(&mut f, s, &y, &k, dir * h_try);
            let (y_new, k_new, err) = match trial {
                Ok(v) => v,
                Err(e) => {
                    h = 0.25 * h_try;
                    if h < self.h_min * (1.0 + s.abs()) {
                        return Err(e);
                    }
                    continue;
                }
            };
            if !err.is_finite() || err > 1.0 {
                let fac = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).max(0.1)
                } else {
                    0.1
                };
                h = h_try * fac;
                if h < self.h_min * (1.0 + s.abs()) {
                    return Err(Error::Ode {
                        at: s,
                        reason: "step size underflow".into(),
                    });
                }
                continue;
            }
            let s_new = s + dir * h_try;
            // event check on the accepted step
            let g_new: Vec<f64> = events.iter().map(|e| (e.g)(s_new, &y_new)).collect();
            let fired = events
                .iter()
                .enumerate()
                .filter(|(i, e)| e.fires(g_prev[*i], g_new[*i]))
                .map(|(i, _)| {
                    let root = self.locate(&mut f, &events[i], s, &y, &k, s_new, &y_new, &k_new);
                    (i, root)
                })
                .collect::<Vec<_>>();
            if !fired.is_empty() {
                let mut best: Option<(usize, f64, [f64; N], [f64; N])> = None;
                for (i, root) in fired {
                    let (se, ye, ke) = root?;
                    let better = match &best {
                        None => true,
                        Some((_, sb, _, _)) => (se - *sb) * dir < 0.0,
                    };
                    if better {
                        best = Some((i, se, ye, ke));
                    }
                }
                let (i, se, ye, ke) = best.unwrap();
                traj.s.push(se);
                traj.y.push(ye);
                traj.dy.push(ke);
                return Ok((traj, Stop::Event(i)));
            }
            s = s_new;
            y = y_new;
            k = k_new;
            g_prev = g_new;
            traj.s.push(s);
            traj.y.push(y);
            traj.dy.push(k);
            let fac = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = h_try * fac;
        }
        Err(Error::Ode {
            at: s,
            reason: "step budget exhausted".into(),
        })
    }

    /// Find the event abscissa inside an accepted step. A bracketing secant
    /// search in which every trial state comes from a genuine step off the
    /// left end point.
    #[allow(clippy::too_many_arguments)]
    fn locate<const N: usize, F>(
        &self,
        f: &mut F,
        ev: &Event<'_, N>,
        s0: f64,
        y0: &[f64; N],
        k0: &[f64; N],
        s1: f64,
        y1: &[f64; N],
        k1: &[f64; N],
    ) -> Result<(f64, [f64; N], [f64; N])>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let mut a = s0;
        let mut ga = (ev.g)(s0, y0);
        let mut b = s1;
        let mut gb = (ev.g)(s1, y1);
        let mut best = (s1, *y1, *k1);
        let tol = 1e-15 * (1.0 + s1.abs().max(s0.abs()));
        for it in 0..100 {
            if (b - a).abs() <= tol {
                break;
            }
            // Illinois-flavoured regula falsi, with bisection every third try
            let mut m = if it % 3 == 2 {
                0.5 * (a + b)
            } else {
                b - gb * (b - a) / (gb - ga)
            };
            if !(m > a.min(b) && m < a.max(b)) {
                m = 0.5 * (a + b);
            }
            let ym = if it < 3 {
                hermite(s0, s1, y0, y1, k0, k1, m)
            } else {
                self.step(f, s0, y0, k0, m - s0)?.0
            };
            let gm = (ev.g)(m, &ym);
            if gm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if (gm > 0.0) == (ga > 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
                gb = gm;
            }
        }
        let se = if ga.abs() < gb.abs() { a } else { b };
        if se != s0 {
            let (ye, _, _) = self.step(f, s0, y0, k0, se - s0)?;
            let ke = f(se, &ye)?;
            best = (se, ye, ke);
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let ode = Dopri5::with_rtol(1e-11);
        let (traj, stop) = ode
            .solve(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 2.0, &[])
            .unwrap();
        assert_eq!(stop, Stop::Reached);
        let (s, y) = traj.last();
        assert_eq!(s, 2.0);
        assert!((y[0] - 2f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_event() {
        // y = (cos s, -sin s); first falling zero of y0 at pi/2
        let ode = Dopri5::with_rtol(1e-12);
        let ev = Event::new(Crossing::Falling, |_, y: &[f64; 2]| y[0]);
        let (traj, stop) = ode
            .solve(
                |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
                0.0,
                [1.0, 0.0],
                10.0,
                &[ev],
            )
            .unwrap();
        assert_eq!(stop, Stop::Event(0));
        let (s, y) = traj.last();
        assert!((s - std::f64::consts::FRAC_PI_2).abs() < 1e-10, "{s}");
        assert!(y[0].abs() < 1e-10);
    }

    #[test]
    fn rising_event_ignores_falling_crossings() {
        let ode = Dopri5::with_rtol(1e-12);
        let ev = Event::new(Crossing::Rising, |_, y: &[f64; 2]| y[0]);
        let (traj, _) = ode
            .solve(
                |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
                0.0,
                [1.0, 0.0],
                10.0,
                &[ev],
            )
            .unwrap();
        assert!((traj.last().0 - 1.5 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn hermite_resampling() {
        let ode = Dopri5::with_rtol(1e-12);
        let (traj, _) = ode
            .solve(
                |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
                0.0,
                [0.0, 1.0],
                3.0,
                &[],
            )
            .unwrap();
        for &s in &[0.1, 0.77, 1.9, 2.95] {
            assert!((traj.at(s)[0] - f64::sin(s)).abs() < 1e-7);
        }
    }
}
