//! Weak residual of the mollified cavitating motion against psi = zeta(t) x.
//! Sublinear h' gives residuals that vanish along n; when h'(v^d)/v -> A > 0
//! the boundary layer leaves a positive limit that can be predicted.

use super::fields::MollifiedCavity;
use super::profile::SimilarityProfile;
use crate::constitutive::omega;
use crate::error::Result;
use crate::mollify::Mollifier;
use crate::quadrature::Quad;
use crate::weakform::{
    pair_residual_radial, Bump1, Expectation, PairingQuad, RadialTest, ResidualReport,
};
use rayon::prelude::*;

/// Tolerances sized for residuals of order one.
pub fn radial_quad() -> PairingQuad {
    PairingQuad {
        outer: Quad::with_tol(1e-9, 1e-9),
        inner: Quad::with_tol(1e-10, 1e-10),
    }
}

/// psi = zeta(t) x inside |x| < inner, cut off smoothly by |x| = outer.
pub fn zeta_test(t_center: f64, t_half: f64, inner: f64, outer: f64) -> Result<RadialTest> {
    RadialTest::new(Bump1::new(t_center, t_half)?, inner, outer)
}

/// The default family member: zeta centred at t = 1 with half-width 1/2.
pub fn default_test() -> RadialTest {
    zeta_test(1.0, 0.5, 1.0, 2.0).expect("valid test")
}

/// <f^n, psi> for the motion mollified at scale n. Kernels with phi(0) = 0
/// are refused: the construction relies on the kernel seeing the cavity.
pub fn cavity_residual(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    n: f64,
    psi: &RadialTest,
    q: &PairingQuad,
) -> Result<f64> {
    phi.require_positive_center()?;
    let m = MollifiedCavity::new(profile, phi, n);
    pair_residual_radial(&m, &profile.energy, psi, q)
}

/// Residuals over a ladder of scales, extrapolated.
pub fn residual_ladder(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    ns: &[f64],
    psi: &RadialTest,
    expectation: Expectation,
) -> Result<ResidualReport> {
    phi.require_positive_center()?;
    let q = radial_quad();
    let values = ns
        .par_iter()
        .map(|&n| cavity_residual(profile, phi, n, psi, &q))
        .collect::<Result<Vec<_>>>()?;
    ResidualReport::new(
        format!("cavity_{}_{}", profile.energy.label(), phi.label()),
        ns.to_vec(),
        values,
        expectation,
    )
}

/// K_phi = int_0^1 [Phi^(d-1) + (d-1) rho phi Phi^(d-2)] (phi Phi^(d-1) rho^(1-d))^(1/d) drho
/// with Phi(rho) = int_0^rho phi: the layer integral of the stress excess
/// A (lam1 lam2^(d-1))^(1/d) weighted by the two stress components.
pub fn layer_constant(phi: &Mollifier, d: usize) -> Result<f64> {
    let k = d as i32;
    let df = d as f64;
    Quad::with_tol(1e-12, 1e-12).integrate(
        |rho| {
            let f = phi.phi(rho);
            let big = phi.primitive(rho);
            let v = f * big.powi(k - 1) / rho.powi(k - 1);
            (big.powi(k - 1) + (df - 1.0) * rho * f * big.powi(k - 2)) * v.max(0.0).powf(1.0 / df)
        },
        0.0,
        1.0,
        &[0.5],
    )
}

/// Predicted limit omega_d A (2 r0)^d K_phi int zeta(t) t^d dt; zero for
/// sublinear energies.
pub fn predicted_limit(
    profile: &SimilarityProfile,
    phi: &Mollifier,
    psi: &RadialTest,
) -> Result<f64> {
    let a = profile.energy.cavity_slope;
    if a == 0.0 {
        return Ok(0.0);
    }
    let d = profile.d;
    let (t0, t1) = psi.zeta.support();
    let zt = Quad::with_tol(1e-13, 1e-13).integrate(
        |t| psi.zeta.value(t) * t.powi(d as i32),
        t0,
        t1,
        &[],
    )?;
    let k = layer_constant(phi, d)?;
    Ok(omega(d) * a * (2.0 * profile.r0).powi(d as i32) * zt * k)
}
