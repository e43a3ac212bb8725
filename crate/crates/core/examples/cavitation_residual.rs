//! Residual of the mollified cavitating motion: it vanishes for sublinear
//! stored energies and tends to a positive constant for the power energy.
//!
//!     cargo run --release --example cavitation_residual

use sliclab::cavitation3d::{default_test, predicted_limit, residual_ladder, shoot_profile};
use sliclab::constitutive::StoredEnergy3D;
use sliclab::mollify::{scale_ladder, Mollifier};
use sliclab::weakform::Expectation;

fn main() -> sliclab::Result<()> {
    let phi = Mollifier::from_label("bump")?;
    let psi = default_test();
    let ns = scale_ladder(4);
    for label in ["reciprocal", "power"] {
        let p = shoot_profile(&StoredEnergy3D::from_label(label, 3)?, 2.0)?;
        let predicted = predicted_limit(&p, &phi, &psi)?;
        let expect = if predicted == 0.0 {
            Expectation::Near {
                target: 0.0,
                tol: 1e-2,
            }
        } else {
            Expectation::Positive {
                floor: 0.5 * predicted,
            }
        };
        let rep = residual_ladder(&p, &phi, &ns, &psi, expect)?;
        println!("{label}: predicted limit {predicted:.4}");
        for (n, v) in rep.ns.iter().zip(&rep.values) {
            println!("  n {n:>4}  residual {v:>12.6}");
        }
        println!(
            "  extrapolated {:.6} (rate {:.2}), pass {}",
            rep.estimate.limit, rep.estimate.rate, rep.pass
        );
    }
    Ok(())
}
