//! Energy of the cavitating motion: closed form against the limit of the
//! mollified energies, and the divergence witness when h grows superlinearly.
//!
//!     cargo run --release --example cavitation_energy

use sliclab::cavitation3d::{energy_fan_3d, energy_limit_numeric, shoot_profile, EnergyOutcome};
use sliclab::constitutive::StoredEnergy3D;
use sliclab::mollify::{scale_ladder, Mollifier};

fn main() -> sliclab::Result<()> {
    let phi = Mollifier::from_label("bump")?;
    let ns = scale_ladder(4);
    for label in ["reciprocal", "superlinear"] {
        let p = shoot_profile(&StoredEnergy3D::from_label(label, 3)?, 2.0)?;
        let b = p.sigma + 1.0;
        match energy_fan_3d(&p, &phi, 1.0, b, &ns)? {
            EnergyOutcome::Finite(a) => {
                let num = energy_limit_numeric(&p, &phi, 1.0, b, &ns)?;
                println!(
                    "{label}: closed {:.6}, mollified limit {:.6}",
                    a.e_total, num.total.limit
                );
                println!(
                    "  shock {:.6} cavity {:.6} excess {:.6}",
                    a.j, a.cavity_term, a.d_excess
                );
            }
            EnergyOutcome::Infinite(w) => {
                println!("{label}: energy is infinite");
                println!("  {w:?}");
            }
        }
    }
    Ok(())
}
