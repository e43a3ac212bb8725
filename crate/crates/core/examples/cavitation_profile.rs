//! Shoot the self-similar cavitation profile and locate the smallest
//! stretch that still opens a cavity.
//!
//!     cargo run --release --example cavitation_profile -- [energy] [lambda]

use sliclab::cavitation3d::{critical_lambda, shoot_profile};
use sliclab::constitutive::StoredEnergy3D;

fn main() -> sliclab::Result<()> {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or_else(|| "reciprocal".into());
    let lambda: f64 = args
        .next()
        .map_or(2.0, |a| a.parse().expect("numeric lambda"));
    let energy = StoredEnergy3D::from_label(&label, 3)?;

    let p = shoot_profile(&energy, lambda)?;
    println!(
        "{label}, lambda {lambda}: r0 {:.10} sigma {:.10} r'(sigma-) {:.10}",
        p.r0, p.sigma, p.rp_minus
    );
    let report = p.check(1000);
    println!("invariants hold: {}", report.all_hold());

    println!("\n{:>10} {:>12} {:>12} {:>12}", "s", "r", "r'", "v");
    for [s, r, rp, v] in p.table(11) {
        println!("{s:>10.5} {r:>12.6} {rp:>12.6} {v:>12.6}");
    }

    if label == "reciprocal" {
        let lc = critical_lambda(&energy, 1.5, lambda, 1e-4)?;
        println!("\ncavitation first appears near lambda = {lc:.4}");
    }
    Ok(())
}
