//! Energy audit of the mollified crack fan: shock dissipation, crack cost and
//! the numerically differentiated energy along a scale ladder.
//!
//!     cargo run --release --example crack_energy

use sliclab::crack1d::{energy_audit, energy_rate_numeric, CrackFan};
use sliclab::mollify::{scale_ladder, Mollifier};

fn main() -> sliclab::Result<()> {
    let fan = CrackFan::from_labels("saturating", 4.0, 2.0)?;
    let phi = Mollifier::from_label("bump")?;
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "n", "pc_n", "rate", "closed", "transient"
    );
    for n in scale_ladder(5) {
        let audit = energy_audit(&fan, &phi, n, 1.0, 32)?;
        let rate = energy_rate_numeric(&fan, &phi, n, 1.0)?;
        println!(
            "{n:>6} {:>12.8} {:>12.8} {:>12.8} {:>12.3e}",
            audit.pc_n,
            rate,
            audit.total_rate_closed.unwrap_or(f64::NAN),
            audit.en_transient_bound
        );
    }
    Ok(())
}
