//! Delta shock and vacuum fan of the p-system; residuals and energy of the
//! mollified motion.
//!
//!     cargo run --release --example vacuum_fan -- [u_bar] [v_bar] [gamma]

use sliclab::mollify::{scale_ladder, Mollifier};
use sliclab::vacuum1d::{make_vacuum_fan, vacuum_energy, vacuum_residual};
use sliclab::weakform::Bump1;

fn main() -> sliclab::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("numeric argument"));
    let u_bar = args.next().unwrap_or(1.0);
    let v_bar = args.next().unwrap_or(4.0);
    let gamma = args.next().unwrap_or(2.0);

    let fan = make_vacuum_fan(u_bar, v_bar, gamma)?;
    let phi = Mollifier::from_label("bump")?;
    let ns = scale_ladder(7)[2..].to_vec();
    println!(
        "w {} xi_F {} delta mass {}",
        fan.w, fan.xi_f, fan.delta_mass
    );

    for (c, h) in [(0.0, 0.9), (0.5, 0.4)] {
        let rep = vacuum_residual(&fan, &phi, &ns, &Bump1::new(c, h)?, 1e-4)?;
        println!(
            "residual on ({c}, {h}): values {:?} -> {:.2e}",
            rep.values, rep.estimate.limit
        );
    }
    let en = vacuum_energy(&fan, &phi, fan.xi_f, &ns)?;
    println!(
        "energy on |xi| < xi_F: {:.9} (closed {:.9})",
        en.limit, en.closed_form
    );
    Ok(())
}
