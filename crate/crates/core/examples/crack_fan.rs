//! Solve the crack fan for both stress laws and print its profile at t = 1.
//!
//!     cargo run --example crack_fan -- [lambda] [alpha]

use sliclab::crack1d::CrackFan;

fn main() -> sliclab::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("numeric argument"));
    let lambda = args.next().unwrap_or(4.0);
    let alpha = args.next().unwrap_or(2.0);

    for law in ["saturating", "nonsaturating"] {
        let fan = CrackFan::from_labels(law, lambda, alpha)?;
        let (mu_plus, mu_minus) = fan.dissipation();
        println!("{law}: sigma {:.10} Y0 {:.10}", fan.sigma, fan.y0);
        println!(
            "  wave speeds {:.6} > {:.6} > {:.6}",
            fan.inner_speed, fan.sigma, fan.outer_speed
        );
        println!("  shock dissipation {mu_plus:.7} {mu_minus:.7}");
        println!(
            "  crack cost {:?}, total rate {:?}",
            fan.crack_cost_limit(),
            fan.total_rate_closed_form()
        );
    }

    let fan = CrackFan::from_labels("saturating", lambda, alpha)?;
    println!("\n{:>10} {:>12} {:>12} {:>12}", "xi", "y", "u", "v");
    for row in fan.profile_rows(13, 2.0 * fan.sigma) {
        println!(
            "{:>10.5} {:>12.6} {:>12.6} {:>12.6}",
            row.xi, row.y, row.u_bar, row.v_bar
        );
    }
    Ok(())
}
