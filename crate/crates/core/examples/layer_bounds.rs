//! Bounds on the mollified cavity fields near the origin, and the collapse
//! of the centre for a kernel that vanishes there.
//!
//!     cargo run --release --example layer_bounds

use sliclab::cavitation3d::{center_collapse, shoot_profile, verify_layer_bounds};
use sliclab::constitutive::StoredEnergy3D;
use sliclab::mollify::{scale_ladder, Mollifier};

fn main() -> sliclab::Result<()> {
    let p = shoot_profile(&StoredEnergy3D::from_label("reciprocal", 3)?, 2.0)?;
    let ns = scale_ladder(4);

    let rep = verify_layer_bounds(&p, &Mollifier::from_label("bump")?, &ns, 2000, 7)?;
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "n", "bulk min", "core min", "c2", "|w_t|/r0"
    );
    for l in &rep.levels {
        println!(
            "{:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            l.n, l.bulk_v_min, l.core_v_min, l.c2, l.wt_ratio
        );
    }
    println!("layer assertions {:?}, pass {}", rep.layer_ok, rep.pass);

    let zc = Mollifier::from_label("bump_zero_center")?;
    let cc = center_collapse(&p, &zc, &ns, 1.0, 2.0)?;
    println!("\nsup of v near the centre with phi(0) = 0: {:?}", cc.sups);
    println!("ratio per doubling {:?}", cc.ratios);
    Ok(())
}
