use super::{fmt, ArtifactRole, Check, ExperimentConfig, Run};
use crate::error::Result;
use crate::mollify::Mollifier;
use crate::vacuum1d::{
    check_vacuum_bounds, first_equation_defect, make_vacuum_fan, vacuum_energy, vacuum_residual,
};
use crate::weakform::Bump1;
use rayon::prelude::*;

/// The first equation holds exactly at every n, up to quadrature.
const FIRST_EQ_TOL: f64 = 1e-10;

pub(crate) fn run(cfg: &ExperimentConfig, run: &mut Run) -> Result<()> {
    let m = &cfg.model;
    let fan = make_vacuum_fan(
        m.u_bar.unwrap_or_default(),
        m.v_bar.unwrap_or_default(),
        m.gamma.unwrap_or_default(),
    )?;
    let phi = Mollifier::from_label(&cfg.kernel)?;
    let tol = cfg.tol();

    fan.write_profile_csv(
        &run.artifact("fan_profile.csv", ArtifactRole::Profile),
        401,
        1.5 * fan.xi_f,
    )?;
    run.json("fan.json", &fan)?;
    let f = fan.xi_f;
    let edge = (fan.displacement(f * (1.0 - 1e-15)) - fan.displacement(f * (1.0 + 1e-15))).abs()
        + (fan.velocity(f * (1.0 - 1e-15)) - fan.v_bar).abs();
    run.push(Check::below("fan_edges", edge, tol.closed_form));

    let psis = cfg
        .tests
        .iter()
        .map(|s| Bump1::new(s.center[0], s.half[0]))
        .collect::<Result<Vec<_>>>()?;
    for (k, psi) in psis.iter().enumerate() {
        let rep = vacuum_residual(&fan, &phi, &cfg.scales, psi, tol.residual)?;
        rep.write_csv(&run.artifact(&format!("residual_{k}.csv"), ArtifactRole::Residual))?;
        let lim = rep.estimate.limit;
        run.push(
            Check::new(
                format!("residual_{k}"),
                rep.pass,
                format!("|limit {lim:e}| <= {:e}", tol.residual),
            )
            .with_value(lim),
        );
    }

    let jobs: Vec<(f64, &Bump1)> = cfg
        .scales
        .iter()
        .flat_map(|&n| psis.iter().map(move |p| (n, p)))
        .collect();
    let worst = jobs
        .par_iter()
        .map(|&(n, p)| first_equation_defect(&fan, &phi, n, p).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    run.push(Check::below("first_equation", worst, FIRST_EQ_TOL));

    let en = vacuum_energy(&fan, &phi, fan.xi_f, &cfg.scales)?;
    run.json("energy.json", &en)?;
    run.push(Check::near("energy", en.limit, en.closed_form, tol.energy));
    // the fan energy over |x| < xi_F t grows linearly in t
    let mut w = csv::Writer::from_path(run.artifact("energy_vs_t.csv", ArtifactRole::EnergyVsT))?;
    w.write_record(["t", "numeric", "closed_form"])?;
    for i in 1..=20 {
        let t = 0.1 * i as f64;
        w.write_record([t, t * en.limit, t * en.closed_form].map(fmt))?;
    }
    w.flush()?;

    let b = check_vacuum_bounds(&fan, &phi, &cfg.scales, tol.samples, cfg.seed)?;
    run.json("bounds.json", &b)?;
    run.push(Check::new(
        "bounds",
        b.pass,
        format!(
            "u_min {:e} >= {:e}, |v| max {:e} <= {:e}",
            b.u_min, b.u_floor, b.v_abs_max, b.v_cap
        ),
    ));
    Ok(())
}
