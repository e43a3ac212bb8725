//! Plot-ready tables derived from a run's artifacts.

use super::{fmt, ArtifactRole, RunManifest};
use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Times at which self-similar profiles are unfolded into y(x, t).
pub const PLOT_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| fmt(*x)))?;
    }
    w.flush()?;
    Ok(())
}

fn stem(p: &str) -> String {
    Path::new(p)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Writes next to the manifest:
///   plot_{profile}_t{t}.csv   x = t xi, y = t Y(xi) for each plot time
///   plot_{residual}.csv       n, |residual|, log10 n, log10 |residual|
///   plot_{energy}.csv         the energy table sorted by t
/// and returns the paths. Fails on a manifest without artifacts or when a
/// listed artifact is missing.
pub fn emit_plot_data(manifest_path: &Path) -> Result<Vec<PathBuf>> {
    let manifest = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    if manifest.artifacts.is_empty() {
        return Err(Error::Config(format!(
            "{} lists no artifacts",
            manifest_path.display()
        )));
    }
    let mut out = Vec::new();
    for a in &manifest.artifacts {
        let src = dir.join(&a.path);
        if !src.exists() {
            return Err(Error::MissingArtifact(src));
        }
        let name = stem(&a.path);
        match a.role {
            ArtifactRole::Profile => {
                let (header, rows) = read_table(&src)?;
                for t in PLOT_TIMES {
                    let xy: Vec<Vec<f64>> = rows.iter().map(|r| vec![t * r[0], t * r[1]]).collect();
                    let p = dir.join(format!("plot_{name}_t{t}.csv"));
                    write_table(&p, &["x", &header[1]], &xy)?;
                    out.push(p);
                }
            }
            ArtifactRole::Residual => {
                let (_, rows) = read_table(&src)?;
                let tab: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| {
                        let a = r[1].abs();
                        vec![r[0], a, r[0].log10(), a.log10()]
                    })
                    .collect();
                let p = dir.join(format!("plot_{name}.csv"));
                write_table(
                    &p,
                    &["n", "abs_residual", "log10_n", "log10_abs_residual"],
                    &tab,
                )?;
                out.push(p);
            }
            ArtifactRole::EnergyVsT => {
                let (header, mut rows) = read_table(&src)?;
                let ti = header
                    .iter()
                    .position(|h| h == "t")
                    .ok_or_else(|| Error::Config(format!("{} has no t column", src.display())))?;
                rows.sort_by(|a, b| a[ti].total_cmp(&b[ti]).then(a[0].total_cmp(&b[0])));
                let p = dir.join(format!("plot_{name}.csv"));
                let h: Vec<&str> = header.iter().map(String::as_str).collect();
                write_table(&p, &h, &rows)?;
                out.push(p);
            }
            ArtifactRole::Table | ArtifactRole::Json => {}
        }
    }
    Ok(out)
}
