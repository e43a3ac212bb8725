use clap::{Parser, Subcommand};
use sliclab::runner::{
    emit_plot_data, resolve_out_dir, run_experiment, ExperimentConfig, Verdict, MANIFEST_NAME,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sliclab",
    version,
    about = "Mollified wave fans: residuals and energy audits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a TOML config
    Run {
        config: PathBuf,
        /// Output directory; overrides $SLICLAB_OUT and the config
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write plot-ready tables next to a run manifest
    Plotdata { manifest: PathBuf },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> sliclab::Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = resolve_out_dir(&cfg, out.as_deref());
            let m = run_experiment(&cfg, &dir)?;
            for c in &m.checks {
                let tag = match c.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "FAIL",
                    Verdict::Sentinel => "sentinel",
                };
                println!("{tag:>8}  {:<20} {}", c.name, c.detail);
            }
            println!("manifest: {}", dir.join(MANIFEST_NAME).display());
            Ok(if m.failed() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::Plotdata { manifest } => {
            for p in emit_plot_data(&manifest)? {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
