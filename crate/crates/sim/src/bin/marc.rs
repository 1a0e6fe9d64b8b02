use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use marc_sim::figures::{self, FigureName};
use marc_sim::output::{self, Manifest, RunRecord};
use marc_sim::{engine, validate, SweepConfig};

/// Monte Carlo and bound evaluation for the multiple-access relay channel.
#[derive(Parser)]
#[command(name = "marc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every SNR point of a config and emit a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Write `<label>.csv` and `manifest.toml` here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the analytic bound on the config grid.
    Bound {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a figure preset (fig3..fig7).
    Figure {
        name: FigureName,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the built-in oracle checks and print a pass/fail table.
    Validate,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION: u8 = 2;

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn emit(
    cfg: &SweepConfig,
    kind: &str,
    label: &str,
    csv: String,
    out: Option<&Path>,
    capped: &[marc_sim::BerPoint],
) -> ExitCode {
    let Some(dir) = out else {
        print!("{csv}");
        return ExitCode::SUCCESS;
    };
    let mut manifest = Manifest::new(kind, cfg.seed);
    manifest.note_capped(capped);
    manifest.runs.push(RunRecord { label: label.to_owned(), kind: kind.to_owned(), config: cfg.clone() });
    let written = std::fs::create_dir_all(dir)
        .and_then(|_| output::write_artifact(dir, &format!("{label}.csv"), &csv, &mut manifest))
        .and_then(|_| output::write_manifest(dir, &manifest));
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(format!("cannot write {}: {e}", dir.display())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Sweep { config, out } => {
            let cfg = match SweepConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match engine::run_sweep(&cfg) {
                Ok(points) => {
                    for p in points.iter().filter(|p| p.capped) {
                        eprintln!(
                            "note: {} at {} dB stopped at the frame cap with {} errors",
                            p.scheme, p.snr_db, p.bit_errors
                        );
                    }
                    let label = cfg.label();
                    emit(&cfg, "sweep", &label, output::sweep_csv(&label, &points), out.as_deref(), &points)
                }
                Err(e) => fail(e),
            }
        }
        Command::Bound { config, out } => {
            let cfg = match SweepConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match engine::run_bound(&cfg) {
                Ok(points) => {
                    let label = format!("{}-bound", cfg.label());
                    emit(&cfg, "bound", &label, output::bound_csv(&label, &points), out.as_deref(), &[])
                }
                Err(e) => fail(e),
            }
        }
        Command::Figure { name, out, seed, workers } => match figures::run_figure(name, &out, seed, workers) {
            Ok(m) => {
                for a in &m.artifacts {
                    println!("{}  {}", a.sha256, out.join(&a.file).display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Validate => {
            let checks = validate::run_checks();
            print!("{}", validate::format_table(&checks));
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            }
        }
    }
}
