//! Figure presets: each is a list of simulated and bound curves.

use std::path::Path;

use crate::config::{SchemeName, SweepConfig, Urc};
use crate::engine::{self, SimError};
use crate::output::{self, Manifest, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureName {
    /// Uncoded, ideal URC: relay scheme (simulation and bound), direct, Alamouti.
    Fig3,
    /// Coded, ideal URC: relay scheme (simulation and bound), direct, Alamouti.
    Fig4,
    /// Coded relay scheme over several URC qualities, simulation and bound.
    Fig5,
    /// Coded relay scheme over URC qualities against direct and Alamouti.
    Fig6,
    /// Three-user and two-user relay schemes against direct and Alamouti.
    Fig7,
}

impl std::str::FromStr for FigureName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            "fig6" => Ok(Self::Fig6),
            "fig7" => Ok(Self::Fig7),
            _ => Err(format!("unknown figure `{s}` (expected fig3..fig7)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Sim,
    Bound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub kind: CurveKind,
    pub config: SweepConfig,
}

/// URC offsets swept in the URC-quality figures.
pub const FIG5_URC: [Urc; 4] = [Urc::Ideal, Urc::OffsetDb(10.0), Urc::OffsetDb(3.0), Urc::OffsetDb(0.0)];
pub const FIG6_URC: [Urc; 3] = [Urc::Ideal, Urc::OffsetDb(3.0), Urc::OffsetDb(0.0)];

fn grid(hi: f64, step: f64) -> Vec<f64> {
    (0..).map(|i| i as f64 * step).take_while(|&v| v <= hi + 1e-9).collect()
}

fn base(scheme: SchemeName, coded: bool, urc: Urc, seed: u64, workers: usize) -> SweepConfig {
    let mut cfg = SweepConfig::new(scheme, if coded { grid(25.0, 2.5) } else { grid(40.0, 2.0) });
    cfg.coded = coded;
    cfg.urc_offset_db = urc;
    cfg.seed = seed;
    cfg.workers = workers;
    // the uncoded figure follows the bound's error-free cancellation
    cfg.genie_sic = !coded;
    cfg
}

fn sim(cfg: SweepConfig) -> Curve {
    let name = match cfg.scheme {
        SchemeName::Marc | SchemeName::Marc3 => format!("{}-sim", cfg.label()),
        _ => cfg.label(),
    };
    Curve { name, kind: CurveKind::Sim, config: cfg }
}

fn bound(cfg: SweepConfig) -> Curve {
    Curve { name: format!("{}-bound", cfg.label()), kind: CurveKind::Bound, config: cfg }
}

pub fn preset(name: FigureName, seed: u64, workers: usize) -> Vec<Curve> {
    let b = |scheme, coded, urc| base(scheme, coded, urc, seed, workers);
    let baselines =
        |coded| vec![sim(b(SchemeName::Direct, coded, Urc::Ideal)), sim(b(SchemeName::Alamouti, coded, Urc::Ideal))];
    let mut curves = Vec::new();
    match name {
        FigureName::Fig3 | FigureName::Fig4 => {
            let coded = name == FigureName::Fig4;
            curves.push(sim(b(SchemeName::Marc, coded, Urc::Ideal)));
            curves.push(bound(b(SchemeName::Marc, coded, Urc::Ideal)));
            curves.extend(baselines(coded));
        }
        FigureName::Fig5 => {
            for urc in FIG5_URC {
                curves.push(sim(b(SchemeName::Marc, true, urc)));
                curves.push(bound(b(SchemeName::Marc, true, urc)));
            }
        }
        FigureName::Fig6 => {
            for urc in FIG6_URC {
                curves.push(sim(b(SchemeName::Marc, true, urc)));
            }
            curves.extend(baselines(true));
        }
        FigureName::Fig7 => {
            curves.push(sim(b(SchemeName::Marc3, true, Urc::Ideal)));
            curves.push(sim(b(SchemeName::Marc, true, Urc::Ideal)));
            curves.extend(baselines(true));
        }
    }
    curves
}

/// Runs a preset and writes one CSV per curve plus `manifest.toml`.
pub fn run_figure(name: FigureName, dir: &Path, seed: u64, workers: usize) -> Result<Manifest, FigureError> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = Manifest::new(&format!("figure {name:?}").to_lowercase(), seed);
    for curve in preset(name, seed, workers) {
        let csv = match curve.kind {
            CurveKind::Sim => {
                let points = engine::run_sweep(&curve.config)?;
                manifest.note_capped(&points);
                output::sweep_csv(&curve.name, &points)
            }
            CurveKind::Bound => output::bound_csv(&curve.name, &engine::run_bound(&curve.config)?),
        };
        output::write_artifact(dir, &format!("{}.csv", curve.name), &csv, &mut manifest)?;
        let kind = if curve.kind == CurveKind::Sim { "sim" } else { "bound" };
        manifest.runs.push(RunRecord { label: curve.name, kind: kind.into(), config: curve.config });
    }
    output::write_manifest(dir, &manifest)?;
    Ok(manifest)
}

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}
