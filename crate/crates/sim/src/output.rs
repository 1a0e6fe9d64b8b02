//! CSV artifacts and the run manifest.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::SweepConfig;
use crate::engine::{BerPoint, BoundPoint};

pub const CSV_HEADER: &str = "scheme,snr_db,ebn0_db,frames,bits,bit_errors,ber,ci_low,ci_high,p0,p1,p2,p3";

fn states(out: &mut String, probs: Option<[f64; 4]>) {
    match probs {
        Some(p) => write!(out, ",{},{},{},{}", p[0], p[1], p[2], p[3]).unwrap(),
        None => out.push_str(",,,,"),
    }
}

/// Simulated points, one row each. Baselines leave the state columns empty.
pub fn sweep_csv(label: &str, points: &[BerPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        write!(
            out,
            "{label},{},{},{},{},{},{},{},{}",
            p.snr_db, p.ebn0_db, p.frames, p.bits, p.bit_errors, p.ber, p.ci_low, p.ci_high
        )
        .unwrap();
        states(&mut out, p.states);
        out.push('\n');
    }
    out
}

/// Bound points in the same layout: no frames, the bound in the `ber`
/// and interval columns, and the state probabilities it used.
pub fn bound_csv(label: &str, points: &[BoundPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        write!(out, "{label},{},{},0,0,0,{},{},{}", p.snr_db, p.ebn0_db, p.bound, p.bound, p.bound).unwrap();
        states(&mut out, Some(p.probs.as_array()));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub kind: String,
    pub config: SweepConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CappedPoint {
    pub label: String,
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
}

/// Everything needed to reproduce a set of artifacts.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub runs: Vec<RunRecord>,
    pub artifacts: Vec<ArtifactRecord>,
    /// Points that hit the frame cap before the error target.
    pub capped: Vec<CappedPoint>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed,
            runs: Vec::new(),
            artifacts: Vec::new(),
            capped: Vec::new(),
        }
    }

    pub fn note_capped(&mut self, points: &[BerPoint]) {
        self.capped.extend(points.iter().filter(|p| p.capped).map(|p| CappedPoint {
            label: p.scheme.clone(),
            snr_db: p.snr_db,
            frames: p.frames,
            bit_errors: p.bit_errors,
        }));
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }
}

/// Writes `name` under `dir` and records its hash.
pub fn write_artifact(dir: &Path, name: &str, contents: &str, manifest: &mut Manifest) -> io::Result<()> {
    std::fs::write(dir.join(name), contents)?;
    manifest.artifacts.push(ArtifactRecord { file: name.to_owned(), sha256: sha256_hex(contents.as_bytes()) });
    Ok(())
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> io::Result<()> {
    std::fs::write(dir.join("manifest.toml"), manifest.to_toml())
}

#[cfg(test)]
mod tests {
    use super::*;
    use marc_core::bounds::StateProbs;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn bound_rows_have_all_columns() {
        let csv = bound_csv("b", &[BoundPoint { snr_db: 1.0, ebn0_db: 4.0, bound: 0.1, probs: StateProbs::IDEAL }]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next().unwrap().split(',').count(), 13);
    }
}
