//! Sweep configuration: a flat TOML file.
//!
//! ```toml
//! scheme = "marc"          # marc | marc3 | direct | alamouti
//! coded = true
//! snr_grid_db = [0, 5, 10, 15, 20]
//! max_frames = 10000000
//! target_bit_errors = 200
//! k = 50
//! code = "5,7,7"
//! urc_offset_db = "ideal"  # or a number of dB
//! genie_sic = false
//! seed = 1
//! workers = 4
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use marc_core::channel::{LinkPowers, NoisePsd};
use marc_core::coding::ConvCode;
use marc_core::protocol::{Framing, RelayLink};
use marc_core::trial::{Scheme, TrialSpec};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Marc,
    Marc3,
    Direct,
    Alamouti,
}

impl SchemeName {
    pub fn scheme(self) -> Scheme {
        match self {
            SchemeName::Marc => Scheme::Marc { users: 2 },
            SchemeName::Marc3 => Scheme::Marc { users: 3 },
            SchemeName::Direct => Scheme::Direct,
            SchemeName::Alamouti => Scheme::Alamouti,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::Marc => "marc",
            SchemeName::Marc3 => "marc3",
            SchemeName::Direct => "direct",
            SchemeName::Alamouti => "alamouti",
        }
    }
}

/// User→relay link quality: error-free, or Rayleigh with mean power offset
/// (dB) relative to the destination links.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Urc {
    #[default]
    Ideal,
    OffsetDb(f64),
}

impl fmt::Display for Urc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Urc::Ideal => f.write_str("ideal"),
            Urc::OffsetDb(db) => write!(f, "{db:+} dB"),
        }
    }
}

impl Serialize for Urc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Urc::Ideal => s.serialize_str("ideal"),
            Urc::OffsetDb(db) => s.serialize_f64(*db),
        }
    }
}

impl<'de> Deserialize<'de> for Urc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Urc;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"ideal\" or an offset in dB")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Urc, E> {
                if v == "ideal" {
                    Ok(Urc::Ideal)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Urc, E> {
                Ok(Urc::OffsetDb(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Urc, E> {
                Ok(Urc::OffsetDb(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Urc, E> {
                Ok(Urc::OffsetDb(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

fn default_max_frames() -> u64 {
    10_000_000
}
fn default_target() -> u64 {
    200
}
fn default_k() -> usize {
    50
}
fn default_code() -> String {
    "5,7,7".into()
}
fn default_workers() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_calibration() -> u64 {
    200_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scheme: SchemeName,
    #[serde(default)]
    pub coded: bool,
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_target")]
    pub target_bit_errors: u64,
    /// Information bits per block.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Octal generators, comma separated.
    #[serde(default = "default_code")]
    pub code: String,
    #[serde(default)]
    pub urc_offset_db: Urc,
    #[serde(default)]
    pub genie_sic: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Bias destination-link fades towards outage at high SNR.
    #[serde(default = "default_true")]
    pub importance_sampling: bool,
    /// Relay decoding trials per SNR point when the bound needs estimated
    /// state probabilities.
    #[serde(default = "default_calibration")]
    pub calibration_frames: u64,
}

/// Fade-bias margin: the biased mixture component is centred on a link
/// SNR of this value.
pub const IS_MARGIN: f64 = 2.0;

impl SweepConfig {
    /// Config with defaults for everything but scheme and grid.
    pub fn new(scheme: SchemeName, snr_grid_db: Vec<f64>) -> Self {
        Self {
            scheme,
            coded: false,
            snr_grid_db,
            max_frames: default_max_frames(),
            target_bit_errors: default_target(),
            k: default_k(),
            code: default_code(),
            urc_offset_db: Urc::Ideal,
            genie_sic: false,
            seed: 0,
            workers: default_workers(),
            importance_sampling: true,
            calibration_frames: default_calibration(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.snr_grid_db.is_empty() {
            return Err(field("snr_grid_db", "must not be empty"));
        }
        if let Some(bad) = self.snr_grid_db.iter().find(|v| !v.is_finite()) {
            return Err(field("snr_grid_db", format!("non-finite entry {bad}")));
        }
        if self.max_frames == 0 {
            return Err(field("max_frames", "must be positive"));
        }
        if self.target_bit_errors == 0 {
            return Err(field("target_bit_errors", "must be positive"));
        }
        if self.k == 0 || self.k > 1 << 20 {
            return Err(field("k", "must lie in 1..=1048576"));
        }
        if self.coded {
            ConvCode::from_octal_str(&self.code).map_err(|e| field("code", e.to_string()))?;
        }
        if let Urc::OffsetDb(db) = self.urc_offset_db {
            if !db.is_finite() || db.abs() > 100.0 {
                return Err(field("urc_offset_db", "offset must be finite and within ±100 dB"));
            }
        }
        if self.workers == 0 || self.workers > 1024 {
            return Err(field("workers", "must lie in 1..=1024"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(field("seed", "must fit in a signed 64-bit integer"));
        }
        if self.calibration_frames == 0 {
            return Err(field("calibration_frames", "must be positive"));
        }
        Ok(())
    }

    pub fn framing(&self) -> Framing {
        if self.coded {
            Framing::Coded { info_bits: self.k, code: ConvCode::from_octal_str(&self.code).expect("validated") }
        } else {
            Framing::Uncoded { info_bits: self.k }
        }
    }

    pub fn powers(&self) -> LinkPowers {
        match self.urc_offset_db {
            Urc::Ideal => LinkPowers::new(1.0, 1.0),
            Urc::OffsetDb(db) => LinkPowers::with_urc_offset_db(1.0, db),
        }
        .expect("validated")
    }

    pub fn relay_link(&self) -> RelayLink {
        match self.urc_offset_db {
            Urc::Ideal => RelayLink::Ideal,
            Urc::OffsetDb(_) => RelayLink::Fading,
        }
    }

    /// Trial parameters at one grid point (`P = 1`).
    pub fn trial_spec(&self, snr_db: f64) -> TrialSpec {
        let p = 1.0;
        let powers = self.powers();
        let mean_link_snr = 10f64.powf(snr_db / 10.0) * powers.omega_to_d;
        let bias = (self.importance_sampling && mean_link_snr > IS_MARGIN)
            .then(|| marc_core::channel::FadingBias::for_link_snr(mean_link_snr, IS_MARGIN));
        TrialSpec {
            scheme: self.scheme.scheme(),
            framing: self.framing(),
            powers,
            relay_link: self.relay_link(),
            p,
            n0: NoisePsd::from_snr_db(snr_db, p).expect("finite SNR"),
            genie_sic: self.genie_sic,
            bias,
        }
    }

    /// Curve label: `direct-coded`, `marc-uncoded`, `marc-coded-urc+3dB`.
    pub fn label(&self) -> String {
        let coding = if self.coded { "coded" } else { "uncoded" };
        match (self.scheme, self.urc_offset_db) {
            (SchemeName::Marc | SchemeName::Marc3, Urc::OffsetDb(db)) => {
                format!("{}-{}-urc{:+}dB", self.scheme.as_str(), coding, db)
            }
            _ => format!("{}-{}", self.scheme.as_str(), coding),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [0, 10]\n").unwrap();
        assert_eq!(cfg.k, 50);
        assert_eq!(cfg.urc_offset_db, Urc::Ideal);
        assert_eq!(cfg.target_bit_errors, 200);
        assert_eq!(cfg.max_frames, 10_000_000);
    }

    #[test]
    fn urc_forms() {
        let a = SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [0]\nurc_offset_db = 3\n").unwrap();
        assert_eq!(a.urc_offset_db, Urc::OffsetDb(3.0));
        let b = SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [0]\nurc_offset_db = -1.5\n").unwrap();
        assert_eq!(b.urc_offset_db, Urc::OffsetDb(-1.5));
        assert!(SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [0]\nurc_offset_db = \"good\"\n").is_err());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [0]\nsnr_step = 2\n").unwrap_err();
        assert!(err.to_string().contains("snr_step"), "{err}");
    }

    #[test]
    fn field_errors() {
        let err = SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = []\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { field: "snr_grid_db", .. }));
        let err =
            SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [1]\ncoded = true\ncode = \"0,7\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { field: "code", .. }));
        let err = SweepConfig::parse("scheme = \"marc\"\nsnr_grid_db = [1]\nworkers = 0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { field: "workers", .. }));
    }

    #[test]
    fn round_trip() {
        let mut cfg = SweepConfig::new(SchemeName::Marc3, vec![0.0, 2.5]);
        cfg.urc_offset_db = Urc::OffsetDb(3.0);
        cfg.coded = true;
        assert_eq!(SweepConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(cfg.label(), "marc3-coded-urc+3dB");
        assert_eq!(SweepConfig::new(SchemeName::Marc, vec![0.0]).label(), "marc-uncoded");
    }
}
