//! Monte Carlo sweeps and bound curves.
//!
//! Frames are grouped into batches of [`BATCH_FRAMES`] and batches into
//! rounds. A round runs its batches in parallel, collects them in batch order
//! and folds them into the running sums before the stop rule is checked, so
//! the result does not depend on the number of workers.

use marc_core::bounds::{self, BoundInputs, CodedParams, StateProbs};
use marc_core::channel::NoisePsd;
use marc_core::protocol;
use marc_core::rng::StreamKey;
use marc_core::trial::{self, Scheme};
use rayon::prelude::*;

use crate::config::{ConfigError, SchemeName, SweepConfig, Urc};
use crate::stats::Accumulator;

pub const BATCH_FRAMES: u64 = 256;
pub const ROUND_BATCHES: u64 = 32;

/// Stream point offset for relay calibration draws.
const CALIBRATION_POINT: u64 = 1 << 32;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Core(#[from] marc_core::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Result of one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct BerPoint {
    pub scheme: String,
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub states: Option<[f64; 4]>,
    pub user_ber: Vec<f64>,
    pub equivalent_errors: f64,
    /// The frame cap ended the point before the error target was met.
    pub capped: bool,
    /// Relay decoding masks per frame, for state-probability analysis.
    pub mask_counts: Vec<u64>,
}

impl BerPoint {
    /// Standard error of `ber`.
    pub fn sigma(&self) -> f64 {
        if self.equivalent_errors > 0.0 {
            self.ber / self.equivalent_errors.sqrt()
        } else {
            f64::INFINITY
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, SimError> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

/// Runs every grid point of the config.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<BerPoint>, SimError> {
    cfg.validate()?;
    pool(cfg.workers)?
        .install(|| cfg.snr_grid_db.iter().enumerate().map(|(i, &snr)| run_point(cfg, i as u64, snr)).collect())
}

/// Runs one grid point on the current rayon pool.
pub fn run_point(cfg: &SweepConfig, point: u64, snr_db: f64) -> Result<BerPoint, SimError> {
    let spec = cfg.trial_spec(snr_db);
    spec.validate()?;
    let users = spec.scheme.users();
    let relay = matches!(spec.scheme, Scheme::Marc { .. });
    let base = StreamKey::new(cfg.seed).with_point(point);
    let target = cfg.target_bit_errors;

    let mut acc = Accumulator::new(users, relay);
    let mut next = 0;
    while next < cfg.max_frames && !acc.satisfied(target) {
        let end = (next + BATCH_FRAMES * ROUND_BATCHES).min(cfg.max_frames);
        let starts: Vec<u64> = (next..end).step_by(BATCH_FRAMES as usize).collect();
        let parts: Vec<Result<Accumulator, marc_core::Error>> = starts
            .par_iter()
            .map(|&s| {
                let mut part = Accumulator::new(users, relay);
                for f in s..(s + BATCH_FRAMES).min(end) {
                    part.push(&trial::run_trial(&spec, base.with_frame(f))?);
                }
                Ok(part)
            })
            .collect();
        for part in parts {
            acc.merge(&part?);
        }
        next = end;
    }

    let (ci_low, ci_high) = acc.interval();
    let info_bits = (users * cfg.k) as f64;
    let eb = acc.energy / acc.frames as f64 / info_bits;
    Ok(BerPoint {
        scheme: cfg.label(),
        snr_db,
        ebn0_db: 10.0 * (eb / spec.n0.value()).log10(),
        frames: acc.frames,
        bits: acc.bits,
        bit_errors: acc.bit_errors,
        ber: acc.ber(),
        ci_low,
        ci_high,
        states: acc.state_histogram(),
        user_ber: acc.user_ber(cfg.k as u64),
        equivalent_errors: acc.equivalent_errors(),
        capped: !acc.satisfied(target),
        mask_counts: acc.mask_counts.clone(),
    })
}

/// Fraction of user→relay blocks the relay fails to decode at `snr_db`,
/// from `cfg.calibration_frames` independent trials.
pub fn relay_failure_rate(cfg: &SweepConfig, point: u64, snr_db: f64) -> Result<f64, SimError> {
    let framing = cfg.framing();
    let omega_r = cfg.powers().omega_to_r;
    let n0 = NoisePsd::from_snr_db(snr_db, 1.0).map_err(marc_core::Error::from)?;
    let base = StreamKey::new(cfg.seed).with_point(CALIBRATION_POINT + point);
    let n = cfg.calibration_frames;
    let starts: Vec<u64> = (0..n).step_by(BATCH_FRAMES as usize).collect();
    let counts: Vec<Result<u64, marc_core::Error>> = starts
        .par_iter()
        .map(|&s| {
            let mut fails = 0;
            for f in s..(s + BATCH_FRAMES).min(n) {
                fails += protocol::relay_failure_trial(&framing, omega_r, 1.0, n0, base.with_frame(f))? as u64;
            }
            Ok(fails)
        })
        .collect();
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(total as f64 / n as f64)
}

/// One point of a bound curve.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundPoint {
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub bound: f64,
    pub probs: StateProbs,
}

/// Expected transmit energy per information bit over `N0`, given the relay
/// state probabilities (two users, `P = 1`).
fn bound_ebn0_db(cfg: &SweepConfig, probs: &StateProbs, snr_db: f64) -> f64 {
    let block = cfg.framing().block_len() as f64;
    let relay = block * (probs.p1 + probs.p2) + 2.0 * block * probs.p3;
    let eb = (2.0 * block + relay) / (2.0 * cfg.k as f64);
    snr_db + 10.0 * eb.log10()
}

/// Evaluates the uncoded or coded bound on the config grid. With a fading
/// user→relay link the state probabilities come from a calibration run.
pub fn run_bound(cfg: &SweepConfig) -> Result<Vec<BoundPoint>, SimError> {
    cfg.validate()?;
    if cfg.scheme != SchemeName::Marc {
        return Err(ConfigError::Field {
            field: "scheme",
            message: "bounds exist for the two-user relay scheme only".into(),
        }
        .into());
    }
    let framing = cfg.framing();
    let coded = framing.code().map(|code| CodedParams {
        rate: code.rate(),
        d_free: code.d_free(),
        b_dfree: code.b_dfree(),
        k: cfg.k,
    });
    let lambda = 1.0 / cfg.powers().omega_to_d;
    pool(cfg.workers)?.install(|| {
        cfg.snr_grid_db
            .iter()
            .enumerate()
            .map(|(i, &snr_db)| {
                let probs = match cfg.urc_offset_db {
                    Urc::Ideal => StateProbs::IDEAL,
                    Urc::OffsetDb(_) => {
                        let p = relay_failure_rate(cfg, i as u64, snr_db)?;
                        bounds::state_probs(p, p).map_err(marc_core::Error::from)?
                    }
                };
                let snr0 = 10f64.powf(snr_db / 10.0);
                let inputs = BoundInputs::new(snr0, lambda, probs).map_err(marc_core::Error::from)?;
                let bound = match coded {
                    None => bounds::theorem1_bound(&inputs),
                    Some(c) => bounds::theorem2_bound(&inputs.with_code(c))?,
                };
                Ok(BoundPoint { snr_db, ebn0_db: bound_ebn0_db(cfg, &probs, snr_db), bound, probs })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_flags_point() {
        let mut cfg = SweepConfig::new(SchemeName::Direct, vec![30.0]);
        cfg.max_frames = 10;
        cfg.importance_sampling = false;
        let p = &run_sweep(&cfg).unwrap()[0];
        assert_eq!(p.frames, 10);
        assert!(p.capped);
        assert!(p.states.is_none());
    }

    #[test]
    fn ideal_bound_uses_full_cooperation() {
        let cfg = SweepConfig::new(SchemeName::Marc, vec![0.0, 10.0, 20.0]);
        let b = run_bound(&cfg).unwrap();
        assert!(b.iter().all(|p| p.probs == StateProbs::IDEAL));
        assert!(b.windows(2).all(|w| w[1].bound < w[0].bound));
        // uncoded, ideal relay: Eb = 4 block P / (2k) = 2P
        assert!((b[0].ebn0_db - 10.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn bound_rejects_baselines() {
        let cfg = SweepConfig::new(SchemeName::Alamouti, vec![0.0]);
        assert!(matches!(run_bound(&cfg), Err(SimError::Config(ConfigError::Field { field: "scheme", .. }))));
    }
}
