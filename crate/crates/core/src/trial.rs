//! Scheme dispatch: one call per simulated frame, reduced to error counts.

use alloc::vec::Vec;

use crate::baselines;
use crate::channel::{FadingBias, LinkPowers, NoisePsd};
use crate::detector;
use crate::error::{Error, Result};
use crate::protocol::{self, FrameConfig, Framing, RelayLink};
use crate::rng::StreamKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Relay with analogue network coding and nulling/SIC detection.
    Marc { users: usize },
    /// Single link from one user to the destination.
    Direct,
    /// 2×1 Alamouti.
    Alamouti,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Marc { .. } => "marc",
            Scheme::Direct => "direct",
            Scheme::Alamouti => "alamouti",
        }
    }

    /// Users whose bits are counted per frame.
    pub fn users(&self) -> usize {
        match self {
            Scheme::Marc { users } => *users,
            _ => 1,
        }
    }
}

/// Everything needed to run frames at one operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSpec {
    pub scheme: Scheme,
    pub framing: Framing,
    pub powers: LinkPowers,
    pub relay_link: RelayLink,
    pub p: f64,
    pub n0: NoisePsd,
    /// Subtract the transmitted blocks in SIC instead of the decisions.
    pub genie_sic: bool,
    pub bias: Option<FadingBias>,
}

impl TrialSpec {
    pub fn validate(&self) -> Result<()> {
        if let Scheme::Marc { users } = self.scheme {
            if users < 2 {
                return Err(Error::Contract("relay scheme needs at least two users"));
            }
        }
        if !(self.p > 0.0) {
            return Err(Error::Contract("transmit power must be positive"));
        }
        if self.framing.info_bits() == 0 {
            return Err(Error::Contract("blocks need at least one information bit"));
        }
        Ok(())
    }
}

/// Result of one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOutcome {
    /// Information-bit errors per user.
    pub bit_errors: Vec<u64>,
    /// Information bits per user.
    pub bits_per_user: u64,
    /// Likelihood ratio of the channel draw.
    pub weight: f64,
    /// Bit `u` set iff the relay decoded user `u`. `None` for baselines.
    pub relay_mask: Option<usize>,
    pub energy: f64,
}

impl FrameOutcome {
    pub fn total_errors(&self) -> u64 {
        self.bit_errors.iter().sum()
    }

    pub fn total_bits(&self) -> u64 {
        self.bits_per_user * self.bit_errors.len() as u64
    }
}

fn count_errors(info: &[u8], payload: &[u8]) -> u64 {
    info.iter().zip(payload).filter(|(a, b)| a != b).count() as u64
}

pub fn run_trial(spec: &TrialSpec, key: StreamKey) -> Result<FrameOutcome> {
    let bits_per_user = spec.framing.info_bits() as u64;
    let omega = spec.powers.omega_to_d;
    match spec.scheme {
        Scheme::Marc { users } => {
            let config = FrameConfig {
                users,
                framing: spec.framing.clone(),
                powers: spec.powers,
                relay_link: spec.relay_link,
                p: spec.p,
                n0: spec.n0,
            };
            let frame = protocol::run_frame(&config, key, spec.bias.as_ref())?;
            let genie = spec.genie_sic.then_some(frame.symbols.as_slice());
            let detections = detector::sic_detect(
                &frame.signals,
                &frame.relay_state,
                &frame.channel,
                &spec.framing,
                spec.p,
                spec.n0,
                genie,
            )?;
            let bit_errors = frame.info.iter().zip(&detections).map(|(i, d)| count_errors(i, &d.payload)).collect();
            Ok(FrameOutcome {
                bit_errors,
                bits_per_user,
                weight: frame.weight,
                relay_mask: Some(frame.relay_state.mask()),
                energy: frame.energy,
            })
        }
        Scheme::Direct | Scheme::Alamouti => {
            let run = if spec.scheme == Scheme::Direct { baselines::direct_trial } else { baselines::alamouti_trial };
            let t = run(&spec.framing, spec.p, spec.n0, omega, key, spec.bias.as_ref())?;
            Ok(FrameOutcome {
                bit_errors: alloc::vec![t.info_errors()],
                bits_per_user,
                weight: t.weight,
                relay_mask: None,
                energy: t.energy,
            })
        }
    }
}
