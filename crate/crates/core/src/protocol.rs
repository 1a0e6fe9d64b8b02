//! One frame of the TDMA relay protocol: users transmit in their own slots,
//! the relay decodes what it can and forwards the sum of the re-modulated
//! blocks it decoded in the final slot.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::channel::{self, ChannelRealization, FadingBias, LinkPowers, NoisePsd};
use crate::coding::{self, ConvCode, CRC_BITS};
use crate::error::Result;
use crate::phy::{self, Branch};
use crate::rng::{DrawTag, StreamKey};

/// How information bits are turned into channel bits.
#[derive(Clone, Debug, PartialEq)]
pub enum Framing {
    /// BPSK on the raw information bits.
    Uncoded { info_bits: usize },
    /// Information bits + CRC-16, convolutionally encoded with a zero tail.
    Coded { info_bits: usize, code: ConvCode },
}

impl Framing {
    pub fn info_bits(&self) -> usize {
        match self {
            Framing::Uncoded { info_bits } | Framing::Coded { info_bits, .. } => *info_bits,
        }
    }

    pub fn code(&self) -> Option<&ConvCode> {
        match self {
            Framing::Uncoded { .. } => None,
            Framing::Coded { code, .. } => Some(code),
        }
    }

    /// Bits handed to the encoder (information plus CRC when coded).
    pub fn payload_len(&self) -> usize {
        match self {
            Framing::Uncoded { info_bits } => *info_bits,
            Framing::Coded { info_bits, .. } => info_bits + CRC_BITS,
        }
    }

    /// Channel symbols per user block.
    pub fn block_len(&self) -> usize {
        match self {
            Framing::Uncoded { info_bits } => *info_bits,
            Framing::Coded { code, .. } => code.encoded_len(self.payload_len()),
        }
    }

    pub fn payload(&self, info: &[u8]) -> Vec<u8> {
        match self {
            Framing::Uncoded { .. } => info.to_vec(),
            Framing::Coded { .. } => coding::crc_append(info),
        }
    }

    pub fn channel_bits(&self, payload: &[u8]) -> Vec<u8> {
        match self {
            Framing::Uncoded { .. } => payload.to_vec(),
            Framing::Coded { code, .. } => coding::conv_encode(payload, code),
        }
    }

    /// BPSK block for a payload at per-symbol power `p`.
    pub fn modulate(&self, payload: &[u8], p: f64) -> Vec<Complex64> {
        phy::bpsk_modulate(&self.channel_bits(payload), p).symbols
    }

    /// Hard channel bits back to a payload estimate.
    pub fn decode(&self, hard: &[u8]) -> Result<Vec<u8>> {
        match self {
            Framing::Uncoded { .. } => Ok(hard.to_vec()),
            Framing::Coded { code, .. } => coding::viterbi_decode_hard(hard, code),
        }
    }

    /// Payload passes its integrity check. Uncoded payloads carry none.
    pub fn payload_ok(&self, payload: &[u8]) -> bool {
        match self {
            Framing::Uncoded { .. } => true,
            Framing::Coded { .. } => coding::crc_check(payload),
        }
    }
}

/// User→relay link model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelayLink {
    /// The relay always decodes every user correctly.
    Ideal,
    /// Rayleigh links with mean power `LinkPowers::omega_to_r`.
    Fading,
}

/// Relay state labels for the two-user channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    /// Neither block decoded; the relay stays silent.
    S0,
    /// Only user A decoded.
    S1,
    /// Only user B decoded.
    S2,
    /// Both decoded; the relay sends the sum.
    S3,
}

impl StateLabel {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Which user blocks the relay decoded, with the decoded payloads.
#[derive(Clone, Debug, PartialEq)]
pub struct RelayState {
    decoded: Vec<Option<Vec<u8>>>,
}

impl RelayState {
    pub fn new(decoded: Vec<Option<Vec<u8>>>) -> Self {
        Self { decoded }
    }

    pub fn users(&self) -> usize {
        self.decoded.len()
    }

    pub fn decoded(&self, user: usize) -> Option<&[u8]> {
        self.decoded.get(user).and_then(|d| d.as_deref())
    }

    pub fn decoded_a(&self) -> Option<&[u8]> {
        self.decoded(0)
    }

    pub fn decoded_b(&self) -> Option<&[u8]> {
        self.decoded(1)
    }

    /// Users whose blocks are in the relay transmission, ascending.
    pub fn cooperating(&self) -> Vec<usize> {
        (0..self.decoded.len()).filter(|&u| self.decoded[u].is_some()).collect()
    }

    /// Bit `u` set iff user `u` was decoded. For two users this equals the
    /// state label index.
    pub fn mask(&self) -> usize {
        self.decoded.iter().enumerate().filter(|(_, d)| d.is_some()).map(|(u, _)| 1 << u).sum()
    }

    /// Two-user state label; `None` for other user counts.
    pub fn label(&self) -> Option<StateLabel> {
        if self.decoded.len() != 2 {
            return None;
        }
        Some(match (self.decoded[0].is_some(), self.decoded[1].is_some()) {
            (false, false) => StateLabel::S0,
            (true, false) => StateLabel::S1,
            (false, true) => StateLabel::S2,
            (true, true) => StateLabel::S3,
        })
    }
}

/// Decides cooperation from the relay's observations of each user.
///
/// Each block is coherently demodulated with its user→relay gain, decoded and
/// checked. In uncoded framing there is no CRC, so `genie_payloads` (the
/// transmitted payloads) stand in for error detection and the relay only
/// cooperates on blocks it received without error.
pub fn relay_process(
    observations: &[Vec<Complex64>],
    gains: &ChannelRealization,
    framing: &Framing,
    genie_payloads: Option<&[Vec<u8>]>,
) -> Result<RelayState> {
    let mut decoded = Vec::with_capacity(observations.len());
    for (u, y) in observations.iter().enumerate() {
        let h = gains.to_relay[u];
        let stat = phy::mrc_combine(&[Branch { observation: y, gain: h }], 1.0, NoisePsd::new(1.0)?)?;
        let payload = framing.decode(&phy::bpsk_demodulate_hard(&stat))?;
        let accepted = match (framing, genie_payloads) {
            (Framing::Uncoded { .. }, Some(truth)) => payload == truth[u],
            _ => framing.payload_ok(&payload),
        };
        decoded.push(accepted.then_some(payload));
    }
    Ok(RelayState::new(decoded))
}

/// Relay waveform for the given state: nothing, one re-modulated block, or
/// the element-wise sum of all decoded blocks (each at power `p`).
pub fn relay_transmit(state: &RelayState, framing: &Framing, p: f64) -> Option<Vec<Complex64>> {
    let mut sum: Option<Vec<Complex64>> = None;
    for u in state.cooperating() {
        let block = framing.modulate(state.decoded(u).expect("cooperating user is decoded"), p);
        match sum.as_mut() {
            None => sum = Some(block),
            Some(acc) => acc.iter_mut().zip(block).for_each(|(a, b)| *a += b),
        }
    }
    sum
}

/// Per-frame protocol configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameConfig {
    pub users: usize,
    pub framing: Framing,
    pub powers: LinkPowers,
    pub relay_link: RelayLink,
    /// Per-symbol transmit power of each user.
    pub p: f64,
    pub n0: NoisePsd,
}

/// Destination observations: one direct slot per user plus the relay slot.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSignals {
    pub direct: Vec<Vec<Complex64>>,
    /// Absent when the relay is silent.
    pub relay: Option<Vec<Complex64>>,
}

impl FrameSignals {
    pub fn y_ad(&self) -> &[Complex64] {
        &self.direct[0]
    }
    pub fn y_bd(&self) -> &[Complex64] {
        &self.direct[1]
    }
    pub fn y_rd(&self) -> Option<&[Complex64]> {
        self.relay.as_deref()
    }
}

/// Everything produced by one simulated frame.
#[derive(Clone, Debug)]
pub struct Frame {
    pub signals: FrameSignals,
    pub relay_state: RelayState,
    pub channel: ChannelRealization,
    /// Information bits per user.
    pub info: Vec<Vec<u8>>,
    /// Transmitted payloads (information + CRC when coded).
    pub payloads: Vec<Vec<u8>>,
    /// Transmitted BPSK blocks per user.
    pub symbols: Vec<Vec<Complex64>>,
    /// Likelihood ratio of the channel draw (1 without importance sampling).
    pub weight: f64,
    /// Total transmit energy of users and relay in this frame.
    pub energy: f64,
}

pub(crate) fn random_bits<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(n);
    let mut word = 0u64;
    for i in 0..n {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        out.push((word & 1) as u8);
        word >>= 1;
    }
    out
}

/// One user→relay block in isolation. Returns `true` when the relay fails to
/// decode it (CRC failure when coded, any bit error when uncoded).
pub fn relay_failure_trial(framing: &Framing, omega_to_r: f64, p: f64, n0: NoisePsd, key: StreamKey) -> Result<bool> {
    let h = channel::complex_gaussian(&mut key.rng(DrawTag::Channel), omega_to_r);
    let info = random_bits(&mut key.rng(DrawTag::Bits), framing.info_bits());
    let payload = framing.payload(&info);
    let faded: Vec<Complex64> = framing.modulate(&payload, p).iter().map(|s| h * s).collect();
    let y = channel::add_awgn(&mut key.rng(DrawTag::Noise), &faded, n0);
    let gains =
        ChannelRealization { to_dest: Vec::new(), to_relay: alloc::vec![h], relay_dest: Complex64::new(0.0, 0.0) };
    let genie = [payload];
    let state = relay_process(&[y], &gains, framing, Some(&genie))?;
    Ok(state.decoded(0).is_none())
}

/// Runs one frame: draws fading, generates and transmits both (all) users'
/// blocks, lets the relay decide, and forms the destination observations
/// with independent noise in every slot.
pub fn run_frame(config: &FrameConfig, key: StreamKey, bias: Option<&FadingBias>) -> Result<Frame> {
    let mut ch_rng = key.rng(DrawTag::Channel);
    let (channel, weight) = match bias {
        None => (channel::draw_channel_users(&mut ch_rng, config.powers, config.users), 1.0),
        Some(b) => channel::draw_channel_biased(&mut ch_rng, config.powers, config.users, b),
    };

    let mut bit_rng = key.rng(DrawTag::Bits);
    let framing = &config.framing;
    let info: Vec<Vec<u8>> = (0..config.users).map(|_| random_bits(&mut bit_rng, framing.info_bits())).collect();
    let payloads: Vec<Vec<u8>> = info.iter().map(|b| framing.payload(b)).collect();
    let symbols: Vec<Vec<Complex64>> = payloads.iter().map(|b| framing.modulate(b, config.p)).collect();

    let mut noise = key.rng(DrawTag::Noise);
    let relay_state = match config.relay_link {
        RelayLink::Ideal => RelayState::new(payloads.iter().cloned().map(Some).collect()),
        RelayLink::Fading => {
            let obs: Vec<Vec<Complex64>> = symbols
                .iter()
                .zip(&channel.to_relay)
                .map(|(x, &h)| {
                    let faded: Vec<Complex64> = x.iter().map(|s| h * s).collect();
                    channel::add_awgn(&mut noise, &faded, config.n0)
                })
                .collect();
            let genie = matches!(framing, Framing::Uncoded { .. }).then_some(payloads.as_slice());
            relay_process(&obs, &channel, framing, genie)?
        }
    };

    let direct: Vec<Vec<Complex64>> = symbols
        .iter()
        .zip(&channel.to_dest)
        .map(|(x, &h)| {
            let faded: Vec<Complex64> = x.iter().map(|s| h * s).collect();
            channel::add_awgn(&mut noise, &faded, config.n0)
        })
        .collect();

    let relay_tx = relay_transmit(&relay_state, framing, config.p);
    let mut energy = config.users as f64 * framing.block_len() as f64 * config.p;
    let relay = relay_tx.map(|x| {
        energy += x.iter().map(|s| s.norm_sqr()).sum::<f64>();
        let faded: Vec<Complex64> = x.iter().map(|s| channel.relay_dest * s).collect();
        channel::add_awgn(&mut noise, &faded, config.n0)
    });

    Ok(Frame { signals: FrameSignals { direct, relay }, relay_state, channel, info, payloads, symbols, weight, energy })
}
