//! Reference schemes without a relay: a single direct link and 2×1
//! Alamouti transmit diversity.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::channel::{self, FadingBias, NoisePsd};
use crate::error::Result;
use crate::phy::{self, Branch, CombinedStatistic};
use crate::protocol::{random_bits, Framing};
use crate::rng::{DrawTag, StreamKey};

/// One block over a reference scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkTrial {
    pub info: Vec<u8>,
    /// Decoded payload (information + CRC when coded).
    pub payload: Vec<u8>,
    pub weight: f64,
    pub energy: f64,
}

impl LinkTrial {
    pub fn info_errors(&self) -> u64 {
        self.info.iter().zip(&self.payload).filter(|(a, b)| a != b).count() as u64
    }
}

fn draw_gain(rng: &mut rand_chacha::ChaCha8Rng, omega: f64, bias: Option<&FadingBias>) -> (Complex64, f64) {
    match bias {
        None => (channel::complex_gaussian(rng, omega), 1.0),
        Some(b) => b.draw(rng, omega),
    }
}

/// Point-to-point block fading link at per-symbol power `p`.
pub fn direct_trial(
    framing: &Framing,
    p: f64,
    n0: NoisePsd,
    omega: f64,
    key: StreamKey,
    bias: Option<&FadingBias>,
) -> Result<LinkTrial> {
    let (h, weight) = draw_gain(&mut key.rng(DrawTag::Channel), omega, bias);
    let info = random_bits(&mut key.rng(DrawTag::Bits), framing.info_bits());
    let x = framing.modulate(&framing.payload(&info), p);
    let faded: Vec<Complex64> = x.iter().map(|s| h * s).collect();
    let y = channel::add_awgn(&mut key.rng(DrawTag::Noise), &faded, n0);
    let stat = phy::mrc_combine(&[Branch { observation: &y, gain: h }], p, n0)?;
    let payload = framing.decode(&phy::bpsk_demodulate_hard(&stat))?;
    Ok(LinkTrial { info, payload, weight, energy: x.len() as f64 * p })
}

/// Alamouti space-time block over two transmit antennas and one receive
/// antenna. Each antenna radiates `p/2` per symbol period. Odd blocks are
/// padded with one `+√p` symbol that is dropped at the receiver.
pub fn alamouti_trial(
    framing: &Framing,
    p: f64,
    n0: NoisePsd,
    omega: f64,
    key: StreamKey,
    bias: Option<&FadingBias>,
) -> Result<LinkTrial> {
    let mut ch = key.rng(DrawTag::Channel);
    let (h1, w1) = draw_gain(&mut ch, omega, bias);
    let (h2, w2) = draw_gain(&mut ch, omega, bias);
    let info = random_bits(&mut key.rng(DrawTag::Bits), framing.info_bits());
    let mut x = framing.modulate(&framing.payload(&info), p);
    let n = x.len();
    if n % 2 == 1 {
        x.push(Complex64::new(p.sqrt(), 0.0));
    }

    let a = 1.0 / 2f64.sqrt();
    let mut tx = Vec::with_capacity(x.len());
    for pair in x.chunks_exact(2) {
        let (s1, s2) = (pair[0] * a, pair[1] * a);
        tx.push(h1 * s1 + h2 * s2);
        tx.push(-h1 * s2.conj() + h2 * s1.conj());
    }
    let y = channel::add_awgn(&mut key.rng(DrawTag::Noise), &tx, n0);

    let gain = h1.norm_sqr() + h2.norm_sqr();
    let mut decision_values = Vec::with_capacity(x.len());
    for r in y.chunks_exact(2) {
        decision_values.push((h1.conj() * r[0] + h2 * r[1].conj()).re);
        decision_values.push((h2.conj() * r[0] - h1 * r[1].conj()).re);
    }
    decision_values.truncate(n);
    let stat = CombinedStatistic { decision_values, post_snr: gain * p / (2.0 * n0.value()) };
    let payload = framing.decode(&phy::bpsk_demodulate_hard(&stat))?;
    let energy = x.len() as f64 * p;
    Ok(LinkTrial { info, payload, weight: w1 * w2, energy })
}
