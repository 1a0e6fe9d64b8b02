//! Block-fading Rayleigh gains and complex AWGN.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand_core::RngCore;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::DomainError;

/// Mean of `|h|²` on the user→relay and node→destination links.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkPowers {
    pub omega_to_r: f64,
    pub omega_to_d: f64,
}

impl LinkPowers {
    pub fn new(omega_to_r: f64, omega_to_d: f64) -> Result<Self, DomainError> {
        if !(omega_to_r > 0.0 && omega_to_d > 0.0) {
            return Err(DomainError::new("LinkPowers", "link powers must be positive"));
        }
        Ok(Self { omega_to_r, omega_to_d })
    }

    /// User→relay links `offset_db` stronger than the destination links.
    pub fn with_urc_offset_db(omega_to_d: f64, offset_db: f64) -> Result<Self, DomainError> {
        Self::new(omega_to_d * 10f64.powf(offset_db / 10.0), omega_to_d)
    }
}

/// One-sided noise PSD `N0`; the complex noise sample has `E|n|² = N0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisePsd(f64);

impl NoisePsd {
    pub fn new(n0: f64) -> Result<Self, DomainError> {
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(DomainError::new("NoisePsd", "N0 must be positive and finite"));
        }
        Ok(Self(n0))
    }

    /// Noise level giving `P/N0 = snr_db` for the given symbol energy.
    pub fn from_snr_db(snr_db: f64, p: f64) -> Result<Self, DomainError> {
        Self::new(p / 10f64.powf(snr_db / 10.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Fading gains of one frame. Index `u` of `to_dest` / `to_relay` is user `u`
/// (A = 0, B = 1, ...).
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub to_dest: Vec<Complex64>,
    pub to_relay: Vec<Complex64>,
    pub relay_dest: Complex64,
}

impl ChannelRealization {
    pub fn users(&self) -> usize {
        self.to_dest.len()
    }

    pub fn h_ad(&self) -> Complex64 {
        self.to_dest[0]
    }
    pub fn h_bd(&self) -> Complex64 {
        self.to_dest[1]
    }
    pub fn h_rd(&self) -> Complex64 {
        self.relay_dest
    }
    pub fn h_ar(&self) -> Complex64 {
        self.to_relay[0]
    }
    pub fn h_br(&self) -> Complex64 {
        self.to_relay[1]
    }
}

/// Circularly-symmetric complex Gaussian with `E|h|² = mean_power`.
pub fn complex_gaussian<R: RngCore + ?Sized>(rng: &mut R, mean_power: f64) -> Complex64 {
    let sigma = (0.5 * mean_power).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sigma * re, sigma * im)
}

/// Draws the five gains of a two-user frame.
pub fn draw_channel<R: RngCore + ?Sized>(rng: &mut R, powers: LinkPowers) -> ChannelRealization {
    draw_channel_users(rng, powers, 2)
}

/// Draws gains for `users` users sharing one relay.
pub fn draw_channel_users<R: RngCore + ?Sized>(rng: &mut R, powers: LinkPowers, users: usize) -> ChannelRealization {
    let to_dest = (0..users).map(|_| complex_gaussian(rng, powers.omega_to_d)).collect();
    let relay_dest = complex_gaussian(rng, powers.omega_to_d);
    let to_relay = (0..users).map(|_| complex_gaussian(rng, powers.omega_to_r)).collect();
    ChannelRealization { to_dest, to_relay, relay_dest }
}

/// Importance sampler for destination-link fading.
///
/// Each `|h|²` is drawn from the defensive mixture
/// `½ Exp(mean Ω) + ½ Exp(mean βΩ)`, which puts deep fades on the
/// destination links often enough to see errors at high SNR. The returned
/// likelihood ratio `Π f(g)/f_mix(g)` is bounded by `2` per biased link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FadingBias {
    beta: f64,
}

impl FadingBias {
    pub fn new(beta: f64) -> Result<Self, DomainError> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(DomainError::new("FadingBias", "beta must lie in (0, 1]"));
        }
        Ok(Self { beta })
    }

    /// Scale that centres the biased component on unit average link SNR
    /// (times `margin`).
    pub fn for_link_snr(mean_link_snr: f64, margin: f64) -> Self {
        let beta = (margin / mean_link_snr).clamp(1e-12, 1.0);
        Self { beta }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Draws one gain and its likelihood ratio.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R, mean_power: f64) -> (Complex64, f64) {
        let pick_biased = rng.next_u32() & 1 == 1;
        let e: f64 = Exp1.sample(rng);
        let g = if pick_biased { e * self.beta * mean_power } else { e * mean_power };
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let theta = 2.0 * core::f64::consts::PI * u;
        let x = g / mean_power;
        // f/f_mix with f = e^{-x}, f_b = e^{-x/β}/β (both per unit Ω)
        let ratio_b = (-x / self.beta + x).exp() / self.beta;
        let weight = 1.0 / (0.5 + 0.5 * ratio_b);
        (Complex64::from_polar(g.sqrt(), theta), weight)
    }
}

/// Draws a frame with the destination links importance-sampled. User→relay
/// links keep their nominal distribution.
pub fn draw_channel_biased<R: RngCore + ?Sized>(
    rng: &mut R,
    powers: LinkPowers,
    users: usize,
    bias: &FadingBias,
) -> (ChannelRealization, f64) {
    let mut weight = 1.0;
    let mut to_dest = Vec::with_capacity(users);
    for _ in 0..users {
        let (h, w) = bias.draw(rng, powers.omega_to_d);
        weight *= w;
        to_dest.push(h);
    }
    let (relay_dest, w) = bias.draw(rng, powers.omega_to_d);
    weight *= w;
    let to_relay = (0..users).map(|_| complex_gaussian(rng, powers.omega_to_r)).collect();
    (ChannelRealization { to_dest, to_relay, relay_dest }, weight)
}

/// Returns `signal + n` with `n ~ CN(0, N0)` i.i.d.
pub fn add_awgn<R: RngCore + ?Sized>(rng: &mut R, signal: &[Complex64], n0: NoisePsd) -> Vec<Complex64> {
    signal.iter().map(|&s| s + complex_gaussian(rng, n0.value())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{DrawTag, StreamKey};

    #[test]
    fn link_powers_validate() {
        assert!(LinkPowers::new(0.0, 1.0).is_err());
        let p = LinkPowers::with_urc_offset_db(1.0, 10.0 * 2f64.log10()).unwrap();
        assert!((p.omega_to_r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_noise_is_transparent() {
        let mut rng = StreamKey::new(1).rng(DrawTag::Noise);
        let x = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let y = add_awgn(&mut rng, &x, NoisePsd::new(1e-30).unwrap());
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn frame_draws_are_reproducible() {
        let powers = LinkPowers::new(2.0, 1.0).unwrap();
        let key = StreamKey::new(99).with_frame(17);
        let a = draw_channel(&mut key.rng(DrawTag::Channel), powers);
        let b = draw_channel(&mut key.rng(DrawTag::Channel), powers);
        assert_eq!(a, b);
    }

    #[test]
    fn biased_weights_are_bounded() {
        let bias = FadingBias::new(1e-3).unwrap();
        let mut rng = StreamKey::new(3).rng(DrawTag::Importance);
        for _ in 0..10_000 {
            let (_, w) = bias.draw(&mut rng, 1.0);
            assert!(w > 0.0 && w <= 2.0);
        }
    }
}
