//! BPSK mapping and maximum ratio combining.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::channel::NoisePsd;
use crate::error::{Error, Result};

/// Modulated block; `(1/n) Σ |x_i|² = per_symbol_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolBlock {
    pub symbols: Vec<Complex64>,
    pub per_symbol_power: f64,
}

/// Soft decision values and the post-combining SNR that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedStatistic {
    pub decision_values: Vec<f64>,
    pub post_snr: f64,
}

/// Bit 0 maps to `+√p`, bit 1 to `-√p`.
pub fn bpsk_modulate(bits: &[u8], p: f64) -> SymbolBlock {
    let amp = p.sqrt();
    let symbols = bits.iter().map(|&b| Complex64::new(if b & 1 == 0 { amp } else { -amp }, 0.0)).collect();
    SymbolBlock { symbols, per_symbol_power: p }
}

/// One diversity branch: observations and the complex gain in front of the
/// transmitted symbols. Branch noise must be white with PSD `N0`.
#[derive(Clone, Copy, Debug)]
pub struct Branch<'a> {
    pub observation: &'a [Complex64],
    pub gain: Complex64,
}

/// Maximum ratio combining; `post_snr = Σ|g_i|² · P/N0`.
pub fn mrc_combine(branches: &[Branch<'_>], p: f64, n0: NoisePsd) -> Result<CombinedStatistic> {
    let first = branches.first().ok_or(Error::Contract("mrc_combine needs at least one branch"))?;
    let len = first.observation.len();
    if branches.iter().any(|b| b.observation.len() != len) {
        return Err(Error::Contract("mrc_combine branches differ in length"));
    }
    let mut decision_values = alloc::vec![0.0; len];
    let mut gain_power = 0.0;
    for b in branches {
        gain_power += b.gain.norm_sqr();
        let w = b.gain.conj();
        for (acc, y) in decision_values.iter_mut().zip(b.observation) {
            *acc += (w * y).re;
        }
    }
    Ok(CombinedStatistic { decision_values, post_snr: gain_power * p / n0.value() })
}

/// Sign detector; ties at exactly zero decide bit 0.
pub fn bpsk_demodulate_hard(stat: &CombinedStatistic) -> Vec<u8> {
    hard_decisions(&stat.decision_values)
}

pub fn hard_decisions(values: &[f64]) -> Vec<u8> {
    values.iter().map(|&v| if v >= 0.0 { 0 } else { 1 }).collect()
}
