//! Feedforward convolutional codes, hard-decision Viterbi decoding and the
//! CRC used by the relay to detect decoding failures.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};

/// Largest constraint length the distance search accepts.
pub const MAX_CONSTRAINT_LENGTH: usize = 10;

/// Rate `1/n` feedforward convolutional code.
///
/// Generators are given as integers written in octal; the most significant
/// octal digit is the oldest register tap, so `[0o5, 0o7, 0o7]` is
/// `(101, 111, 111)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvCode {
    generators: Vec<u32>,
    constraint_length: usize,
    d_free: u32,
    b_dfree: u64,
}

/// Free distance and the number of weight-`d_free` paths that leave and
/// re-enter the zero state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceSpectrum {
    pub d_free: u32,
    pub b_dfree: u64,
}

impl ConvCode {
    pub fn new(generators: &[u32]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidCode("no generators"));
        }
        if generators.contains(&0) {
            return Err(Error::InvalidCode("zero generator"));
        }
        let constraint_length = generators.iter().map(|g| 32 - g.leading_zeros() as usize).max().unwrap_or(1);
        if constraint_length < 2 {
            return Err(Error::InvalidCode("constraint length must be at least 2"));
        }
        if constraint_length > MAX_CONSTRAINT_LENGTH {
            return Err(Error::InvalidCode("constraint length above 10"));
        }
        let mut code = Self { generators: generators.to_vec(), constraint_length, d_free: 0, b_dfree: 0 };
        let spectrum = compute_distance_spectrum(&code)?;
        code.d_free = spectrum.d_free;
        code.b_dfree = spectrum.b_dfree;
        Ok(code)
    }

    /// Parses generators such as `"5,7,7"` or `"133 171"` (octal digits).
    pub fn from_octal_str(spec: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for tok in spec.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let tok = tok.trim_start_matches("0o");
            let g = u32::from_str_radix(tok, 8).map_err(|_| Error::InvalidCode("generator is not octal"))?;
            gens.push(g);
        }
        Self::new(&gens)
    }

    /// The `[5, 7, 7]` rate-1/3 code with `d_free = 8`.
    pub fn rate_third_k3() -> Self {
        Self::new(&[0o5, 0o7, 0o7]).expect("valid built-in code")
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }
    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }
    pub fn outputs_per_step(&self) -> usize {
        self.generators.len()
    }
    pub fn rate(&self) -> f64 {
        1.0 / self.generators.len() as f64
    }
    pub fn d_free(&self) -> u32 {
        self.d_free
    }
    pub fn b_dfree(&self) -> u64 {
        self.b_dfree
    }
    pub fn memory(&self) -> usize {
        self.constraint_length - 1
    }
    pub fn num_states(&self) -> usize {
        1 << self.memory()
    }
    /// Coded length for `info_len` input bits including the zero tail.
    pub fn encoded_len(&self, info_len: usize) -> usize {
        (info_len + self.memory()) * self.outputs_per_step()
    }

    fn state_mask(&self) -> u32 {
        (1u32 << self.memory()) - 1
    }

    /// Output bits for a register holding `x_t` in bit 0 and `x_{t-j}` in bit `j`.
    fn outputs(&self, register: u32) -> impl Iterator<Item = u8> + '_ {
        self.generators.iter().map(move |g| ((g & register).count_ones() & 1) as u8)
    }

    fn branch_weight(&self, register: u32) -> u32 {
        self.generators.iter().map(|g| (g & register).count_ones() & 1).sum()
    }
}

/// Encodes `info` followed by a zero tail of `K - 1` bits.
pub fn conv_encode(info: &[u8], code: &ConvCode) -> Vec<u8> {
    let mut out = Vec::with_capacity(code.encoded_len(info.len()));
    let mut state = 0u32;
    let tail = core::iter::repeat_n(0u8, code.memory());
    for b in info.iter().copied().chain(tail) {
        let register = (state << 1) | u32::from(b & 1);
        out.extend(code.outputs(register));
        state = register & code.state_mask();
    }
    out
}

/// Hard-decision Viterbi decoder over the zero-terminated trellis. Returns
/// the information bits (tail removed).
///
/// Equal path metrics keep the predecessor with the smaller state index.
pub fn viterbi_decode_hard(received: &[u8], code: &ConvCode) -> Result<Vec<u8>> {
    let n = code.outputs_per_step();
    if !received.len().is_multiple_of(n) {
        return Err(Error::Contract("received length is not a multiple of the code's outputs"));
    }
    let steps = received.len() / n;
    if steps < code.memory() {
        return Err(Error::Contract("received block shorter than the code tail"));
    }
    let states = code.num_states();
    let mask = code.state_mask();
    let top_shift = code.memory().saturating_sub(1);

    // Precompute branch outputs as packed words per register value.
    let registers = 1usize << code.constraint_length;
    let mut branch_out = vec![0u32; registers];
    for (reg, out) in branch_out.iter_mut().enumerate() {
        for (i, bit) in code.outputs(reg as u32).enumerate() {
            *out |= u32::from(bit) << i;
        }
    }

    const INF: u32 = u32::MAX / 2;
    let mut metric = vec![INF; states];
    metric[0] = 0;
    let mut next = vec![INF; states];
    let mut survivors: Vec<u16> = vec![0; steps * states];

    for t in 0..steps {
        let mut word = 0u32;
        for (i, &b) in received[t * n..(t + 1) * n].iter().enumerate() {
            word |= u32::from(b & 1) << i;
        }
        for ns in 0..states {
            let input = ns as u32 & 1;
            let mut best = INF;
            let mut best_prev = 0usize;
            for top in 0..2u32 {
                let prev = ((ns as u32 >> 1) | (top << top_shift)) as usize & mask as usize;
                let m = metric[prev];
                if m >= INF {
                    continue;
                }
                let reg = ((prev as u32) << 1) | input;
                let cost = m + (branch_out[reg as usize] ^ word).count_ones();
                if cost < best || (cost == best && prev < best_prev) {
                    best = cost;
                    best_prev = prev;
                }
            }
            next[ns] = best;
            survivors[t * states + ns] = best_prev as u16;
        }
        core::mem::swap(&mut metric, &mut next);
    }

    let mut bits = vec![0u8; steps];
    let mut state = 0usize;
    for t in (0..steps).rev() {
        bits[t] = (state & 1) as u8;
        state = survivors[t * states + state] as usize;
    }
    bits.truncate(steps - code.memory());
    Ok(bits)
}

/// Exact free distance and its multiplicity by searching paths that leave
/// the zero state and return to it.
pub fn compute_distance_spectrum(code: &ConvCode) -> Result<DistanceSpectrum> {
    const BUDGET: usize = 50_000_000;
    let states = code.num_states();
    let mask = code.state_mask();
    let first_reg = 1u32;
    let first_state = first_reg & mask;
    let first_weight = code.branch_weight(first_reg);

    // Dijkstra on the state graph for the minimum remerging weight.
    let mut dist = vec![u32::MAX; states];
    let mut heap = BinaryHeap::new();
    let mut d_free = u32::MAX;
    dist[first_state as usize] = first_weight;
    heap.push(Reverse((first_weight, first_state)));
    let mut explored = 0usize;
    while let Some(Reverse((w, s))) = heap.pop() {
        explored += 1;
        if explored > BUDGET {
            return Err(Error::SearchBudget { explored });
        }
        if w > dist[s as usize] || w >= d_free {
            continue;
        }
        for input in 0..2u32 {
            let reg = (s << 1) | input;
            let ns = reg & mask;
            let nw = w + code.branch_weight(reg);
            if ns == 0 {
                d_free = d_free.min(nw);
            } else if nw < dist[ns as usize] {
                dist[ns as usize] = nw;
                heap.push(Reverse((nw, ns)));
            }
        }
    }
    if d_free == u32::MAX {
        return Err(Error::InvalidCode("no path returns to the zero state"));
    }

    // Count paths of weight exactly d_free by dynamic programming over
    // (state, accumulated weight) until no live path can still qualify.
    let width = d_free as usize + 1;
    let mut live = vec![0u64; states * width];
    live[first_state as usize * width + first_weight as usize] = 1;
    let mut count = 0u64;
    let mut steps = 0usize;
    let step_limit = states * width + 1;
    loop {
        let mut next = vec![0u64; states * width];
        let mut any = false;
        for s in 1..states {
            for w in 0..width {
                let c = live[s * width + w];
                if c == 0 {
                    continue;
                }
                explored += 1;
                for input in 0..2u32 {
                    let reg = ((s as u32) << 1) | input;
                    let ns = (reg & mask) as usize;
                    let nw = w + code.branch_weight(reg) as usize;
                    if nw > d_free as usize {
                        continue;
                    }
                    if ns == 0 {
                        if nw == d_free as usize {
                            count += c;
                        }
                    } else {
                        next[ns * width + nw] += c;
                        any = true;
                    }
                }
            }
        }
        live = next;
        steps += 1;
        if !any {
            break;
        }
        // Live paths that stop gaining weight never terminate: catastrophic code.
        if steps > step_limit || explored > BUDGET {
            return Err(Error::SearchBudget { explored });
        }
    }
    Ok(DistanceSpectrum { d_free, b_dfree: count })
}

/// Number of CRC bits appended by [`crc_append`].
pub const CRC_BITS: usize = 16;
const CRC_POLY: u16 = 0x1021;

/// CRC-16/CCITT remainder over a bit sequence, MSB-first, zero initial value.
pub fn crc16(bits: &[u8]) -> u16 {
    let mut reg = 0u16;
    for &b in bits {
        let feedback = ((reg >> 15) as u8 ^ (b & 1)) & 1;
        reg <<= 1;
        if feedback == 1 {
            reg ^= CRC_POLY;
        }
    }
    reg
}

pub fn crc_append(bits: &[u8]) -> Vec<u8> {
    let crc = crc16(bits);
    let mut out = Vec::with_capacity(bits.len() + CRC_BITS);
    out.extend_from_slice(bits);
    out.extend((0..CRC_BITS).rev().map(|i| ((crc >> i) & 1) as u8));
    out
}

/// True iff the block (payload followed by its CRC) leaves a zero remainder.
pub fn crc_check(bits: &[u8]) -> bool {
    crc16(bits) == 0
}
