//! Destination detection: per-state dispatch, interference nulling on the
//! stacked slot observations, maximum ratio combining, SNR ordering and
//! successive interference cancellation of the relay slot.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::channel::{ChannelRealization, NoisePsd};
use crate::error::{Error, Result};
use crate::phy::{self, Branch, CombinedStatistic};
use crate::protocol::{FrameSignals, Framing, RelayState};

type C3 = [Complex64; 3];

fn dot_h(a: &C3, b: &C3) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm3(a: &C3) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the orthogonal complement of one interferer
/// signature in the three-slot observation space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullingBasis {
    pub u1: C3,
    pub u2: C3,
}

impl NullingBasis {
    /// Applies `U^H` to one stacked observation, giving the two nulled branches.
    pub fn project(&self, y: &C3) -> [Complex64; 2] {
        [dot_h(&self.u1, y), dot_h(&self.u2, y)]
    }
}

/// Builds the nulling basis for `direction`.
///
/// For a signature `(0, h_b, h_r)` this is
/// `u1 = (0, -h_r*, h_b*)/‖·‖`, `u2 = (1, 0, 0)`; other directions get
/// `u2 = conj(d × u1)` normalised, which is orthogonal to both.
pub fn build_nulling_basis(direction: &C3) -> Result<NullingBasis> {
    let zero = Complex64::new(0.0, 0.0);
    let scale = norm3(direction);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::DegenerateChannel);
    }
    let d = direction.map(|x| x / scale);
    let tail = (d[1].norm_sqr() + d[2].norm_sqr()).sqrt();
    let u1 = if tail > 0.0 {
        [zero, -d[2].conj() / tail, d[1].conj() / tail]
    } else {
        [zero, Complex64::new(1.0, 0.0), zero]
    };
    let cross = [d[1] * u1[2] - d[2] * u1[1], d[2] * u1[0] - d[0] * u1[2], d[0] * u1[1] - d[1] * u1[0]];
    let cn = norm3(&cross);
    let u2 = cross.map(|c| c.conj() / cn);
    Ok(NullingBasis { u1, u2 })
}

/// Statistic for `target` when exactly one other user shares the relay slot:
/// null the interferer's signature `(0, h_i, h_r)` from the stacked
/// `(y_target, y_interferer, y_relay)` and combine the two resulting branches.
///
/// Falls back to the direct branch alone when `|h_i|² + |h_r|² = 0`.
pub fn project_and_mrc(
    y_target: &[Complex64],
    y_interferer: &[Complex64],
    y_relay: &[Complex64],
    h_target: Complex64,
    h_interferer: Complex64,
    h_relay: Complex64,
    p: f64,
    n0: NoisePsd,
) -> Result<CombinedStatistic> {
    let len = y_target.len();
    if y_interferer.len() != len || y_relay.len() != len {
        return Err(Error::Contract("project_and_mrc observations differ in length"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let basis = match build_nulling_basis(&[zero, h_interferer, h_relay]) {
        Ok(b) => b,
        Err(Error::DegenerateChannel) => {
            return phy::mrc_combine(&[Branch { observation: y_target, gain: h_target }], p, n0);
        }
        Err(e) => return Err(e),
    };
    let signature = [h_target, zero, h_relay];
    let gains = basis.project(&signature);
    let mut b1 = Vec::with_capacity(len);
    let mut b2 = Vec::with_capacity(len);
    for i in 0..len {
        let [a, b] = basis.project(&[y_target[i], y_interferer[i], y_relay[i]]);
        b1.push(a);
        b2.push(b);
    }
    phy::mrc_combine(&[Branch { observation: &b1, gain: gains[0] }, Branch { observation: &b2, gain: gains[1] }], p, n0)
}

/// Two-user convenience wrapper: statistic for `target` (0 = A, 1 = B) in
/// state S3.
pub fn project_and_mrc_user(
    signals: &FrameSignals,
    gains: &ChannelRealization,
    target: usize,
    p: f64,
    n0: NoisePsd,
) -> Result<CombinedStatistic> {
    let other = 1 - target;
    let y_r = signals.relay.as_deref().ok_or(Error::Contract("relay slot missing"))?;
    project_and_mrc(
        &signals.direct[target],
        &signals.direct[other],
        y_r,
        gains.to_dest[target],
        gains.to_dest[other],
        gains.relay_dest,
        p,
        n0,
    )
}

/// Post-nulling relay-branch gain power when `interferers` share the relay
/// slot: `1 / (Σ 1/|h_v|² + 1/|h_r|²)`.
fn nulled_relay_gain(gains: &ChannelRealization, interferers: impl Iterator<Item = usize>) -> f64 {
    let hr = gains.relay_dest.norm_sqr();
    if hr == 0.0 {
        return 0.0;
    }
    let mut inv = 1.0 / hr;
    for v in interferers {
        let hv = gains.to_dest[v].norm_sqr();
        if hv == 0.0 {
            return 0.0;
        }
        inv += 1.0 / hv;
    }
    1.0 / inv
}

/// Ordering metric of `user` against the other still-undetected users
/// in units of `|h|²`.
pub fn ordering_metric(gains: &ChannelRealization, user: usize, remaining: &[usize]) -> f64 {
    gains.to_dest[user].norm_sqr() + nulled_relay_gain(gains, remaining.iter().copied().filter(|&v| v != user))
}

/// One SIC stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage {
    pub user: usize,
    /// Post-combining SNR of this stage given error-free earlier stages.
    pub snr: f64,
}

/// Detection order over the relay-assisted users.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionOrder {
    pub stages: Vec<Stage>,
}

impl DetectionOrder {
    pub fn first_user(&self) -> usize {
        self.stages[0].user
    }
    pub fn second_user(&self) -> Option<usize> {
        self.stages.get(1).map(|s| s.user)
    }
    pub fn first_snr(&self) -> f64 {
        self.stages[0].snr
    }
    pub fn second_snr(&self) -> Option<f64> {
        self.stages.get(1).map(|s| s.snr)
    }
}

/// Greedy ordering: at each stage pick the remaining user with the largest
/// ordering metric; equal metrics go to the lower user index.
pub fn order_users(gains: &ChannelRealization, users: &[usize], p: f64, n0: NoisePsd) -> DetectionOrder {
    let scale = p / n0.value();
    let mut remaining: Vec<usize> = users.to_vec();
    remaining.sort_unstable();
    let mut stages = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let mut best = 0;
        let mut best_metric = f64::NEG_INFINITY;
        for (i, &u) in remaining.iter().enumerate() {
            let m = ordering_metric(gains, u, &remaining);
            if m > best_metric {
                best_metric = m;
                best = i;
            }
        }
        let user = remaining.remove(best);
        stages.push(Stage { user, snr: best_metric * scale });
    }
    DetectionOrder { stages }
}

/// Relay branch for `user` with the signatures of `interferers` removed:
/// `r = y_R - Σ_v (h_R/h_v) y_v`, normalised to unit noise gain. Returns the
/// branch and its effective gain.
fn nulled_relay_branch(
    signals: &FrameSignals,
    residual: &[Complex64],
    gains: &ChannelRealization,
    interferers: &[usize],
) -> Option<(Vec<Complex64>, Complex64)> {
    let hr = gains.relay_dest;
    if hr.norm_sqr() == 0.0 {
        return None;
    }
    let mut norm2 = 1.0;
    let mut coeffs = Vec::with_capacity(interferers.len());
    for &v in interferers {
        let hv = gains.to_dest[v];
        if hv.norm_sqr() == 0.0 {
            return None;
        }
        let c = hr / hv;
        norm2 += c.norm_sqr();
        coeffs.push((v, c));
    }
    let inv_norm = 1.0 / norm2.sqrt();
    let mut branch: Vec<Complex64> = residual.to_vec();
    for (v, c) in coeffs {
        for (b, y) in branch.iter_mut().zip(&signals.direct[v]) {
            *b -= c * y;
        }
    }
    branch.iter_mut().for_each(|b| *b *= inv_norm);
    Some((branch, hr * inv_norm))
}

/// Detection result for one user.
#[derive(Clone, Debug, PartialEq)]
pub struct UserDetection {
    pub statistic: CombinedStatistic,
    /// Decoded payload (information + CRC when coded).
    pub payload: Vec<u8>,
    /// Position in the SIC order, `None` for direct-only detection.
    pub stage: Option<usize>,
}

/// Detects all users of a frame.
///
/// Users the relay did not forward are detected from their direct slot.
/// Forwarded users are detected in SIC order: each stage nulls the other
/// remaining users out of the relay slot, combines with the direct slot,
/// decides, and subtracts `h_R x̂` from the relay slot. In coded framing the
/// subtracted block is the re-encoded Viterbi decision. With `genie_symbols`
/// the subtraction uses the transmitted blocks instead.
pub fn sic_detect(
    signals: &FrameSignals,
    state: &RelayState,
    gains: &ChannelRealization,
    framing: &Framing,
    p: f64,
    n0: NoisePsd,
    genie_symbols: Option<&[Vec<Complex64>]>,
) -> Result<Vec<UserDetection>> {
    let users = signals.direct.len();
    let mut out: Vec<Option<UserDetection>> = vec![None; users];
    let cooperating = state.cooperating();

    for u in 0..users {
        if cooperating.contains(&u) && signals.relay.is_some() {
            continue;
        }
        let stat = phy::mrc_combine(&[Branch { observation: &signals.direct[u], gain: gains.to_dest[u] }], p, n0)?;
        let payload = framing.decode(&phy::bpsk_demodulate_hard(&stat))?;
        out[u] = Some(UserDetection { statistic: stat, payload, stage: None });
    }

    if let Some(y_r) = signals.relay.as_deref() {
        let mut residual = y_r.to_vec();
        let mut remaining = cooperating.clone();
        let mut stage = 0;
        while !remaining.is_empty() {
            let order = order_users(gains, &remaining, p, n0);
            let u = order.first_user();
            let others: Vec<usize> = remaining.iter().copied().filter(|&v| v != u).collect();
            let direct = Branch { observation: &signals.direct[u], gain: gains.to_dest[u] };
            let stat = match others.as_slice() {
                [] => phy::mrc_combine(&[direct, Branch { observation: &residual, gain: gains.relay_dest }], p, n0)?,
                [v] => project_and_mrc(
                    &signals.direct[u],
                    &signals.direct[*v],
                    &residual,
                    gains.to_dest[u],
                    gains.to_dest[*v],
                    gains.relay_dest,
                    p,
                    n0,
                )?,
                _ => match nulled_relay_branch(signals, &residual, gains, &others) {
                    Some((branch, g)) => phy::mrc_combine(&[direct, Branch { observation: &branch, gain: g }], p, n0)?,
                    None => phy::mrc_combine(&[direct], p, n0)?,
                },
            };
            let payload = framing.decode(&phy::bpsk_demodulate_hard(&stat))?;
            if !others.is_empty() {
                let x_hat = match genie_symbols {
                    Some(truth) => truth[u].clone(),
                    None => framing.modulate(&payload, p),
                };
                let hr = gains.relay_dest;
                residual.iter_mut().zip(&x_hat).for_each(|(r, x)| *r -= hr * x);
            }
            out[u] = Some(UserDetection { statistic: stat, payload, stage: Some(stage) });
            remaining.retain(|&v| v != u);
            stage += 1;
        }
    }

    Ok(out.into_iter().map(|d| d.expect("every user detected")).collect())
}
