//! Closed-form error-probability bounds for the two-user scheme.
//!
//! The bounds are assembled from Laplace transforms ("characteristic
//! functions") of the post-combining SNR variables:
//!
//! * `H = |h|²` with `H ~ Exp(rate λ)`, transform `λ/(λ+s)`;
//! * `X = H₁ + H₂` (MRC of direct and relay copies), transform `φ_H²`;
//! * `Y = H₁ + Z` with `Z = uv/(u+v)` for i.i.d. exponential `u, v` (the
//!   nulled relay branch), transform `φ_H φ_Z`.
//!
//! Every conditional error probability uses `Q(x) <= ½ e^{-x²/2}`, so
//! `E[Q(√(2 s V))] <= ½ φ_V(s)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{DomainError, Error, Result};
use crate::quad;
use crate::special::{self, BesselOrder};

/// Probabilities of the four relay states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateProbs {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl StateProbs {
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> core::result::Result<Self, DomainError> {
        let all = [p0, p1, p2, p3];
        if all.iter().any(|p| !(0.0..=1.0).contains(p)) || ((p0 + p1 + p2 + p3) - 1.0).abs() > 1e-9 {
            return Err(DomainError::new("StateProbs", "probabilities must lie in [0,1] and sum to 1"));
        }
        Ok(Self { p0, p1, p2, p3 })
    }

    /// Relay always cooperates on both users.
    pub const IDEAL: StateProbs = StateProbs { p0: 0.0, p1: 0.0, p2: 0.0, p3: 1.0 };

    pub fn as_array(&self) -> [f64; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }
}

/// State probabilities from the per-user relay decoding failure
/// probabilities `p_ar`, `p_br`.
pub fn state_probs(p_ar: f64, p_br: f64) -> core::result::Result<StateProbs, DomainError> {
    if !(0.0..=1.0).contains(&p_ar) || !(0.0..=1.0).contains(&p_br) {
        return Err(DomainError::new("state_probs", "failure probabilities must lie in [0,1]"));
    }
    Ok(StateProbs {
        p0: p_ar * p_br,
        p1: (1.0 - p_ar) * p_br,
        p2: p_ar * (1.0 - p_br),
        p3: (1.0 - p_ar) * (1.0 - p_br),
    })
}

/// Convolutional-code constants for the coded bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodedParams {
    pub rate: f64,
    pub d_free: u32,
    pub b_dfree: u64,
    /// Information bits per block.
    pub k: usize,
}

impl CodedParams {
    /// `α_c = 2^{d_free/2} B_dfree / k`.
    pub fn alpha(&self) -> f64 {
        2f64.powf(self.d_free as f64 / 2.0) * self.b_dfree as f64 / self.k as f64
    }

    /// Effective SNR multiplier `r d_free / 2`.
    pub fn snr_gain(&self) -> f64 {
        self.rate * self.d_free as f64 / 2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    /// `P/N0`, linear.
    pub snr0: f64,
    /// Exponential rate of `|h|²` on the destination links (1 / mean power).
    pub omega_rate: f64,
    pub probs: StateProbs,
    pub coded: Option<CodedParams>,
}

impl BoundInputs {
    pub fn new(snr0: f64, omega_rate: f64, probs: StateProbs) -> core::result::Result<Self, DomainError> {
        if !(snr0 > 0.0) || !(omega_rate > 0.0) {
            return Err(DomainError::new("BoundInputs", "snr0 and omega_rate must be positive"));
        }
        Ok(Self { snr0, omega_rate, probs, coded: None })
    }

    pub fn with_code(mut self, coded: CodedParams) -> Self {
        self.coded = Some(coded);
        self
    }
}

/// Density of `Z = uv/(u+v)` for i.i.d. `u, v ~ Exp(rate λ)`:
/// `4λ² z e^{-2λz} (K0(2λz) + K1(2λz))`.
pub fn lemma1_pdf(z: f64, lambda: f64) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    if z == 0.0 {
        return 2.0 * lambda;
    }
    let x = 2.0 * lambda * z;
    if x > 745.0 {
        return 0.0;
    }
    let k0 = special::bessel_k_scaled(BesselOrder::Zero, x).expect("x > 0");
    let k1 = special::bessel_k_scaled(BesselOrder::One, x).expect("x > 0");
    2.0 * lambda * x * (-2.0 * x).exp() * (k0 + k1)
}

/// CDF of `Z`: `1 - 2λz e^{-2λz} K1(2λz)`.
pub fn lemma1_cdf(z: f64, lambda: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let x = 2.0 * lambda * z;
    if x > 745.0 {
        return 1.0;
    }
    let k1 = special::bessel_k_scaled(BesselOrder::One, x).expect("x > 0");
    1.0 - x * (-2.0 * x).exp() * k1
}

/// `E[e^{-sX}]` for `X ~ Exp(rate λ)`.
pub fn laplace_exp(s: f64, lambda: f64) -> f64 {
    lambda / (lambda + s)
}

/// `E[e^{-sZ}]` for `Z = uv/(u+v)` in closed form.
///
/// Integrating the density term by term against `e^{-sz}` with
/// `∫ z^{μ-1} e^{-αz} K_ν(βz) dz` (μ = 2, α = s + 2λ, β = 2λ) gives
///
/// `φ_Z(s) = √π/Γ(5/2) [ 4λ² F(2, ½; 5/2; w)/(s+4λ)² + 32λ³ F(3, 3/2; 5/2; w)/(s+4λ)³ ]`
///
/// with `w = s/(s+4λ)`.
pub fn laplace_z(s: f64, lambda: f64) -> f64 {
    let t = s + 4.0 * lambda;
    let w = s / t;
    let lead = PI.sqrt() / special::gamma(2.5);
    let f0 = special::gauss_2f1(2.0, 0.5, 2.5, w).expect("w in [0,1)");
    let f1 = special::gauss_2f1(3.0, 1.5, 2.5, w).expect("w in [0,1)");
    lead * (4.0 * lambda * lambda * f0 / (t * t) + 32.0 * lambda.powi(3) * f1 / (t * t * t))
}

/// `E[e^{-sZ}]` by direct quadrature of [`lemma1_pdf`].
pub fn laplace_z_quadrature(s: f64, lambda: f64) -> f64 {
    let scale = 1.0 / (2.0 * lambda + s);
    quad::integrate_half_line(|z| (-s * z).exp() * lemma1_pdf(z, lambda), scale, 1e-12)
}

/// Uncoded bit-error-probability bound with error-free relay cooperation:
///
/// `½[(p0+p2) φ_H + p1 φ_H²] + (p3/4)[φ_H φ_Z + φ_H²]` at `s = snr0`.
pub fn theorem1_bound(inputs: &BoundInputs) -> f64 {
    uncoded_bound_at(inputs.snr0, inputs.omega_rate, &inputs.probs)
}

fn uncoded_bound_at(s: f64, lambda: f64, probs: &StateProbs) -> f64 {
    let phi_h = laplace_exp(s, lambda);
    let phi_z = laplace_z(s, lambda);
    let phi_x = phi_h * phi_h;
    let phi_y = phi_h * phi_z;
    0.5 * ((probs.p0 + probs.p2) * phi_h + probs.p1 * phi_x) + 0.25 * probs.p3 * (phi_x + phi_y)
}

/// Coded bit-error-rate bound for hard-decision Viterbi decoding:
/// `α_c` times the uncoded bound evaluated at `snr0 · r d_free / 2`.
pub fn theorem2_bound(inputs: &BoundInputs) -> Result<f64> {
    let coded = inputs.coded.ok_or(Error::Contract("coded bound needs code parameters"))?;
    Ok(coded.alpha() * uncoded_bound_at(inputs.snr0 * coded.snr_gain(), inputs.omega_rate, &inputs.probs))
}

/// `E[Q(√(2 s H))]` for `H ~ Exp(rate λ)`.
pub fn exact_q_single(s: f64, lambda: f64) -> f64 {
    let g = s / lambda;
    0.5 * (1.0 - (g / (1.0 + g)).sqrt())
}

/// `E[Q(√(2 s (H₁+H₂)))]` for i.i.d. `H_i ~ Exp(rate λ)`.
pub fn exact_q_mrc2(s: f64, lambda: f64) -> f64 {
    let g = s / lambda;
    let mu = (g / (1.0 + g)).sqrt();
    let a = 0.5 * (1.0 - mu);
    a * a * (2.0 + mu)
}

/// `E[Q(√(2 s (H + Z)))]` by quadrature over `Z`.
pub fn exact_q_nulled(s: f64, lambda: f64) -> f64 {
    let a = s + lambda;
    let root = (s / a).sqrt();
    // E_H[Q(√(2s(H+z)))] = Q(√(2sz)) - e^{λz} √(s/(s+λ)) Q(√(2(s+λ)z))
    let inner = |z: f64| {
        let q1 = special::q_function((2.0 * s * z).sqrt());
        let tail = libm::erfc((a * z).sqrt());
        let q2 = if tail > 0.0 { 0.5 * (lambda * z + tail.ln()).exp() } else { 0.0 };
        q1 - root * q2
    };
    quad::integrate_half_line(|z| lemma1_pdf(z, lambda) * inner(z), 1.0 / (s + lambda), 1e-10)
}

/// The uncoded expression with exact Gaussian tails instead of the
/// exponential bound. Used to see how much of the gap between bound and
/// simulation comes from the tail bound.
pub fn exact_q_uncoded(inputs: &BoundInputs) -> f64 {
    let (s, l, p) = (inputs.snr0, inputs.omega_rate, inputs.probs);
    let single = exact_q_single(s, l);
    let mrc = exact_q_mrc2(s, l);
    (p.p0 + p.p2) * single + p.p1 * mrc + p.p3 * 0.5 * (mrc + exact_q_nulled(s, l))
}

/// Least-squares slope of `log10(ber)` against `snr_db / 10`. The
/// diversity order estimate is the negated slope.
pub fn diversity_slope(points: &[(f64, f64)]) -> core::result::Result<f64, DomainError> {
    if points.len() < 3 {
        return Err(DomainError::new("diversity_slope", "need at least three points"));
    }
    if points.iter().any(|&(_, ber)| !(ber > 0.0)) {
        return Err(DomainError::new("diversity_slope", "error rates must be positive"));
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(db, ber)| (db / 10.0, ber.log10())).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(DomainError::new("diversity_slope", "SNR points must not all coincide"));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}
