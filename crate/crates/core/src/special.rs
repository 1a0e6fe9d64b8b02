//! Scalar special functions used by the analytic error bounds.
//!
//! Everything here is pure `f64` arithmetic with no allocation so it can run
//! in `no_std` builds.

use core::f64::consts::PI;

use num_traits::Float;

use crate::error::DomainError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (z - 1)
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64, DomainError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(DomainError::new("ln_gamma", "argument must be positive and finite"));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Gamma function for real arguments away from the poles.
///
/// Returns `±inf` at non-positive integers.
pub fn gamma(x: f64) -> f64 {
    if x == x.floor() && x <= 0.0 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    ln_gamma_pos(x).exp()
}

/// `1/Γ(x)`, which is entire: zero at the non-positive integers.
pub fn recip_gamma(x: f64) -> f64 {
    if x == x.floor() && x <= 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Digamma function ψ(x). Poles at the non-positive integers yield NaN.
pub fn digamma(x: f64) -> f64 {
    if x == x.floor() && x <= 0.0 {
        return f64::NAN;
    }
    if x < 0.0 {
        // ψ(1 - x) - ψ(x) = π cot(πx)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 12.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // Asymptotic series in 1/y².
    let tail = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + y.ln() - 0.5 * inv - tail
}

/// Order of the modified Bessel function of the second kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

/// Modified Bessel function of the second kind `K_0(x)` or `K_1(x)`.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64, DomainError> {
    let scaled = bessel_k_scaled(order, x)?;
    Ok(scaled * (-x).exp())
}

/// Exponentially scaled `e^x K_ν(x)`, finite for large `x` where `K_ν`
/// itself underflows.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64, DomainError> {
    if !(x > 0.0) || x.is_nan() {
        return Err(DomainError::new("bessel_k", "argument must be positive"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let (k0, k1) = if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_scaled_cf(x)
    };
    Ok(match order {
        BesselOrder::Zero => k0,
        BesselOrder::One => k1,
    })
}

/// Ascending series for `K_0` and `K_1`, accurate for small and moderate x.
fn k01_series(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let q = half * half;
    let log_half = half.ln();

    // I_0, I_1 and the ψ-weighted sums share the same power terms.
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;

    let mut term0 = 1.0; // q^k / (k!)^2
    let mut term1 = 1.0; // q^k / (k! (k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // ψ(k + 1)
    let mut k = 0usize;
    loop {
        let psi_k2 = psi_k1 + 1.0 / (k as f64 + 1.0); // ψ(k + 2)
        i0 += term0;
        i1 += term1;
        s0 += term0 * psi_k1;
        s1 += term1 * (psi_k1 + psi_k2);
        let kf = k as f64 + 1.0;
        term0 *= q / (kf * kf);
        term1 *= q / (kf * (kf + 1.0));
        psi_k1 = psi_k2;
        k += 1;
        if term0 < 1e-18 * i0.abs() && term1 < 1e-18 * i1.abs() {
            break;
        }
        if k > 500 {
            break;
        }
    }
    let i1 = i1 * half;
    let k0 = -log_half * i0 + s0;
    let k1 = 1.0 / x + log_half * i1 - 0.5 * half * s1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) for `e^x K_0(x)` and
/// `e^x K_1(x)`, valid for `x >= 2`.
fn k01_scaled_cf(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Switch point above which `gauss_2f1` uses the `1 - z` transformation.
pub const HYPERGEOMETRIC_TRANSFORM_Z: f64 = 0.95;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for `0 <= z < 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, DomainError> {
    if !(0.0..1.0).contains(&z) {
        return Err(DomainError::new("gauss_2f1", "z must lie in [0, 1)"));
    }
    if is_nonpositive_integer(c) {
        return Err(DomainError::new("gauss_2f1", "c must not be a non-positive integer"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    // Terminating series are exact at any z.
    if z <= HYPERGEOMETRIC_TRANSFORM_Z || is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Ok(hyp2f1_series(a, b, c, z));
    }
    Ok(hyp2f1_one_minus_z(a, b, c, z))
}

/// Direct power series; stops when the term is below 1e-16 of the sum.
fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut n = 0.0;
    loop {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        n += 1.0;
        if term == 0.0 || (term / sum).abs() < 1e-16 {
            // The ratio test alone can stop early while terms still grow.
            let ratio = ((a + n) * (b + n) / ((c + n) * (n + 1.0)) * z).abs();
            if ratio < 1.0 || term == 0.0 {
                break;
            }
        }
        if n > 2.0e6 {
            break;
        }
    }
    sum
}

/// Analytic continuation around `z = 1` via the linear transformation
/// `z -> 1 - z`, including the logarithmic cases where `c - a - b` is an
/// integer.
fn hyp2f1_one_minus_z(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let m = c - a - b;
    let w = 1.0 - z;
    let m_round = m.round();
    if (m - m_round).abs() > 1e-12 {
        let t1 = gamma(c) * gamma(m) * recip_gamma(c - a) * recip_gamma(c - b) * hyp2f1_series(a, b, 1.0 - m, w);
        let t2 = w.powf(m)
            * gamma(c)
            * gamma(-m)
            * recip_gamma(a)
            * recip_gamma(b)
            * hyp2f1_series(c - a, c - b, m + 1.0, w);
        return t1 + t2;
    }
    if m_round < 0.0 {
        // Euler: F(a,b;c;z) = (1-z)^(c-a-b) F(c-a, c-b; c; z)
        return w.powf(m_round) * hyp2f1_integer_gap(c - a, c - b, -m_round as usize, w);
    }
    hyp2f1_integer_gap(a, b, m_round as usize, w)
}

/// `F(a, b; a + b + m; 1 - w)` for integer `m >= 0` and small `w`.
fn hyp2f1_integer_gap(a: f64, b: f64, m: usize, w: f64) -> f64 {
    let c = a + b + m as f64;
    let mf = m as f64;
    let ln_w = w.ln();

    // Finite part: Σ_{k<m} (a)_k (b)_k (m-k-1)! / k! (z-1)^k
    let mut finite = 0.0;
    if m > 0 {
        let mut poch = 1.0; // (a)_k (b)_k / k!
        let mut zm1_pow = 1.0; // (-w)^k
        for k in 0..m {
            let fact = factorial(m - k - 1);
            finite += poch * fact * zm1_pow;
            let kf = k as f64;
            poch *= (a + kf) * (b + kf) / (kf + 1.0);
            zm1_pow *= -w;
        }
        finite *= recip_gamma(a + mf) * recip_gamma(b + mf);
    }

    // Logarithmic part.
    let mut tail = 0.0;
    let mut coeff = 1.0 / factorial(m); // (a+m)_k (b+m)_k / (k! (k+m)!) w^k
    let mut psi_k1 = digamma(1.0);
    let mut psi_km1 = digamma(mf + 1.0);
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let bracket = ln_w - psi_k1 - psi_km1 + digamma(a + kf + mf) + digamma(b + kf + mf);
        let term = coeff * bracket;
        tail += term;
        if k > 3 && term.abs() < 1e-17 * tail.abs().max(1e-300) {
            break;
        }
        if k > 100_000 {
            break;
        }
        coeff *= (a + mf + kf) * (b + mf + kf) / ((kf + 1.0) * (kf + mf + 1.0)) * w;
        psi_k1 += 1.0 / (kf + 1.0);
        psi_km1 += 1.0 / (kf + mf + 1.0);
        k += 1;
    }
    let sign_pow = if m.is_multiple_of(2) { 1.0 } else { -1.0 }; // (z-1)^m = (-w)^m
    let log_part = -sign_pow * w.powi(m as i32) * recip_gamma(a) * recip_gamma(b) * tail;
    gamma(c) * (finite + log_part)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}
