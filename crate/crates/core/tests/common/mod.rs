//! Test-only numerical oracles, written independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `∫_0^∞ f` by exp-sinh substitution `x = exp(π/2 sinh t)` and the
/// trapezoid rule in `t`.
pub fn half_line(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    let mut k = -(6.0 / h) as i64;
    while (k as f64) * h <= 6.0 {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        if u.abs() < 700.0 {
            let x = u.exp();
            let w = x * 0.5 * PI * t.cosh();
            let v = f(x);
            if v.is_finite() {
                sum += v * w;
            }
        }
        k += 1;
    }
    sum * h
}

/// `∫_a^b f` by tanh-sinh; endpoint singularities are tolerated.
pub fn interval(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 1.0 / 128.0;
    let r = 0.5 * (b - a);
    let mut sum = 0.0;
    let mut k = -(6.0 / h) as i64;
    while (k as f64) * h <= 6.0 {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        if u.abs() > 350.0 {
            k += 1;
            continue;
        }
        let x = u.tanh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        // distance to the nearer endpoint, computed without cancellation
        let gap = 1.0 / (u.abs().exp() * u.cosh());
        if gap > 0.0 && w > 0.0 {
            let point = if x < 0.0 { a + r * gap } else { b - r * gap };
            let v = f(point);
            if v.is_finite() {
                sum += v * w;
            }
        }
        k += 1;
    }
    sum * h * r
}

/// `P(uv/(u+v) <= z)` for i.i.d. `u, v ~ Exp(rate λ)`, by conditioning on `u`.
pub fn harmonic_cdf(z: f64, lambda: f64) -> f64 {
    // u <= z forces the event; otherwise v <= zu/(u-z)
    let head = 1.0 - (-lambda * z).exp();
    let tail = half_line(|w| {
        let u = z + w;
        lambda * (-lambda * u).exp() * (1.0 - (-lambda * z * u / w).exp())
    });
    head + tail
}

/// `E[e^{-s uv/(u+v)}]` as a double integral over the exponential pair.
pub fn harmonic_laplace(s: f64, lambda: f64) -> f64 {
    half_line(|u| {
        lambda * (-lambda * u).exp() * half_line(|v| lambda * (-lambda * v).exp() * (-s * u * v / (u + v)).exp())
    })
}

/// `K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(νt) dt`.
pub fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    let h = 1.0 / 256.0;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += v;
        if v < 1e-300 || t > 40.0 {
            break;
        }
        t += h;
    }
    sum * h
}

/// `Γ(x) = ∫_0^∞ t^{x-1} e^{-t} dt`.
pub fn gamma_integral(x: f64) -> f64 {
    half_line(|t| t.powf(x - 1.0) * (-t).exp())
}

/// Euler integral for `2F1(a, b; c; z)`, `c > b > 0`, `z < 1`.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let pre = gamma_integral(c) / (gamma_integral(b) * gamma_integral(c - b));
    // split at ½ so both endpoint factors are formed without cancellation
    let left = interval(|t| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a), 0.0, 0.5);
    let right = interval(|s| (1.0 - s).powf(b - 1.0) * s.powf(c - b - 1.0) * (1.0 - z + z * s).powf(-a), 0.0, 0.5);
    pre * (left + right)
}

/// Gaussian tail by direct integration of the density.
pub fn q_integral(x: f64) -> f64 {
    half_line(|t| (-(x + t) * (x + t) / 2.0).exp()) / (2.0 * PI).sqrt()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
