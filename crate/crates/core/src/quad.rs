//! Adaptive Gauss–Kronrod quadrature.

use alloc::vec;
use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Upper bound on the number of subintervals.
const MAX_INTERVALS: usize = 2000;

/// `∫_a^b f` to roughly `rel_tol` relative accuracy. The piece with the
/// largest error estimate is bisected until the summed estimate meets the
/// tolerance or the interval budget runs out.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (v, e) = gk15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 || parts.len() >= MAX_INTERVALS {
            return total;
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (l, el) = gk15(&mut f, lo, mid);
        let (r, er) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, l, el));
        parts.push((mid, hi, r, er));
    }
}

/// `∫_0^∞ f`, split at `scale` and mapped onto finite pieces.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, scale: f64, rel_tol: f64) -> f64 {
    let head = integrate(&mut f, 0.0, scale, rel_tol);
    // x = scale / t on (0, 1]
    let tail = integrate(
        |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                let x = scale / t;
                f(x) * scale / (t * t)
            }
        },
        0.0,
        1.0,
        rel_tol,
    );
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-12);
        let v = integrate_half_line(|x| (-x).exp(), 1.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-11);
        let v = integrate_half_line(|x| (-x * x).exp(), 1.0, 1e-12);
        assert!((v - core::f64::consts::PI.sqrt() / 2.0).abs() < 1e-11);
    }
}
