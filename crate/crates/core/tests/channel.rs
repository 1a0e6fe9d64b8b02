use marc_core::channel::{self, FadingBias, LinkPowers, NoisePsd};
use marc_core::rng::{DrawTag, StreamKey};
use num_complex::Complex64;
use proptest::prelude::*;
use rand_core::RngCore;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn fading_power_is_exponential() {
    let mut rng = StreamKey::new(11).rng(DrawTag::Channel);
    let omega = 2.0;
    let n = 200_000;
    let mut g: Vec<f64> = (0..n).map(|_| channel::complex_gaussian(&mut rng, omega).norm_sqr()).collect();
    let (m, se) = mean_and_se(&g);
    assert!((m - omega).abs() < 5.0 * se, "mean {m}");
    // Kolmogorov-Smirnov against 1 - e^{-g/Ω}; 1.95/√n is the 0.1% critical value
    g.sort_by(f64::total_cmp);
    let d = g
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x / omega).exp();
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.95 / (n as f64).sqrt(), "KS distance {d}");
}

#[test]
fn fading_phase_is_uniform() {
    let mut rng = StreamKey::new(12).rng(DrawTag::Channel);
    let n = 100_000;
    let h: Vec<Complex64> = (0..n).map(|_| channel::complex_gaussian(&mut rng, 1.0)).collect();
    let (mr, ser) = mean_and_se(&h.iter().map(|x| x.re).collect::<Vec<_>>());
    let (mi, sei) = mean_and_se(&h.iter().map(|x| x.im).collect::<Vec<_>>());
    assert!(mr.abs() < 5.0 * ser && mi.abs() < 5.0 * sei);
    let (c, sec) = mean_and_se(&h.iter().map(|x| x.re * x.im).collect::<Vec<_>>());
    assert!(c.abs() < 5.0 * sec, "re/im correlation {c}");
}

#[test]
fn noise_has_half_psd_per_component() {
    let n0 = NoisePsd::new(0.3).unwrap();
    let zeros = vec![Complex64::new(0.0, 0.0); 200_000];
    let y = channel::add_awgn(&mut StreamKey::new(3).rng(DrawTag::Noise), &zeros, n0);
    for part in [y.iter().map(|v| v.re * v.re).collect::<Vec<_>>(), y.iter().map(|v| v.im * v.im).collect()] {
        let (m, se) = mean_and_se(&part);
        assert!((m - 0.15).abs() < 5.0 * se, "component variance {m}");
    }
}

#[test]
fn snr_and_urc_offsets() {
    let n0 = NoisePsd::from_snr_db(20.0, 2.0).unwrap();
    assert!((n0.value() - 0.02).abs() < 1e-15);
    let lp = LinkPowers::with_urc_offset_db(1.0, 3.0).unwrap();
    assert!((lp.omega_to_r - 10f64.powf(0.3)).abs() < 1e-15);
    assert!(NoisePsd::new(0.0).is_err());
    assert!(LinkPowers::new(1.0, -1.0).is_err());
    assert!(FadingBias::new(0.0).is_err());
    assert!(FadingBias::new(1.5).is_err());
}

#[test]
fn importance_sampling_is_unbiased() {
    let bias = FadingBias::new(0.01).unwrap();
    let mut rng = StreamKey::new(5).rng(DrawTag::Importance);
    let n = 400_000;
    let t = 0.005;
    let mut w = Vec::with_capacity(n);
    let mut hit = Vec::with_capacity(n);
    for _ in 0..n {
        let (h, weight) = bias.draw(&mut rng, 1.0);
        assert!(weight > 0.0 && weight <= 2.0);
        w.push(weight);
        hit.push(if h.norm_sqr() < t { weight } else { 0.0 });
    }
    let (mw, sew) = mean_and_se(&w);
    assert!((mw - 1.0).abs() < 5.0 * sew, "E[w] = {mw}");
    let exact = 1.0 - (-t).exp();
    let (mh, seh) = mean_and_se(&hit);
    assert!((mh - exact).abs() < 5.0 * seh, "P(g<t) {mh} vs {exact}");
    // the biased sampler must do better than plain sampling on this event
    let plain_se = (exact * (1.0 - exact) / n as f64).sqrt();
    assert!(seh < 0.5 * plain_se);
}

#[test]
fn biased_frames_only_touch_destination_links() {
    let powers = LinkPowers::new(4.0, 1.0).unwrap();
    let bias = FadingBias::for_link_snr(1000.0, 2.0);
    assert!((bias.beta() - 0.002).abs() < 1e-15);
    let n = 100_000;
    let mut rng = StreamKey::new(8).rng(DrawTag::Channel);
    let mut relay_power = Vec::with_capacity(n);
    for _ in 0..n {
        let (ch, w) = channel::draw_channel_biased(&mut rng, powers, 2, &bias);
        assert!(w <= 8.0 + 1e-12);
        relay_power.push(ch.h_ar().norm_sqr());
    }
    let (m, se) = mean_and_se(&relay_power);
    assert!((m - 4.0).abs() < 5.0 * se);
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let key = StreamKey::new(42).with_point(3).with_frame(17);
    let a: Vec<u64> = (0..4)
        .map({
            let mut r = key.rng(DrawTag::Noise);
            move |_| r.next_u64()
        })
        .collect();
    let b: Vec<u64> = (0..4)
        .map({
            let mut r = key.rng(DrawTag::Noise);
            move |_| r.next_u64()
        })
        .collect();
    assert_eq!(a, b);
    let first = |k: StreamKey, tag| k.rng(tag).next_u64();
    let base = first(key, DrawTag::Noise);
    assert_ne!(base, first(key.with_frame(18), DrawTag::Noise));
    assert_ne!(base, first(key.with_point(4), DrawTag::Noise));
    assert_ne!(base, first(StreamKey { seed: 43, ..key }, DrawTag::Noise));
    assert_ne!(base, first(key, DrawTag::Bits));
}

proptest! {
    #[test]
    fn likelihood_ratio_bounded(beta in 1e-9f64..=1.0, seed in any::<u64>()) {
        let bias = FadingBias::new(beta).unwrap();
        let mut rng = StreamKey::new(seed).rng(DrawTag::Importance);
        for _ in 0..64 {
            let (h, w) = bias.draw(&mut rng, 0.7);
            prop_assert!(w > 0.0 && w <= 2.0 && h.norm_sqr().is_finite());
        }
    }
}
