//! Running sums for one SNR point and the confidence interval.

/// Two-sided 95 % normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `p̂` observed over `n` Bernoulli trials.
/// `n` may be fractional (an effective sample size).
pub fn wilson(p_hat: f64, n: f64, z: f64) -> (f64, f64) {
    if n <= 0.0 {
        return (0.0, 1.0);
    }
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // at the edges centre ∓ half cancels exactly in theory but not in floats
    let lo = if p_hat <= 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p_hat >= 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Per-frame sums, merged in a fixed order so totals are reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct Accumulator {
    pub frames: u64,
    /// Information bits counted over all users.
    pub bits: u64,
    /// Raw (unweighted) bit errors.
    pub bit_errors: u64,
    /// `Σ w e / B` and `Σ (w e / B)²` over frames (B bits per frame).
    pub sum_x: f64,
    pub sum_x2: f64,
    /// Weighted error sums per user.
    pub user_weighted_errors: Vec<f64>,
    /// Frames per relay decoding mask.
    pub mask_counts: Vec<u64>,
    pub energy: f64,
}

impl Accumulator {
    pub fn new(users: usize, relay: bool) -> Self {
        Self {
            frames: 0,
            bits: 0,
            bit_errors: 0,
            sum_x: 0.0,
            sum_x2: 0.0,
            user_weighted_errors: vec![0.0; users],
            mask_counts: if relay { vec![0; 1 << users] } else { Vec::new() },
            energy: 0.0,
        }
    }

    pub fn push(&mut self, o: &marc_core::trial::FrameOutcome) {
        let b = o.total_bits();
        let e = o.total_errors();
        self.frames += 1;
        self.bits += b;
        self.bit_errors += e;
        let x = o.weight * e as f64 / b as f64;
        self.sum_x += x;
        self.sum_x2 += x * x;
        for (acc, &ue) in self.user_weighted_errors.iter_mut().zip(&o.bit_errors) {
            *acc += o.weight * ue as f64;
        }
        if let Some(m) = o.relay_mask {
            self.mask_counts[m] += 1;
        }
        self.energy += o.energy;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.frames += other.frames;
        self.bits += other.bits;
        self.bit_errors += other.bit_errors;
        self.sum_x += other.sum_x;
        self.sum_x2 += other.sum_x2;
        self.user_weighted_errors.iter_mut().zip(&other.user_weighted_errors).for_each(|(a, b)| *a += b);
        self.mask_counts.iter_mut().zip(&other.mask_counts).for_each(|(a, b)| *a += b);
        self.energy += other.energy;
    }

    /// Weighted bit error rate.
    pub fn ber(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.sum_x / self.frames as f64
    }

    /// Variance of [`ber`](Self::ber) from the spread of per-frame error
    /// fractions. Errors cluster within a block-fading frame, so this is
    /// wider than a per-bit binomial variance.
    pub fn ber_variance(&self) -> f64 {
        if self.frames < 2 {
            return f64::INFINITY;
        }
        let n = self.frames as f64;
        let mean = self.sum_x / n;
        ((self.sum_x2 / n - mean * mean).max(0.0) * n / (n - 1.0)) / n
    }

    /// `(ber/σ)²`: the error count an independent-bit experiment with the
    /// same relative precision would need.
    pub fn equivalent_errors(&self) -> f64 {
        let v = self.ber_variance();
        if v == 0.0 || !v.is_finite() {
            return 0.0;
        }
        self.ber().powi(2) / v
    }

    /// 95 % Wilson interval using the effective number of independent bits
    /// `ber(1-ber)/Var(ber)`. Without errors, the raw bit count is used.
    pub fn interval(&self) -> (f64, f64) {
        let p = self.ber();
        let v = self.ber_variance();
        let n_eff = if p > 0.0 && v > 0.0 && v.is_finite() { p * (1.0 - p) / v } else { self.bits as f64 };
        let (lo, hi) = wilson(p.min(1.0), n_eff, Z95);
        (lo.min(p), hi.max(p))
    }

    pub fn user_ber(&self, bits_per_user_frame: u64) -> Vec<f64> {
        let n = (self.frames * bits_per_user_frame) as f64;
        self.user_weighted_errors.iter().map(|e| if n > 0.0 { e / n } else { 0.0 }).collect()
    }

    /// Relay state frequencies. For two users entry `m` is the fraction of
    /// frames with decoding mask `m`, i.e. `p0..p3`. For more users entry `j`
    /// counts frames in which exactly `j` users were decoded (capped at 3).
    pub fn state_histogram(&self) -> Option<[f64; 4]> {
        if self.mask_counts.is_empty() || self.frames == 0 {
            return None;
        }
        let n = self.frames as f64;
        let mut out = [0.0; 4];
        if self.mask_counts.len() == 4 {
            for (o, &c) in out.iter_mut().zip(&self.mask_counts) {
                *o = c as f64 / n;
            }
        } else {
            for (mask, &c) in self.mask_counts.iter().enumerate() {
                let j = (mask.count_ones() as usize).min(3);
                out[j] += c as f64 / n;
            }
        }
        Some(out)
    }

    /// Stop rule: enough raw errors and enough equivalent errors.
    pub fn satisfied(&self, target: u64) -> bool {
        self.bit_errors >= target && self.equivalent_errors() >= target as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use marc_core::trial::FrameOutcome;

    #[test]
    fn wilson_matches_textbook() {
        // 10 successes in 100: (0.0552, 0.1744)
        let (lo, hi) = wilson(0.1, 100.0, Z95);
        assert!((lo - 0.05522914).abs() < 1e-6 && (hi - 0.17436566).abs() < 1e-6);
        let (lo, hi) = wilson(0.0, 50.0, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
    }

    fn outcome(errors: u64, weight: f64, mask: usize) -> FrameOutcome {
        FrameOutcome { bit_errors: vec![errors, 0], bits_per_user: 10, weight, relay_mask: Some(mask), energy: 1.0 }
    }

    #[test]
    fn merge_is_push_sequence() {
        let frames: Vec<FrameOutcome> =
            (0..20).map(|i| outcome(i % 3, 1.0 + i as f64 * 0.1, (i % 4) as usize)).collect();
        let mut whole = Accumulator::new(2, true);
        frames.iter().for_each(|f| whole.push(f));
        let mut a = Accumulator::new(2, true);
        let mut b = Accumulator::new(2, true);
        frames[..7].iter().for_each(|f| a.push(f));
        frames[7..].iter().for_each(|f| b.push(f));
        a.merge(&b);
        assert_eq!(a.frames, whole.frames);
        assert_eq!(a.bit_errors, whole.bit_errors);
        assert!((a.ber() - whole.ber()).abs() < 1e-15);
        let h = a.state_histogram().unwrap();
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interval_brackets_estimate() {
        let mut acc = Accumulator::new(2, false);
        for i in 0..1000 {
            acc.push(&FrameOutcome {
                bit_errors: vec![if i % 50 == 0 { 7 } else { 0 }, 0],
                bits_per_user: 10,
                weight: 1.0,
                relay_mask: None,
                energy: 0.0,
            });
        }
        let (lo, hi) = acc.interval();
        assert!(lo <= acc.ber() && acc.ber() <= hi);
        // clustered errors widen the interval beyond the per-bit one
        let (blo, bhi) = wilson(acc.ber(), acc.bits as f64, Z95);
        assert!(hi - lo > bhi - blo);
        assert!(acc.state_histogram().is_none());
    }
}
