//! Fast self-checks behind `marc validate`.

use marc_core::bounds::{self, BoundInputs, StateProbs};
use marc_core::coding::{self, ConvCode};
use marc_core::quad;
use marc_core::special::{self, BesselOrder};

use crate::config::{SchemeName, SweepConfig};
use crate::engine;
use crate::output;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn laplace_transform() -> Check {
    let mut worst: f64 = 0.0;
    for &lambda in &[0.5, 1.0, 2.0] {
        for &s in &[0.1, 1.0, 10.0, 1000.0] {
            worst = worst.max(rel(bounds::laplace_z(s, lambda), bounds::laplace_z_quadrature(s, lambda)));
        }
    }
    check("laplace_z closed form vs quadrature", worst < 1e-6, format!("max rel err {worst:.2e}"))
}

fn harmonic_cdf() -> Check {
    let mut worst: f64 = 0.0;
    for &lambda in &[0.5, 2.0] {
        for &z in &[0.1, 0.5, 1.0, 2.0] {
            let integral = quad::integrate(|t| bounds::lemma1_pdf(t, lambda), 0.0, z, 1e-12);
            worst = worst.max((integral - bounds::lemma1_cdf(z, lambda)).abs());
        }
    }
    check("harmonic-mean CDF vs integrated density", worst < 1e-9, format!("max abs err {worst:.2e}"))
}

fn bessel() -> Check {
    let mut worst: f64 = 0.0;
    for &x in &[0.3, 1.0, 2.0, 5.0] {
        for (order, nu) in [(BesselOrder::Zero, 0.0), (BesselOrder::One, 1.0)] {
            // K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(νt) dt
            let integral = quad::integrate_half_line(|t: f64| (-x * t.cosh()).exp() * (nu * t).cosh(), 1.0, 1e-13);
            worst = worst.max(rel(special::bessel_k(order, x).unwrap(), integral));
        }
    }
    check("Bessel K0/K1 vs integral representation", worst < 1e-10, format!("max rel err {worst:.2e}"))
}

fn hypergeometric() -> Check {
    let mut worst: f64 = 0.0;
    for &z in &[0.3, 0.9, 0.97, 0.999] {
        let exact = -(1.0f64 - z).ln() / z;
        worst = worst.max(rel(special::gauss_2f1(1.0, 1.0, 2.0, z).unwrap(), exact));
    }
    check("2F1(1,1;2;z) = -ln(1-z)/z", worst < 1e-12, format!("max rel err {worst:.2e}"))
}

fn free_distance() -> Check {
    let code = ConvCode::rate_third_k3();
    check("free distance of [5,7,7]", code.d_free() == 8, format!("d_free {} B {}", code.d_free(), code.b_dfree()))
}

fn viterbi_ml() -> Check {
    let code = ConvCode::rate_third_k3();
    let codebook: Vec<Vec<u8>> = (0..256u32)
        .map(|m| coding::conv_encode(&(0..8).map(|i| (m >> i & 1) as u8).collect::<Vec<_>>(), &code))
        .collect();
    let mut mismatches = 0;
    for (m, word) in codebook.iter().enumerate() {
        let mut rx = word.clone();
        let n = rx.len();
        for j in 0..3 {
            rx[(m * 7 + j * 11) % n] ^= 1;
        }
        let dist = |c: &Vec<u8>| c.iter().zip(&rx).filter(|(a, b)| a != b).count();
        let best = codebook.iter().enumerate().min_by_key(|(_, c)| dist(c)).map(|(i, _)| i).unwrap();
        let decoded = coding::viterbi_decode_hard(&rx, &code).unwrap();
        let idx = decoded.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum::<usize>();
        mismatches += (idx != best) as u32;
    }
    check("Viterbi vs brute-force ML, k=8, 3 errors", mismatches == 0, format!("{mismatches} mismatches of 256"))
}

fn crc_detection() -> Check {
    let block = coding::crc_append(&(0..50).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect::<Vec<_>>());
    let mut missed = 0;
    for i in 0..block.len() {
        for j in i..block.len() {
            let mut b = block.clone();
            b[i] ^= 1;
            if j != i {
                b[j] ^= 1;
            }
            missed += coding::crc_check(&b) as u32;
        }
    }
    check("CRC-16 detects all 1- and 2-bit errors", missed == 0, format!("{missed} undetected"))
}

fn bound_above_exact() -> Check {
    let mut ok = true;
    for db in (0..=40).step_by(5) {
        let i = BoundInputs::new(10f64.powf(db as f64 / 10.0), 1.0, StateProbs::IDEAL).unwrap();
        ok &= bounds::theorem1_bound(&i) >= bounds::exact_q_uncoded(&i);
    }
    check("exponential tail bound above exact-Q expression", ok, "0..40 dB".into())
}

fn determinism() -> Check {
    let mut cfg = SweepConfig::new(SchemeName::Marc, vec![5.0, 15.0]);
    cfg.max_frames = 3000;
    cfg.target_bit_errors = 50;
    cfg.seed = 7;
    let run = |workers| {
        let mut c = cfg.clone();
        c.workers = workers;
        engine::run_sweep(&c).map(|p| output::sweep_csv("x", &p)).unwrap_or_default()
    };
    let a = run(1);
    let ok = !a.is_empty() && a == run(3);
    check("sweep output independent of worker count", ok, "workers 1 vs 3".into())
}

fn direct_link() -> Check {
    let mut cfg = SweepConfig::new(SchemeName::Direct, vec![10.0]);
    cfg.target_bit_errors = 400;
    cfg.importance_sampling = false;
    let Ok(points) = engine::run_sweep(&cfg) else {
        return check("direct BPSK BER vs closed form", false, "sweep failed".into());
    };
    let p = &points[0];
    let exact = bounds::exact_q_single(10.0, 1.0);
    let ok = (p.ber - exact).abs() <= 3.0 * p.sigma();
    check("direct BPSK BER vs closed form", ok, format!("sim {:.4e} exact {exact:.4e}", p.ber))
}

pub fn run_checks() -> Vec<Check> {
    vec![
        laplace_transform(),
        harmonic_cdf(),
        bessel(),
        hypergeometric(),
        free_distance(),
        viterbi_ml(),
        crc_detection(),
        bound_above_exact(),
        determinism(),
        direct_link(),
    ]
}

pub fn format_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    checks
        .iter()
        .map(|c| format!("{}  {:width$}  {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect()
}
