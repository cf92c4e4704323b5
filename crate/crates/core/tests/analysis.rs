use hitnum_core::analysis::{curve, dense_h, dense_i, finite_window, lg_lambda, second_moment, sparse_h};
use hitnum_core::Lg;
use num_bigint::BigUint;
use proptest::prelude::*;

fn lg(x: f64) -> Lg {
    Lg::new(x).unwrap()
}

fn big_binomial_f64(n: u64, m: u64) -> f64 {
    let mut c = BigUint::from(1u32);
    for i in 0..m {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    u64::try_from(&c).unwrap() as f64
}

#[test]
fn second_moment_n24_m8_matches_direct_sum() {
    let (n, m) = (24u64, 8u64);
    let c_nm = big_binomial_f64(n, m);
    let direct: f64 = (1..=m)
        .map(|s| big_binomial_f64(m, s) * big_binomial_f64(n - m, s) * c_nm.powf((-(s as f64)).exp2() - 1.0))
        .sum();
    // frozen from an independent 40-digit evaluation
    assert!((direct - 1.957_262_869_453_219).abs() < 1e-9);
    let d = second_moment(24, 8, lg(2.0)).unwrap();
    assert!((d.s_sum - direct).abs() <= 1e-6 * direct);
    assert!(((d.sigma1 + d.sigma2) - d.s_sum).abs() <= 1e-9 * d.s_sum);
    // s0 = 2 lg(8 ln 24)
    assert!((d.s0 - 2.0 * (8.0 * 24f64.ln()).log2()).abs() < 1e-12);
    assert_eq!(d.split, d.s0.ceil() as usize);
}

#[test]
fn second_moment_cond8_and_bound() {
    let d = second_moment(1024, 300, lg(10.0)).unwrap();
    let (lnm, lnn) = (300f64.ln(), 1024f64.ln());
    assert_eq!(d.cond8, lnm < (1.0 - 8.0 * (300.0 * lnn).log2() / 300.0) * lnn);
    // the condition first holds only for much larger n
    assert!(!d.cond8);
    assert!(second_moment(16384, 400, lg(10.0)).unwrap().cond8);
    assert!(!second_moment(16384, 100, lg(10.0)).unwrap().cond8);
    let d = second_moment(12, 4, lg(3.0)).unwrap();
    assert!((d.cheby_bound - (0.125 - 1.0 + d.s_sum)).abs() < 1e-12);
}

#[test]
fn window_invariants_n24() {
    let c = curve(24, lg(-12.0)).unwrap();
    let w = finite_window(&c);
    assert_eq!(w.h_hat, 9);
    assert!(c.get(w.h_hat).get() >= 0.0);
    assert!(c.get(w.h_hat - 1).get() < 0.0);
    assert_eq!(w.support, vec![9, 10]);
}

#[test]
fn curve_ends_at_zero_and_is_finite() {
    for (n, lp) in [(10, -0.5), (64, -52.0), (300, -150.0), (1024, -1004.0)] {
        let c = curve(n, lg(lp)).unwrap();
        assert_eq!(c.values.len(), n + 1);
        assert_eq!(c.get(n).get(), 0.0);
        assert!(c.values.iter().all(|v| v.get().is_finite()));
    }
}

#[test]
fn corollary_identity_grid() {
    for n in [10usize, 17, 40, 64, 100, 333, 1024] {
        for b in 1..20 {
            let beta = b as f64 / 20.0;
            if let Ok(h) = dense_h(n, beta) {
                assert_eq!(dense_i(n, beta).unwrap(), n as i64 - h.h - 1);
                assert!(h.phi >= 0.0);
            }
        }
    }
}

#[test]
fn sparse_phi_nonnegative() {
    for n in [16usize, 64, 256, 1024] {
        for a in [0.5, 1.0, 2.0, 3.0] {
            assert!(sparse_h(n, a).unwrap().phi >= 0.0);
        }
    }
}

proptest! {
    #[test]
    fn ratio_law(n in 2usize..200, frac in 0.0f64..1.0, lp in -60.0f64..-0.01) {
        let m = ((n - 1) as f64 * frac) as usize;
        let a = lg_lambda(n, m, lg(lp)).unwrap().get();
        let b = lg_lambda(n, m + 1, lg(lp)).unwrap().get();
        let p = lp.exp2();
        let neg_lg_q = -(-p).ln_1p() / std::f64::consts::LN_2;
        let floor = ((n - m) as f64 / (m + 1) as f64).log2();
        let closed = floor + ((n - m - 1) as f64).exp2() * neg_lg_q;
        if a.is_finite() {
            prop_assert!((b - a - closed).abs() <= 1e-8 * closed.abs().max(1.0), "{} vs {}", b - a, closed);
            prop_assert!(b - a >= floor - 1e-9);
        }
    }

    #[test]
    fn increasing_below_half(n in 2usize..300, lp in -100.0f64..-0.01) {
        let c = curve(n, lg(lp)).unwrap();
        for m in 0..n / 2 {
            prop_assert!(c.get(m + 1).get() > c.get(m).get(), "m = {}", m);
        }
    }
}
