//! Expected hitting-set counts, the finite-n threshold window, the dense
//! and sparse asymptotic predictions, and second-moment diagnostics.
//!
//! With `X_m` the number of hitting sets of size `m`,
//! `lambda_m = E X_m = C(n, m) (1 - p)^(2^(n-m) - 1)`: a fixed `m`-set hits the
//! system iff none of the nonempty subsets of its complement was picked.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{hit_penalty, lg_binomial, lg_sum, Lg};

/// `lg lambda_m`.
pub fn lg_lambda(n: usize, m: usize, lg_p: Lg) -> Result<Lg> {
    if m > n {
        return Err(Error::Domain(format!("m = {m} > n = {n}")));
    }
    Ok(lg_binomial(n as u64, m as u64)? + hit_penalty(lg_p, (n - m) as u64)?)
}

/// `lg lambda_m` for every `m` in `0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationCurve {
    pub n: usize,
    pub lg_p: Lg,
    pub values: Vec<Lg>,
}

impl ExpectationCurve {
    pub fn get(&self, m: usize) -> Lg {
        self.values[m]
    }
}

pub fn curve(n: usize, lg_p: Lg) -> Result<ExpectationCurve> {
    let values = (0..=n).map(|m| lg_lambda(n, m, lg_p)).collect::<Result<_>>()?;
    Ok(ExpectationCurve { n, lg_p, values })
}

/// The smallest `m` with `lambda_m >= 1` and the two-point support it predicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Window {
    pub h_hat: usize,
    pub support: Vec<usize>,
}

impl Window {
    pub fn contains(&self, m: usize) -> bool {
        self.support.contains(&m)
    }
}

pub fn finite_window(curve: &ExpectationCurve) -> Window {
    // lambda_n = 1, so the search always succeeds
    let h_hat = curve.values.iter().position(|v| v.get() >= 0.0).unwrap_or(curve.n);
    let support = (h_hat..=(h_hat + 1).min(curve.n)).collect();
    Window { h_hat, support }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub h: i64,
    /// How far the prediction sits below the leading term.
    pub phi: f64,
    /// `beta^-beta (1-beta)^(beta-1)`, dense regime only.
    pub delta: Option<f64>,
}

/// Binary entropy `H(beta)` in bits, so that `delta = 2^H(beta)`.
fn entropy_bits(beta: f64) -> f64 {
    -beta * beta.log2() - (1.0 - beta) * (1.0 - beta).log2()
}

/// Dense regime `p = 2^(-beta n)`: `h = floor((1-beta) n - lg(n ln delta)) + 1`.
pub fn dense_h(n: usize, beta: f64) -> Result<AsymptoticPrediction> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, 1)")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("dense prediction needs n >= 2, got {n}")));
    }
    let h_bits = entropy_bits(beta);
    let delta = h_bits.exp2();
    let n_ln_delta = n as f64 * h_bits * std::f64::consts::LN_2;
    if n_ln_delta <= 1.0 {
        return Err(Error::Domain(format!("n ln delta = {n_ln_delta} <= 1")));
    }
    let phi = n_ln_delta.log2();
    let h = ((1.0 - beta) * n as f64 - phi).floor() as i64 + 1;
    Ok(AsymptoticPrediction { h, phi, delta: Some(delta) })
}

/// Dense-regime size of the largest independent set: `n - 2 - (h - 1)`.
pub fn dense_i(n: usize, beta: f64) -> Result<i64> {
    Ok(n as i64 - 2 - (dense_h(n, beta)?.h - 1))
}

/// Sparse regime `p = n^alpha / 2^n`: `h = floor(alpha lg n - lg(alpha lg n ln n)) + 1`.
pub fn sparse_h(n: usize, alpha: f64) -> Result<AsymptoticPrediction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    let lead = alpha * (n as f64).log2();
    let inner = lead * (n as f64).ln();
    if inner.is_nan() || inner <= 1.0 {
        return Err(Error::Domain(format!("alpha lg n ln n = {inner} <= 1")));
    }
    let phi = inner.log2();
    let h = (lead - phi).floor() as i64 + 1;
    Ok(AsymptoticPrediction { h, phi, delta: None })
}

/// Pair-sum diagnostics for the second moment of `X_m`.
///
/// `terms[s-1] = C(m,s) C(n-m,s) C(n,m)^(2^-s - 1)` for `s = 1..=min(m, n-m)`.
/// `s0 = 2 lg(m ln n)`; `sigma1` sums `s >= ceil(s0)`, `sigma2` the rest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentDiagnostics {
    pub n: usize,
    pub m: usize,
    pub lg_lambda: Lg,
    pub s0: f64,
    /// First `s` counted in `sigma1`.
    pub split: usize,
    pub lg_terms: Vec<Lg>,
    #[serde(rename = "S")]
    pub s_sum: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub cond8: bool,
    /// Chebyshev bound on `P(X_m = 0)`: `max(0, 1/lambda - 1 + S)`.
    pub cheby_bound: f64,
}

pub fn second_moment(n: usize, m: usize, lg_lambda_m: Lg) -> Result<MomentDiagnostics> {
    if m < 1 || m + 1 > n {
        return Err(Error::Domain(format!("second moment needs 1 <= m <= n - 1, got m = {m}, n = {n}")));
    }
    let (nu, mu) = (n as u64, m as u64);
    let lg_c_nm = lg_binomial(nu, mu)?.get();
    let top = m.min(n - m);
    let mut lg_terms = Vec::with_capacity(top);
    for s in 1..=top as u64 {
        let v = lg_binomial(mu, s)?.get() + lg_binomial(nu - mu, s)?.get()
            + ((-(s as f64)).exp2() - 1.0) * lg_c_nm;
        lg_terms.push(Lg::new(v)?);
    }

    let ln_n = (n as f64).ln();
    let lg_m_ln_n = (m as f64 * ln_n).log2();
    let s0 = 2.0 * lg_m_ln_n;
    let split = s0.ceil().max(1.0) as usize;
    let sum_over = |range: std::ops::RangeInclusive<usize>| {
        lg_sum(range.filter_map(|s| lg_terms.get(s - 1).copied())).exp2()
    };
    let s_sum = lg_sum(lg_terms.iter().copied()).exp2();
    let sigma1 = sum_over(split..=top);
    let sigma2 = if split > 1 { sum_over(1..=(split - 1).min(top)) } else { 0.0 };
    let cond8 = (m as f64).ln() < (1.0 - 8.0 * lg_m_ln_n / m as f64) * ln_n;
    let cheby_bound = ((-lg_lambda_m.get()).exp2() - 1.0 + s_sum).max(0.0);
    Ok(MomentDiagnostics {
        n,
        m,
        lg_lambda: lg_lambda_m,
        s0,
        split,
        lg_terms,
        s_sum,
        sigma1,
        sigma2,
        cond8,
        cheby_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lg(x: f64) -> Lg {
        Lg::new(x).unwrap()
    }

    #[test]
    fn lambda_examples() {
        for lp in [-0.5, -3.0, -200.0] {
            assert_eq!(lg_lambda(9, 9, lg(lp)).unwrap().get(), 0.0);
        }
        assert_eq!(lg_lambda(4, 0, lg(-1.0)).unwrap().get(), -15.0);
        // lg 56 + 31 lg(7/8), evaluated directly
        let want = 56f64.log2() + 31.0 * 0.875f64.log2();
        let got = lg_lambda(8, 3, lg(-3.0)).unwrap().get();
        assert!((got - want).abs() < 1e-12);
        assert!((got + 0.16465).abs() < 1e-5);
        assert!(lg_lambda(3, 4, lg(-1.0)).is_err());
    }

    #[test]
    fn window_n8() {
        let c = curve(8, lg(-3.0)).unwrap();
        // lambda_3 = 56 (7/8)^31 ~ 0.892, lambda_4 = 70 (7/8)^15 ~ 9.44
        assert!((c.get(3).exp2() - 56.0 * 0.875f64.powi(31)).abs() < 1e-12);
        assert!((c.get(4).exp2() - 70.0 * 0.875f64.powi(15)).abs() < 1e-10);
        let w = finite_window(&c);
        assert_eq!(w, Window { h_hat: 4, support: vec![4, 5] });
    }

    #[test]
    fn window_support_clipped_at_n() {
        let c = curve(3, lg(0.0)).unwrap();
        let w = finite_window(&c);
        assert_eq!(w, Window { h_hat: 3, support: vec![3] });
    }

    #[test]
    fn window_near_empty_systems() {
        let c = curve(10, lg(-1e6)).unwrap();
        assert!(finite_window(&c).h_hat <= 1);
    }

    #[test]
    fn dense_examples() {
        let p = dense_h(64, 0.5).unwrap();
        assert_eq!(p.delta, Some(2.0));
        assert_eq!(p.h, 27);
        assert_eq!(dense_h(24, 0.5).unwrap().h, 8);
        assert_eq!(dense_i(64, 0.5).unwrap(), 36);
        assert_eq!(dense_i(24, 0.5).unwrap(), 15);
        assert!(dense_h(1, 0.5).is_err());
        assert!(dense_h(10, 1.0).is_err());
        // n ln delta <= 1 for a lopsided beta at tiny n
        assert!(dense_h(2, 0.01).is_err());
    }

    #[test]
    fn delta_range() {
        for i in 1..100 {
            let d = dense_h(100, i as f64 / 100.0).unwrap().delta.unwrap();
            assert!(d > 1.0 && d <= 2.0, "{d}");
        }
    }

    #[test]
    fn sparse_examples() {
        assert_eq!(sparse_h(1024, 2.0).unwrap().h, 13);
        assert_eq!(sparse_h(64, 2.0).unwrap().h, 7);
        assert!(sparse_h(2, 0.1).is_err());
        assert!(sparse_h(64, 0.0).is_err());
    }

    #[test]
    fn second_moment_single_term() {
        let d = second_moment(4, 1, lg(0.0)).unwrap();
        assert_eq!(d.lg_terms.len(), 1);
        assert!((d.s_sum - 1.5).abs() < 1e-12);
        let d = second_moment(10, 1, lg(0.0)).unwrap();
        assert!((d.s_sum - 9.0 / 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn second_moment_partition() {
        for (n, m) in [(24, 8), (100, 30), (1024, 13), (12, 4)] {
            let d = second_moment(n, m, lg(1.0)).unwrap();
            assert!(((d.sigma1 + d.sigma2) - d.s_sum).abs() <= 1e-9 * d.s_sum, "{n} {m}");
            assert!(d.cheby_bound >= 0.0);
        }
        assert!(second_moment(5, 0, lg(0.0)).is_err());
        assert!(second_moment(5, 5, lg(0.0)).is_err());
    }
}
