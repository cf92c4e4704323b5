//! Log-domain arithmetic in base 2.
//!
//! Every probability in the crate is carried as its base-2 logarithm so that
//! values such as `p = 2^-1000` and exponents such as `2^n - 1` stay
//! representable. `lg` always means `log2`.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`lg_binomial`] and largest `k` accepted by [`hit_penalty`].
pub const MAX_ARG: u64 = 1 << 20;

/// A base-2 logarithm. Finite or `-inf` (a true zero), never NaN.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lg(f64);

impl Lg {
    pub const ZERO: Lg = Lg(0.0);
    pub const NEG_INFINITY: Lg = Lg(f64::NEG_INFINITY);

    /// Wraps a value, rejecting NaN and `+inf`.
    pub fn new(value: f64) -> Result<Lg> {
        if value.is_nan() || value == f64::INFINITY {
            return Err(Error::Domain(format!("{value} is not a valid base-2 logarithm")));
        }
        Ok(Lg(value))
    }

    /// `lg x` for a nonnegative real.
    pub fn of(x: f64) -> Result<Lg> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain(format!("lg of negative value {x}")));
        }
        Lg::new(x.log2())
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `2^self` as an ordinary float (may overflow to `inf` or underflow to 0).
    pub fn exp2(self) -> f64 {
        self.0.exp2()
    }

    pub fn is_zero_prob(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl fmt::Debug for Lg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lg({})", self.0)
    }
}

impl fmt::Display for Lg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialOrd for Lg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl std::ops::Add for Lg {
    type Output = Lg;

    fn add(self, rhs: Lg) -> Lg {
        // -inf + finite stays -inf; no +inf can arise from two valid values
        Lg(self.0 + rhs.0)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `lg C(n, m)`.
///
/// Exact integer product for `n <= 64`; otherwise a compensated sum of
/// `lg((n - i) / (i + 1))` over the shorter side, whose terms are all positive.
pub fn lg_binomial(n: u64, m: u64) -> Result<Lg> {
    if m > n {
        return Err(Error::Domain(format!("C({n}, {m}) with m > n")));
    }
    if n > MAX_ARG {
        return Err(Error::Domain(format!("lg_binomial: n = {n} exceeds 2^20")));
    }
    let k = m.min(n - m);
    if n <= 64 {
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * u128::from(n - i) / u128::from(i + 1);
        }
        return Ok(Lg((c as f64).log2()));
    }
    let mut acc = CompensatedSum::default();
    for i in 0..k {
        acc.add(((n - i) as f64 / (i + 1) as f64).log2());
    }
    Ok(Lg(acc.total()))
}

/// `-ln(1 - p)` for `p = 2^lg_p` as a plain float (`0` once `p` underflows).
///
/// For `p < 1/2` uses `p * (1 + p/2 + p^2/3 + ...)`, summing until a term
/// drops below 1e-18 of the running sum.
fn neg_ln_one_minus(lp: f64) -> f64 {
    if lp >= -1.0 {
        return -(-lp.exp2()).ln_1p();
    }
    let p = lp.exp2();
    p * series_factor(p)
}

fn series_factor(p: f64) -> f64 {
    let mut series = 1.0;
    let mut pow = 1.0;
    let mut j = 1.0;
    loop {
        pow *= p;
        j += 1.0;
        let term = pow / j;
        if term < 1e-18 * series {
            return series;
        }
        series += term;
    }
}

/// `lg(-ln(1 - p))` for `p = 2^lg_p`, `lg_p <= 0`, without forming `p`
/// when it would underflow.
pub fn lg_neg_ln_one_minus(lg_p: Lg) -> Result<f64> {
    let lp = lg_p.get();
    if lp > 0.0 {
        return Err(Error::Domain(format!("lg p = {lp} > 0")));
    }
    if lp == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if lp == 0.0 {
        return Ok(f64::INFINITY);
    }
    if lp >= -1.0 {
        return Ok(neg_ln_one_minus(lp).log2());
    }
    Ok(lp + series_factor(lp.exp2()).log2())
}

/// `ln(1 - p)` for `p = 2^lg_p` as a plain float; `-inf` when `p = 1`.
pub fn ln_one_minus(lg_p: Lg) -> Result<f64> {
    let lg_mag = lg_neg_ln_one_minus(lg_p)?;
    Ok(-lg_mag.exp2())
}

/// `(2^k - 1) * lg(1 - p)` with `p = 2^lg_p`.
///
/// Formed directly while `p` and `2^k p` stay in the normal range; beyond
/// that the magnitude is assembled in log domain as
/// `lg(2^k - 1) + lg(-ln(1-p)) - lg(ln 2)` and exponentiated once.
pub fn hit_penalty(lg_p: Lg, k: u64) -> Result<Lg> {
    if lg_p.get() > 0.0 {
        return Err(Error::Domain(format!("lg p = {} > 0", lg_p.get())));
    }
    if k > MAX_ARG {
        return Err(Error::Domain(format!("hit_penalty: k = {k} exceeds 2^20")));
    }
    if k == 0 || lg_p.is_zero_prob() {
        return Ok(Lg::ZERO);
    }
    let lp = lg_p.get();
    if lp > -1000.0 && (k as f64) + lp < 1000.0 {
        // neither 2^k p nor p leaves the normal range
        let count = (k as f64).exp2() - 1.0;
        return Ok(Lg(-count * neg_ln_one_minus(lp) / LN_2));
    }
    let lg_count = k as f64 + (-(-(k as f64)).exp2()).ln_1p() / LN_2;
    let lg_mag = lg_count + lg_neg_ln_one_minus(lg_p)? - LN_2.log2();
    Ok(Lg(-lg_mag.exp2()))
}

/// `lg(sum 2^t_i)`; the empty sum is `-inf`.
pub fn lg_sum<I>(terms: I) -> Lg
where
    I: IntoIterator<Item = Lg>,
{
    let terms: Vec<f64> = terms.into_iter().map(Lg::get).collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Lg::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for t in terms {
        acc.add((t - max).exp2());
    }
    Lg(max + acc.total().log2())
}
