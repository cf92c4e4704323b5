//! Exact sampling of the random set system R(n, p).
//!
//! Each of the `2^n - 1` nonempty subsets of `[n]` is included independently
//! with probability `p`. The base generator is ChaCha8 (`rand_chacha`),
//! seeded through `SeedableRng::seed_from_u64` with a per-trial seed derived
//! by [`trial_seed`]. Changing the generator changes every sampled instance.

use std::collections::HashSet;

use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_one_minus, Lg};
use crate::set_system::{word_count, Edge, SetSystem, VertexSet, MAX_N};

/// Largest expected edge count the sampler will attempt.
pub const MAX_EXPECTED_EDGES: f64 = 1e8;

/// Ground sizes at or above this use the Poissonized sampler.
pub const POISSON_THRESHOLD: usize = 64;

/// Which family of `p` is in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// `p = 2^(-beta n)`, `0 < beta < 1`.
    Dense { beta: f64 },
    /// `p = n^alpha / 2^n`, `alpha > 0`.
    Sparse { alpha: f64 },
    ExplicitLgP { lg_p: Lg },
}

impl Regime {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Regime::Dense { beta } if !(beta > 0.0 && beta < 1.0) => {
                Err(Error::Domain(format!("beta = {beta} outside (0, 1)")))
            }
            Regime::Sparse { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::Domain(format!("alpha = {alpha} must be positive")))
            }
            Regime::ExplicitLgP { lg_p } if lg_p.get() > 0.0 => {
                Err(Error::Domain(format!("lg p = {} > 0", lg_p.get())))
            }
            _ => Ok(()),
        }
    }

    /// `lg p` for ground size `n`; errors when the regime yields `p > 1`.
    pub fn lg_p(&self, n: usize) -> Result<Lg> {
        self.validate()?;
        let lg_p = lg_p_of(*self, n);
        if lg_p.get() > 0.0 {
            return Err(Error::Domain(format!("{self:?} gives p > 1 at n = {n}")));
        }
        Ok(lg_p)
    }
}

/// `lg p`: `-beta n`, `alpha lg n - n`, or the explicit value.
pub fn lg_p_of(regime: Regime, n: usize) -> Lg {
    let v = match regime {
        Regime::Dense { beta } => -beta * n as f64,
        Regime::Sparse { alpha } => alpha * (n as f64).log2() - n as f64,
        Regime::ExplicitLgP { lg_p } => return lg_p,
    };
    Lg::new(v).expect("finite regime parameters give a finite lg p")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl std::fmt::LowerHex for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Derives the seed of trial `index` (a SplitMix64 finalizer over a Weyl step).
pub fn trial_seed(master: Seed, index: u64) -> Seed {
    let mut z = master.0 ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    Seed(z)
}

/// Sampling route. `Auto` picks geometric skipping below
/// [`POISSON_THRESHOLD`] and Poissonization at or above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Geometric,
    Poissonized,
}

/// `lg E|A| = lg(2^n - 1) + lg p`.
pub fn lg_expected_edges(n: usize, lg_p: Lg) -> f64 {
    let lg_count = n as f64 + (-(-(n as f64)).exp2()).ln_1p() / std::f64::consts::LN_2;
    lg_count + lg_p.get()
}

pub fn sample_system(n: usize, regime: Regime, seed: Seed) -> Result<SetSystem> {
    sample_system_with(n, regime, seed, Method::Auto)
}

pub fn sample_system_with(n: usize, regime: Regime, seed: Seed, method: Method) -> Result<SetSystem> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::GroundSize(n));
    }
    let lg_p = regime.lg_p(n)?;
    let mu = lg_expected_edges(n, lg_p).exp2();
    if mu > MAX_EXPECTED_EDGES {
        return Err(Error::InstanceTooLarge { mu });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let geometric = match method {
        Method::Auto => n < POISSON_THRESHOLD,
        Method::Geometric if n < POISSON_THRESHOLD => true,
        Method::Geometric => {
            return Err(Error::Domain(format!("geometric skipping needs n < 64, got {n}")));
        }
        Method::Poissonized => false,
    };
    let edges = if geometric {
        geometric_skip(n, lg_p, &mut rng)?
    } else {
        poissonized(n, mu, &mut rng)
    };
    Ok(SetSystem::from_sorted_unchecked(n, edges))
}

/// Walks subset indices `1..2^n` with geometric gaps; emits edges in ascending order.
fn geometric_skip(n: usize, lg_p: Lg, rng: &mut ChaCha8Rng) -> Result<Vec<Edge>> {
    let last = (1u64 << n) - 1;
    let ln_q = ln_one_minus(lg_p)?;
    let mut edges = Vec::new();
    if ln_q == 0.0 {
        // p below double precision: no subset is ever picked
        return Ok(edges);
    }
    let mut index = 0u64;
    loop {
        let u: f64 = rng.sample(Open01);
        let gap = (u.ln() / ln_q).floor();
        if gap >= (last - index) as f64 {
            break;
        }
        index += gap as u64 + 1;
        let bits = VertexSet::from_words(n, vec![index]).expect("index below 2^n");
        edges.push(Edge::new(bits).expect("index is nonzero"));
    }
    Ok(edges)
}

/// Poisson edge count, then that many distinct uniform nonempty subsets.
fn poissonized(n: usize, mu: f64, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut k = if mu > 0.0 {
        Poisson::new(mu).expect("positive finite mean").sample(rng) as u64
    } else {
        0
    };
    if n < 64 {
        k = k.min((1u64 << n) - 1);
    }
    let words = word_count(n);
    let top_mask = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(k as usize);
    let mut drawn = Vec::with_capacity(k as usize);
    while (drawn.len() as u64) < k {
        let mut w: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        w[words - 1] &= top_mask;
        if w.iter().all(|&x| x == 0) {
            continue;
        }
        // a collision is redrawn, keeping K distinct subsets
        if seen.insert(w.clone()) {
            drawn.push(w);
        }
    }
    let mut edges: Vec<Edge> = drawn
        .into_iter()
        .map(|w| Edge::new(VertexSet::from_words(n, w).expect("masked to n bits")).expect("nonzero"))
        .collect();
    edges.sort_by(|a, b| a.bits().cmp_numeric(b.bits()));
    edges
}
