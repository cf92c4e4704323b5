//! Seeded Monte Carlo experiments over R(n, p).
//!
//! Trial `i` samples with `trial_seed(master, i)` and solves exactly. Trials
//! run on a rayon pool of `workers` threads; records are always reported in
//! index order, so every output except the optional timing column is a pure
//! function of the configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{curve, dense_h, finite_window, lg_lambda, second_moment, sparse_h, AsymptoticPrediction, Window};
use crate::error::{Error, Result};
use crate::numerics::{lg_binomial, Lg};
use crate::sampler::{sample_system, trial_seed, Regime, Seed};
use crate::set_system::{SetSystem, MAX_N};
use crate::solver::{for_each_combination, solve_min_hitting, Status, DEFAULT_NODE_BUDGET};

/// Upper limit on `C(n, m)` for per-trial `X_m` enumeration.
pub const MAX_XM_SUBSETS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub regime: Regime,
    pub trials: u64,
    pub master_seed: Seed,
    pub node_budget: u64,
    /// Scheduling only; left out of serialized output.
    #[serde(skip)]
    pub workers: usize,
    /// Count hitting sets of this size in every trial.
    pub count_xm: Option<usize>,
    /// Write measured milliseconds in the CSV `ms` column instead of 0.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, regime: Regime, trials: u64, master_seed: Seed) -> ExperimentConfig {
        ExperimentConfig {
            n,
            regime,
            trials,
            master_seed,
            node_budget: DEFAULT_NODE_BUDGET,
            workers: 1,
            count_xm: None,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_N).contains(&self.n) {
            return Err(Error::GroundSize(self.n));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.node_budget == 0 {
            return Err(Error::Config("node budget must be at least 1".into()));
        }
        self.regime.lg_p(self.n)?;
        if let Some(m) = self.count_xm {
            if m > self.n {
                return Err(Error::Config(format!("--count-xm {m} exceeds n = {}", self.n)));
            }
            if lg_binomial(self.n as u64, m as u64)?.exp2() > MAX_XM_SUBSETS {
                return Err(Error::CountLimit { n: self.n, m });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: Seed,
    pub edge_count: usize,
    pub h_size: usize,
    pub nodes: u64,
    pub status: Status,
    /// Wall-clock diagnostic; never part of determinism checks.
    pub elapsed_ms: f64,
    pub x_m: Option<u64>,
}

/// Number of `m`-subsets of `[n]` that hit every edge.
pub fn count_hitting_sets(sys: &SetSystem, m: usize) -> Result<u64> {
    let n = sys.n();
    if m > n {
        return Err(Error::Domain(format!("m = {m} > n = {n}")));
    }
    if lg_binomial(n as u64, m as u64)?.exp2() > MAX_XM_SUBSETS {
        return Err(Error::CountLimit { n, m });
    }
    let words = crate::set_system::word_count(n);
    let flat: Vec<u64> = sys.edges().iter().flat_map(|e| e.bits().words().iter().copied()).collect();
    let mut h = vec![0u64; words];
    let mut count = 0;
    for_each_combination(n, m, |combo| {
        h.iter_mut().for_each(|w| *w = 0);
        for &v in combo {
            h[v / 64] |= 1 << (v % 64);
        }
        if flat.chunks_exact(words).all(|e| e.iter().zip(&h).any(|(a, b)| a & b != 0)) {
            count += 1;
        }
        true
    });
    Ok(count)
}

pub fn run_trial(config: &ExperimentConfig, index: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(config.master_seed, index);
    let sys = sample_system(config.n, config.regime, seed)?;
    let solved = solve_min_hitting(&sys, Some(config.node_budget));
    if solved.status != Status::Optimal {
        return Err(Error::BudgetExceeded { index, budget: config.node_budget, best: solved.size });
    }
    let x_m = config.count_xm.map(|m| count_hitting_sets(&sys, m)).transpose()?;
    Ok(TrialRecord {
        index,
        seed,
        edge_count: sys.len(),
        h_size: solved.size,
        nodes: solved.nodes,
        status: solved.status,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        x_m,
    })
}

/// Expected `X_m` for the counted size, with the second-moment bound when defined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XmPrediction {
    pub m: usize,
    pub lg_lambda: Lg,
    /// `1/lambda - 1 + S`, only for `1 <= m <= n - 1`.
    pub variance_ratio_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Predictions {
    pub lg_p: Lg,
    pub window: Window,
    pub asymptotic: Option<AsymptoticPrediction>,
    pub xm: Option<XmPrediction>,
}

impl Predictions {
    pub fn for_config(config: &ExperimentConfig) -> Result<Predictions> {
        let n = config.n;
        let lg_p = config.regime.lg_p(n)?;
        let window = finite_window(&curve(n, lg_p)?);
        // degenerate small-n parameters have no asymptotic prediction
        let asymptotic = match config.regime {
            Regime::Dense { beta } => dense_h(n, beta).ok(),
            Regime::Sparse { alpha } => sparse_h(n, alpha).ok(),
            Regime::ExplicitLgP { .. } => None,
        };
        let xm = match config.count_xm {
            Some(m) => {
                let lgl = lg_lambda(n, m, lg_p)?;
                let bound = if m >= 1 && m < n {
                    let d = second_moment(n, m, lgl)?;
                    Some((-lgl.get()).exp2() - 1.0 + d.s_sum)
                } else {
                    None
                };
                Some(XmPrediction { m, lg_lambda: lgl, variance_ratio_bound: bound })
            }
            None => None,
        };
        Ok(Predictions { lg_p, window, asymptotic, xm })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    /// `|h_hat - h|` against the asymptotic prediction.
    pub h_hat_vs_asymptotic: Option<u64>,
    pub fraction_in_window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XmSummary {
    pub m: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub zero_fraction: f64,
    pub predicted_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: u64,
    pub histogram: BTreeMap<usize, u64>,
    pub mode: usize,
    pub two_point_mass: f64,
    /// Smallest `m` whose pair `{m, m+1}` attains `two_point_mass`.
    pub two_point_base: usize,
    pub window_finite: Window,
    pub prediction_asymptotic: Option<AsymptoticPrediction>,
    pub agreement: Agreement,
    pub x_m: Option<XmSummary>,
}

pub fn summarize(records: &[TrialRecord], predictions: &Predictions) -> Summary {
    let trials = records.len() as u64;
    let mut histogram = BTreeMap::new();
    for r in records {
        *histogram.entry(r.h_size).or_insert(0u64) += 1;
    }
    let mut mode = 0;
    let mut mode_count = 0;
    for (&m, &c) in &histogram {
        if c > mode_count {
            mode = m;
            mode_count = c;
        }
    }
    let denom = trials.max(1) as f64;
    let mut two_point_base = 0;
    let mut best_pair = 0;
    for &m in histogram.keys() {
        let pair = histogram[&m] + histogram.get(&(m + 1)).copied().unwrap_or(0);
        if pair > best_pair {
            best_pair = pair;
            two_point_base = m;
        }
    }
    let window = predictions.window.clone();
    let inside = records.iter().filter(|r| window.contains(r.h_size)).count();
    let agreement = Agreement {
        h_hat_vs_asymptotic: predictions.asymptotic.as_ref().map(|a| (window.h_hat as i64 - a.h).unsigned_abs()),
        fraction_in_window: inside as f64 / denom,
    };
    let x_m = predictions.xm.as_ref().and_then(|xp| {
        let xs: Vec<f64> = records.iter().map(|r| r.x_m.map(|x| x as f64)).collect::<Option<_>>()?;
        let mean = xs.iter().sum::<f64>() / denom;
        let variance = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
        } else {
            0.0
        };
        let zeros = xs.iter().filter(|&&x| x == 0.0).count();
        Some(XmSummary {
            m: xp.m,
            mean,
            variance,
            zero_fraction: zeros as f64 / denom,
            predicted_mean: xp.lg_lambda.exp2(),
        })
    });
    Summary {
        trials,
        histogram,
        mode,
        two_point_mass: best_pair as f64 / denom,
        two_point_base,
        window_finite: window,
        prediction_asymptotic: predictions.asymptotic.clone(),
        agreement,
        x_m,
    }
}

/// Runs every trial and summarizes. A trial that exhausts its node budget
/// aborts the whole experiment; the lowest failing index is reported.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Summary)> {
    config.validate()?;
    let predictions = Predictions::for_config(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<TrialRecord>> =
        pool.install(|| (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect());
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records, &predictions);
    Ok((records, summary))
}

pub fn csv_header(count_xm: bool) -> &'static str {
    if count_xm {
        "index,seed,edge_count,h_size,nodes,status,ms,x_m"
    } else {
        "index,seed,edge_count,h_size,nodes,status,ms"
    }
}

/// CSV rendering: fixed columns, LF line endings, seeds as 16-digit hex.
pub fn records_csv(records: &[TrialRecord], timing: bool) -> String {
    let with_xm = records.first().is_some_and(|r| r.x_m.is_some());
    let mut out = String::new();
    out.push_str(csv_header(with_xm));
    out.push('\n');
    for r in records {
        write!(out, "{},0x{:016x},{},{},{},{},", r.index, r.seed, r.edge_count, r.h_size, r.nodes, r.status.as_str())
            .unwrap();
        if timing {
            write!(out, "{:.3}", r.elapsed_ms).unwrap();
        } else {
            out.push('0');
        }
        if let Some(x) = r.x_m {
            write!(out, ",{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a ExperimentConfig,
    lg_p: Lg,
    summary: &'a Summary,
}

/// Pretty JSON of the configuration and summary, keys in declaration order.
pub fn summary_json(config: &ExperimentConfig, summary: &Summary) -> Result<String> {
    let lg_p = config.regime.lg_p(config.n)?;
    let mut s = serde_json::to_string_pretty(&Report { config, lg_p, summary })
        .map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_outputs(
    config: &ExperimentConfig,
    records: &[TrialRecord],
    summary: &Summary,
    csv: &mut impl Write,
    json: &mut impl Write,
) -> Result<()> {
    csv.write_all(records_csv(records, config.timing).as_bytes())?;
    json.write_all(summary_json(config, summary)?.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(h: usize) -> TrialRecord {
        TrialRecord {
            index: 0,
            seed: Seed(0),
            edge_count: 0,
            h_size: h,
            nodes: 1,
            status: Status::Optimal,
            elapsed_ms: 0.0,
            x_m: None,
        }
    }

    fn preds() -> Predictions {
        Predictions {
            lg_p: Lg::new(-3.0).unwrap(),
            window: Window { h_hat: 4, support: vec![4, 5] },
            asymptotic: None,
            xm: None,
        }
    }

    fn summary_of(hs: &[usize]) -> Summary {
        let recs: Vec<_> = hs.iter().map(|&h| record(h)).collect();
        summarize(&recs, &preds())
    }

    #[test]
    fn summarize_examples() {
        let s = summary_of(&[4; 6]);
        assert_eq!(s.histogram, BTreeMap::from([(4, 6)]));
        assert_eq!(s.two_point_mass, 1.0);

        let s = summary_of(&[4, 5, 4, 5]);
        assert_eq!((s.two_point_mass, s.two_point_base), (1.0, 4));
        assert_eq!(s.mode, 4);

        let s = summary_of(&[3, 5]);
        assert_eq!(s.two_point_mass, 0.5);
        assert_eq!(s.mode, 3);
        assert_eq!(s.agreement.fraction_in_window, 0.5);
    }

    #[test]
    fn summarize_histogram_totals() {
        let s = summary_of(&[1, 2, 2, 3, 3, 3, 9]);
        assert_eq!(s.histogram.values().sum::<u64>(), 7);
        assert_eq!(s.mode, 3);
        assert!((s.two_point_mass - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!(s.two_point_base, 2);
    }

    #[test]
    fn count_hitting_sets_small() {
        let sys = SetSystem::build(3, &[vec![1, 2], vec![2, 3]]).unwrap();
        // hitting 1-sets: {2}; 2-sets: {1,2},{1,3},{2,3}
        assert_eq!(count_hitting_sets(&sys, 1).unwrap(), 1);
        assert_eq!(count_hitting_sets(&sys, 2).unwrap(), 3);
        assert_eq!(count_hitting_sets(&sys, 0).unwrap(), 0);
        let big = SetSystem::build(40, &[vec![1]]).unwrap();
        assert!(matches!(count_hitting_sets(&big, 20), Err(Error::CountLimit { .. })));
    }

    #[test]
    fn config_validation() {
        let lg_p = Lg::new(-3.0).unwrap();
        let base = ExperimentConfig::new(8, Regime::ExplicitLgP { lg_p }, 1, Seed(1));
        assert!(base.validate().is_ok());
        assert!(ExperimentConfig { trials: 0, ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { workers: 0, ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { count_xm: Some(9), ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { n: 0, ..base }.validate().is_err());
    }

    #[test]
    fn single_trial_is_reproducible() {
        let lg_p = Lg::new(-3.0).unwrap();
        let cfg = ExperimentConfig::new(8, Regime::ExplicitLgP { lg_p }, 1, Seed(0xABCD));
        let (a, _) = run_experiment(&cfg).unwrap();
        let (b, _) = run_experiment(&cfg).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(records_csv(&a, false), records_csv(&b, false));
        assert_eq!(a[0].seed, trial_seed(Seed(0xABCD), 0));
    }

    #[test]
    fn budget_exceeded_aborts() {
        let cfg = ExperimentConfig {
            node_budget: 1,
            ..ExperimentConfig::new(24, Regime::Dense { beta: 0.5 }, 3, Seed(2))
        };
        assert!(matches!(run_experiment(&cfg), Err(Error::BudgetExceeded { index: 0, budget: 1, .. })));
    }

    #[test]
    fn csv_layout() {
        let mut r = record(4);
        r.seed = Seed(0xff);
        r.x_m = Some(12);
        let csv = records_csv(&[r], false);
        assert_eq!(csv, "index,seed,edge_count,h_size,nodes,status,ms,x_m\n0,0x00000000000000ff,0,4,1,optimal,0,12\n");
    }
}
