//! Exact minimum hitting sets by branch and bound, with a greedy upper
//! bound, a disjoint-edge packing lower bound, and an exhaustive oracle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::set_system::{word_count, SetSystem, VertexSet};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Ground sizes above this are refused by [`exhaustive_min_hitting`].
pub const EXHAUSTIVE_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    BudgetExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub size: usize,
    /// Always a hitting set; a minimum one when `status` is `Optimal`.
    pub witness: VertexSet,
    pub nodes: u64,
    pub status: Status,
}

/// Repeatedly takes the element in the most uncovered edges (lowest index on ties).
pub fn greedy_hitting(sys: &SetSystem) -> VertexSet {
    let n = sys.n();
    let mut h = VertexSet::empty(n);
    let mut uncovered: Vec<&VertexSet> = sys.edges().iter().map(|e| e.bits()).collect();
    let mut counts = vec![0usize; n];
    while !uncovered.is_empty() {
        counts.iter_mut().for_each(|c| *c = 0);
        for e in &uncovered {
            for v in e.iter() {
                counts[v] += 1;
            }
        }
        let mut best = 0;
        for v in 1..n {
            if counts[v] > counts[best] {
                best = v;
            }
        }
        h.insert(best);
        uncovered.retain(|e| !e.contains(best));
    }
    h
}

/// Size of a greedily built family of pairwise-disjoint edges, scanned in
/// canonical order. Every hitting set needs a distinct element per member.
pub fn packing_lower_bound(sys: &SetSystem) -> usize {
    let mut used = VertexSet::empty(sys.n());
    let mut count = 0;
    for e in sys.edges() {
        if !e.bits().intersects(&used) {
            for v in e.bits().iter() {
                used.insert(v);
            }
            count += 1;
        }
    }
    count
}

/// Exact minimum hitting set.
///
/// Supersets are reduced away and singleton edges forced first. The search
/// then branches on a smallest uncovered edge (restricted to still-allowed
/// elements), trying its elements in ascending order; each later sibling
/// excludes the earlier ones, so every candidate set is visited once.
/// Nodes are pruned when the partial size plus the packing bound of the
/// residual reaches the incumbent, which starts from [`greedy_hitting`].
/// Completions by one or two elements are checked directly.
pub fn solve_min_hitting(sys: &SetSystem, node_budget: Option<u64>) -> SolveResult {
    let budget = node_budget.unwrap_or(DEFAULT_NODE_BUDGET);
    let n = sys.n();
    let greedy = greedy_hitting(sys);
    let reduced = sys.reduce();

    let mut forced = VertexSet::empty(n);
    for e in reduced.edges() {
        if e.bits().len() == 1 {
            forced.insert(e.bits().iter().next().unwrap());
        }
    }
    let residual: Vec<&[u64]> = reduced
        .edges()
        .iter()
        .map(|e| e.bits())
        .filter(|e| !e.intersects(&forced))
        .map(|e| e.words())
        .collect();
    let start = Incumbent { partial: forced.iter().collect(), best: greedy.iter().collect() };
    let (best, nodes, exceeded) = match word_count(n) {
        1 => run::<1>(n, &residual, start, budget),
        2 => run::<2>(n, &residual, start, budget),
        3 | 4 => run::<4>(n, &residual, start, budget),
        5..=8 => run::<8>(n, &residual, start, budget),
        _ => run::<16>(n, &residual, start, budget),
    };

    let witness = VertexSet::from_elements(n, best).expect("elements below n");
    debug_assert!(sys.is_hitting(&witness));
    SolveResult {
        size: witness.len(),
        witness,
        nodes,
        status: if exceeded { Status::BudgetExceeded } else { Status::Optimal },
    }
}

struct Incumbent {
    partial: Vec<usize>,
    best: Vec<usize>,
}

fn run<const W: usize>(n: usize, residual: &[&[u64]], start: Incumbent, budget: u64) -> (Vec<usize>, u64, bool) {
    let edges: Vec<[u64; W]> = residual
        .iter()
        .map(|e| {
            let mut a = [0; W];
            a[..e.len()].copy_from_slice(e);
            a
        })
        .collect();
    let mut allowed = [0u64; W];
    for v in 0..n {
        allowed[v / 64] |= 1 << (v % 64);
    }
    let mut search = Search {
        edges,
        budget,
        nodes: 0,
        exceeded: false,
        partial: start.partial,
        best: start.best,
        buffers: Vec::new(),
    };
    if search.partial.len() < search.best.len() {
        let root: Vec<u32> = (0..search.edges.len() as u32).collect();
        search.branch(0, &root, allowed);
    }
    (search.best, search.nodes, search.exceeded)
}

struct Search<const W: usize> {
    /// Reduced edges left after forcing singletons.
    edges: Vec<[u64; W]>,
    budget: u64,
    nodes: u64,
    exceeded: bool,
    partial: Vec<usize>,
    best: Vec<usize>,
    /// One reusable uncovered-edge list per depth.
    buffers: Vec<Vec<u32>>,
}

#[inline]
fn and<const W: usize>(a: &[u64; W], b: &[u64; W]) -> [u64; W] {
    std::array::from_fn(|i| a[i] & b[i])
}

#[inline]
fn is_zero<const W: usize>(a: &[u64; W]) -> bool {
    a.iter().all(|&w| w == 0)
}

#[inline]
fn has<const W: usize>(a: &[u64; W], v: usize) -> bool {
    a[v / 64] >> (v % 64) & 1 == 1
}

fn elements<const W: usize>(a: &[u64; W]) -> Vec<usize> {
    let mut out = Vec::new();
    for (wi, &w) in a.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

fn lowest<const W: usize>(a: &[u64; W]) -> Option<usize> {
    a.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(wi, &w)| wi * 64 + w.trailing_zeros() as usize)
}

impl<const W: usize> Search<W> {
    fn record(&mut self, extra: &[usize]) {
        if self.partial.len() + extra.len() < self.best.len() {
            self.best = self.partial.iter().chain(extra).copied().collect();
        }
    }

    fn branch(&mut self, depth: usize, uncovered: &[u32], mut allowed: [u64; W]) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exceeded = true;
            return;
        }
        if uncovered.is_empty() {
            self.record(&[]);
            return;
        }
        // elements still addable while beating the incumbent
        let room = self.best.len() - 1 - self.partial.len();
        if room == 0 {
            return;
        }

        let mut pivot = allowed;
        let mut pivot_size = u32::MAX;
        let mut common = allowed;
        for &i in uncovered {
            let e = and(&self.edges[i as usize], &allowed);
            let size: u32 = e.iter().map(|w| w.count_ones()).sum();
            if size == 0 {
                return;
            }
            if size < pivot_size {
                pivot_size = size;
                pivot = e;
            }
            common = and(&common, &e);
        }
        if let Some(v) = lowest(&common) {
            // nothing in this subtree beats one more element
            self.record(&[v]);
            return;
        }
        if room == 1 {
            return;
        }
        if room == 2 {
            for x in elements(&pivot) {
                let mut rest = allowed;
                for &i in uncovered {
                    let e = &self.edges[i as usize];
                    if !has(e, x) {
                        rest = and(&rest, e);
                        if is_zero(&rest) {
                            break;
                        }
                    }
                }
                if let Some(y) = lowest(&rest) {
                    let pair = if x < y { [x, y] } else { [y, x] };
                    self.record(&pair);
                    return;
                }
            }
            return;
        }
        if self.packing(uncovered, &allowed) > room {
            return;
        }

        if self.buffers.len() <= depth {
            self.buffers.resize_with(depth + 1, Vec::new);
        }
        for v in elements(&pivot) {
            if self.partial.len() + 1 >= self.best.len() {
                break;
            }
            let (wi, bit) = (v / 64, 1u64 << (v % 64));
            let mut rest = std::mem::take(&mut self.buffers[depth]);
            rest.clear();
            rest.extend(uncovered.iter().copied().filter(|&i| self.edges[i as usize][wi] & bit == 0));
            self.partial.push(v);
            self.branch(depth + 1, &rest, allowed);
            self.partial.pop();
            self.buffers[depth] = rest;
            if self.exceeded {
                return;
            }
            allowed[wi] &= !bit;
        }
    }

    /// Greedy disjoint family among residual edges, in canonical order.
    fn packing(&self, uncovered: &[u32], allowed: &[u64; W]) -> usize {
        let mut used = [0u64; W];
        let mut count = 0;
        for &i in uncovered {
            let e = and(&self.edges[i as usize], allowed);
            if is_zero(&and(&e, &used)) {
                for (u, w) in used.iter_mut().zip(e) {
                    *u |= w;
                }
                count += 1;
            }
        }
        count
    }
}

/// Tries every subset by increasing size, lexicographically within a size.
pub fn exhaustive_min_hitting(sys: &SetSystem) -> Result<SolveResult> {
    let n = sys.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::TooLargeForExhaustive(n));
    }
    let masks: Vec<u64> = sys.edges().iter().map(|e| e.bits().words()[0]).collect();
    let mut nodes = 0;
    for m in 0..=n {
        let mut found = None;
        for_each_combination(n, m, |combo| {
            nodes += 1;
            let h = combo.iter().fold(0u64, |acc, &v| acc | 1 << v);
            if masks.iter().all(|&e| e & h != 0) {
                found = Some(h);
                return false;
            }
            true
        });
        if let Some(h) = found {
            let witness = VertexSet::from_words(n, vec![h]).expect("n <= 20");
            return Ok(SolveResult { size: m, witness, nodes, status: Status::Optimal });
        }
    }
    unreachable!("the full ground set hits every nonempty edge")
}

/// Calls `f` on each `m`-subset of `0..n` in lexicographic order until it returns false.
pub(crate) fn for_each_combination(n: usize, m: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if m > n {
        return;
    }
    let mut c: Vec<usize> = (0..m).collect();
    loop {
        if !f(&c) {
            return;
        }
        let Some(i) = (0..m).rev().find(|&i| c[i] != i + n - m) else {
            return;
        };
        c[i] += 1;
        for j in i + 1..m {
            c[j] = c[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependentResult {
    pub size: usize,
    pub witness: VertexSet,
}

/// Largest independent set, as the complement of a minimum hitting set.
pub fn max_independent_size(sys: &SetSystem, node_budget: Option<u64>) -> Result<IndependentResult> {
    let solved = solve_min_hitting(sys, node_budget);
    if solved.status != Status::Optimal {
        let budget = node_budget.unwrap_or(DEFAULT_NODE_BUDGET);
        return Err(Error::BudgetExceeded { index: 0, budget, best: solved.size });
    }
    Ok(IndependentResult { size: sys.n() - solved.size, witness: solved.witness.complement() })
}
