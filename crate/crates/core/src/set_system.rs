//! Set systems over the ground set `[n]`, stored as packed bit-vectors.
//!
//! Elements are 0-based internally and 1-based in every external format.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_N: usize = 1024;

#[inline]
pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

/// A subset of `[n]`. May be empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> VertexSet {
        VertexSet { n, words: vec![0; word_count(n)] }
    }

    pub fn full(n: usize) -> VertexSet {
        let mut s = VertexSet::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    /// Builds from 0-based elements.
    pub fn from_elements(n: usize, elements: impl IntoIterator<Item = usize>) -> Result<VertexSet> {
        let mut s = VertexSet::empty(n);
        for e in elements {
            if e >= n {
                return Err(Error::ElementOutOfRange { element: e + 1, n });
            }
            s.insert(e);
        }
        Ok(s)
    }

    /// Builds from raw words; bits at or above `n` must be clear.
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<VertexSet> {
        if words.len() != word_count(n) {
            return Err(Error::Domain(format!("{} words for n = {n}", words.len())));
        }
        let s = VertexSet { n, words };
        if let Some(top) = s.iter().last() {
            if top >= n {
                return Err(Error::ElementOutOfRange { element: top + 1, n });
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn insert(&mut self, e: usize) {
        debug_assert!(e < self.n);
        self.words[e / 64] |= 1 << (e % 64);
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        self.words[e / 64] &= !(1 << (e % 64));
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e < self.n && self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// 0-based elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// 1-based elements in ascending order.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.iter().map(|e| e + 1).collect()
    }

    pub fn complement(&self) -> VertexSet {
        let mut c = VertexSet::full(self.n);
        for (cw, w) in c.words.iter_mut().zip(&self.words) {
            *cw &= !w;
        }
        c
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Order by numeric value of the bit-vector (highest word most significant).
    pub fn cmp_numeric(&self, other: &VertexSet) -> Ordering {
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.to_one_based()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

/// A nonempty subset of `[n]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Edge(VertexSet);

impl Edge {
    pub fn new(bits: VertexSet) -> Result<Edge> {
        if bits.is_empty() {
            return Err(Error::EmptyEdge { index: 0 });
        }
        Ok(Edge(bits))
    }

    pub fn bits(&self) -> &VertexSet {
        &self.0
    }
}

/// Ground size plus distinct nonempty edges in ascending numeric order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetSystem {
    n: usize,
    edges: Vec<Edge>,
}

impl SetSystem {
    /// Builds from 1-based element lists, merging duplicates.
    pub fn build<E>(n: usize, raw_edges: &[E]) -> Result<SetSystem>
    where
        E: AsRef<[usize]>,
    {
        check_ground(n)?;
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (index, raw) in raw_edges.iter().enumerate() {
            let mut bits = VertexSet::empty(n);
            for &e in raw.as_ref() {
                if e == 0 || e > n {
                    return Err(Error::ElementOutOfRange { element: e, n });
                }
                bits.insert(e - 1);
            }
            if bits.is_empty() {
                return Err(Error::EmptyEdge { index });
            }
            edges.push(Edge(bits));
        }
        Ok(SetSystem::canonical(n, edges))
    }

    /// Builds from edge bit-vectors, merging duplicates.
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Result<SetSystem> {
        check_ground(n)?;
        if let Some(e) = edges.iter().find(|e| e.0.n != n) {
            return Err(Error::Domain(format!("edge over ground size {} in system of size {n}", e.0.n)));
        }
        Ok(SetSystem::canonical(n, edges))
    }

    /// Edges already distinct and sorted, as produced by the sampler.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<Edge>) -> SetSystem {
        debug_assert!(edges.windows(2).all(|w| w[0].0.cmp_numeric(&w[1].0) == Ordering::Less));
        SetSystem { n, edges }
    }

    fn canonical(n: usize, mut edges: Vec<Edge>) -> SetSystem {
        edges.sort_by(|a, b| a.0.cmp_numeric(&b.0));
        edges.dedup();
        SetSystem { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Every edge meets `h`.
    pub fn is_hitting(&self, h: &VertexSet) -> bool {
        self.edges.iter().all(|e| e.0.intersects(h))
    }

    /// No edge lies inside `s`.
    pub fn is_independent(&self, s: &VertexSet) -> bool {
        !self.edges.iter().any(|e| e.0.is_subset_of(s))
    }

    pub fn is_minimal_hitting(&self, h: &VertexSet) -> bool {
        if !self.is_hitting(h) {
            return false;
        }
        let mut probe = h.clone();
        for v in h.iter() {
            probe.remove(v);
            if self.is_hitting(&probe) {
                return false;
            }
            probe.insert(v);
        }
        true
    }

    pub fn is_maximal_independent(&self, s: &VertexSet) -> bool {
        if !self.is_independent(s) {
            return false;
        }
        let mut probe = s.clone();
        for v in s.complement().iter() {
            probe.insert(v);
            if self.is_independent(&probe) {
                return false;
            }
            probe.remove(v);
        }
        true
    }

    /// Drops every edge that strictly contains another edge.
    pub fn reduce(&self) -> SetSystem {
        let mut by_size: Vec<(usize, &Edge)> = self.edges.iter().map(|e| (e.0.len(), e)).collect();
        by_size.sort_by_key(|&(k, _)| k);
        let mut kept: Vec<(usize, &Edge)> = Vec::new();
        for (k, e) in by_size {
            // distinct edges of equal size cannot contain one another
            let dominated = kept.iter().take_while(|&&(kk, _)| kk < k).any(|(_, a)| a.0.is_subset_of(&e.0));
            if !dominated {
                kept.push((k, e));
            }
        }
        let edges = kept.into_iter().map(|(_, e)| e.clone()).collect();
        SetSystem::canonical(self.n, edges)
    }

    pub fn parse_text(text: &str) -> Result<SetSystem> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        // a final newline terminates the last line rather than opening a new one
        let last_line = if text.ends_with('\n') { text.matches('\n').count() } else { usize::MAX };
        let mut n = None;
        for (no, line) in lines.by_ref() {
            if line.starts_with('#') {
                continue;
            }
            let rest = line
                .strip_prefix("n ")
                .ok_or_else(|| Error::Parse { line: no, msg: "expected header `n <integer>`".into() })?;
            let v: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line: no, msg: format!("bad ground size `{rest}`") })?;
            if !(1..=MAX_N).contains(&v) {
                return Err(Error::Parse { line: no, msg: format!("ground size {v} outside 1..=1024") });
            }
            n = Some(v);
            break;
        }
        let n = n.ok_or(Error::Parse { line: 1, msg: "missing header `n <integer>`".into() })?;
        let mut edges = Vec::new();
        for (no, line) in lines {
            if no > last_line {
                break;
            }
            if line.starts_with('#') {
                continue;
            }
            if line.trim().is_empty() {
                return Err(Error::Parse { line: no, msg: "blank line (empty edge)".into() });
            }
            let mut bits = VertexSet::empty(n);
            let mut prev = 0;
            for tok in line.split(' ') {
                let e: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse { line: no, msg: format!("bad element `{tok}`") })?;
                if e == 0 || e > n {
                    return Err(Error::Parse { line: no, msg: format!("element {e} outside 1..={n}") });
                }
                if e <= prev {
                    return Err(Error::Parse { line: no, msg: "elements must be strictly ascending".into() });
                }
                prev = e;
                bits.insert(e - 1);
            }
            edges.push(Edge(bits));
        }
        Ok(SetSystem::canonical(n, edges))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for e in &self.edges {
            let mut first = true;
            for v in e.0.iter() {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{}", v + 1).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<SetSystem> {
        SetSystem::parse_text(&std::fs::read_to_string(path)?)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn check_ground(n: usize) -> Result<()> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::GroundSize(n));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, edges: &[&[usize]]) -> SetSystem {
        SetSystem::build(n, edges).unwrap()
    }

    fn vs(n: usize, one_based: &[usize]) -> VertexSet {
        VertexSet::from_elements(n, one_based.iter().map(|e| e - 1)).unwrap()
    }

    #[test]
    fn build_dedups_permuted_duplicates() {
        let s = sys(3, &[&[1, 2], &[2, 1], &[3]]);
        let got: Vec<_> = s.edges().iter().map(|e| e.bits().to_one_based()).collect();
        assert_eq!(got, vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn build_errors() {
        let empty: &[&[usize]] = &[&[]];
        assert_eq!(SetSystem::build(3, empty), Err(Error::EmptyEdge { index: 0 }));
        assert_eq!(SetSystem::build(4, &[[1, 5]]), Err(Error::ElementOutOfRange { element: 5, n: 4 }));
        assert_eq!(SetSystem::build(0, &[[1]]), Err(Error::GroundSize(0)));
    }

    #[test]
    fn canonical_order_is_numeric_across_words() {
        let s = sys(70, &[&[70], &[2], &[1, 2], &[65]]);
        let got: Vec<_> = s.edges().iter().map(|e| e.bits().to_one_based()).collect();
        assert_eq!(got, vec![vec![2], vec![1, 2], vec![65], vec![70]]);
    }

    #[test]
    fn hitting_examples() {
        assert!(sys(2, &[&[1, 2]]).is_hitting(&vs(2, &[1])));
        assert!(!sys(2, &[&[1], &[2]]).is_hitting(&vs(2, &[1])));
        assert!(sys(2, &[]).is_hitting(&VertexSet::empty(2)));
    }

    #[test]
    fn independent_examples() {
        let s = sys(3, &[&[1, 2]]);
        assert!(s.is_independent(&vs(3, &[1])));
        assert!(!s.is_independent(&vs(3, &[1, 2])));
        assert!(sys(3, &[&[3]]).is_independent(&vs(3, &[1, 2])));
    }

    #[test]
    fn minimality_examples() {
        assert!(!sys(2, &[&[1, 2]]).is_minimal_hitting(&vs(2, &[1, 2])));
        assert!(sys(2, &[&[1], &[2]]).is_minimal_hitting(&vs(2, &[1, 2])));
    }

    #[test]
    fn complements_of_minimal_hitting_sets_are_maximal_independent() {
        for n in 2..=6 {
            let s = sys(n, &[&[1, 2]]);
            for mask in 0u64..(1 << n) {
                let h = VertexSet::from_words(n, vec![mask]).unwrap();
                if s.is_minimal_hitting(&h) {
                    assert!(s.is_maximal_independent(&h.complement()), "n={n} h={h:?}");
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let s = sys(2, &[&[1], &[1, 2]]).reduce();
        assert_eq!(s, sys(2, &[&[1]]));
        let anti = sys(4, &[&[1, 2], &[2, 3], &[3, 4], &[1, 4]]);
        assert_eq!(anti.reduce(), anti);
    }

    #[test]
    fn text_examples() {
        let s = SetSystem::parse_text("n 3\n1 2\n3\n").unwrap();
        assert_eq!(s, sys(3, &[&[1, 2], &[3]]));
        assert_eq!(s.to_text(), "n 3\n1 2\n3\n");
        assert!(matches!(SetSystem::parse_text("n 3\n\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn text_comments_and_errors() {
        let s = SetSystem::parse_text("# header\nn 4\n# c\n2 4\n").unwrap();
        assert_eq!(s, sys(4, &[&[2, 4]]));
        assert!(matches!(SetSystem::parse_text("n 3\n1 4\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(SetSystem::parse_text("n 3\n2 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(SetSystem::parse_text("x 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(SetSystem::parse_text("n 3\n1  2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(SetSystem::parse_text("").is_err());
        assert_eq!(SetSystem::parse_text("n 5\n").unwrap().len(), 0);
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("hitnum-ss-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sys.txt");
        let s = sys(9, &[&[1, 9], &[3], &[2, 4, 6, 8]]);
        s.write_text(&path).unwrap();
        assert_eq!(SetSystem::read_text(&path).unwrap(), s);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
