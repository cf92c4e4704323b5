//! Criterion benchmarks for `hitnum-core`; see `benches/`.
