//! Criterion benchmarks for `ellfermat`; see `benches/`.
