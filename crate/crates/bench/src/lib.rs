//! Criterion benchmarks for carlab live in `benches/`.
