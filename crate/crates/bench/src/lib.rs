//! Benchmarks for the supctl pipeline live in `benches/`.
