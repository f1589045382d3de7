//! Criterion benchmarks for window computations; see `benches/windows.rs`.
