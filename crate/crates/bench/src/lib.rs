//! Criterion benchmarks for `aniso-core` live in `benches/kernels.rs`.
