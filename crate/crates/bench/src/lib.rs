//! Criterion benchmarks for the rtorsion kernels; see `benches/`.
