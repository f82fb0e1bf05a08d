//! Criterion benchmarks for `resonance-core`; see `benches/`.
