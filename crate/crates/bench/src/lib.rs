//! Criterion benchmarks for `shapesum`; see `benches/`.
