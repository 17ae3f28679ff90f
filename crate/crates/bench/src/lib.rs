//! Criterion benchmarks for `dynsched-core`; see `benches/`.
