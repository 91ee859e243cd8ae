//! Criterion benchmarks for the simulation and recovery pipeline; see `benches/`.
