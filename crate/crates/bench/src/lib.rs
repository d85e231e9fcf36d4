//! Criterion benchmarks for the jet, frame and torsion kernels; see `benches/`.
