//! Criterion benchmarks for `curvkep`; run with `cargo bench -p curvkep-bench`.
