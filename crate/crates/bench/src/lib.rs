//! Benchmarks for the splitting, layering and invariant stages live in
//! `benches/pipeline.rs`; run them with `cargo bench -p veering-bench`.
