//! Runs every code block in the guide as a doc-test, one module per
//! chapter so a failure names its source file. mdbook renders the same
//! Markdown from `src/`; `cargo test --doc` keeps it honest.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("src/distributions.md")]
pub mod distributions {}

#[doc = include_str!("src/tail-bounds.md")]
pub mod tail_bounds {}

#[doc = include_str!("src/coupled-processes.md")]
pub mod coupled_processes {}

#[doc = include_str!("src/tail-cross-correlation.md")]
pub mod tail_cross_correlation {}

#[doc = include_str!("src/memory.md")]
pub mod memory {}

#[doc = include_str!("src/structure.md")]
pub mod structure {}

#[doc = include_str!("src/determinism.md")]
pub mod determinism {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}
