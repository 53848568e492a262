//! Compiles the book chapters as doc comments so that `cargo test --doc`
//! runs every Rust snippet in `book/src`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/threshold.md")]
pub mod threshold {}
#[doc = include_str!("../../../book/src/equilibria.md")]
pub mod equilibria {}
#[doc = include_str!("../../../book/src/dulac.md")]
pub mod dulac {}
#[doc = include_str!("../../../book/src/integration.md")]
pub mod integration {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
