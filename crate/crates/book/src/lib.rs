//! The guide's chapters as doc-tests, so that every snippet in `book/` is
//! compiled and run by `cargo test`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}
#[doc = include_str!("../../../book/src/horizontal.md")]
pub mod horizontal {}
#[doc = include_str!("../../../book/src/sdta.md")]
pub mod sdta {}
#[doc = include_str!("../../../book/src/wdta.md")]
pub mod wdta {}
#[doc = include_str!("../../../book/src/constructions.md")]
pub mod constructions {}
#[doc = include_str!("../../../book/src/minimization.md")]
pub mod minimization {}
#[doc = include_str!("../../../book/src/witnesses.md")]
pub mod witnesses {}
#[doc = include_str!("../../../book/src/checking.md")]
pub mod checking {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
