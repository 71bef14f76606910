//! The book's chapters, included as rustdoc so `cargo test --doc` runs
//! every code block in `book/src`. mdbook cannot execute snippets against
//! crate dependencies on its own; routing the markdown through rustdoc
//! keeps the guide and the library from drifting apart. One module per
//! chapter so a failing doc-test names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/paths.md")]
pub mod paths {}

#[doc = include_str!("../../../book/src/reflection.md")]
pub mod reflection {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/comparison.md")]
pub mod comparison {}

#[doc = include_str!("../../../book/src/cusps.md")]
pub mod cusps {}

#[doc = include_str!("../../../book/src/thorn.md")]
pub mod thorn {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
