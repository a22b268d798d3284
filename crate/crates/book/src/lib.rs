// mdbook cannot run listings that depend on a workspace crate, so every
// chapter is pulled in here as the doc comment of an empty module and the
// listings run under `cargo test --doc -p jellyfish-book`. One module per
// chapter keeps failures traceable to their chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/finite_fields.md")]
pub mod finite_fields {}
#[doc = include_str!("../../../book/src/swarms.md")]
pub mod swarms {}
#[doc = include_str!("../../../book/src/curves.md")]
pub mod curves {}
#[doc = include_str!("../../../book/src/hypergeometric.md")]
pub mod hypergeometric {}
#[doc = include_str!("../../../book/src/class_numbers.md")]
pub mod class_numbers {}
#[doc = include_str!("../../../book/src/real_agm.md")]
pub mod real_agm {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
