// mdbook cannot run snippets that need crates from this workspace, so each
// chapter is pulled in as a module doc and `cargo test --doc` runs them. One
// module per chapter keeps failures traceable to their file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/ranking.md")]
pub mod ranking {}
#[doc = include_str!("../../../book/src/ensembles.md")]
pub mod ensembles {}
#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}
#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}
#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}
#[doc = include_str!("../../../book/src/communities.md")]
pub mod communities {}
#[doc = include_str!("../../../book/src/consensus.md")]
pub mod consensus {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
