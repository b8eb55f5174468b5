pub mod analysis;
pub mod chaining;
pub mod error;
pub mod extension;
pub mod harness;
mod numfmt;
pub mod recoverability;
pub mod rng;
pub mod seeding;
pub mod seqgen;

pub use error::{Error, Result};
pub use numfmt::fmt_g;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/path.md")]
    mod path {}
    #[doc = include_str!("../../../book/src/anchors.md")]
    mod anchors {}
    #[doc = include_str!("../../../book/src/chaining.md")]
    mod chaining {}
    #[doc = include_str!("../../../book/src/extension.md")]
    mod extension {}
    #[doc = include_str!("../../../book/src/recoverability.md")]
    mod recoverability {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
