//! Reduced words over `G * F(X)`, finite partial injections and a forcing
//! poset that builds cofinitary groups coding a real.

pub mod coding;
pub mod condition;
pub mod error;
pub mod extension;
pub mod group;
pub mod partial;
pub mod runner;
pub mod words;

pub use coding::{decode, exact_code_length, BitStream, CodingCertificate};
pub use condition::{Condition, ConditionRecord, ConditionViolation, Context, OrderViolation};
pub use error::{Error, Result};
pub use extension::{
    add_word, distinguish, domain_extend, extend_coding, forbidden_set, hit, range_extend, start_coding,
    Mode, Tracking,
};
pub use group::{BaseGroup, GroupElement, Permutation};
pub use partial::{apply_word, fixed_points, mpath, Injection, PartialInjection, Path, PathStatus};
pub use runner::{run, verify_transcript, Report, RunConfig, Task, Transcript, WordSource};
pub use words::{enumerate_words, Letter, ReducedWord};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/partial-maps.md")]
    mod partial_maps {}
    #[doc = include_str!("../../../book/src/coding.md")]
    mod coding {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/extensions.md")]
    mod extensions {}
    #[doc = include_str!("../../../book/src/runner.md")]
    mod runner {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
