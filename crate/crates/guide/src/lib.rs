//! Doc-test shim for the guide in `book/`.
//!
//! mdbook cannot run snippets against crate dependencies, so each chapter is
//! included here as module documentation and `cargo test --doc` executes
//! every fenced Rust block. A chapter edit that breaks an example fails the
//! test suite instead of rotting silently.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/labels-and-vocabulary.md")]
pub mod labels_and_vocabulary {}

#[doc = include_str!("../../../book/src/two-plan-routing.md")]
pub mod two_plan_routing {}

#[doc = include_str!("../../../book/src/contextual-reweighting.md")]
pub mod contextual_reweighting {}

#[doc = include_str!("../../../book/src/noisy-channel.md")]
pub mod noisy_channel {}

#[doc = include_str!("../../../book/src/receiver-loop.md")]
pub mod receiver_loop {}

#[doc = include_str!("../../../book/src/tuning-tau.md")]
pub mod tuning_tau {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}

#[doc = include_str!("../../../book/src/seeds-and-streams.md")]
pub mod seeds_and_streams {}
