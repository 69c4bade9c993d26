//! Follow-the-regularized-leader for adversarial multi-armed bandits with
//! arbitrarily delayed feedback.
//!
//! The learner plays `argmin_{x ∈ Δ} ⟨x, L̂ᵒᵇˢ⟩ + F_t(x)` where `F_t` mixes a
//! ½-Tsallis entropy with weight `√t` and a negative entropy with weight
//! `η_t⁻¹`. The negentropy rate is tuned from the number of outstanding
//! observations, either directly ([`Tuning::Simple`]) or with rounds whose
//! waiting time grows too long dropped from the count ([`Tuning::Advanced`]).
//!
//! - [`simplex`]: the play distribution and a mesh-search reference.
//! - [`ledger`]: arrivals, outstanding counts and the two tuners.
//! - [`policy`]: the learner loop and importance-weighted estimates.
//! - [`env`]: oblivious instances, delivery queue and regret accounting.
//! - [`bench`]: seeded experiments, bound checks, CSV and JSON output.

pub mod bench;
pub mod env;
pub mod error;
pub mod ledger;
pub mod policy;
pub mod simplex;

pub use error::{Error, Result};
pub use ledger::Tuning;
