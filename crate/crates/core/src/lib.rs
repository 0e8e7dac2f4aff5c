//! Consecutive pattern avoidance in permutations.
//!
//! A permutation `π` *contains* a pattern `σ ∈ S_m` consecutively when some
//! `m` adjacent entries of `π` appear in the same relative order as `σ`.
//! This crate counts the permutations that avoid a pattern exactly, studies
//! how a pattern overlaps with itself, and evaluates the probabilistic
//! bounds on the growth rate `ρ_σ = lim (α_n(σ)/n!)^{1/n}`:
//!
//! * [`perm`]: patterns, standardization, window scanning, symmetries.
//! * [`overlap`]: overlap profiles, forced values, joint occurrence counts.
//! * [`enumerate`]: exact counts `α_n(σ)` (brute force and dynamic program),
//!   growth-rate estimators and Monte Carlo avoidance estimates.
//! * [`bounds`]: the Suen, block, local-lemma and `M_k` bounds on `ρ_σ`.
//! * [`series`]: smallest positive roots of the growth-rate series.
//! * [`stats`]: random-pattern experiments and exhaustive censuses.
//!
//! The crate is `no_std` and only needs `alloc`. IO, report formats and the
//! command line live in the `cpav` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod enumerate;
mod error;
pub mod overlap;
pub mod perm;
pub mod rng;
pub mod series;
pub mod stats;
mod util;

pub use error::Error;
pub use perm::{Pattern, Permutation};

pub type Result<T, E = Error> = core::result::Result<T, E>;
