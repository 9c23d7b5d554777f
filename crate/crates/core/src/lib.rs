//! Milnor K-groups, their dual-number tangent spaces and Kähler differentials
//! of small finite commutative rings, computed as finitely presented abelian
//! groups.
//!
//! The map `B: TK^M_{n+1}(R) → Ω^n_R` and its candidate inverse `F` are built
//! as certified homomorphisms and checked to be mutually inverse; the symbol
//! identities behind that statement are verified case by case.

pub mod abelian;
pub mod cli;
pub mod differentials;
pub mod error;
pub mod milnor;
pub mod ring;
pub mod tangent;

use serde::Serialize;

pub use error::{Error, Result};

/// Resource bounds shared by all constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Largest carrier allowed, including the dual-number extension.
    pub carrier_cap: usize,
    /// Largest number of tensor generators `t^n` of a Milnor K presentation.
    pub tensor_bound: usize,
    /// Largest number of generators of a differential-form presentation.
    pub generator_bound: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            carrier_cap: ring::DEFAULT_CARRIER_CAP,
            tensor_bound: milnor::DEFAULT_TENSOR_BOUND,
            generator_bound: differentials::DEFAULT_GENERATOR_BOUND,
        }
    }
}
