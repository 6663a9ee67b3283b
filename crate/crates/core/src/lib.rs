//! Non-uniform cellular automata (NUCA) over `Z` and `Z^2`.
//!
//! A NUCA is given by a finite [`RuleSet`] and a rule distribution assigning
//! one rule to every cell. This crate evaluates the global and partial update
//! maps on finite windows, decides windowed surjectivity and pre-injectivity
//! (exhaustively, by GF(2) rank for XOR rules, or fiberwise for rules that
//! are XOR-linear once a static track is fixed), builds the classical
//! counterexample families, checks recurrence of distributions and probes
//! surjunctivity through cyclic wraps.
//!
//! The crate is `no_std` and only needs `alloc`. Searches that can be split
//! into independent candidates take an [`Executor`], so a std front-end can
//! run them on a thread pool while results stay deterministic.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod config;
pub mod constructions;
pub mod dist;
pub mod engine;
mod error;
mod exec;
pub mod gf2;
pub mod geometry;
pub mod recurrence;
pub mod rule;

pub use config::{Configuration, FiniteSupport, Pattern};
pub use dist::{Assignment, Distribution, Template};
pub use engine::Automaton;
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use geometry::{Alphabet, Domain, Neighborhood, Point};
pub use rule::{FiberForm, LinearForm, LocalRule, RuleSet, TrackForm};

/// A cell state, encoded as a mixed-radix integer over the alphabet tracks.
pub type State = u32;

/// Index of a rule inside a [`RuleSet`] (or of a symbol inside a template alphabet).
pub type RuleId = u32;

/// Resource limits for materialization and exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of cells a substitutive expansion may materialize.
    pub cells: usize,
    /// Maximum number of candidates an exhaustive enumeration may visit.
    pub enumeration: u64,
    /// Maximum number of states in a layered pair automaton.
    pub automaton_states: usize,
}

impl Budget {
    pub const DEFAULT: Budget = Budget {
        cells: 1 << 20,
        enumeration: 1 << 24,
        automaton_states: 1 << 18,
    };

    /// Budget with the enumeration and automaton limits both set to `limit`.
    pub fn with_limit(limit: u64) -> Self {
        Budget {
            enumeration: limit,
            automaton_states: usize::try_from(limit).unwrap_or(usize::MAX),
            ..Self::DEFAULT
        }
    }

    pub(crate) fn check_enumeration(&self, what: &'static str, count: Option<u64>) -> Result<u64> {
        match count {
            Some(c) if c <= self.enumeration => Ok(c),
            _ => Err(Error::BudgetExceeded {
                what,
                needed: count,
                limit: self.enumeration,
            }),
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `base^exp`, or `None` on overflow.
pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}
