//! Decision procedures on finite windows: orphans, pre-injectivity,
//! cyclic bijectivity, counting bounds and the surjunctivity probe.
//!
//! Witnesses are canonical: the first failing domain in (width, leftmost
//! position) order, then the least pattern, where a pattern is read as a
//! number whose last cell is the most significant digit.

mod counting;
mod cyclic;
mod goe;
mod injectivity;
mod probe;
mod surjectivity;

pub use counting::{counting_bound, image_count_finite_support, BoundKind, ImageCount};
pub use cyclic::{cyclic_bijectivity_check, CyclicVerdict};
pub use goe::{goe_consistency_check, GoeReport, InjectivityVerdict, SurjectivityVerdict};
pub use injectivity::{
    kernel_search, preinjectivity_search, verify_collision, verify_kernel, KernelWitness,
    PreInjWitness,
};
pub use probe::{surjunctivity_probe, LiftedCollision, ProbeEntry, ProbeReport, WrapStatus};
pub use surjectivity::{
    has_preimage, orphan_search, partial_surjectivity_check, verify_orphan, OrphanWitness,
    Surjectivity,
};

use crate::dist::Distribution;
use crate::engine::Automaton;
use crate::{Error, Result};

/// How a windowed question should be answered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Method {
    /// Rank when every rule in scope is linear, otherwise exhaustive within
    /// budget, otherwise fiberwise.
    #[default]
    Auto,
    Exhaustive,
    Rank,
    Fiber,
}

/// The method actually used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Enumeration of all pre-patterns.
    Exhaustive,
    /// GF(2) elimination.
    Rank,
    /// Enumeration of the static tracks, elimination on the action tracks.
    Fiber,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Rank => "rank",
            Mode::Fiber => "fiber",
        }
    }
}

/// Left ends worth scanning for windows of width up to `max_width`: every
/// window of the distribution is a translate of one starting here.
pub fn default_scan_interval(automaton: &Automaton, max_width: usize) -> Result<(i64, i64)> {
    let r = automaton.radius();
    let w = max_width as i64;
    match automaton.dist() {
        Distribution::Periodic { word, anchor } => Ok((*anchor, anchor + word.len() as i64 - 1)),
        Distribution::EventuallyPeriodic {
            left,
            middle,
            right,
            middle_start,
        } => {
            let j = middle_start + middle.len() as i64 - 1;
            Ok((
                middle_start - w - 2 * r - left.len() as i64,
                j + 2 * r + right.len() as i64,
            ))
        }
        Distribution::Cyclic { word } => Ok((0, word.len() as i64 - 1)),
        Distribution::ExplicitWindow { window, start, .. } => {
            Ok((start - w - 2 * r - 1, start + window.len() as i64 + 2 * r))
        }
        Distribution::Substitutive(s) => {
            let (lo, hi) = s.materialized_range();
            let (a, b) = (lo + r, hi - r - w + 1);
            if a > b {
                return Err(Error::Precondition(
                    "substitutive expansion too short for the requested width".into(),
                ));
            }
            Ok((a, b))
        }
        Distribution::Periodic2 { .. } => Err(Error::DimensionMismatch {
            expected: 1,
            got: 2,
        }),
    }
}
