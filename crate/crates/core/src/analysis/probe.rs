use alloc::vec;
use alloc::vec::Vec;

use super::cyclic::collision_agreeing_on;
use super::{cyclic_bijectivity_check, verify_collision, CyclicVerdict, Method};
use crate::config::FiniteSupport;
use crate::constructions::{wrap_distribution, Wrap};
use crate::dist::index_mod;
use crate::engine::Automaton;
use crate::{Budget, Error, Result, State};

/// How a non-injective wrap was carried back to the line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedCollision {
    /// 1: both cyclic configurations unwrapped whole. 2: the pair agrees
    /// near the middle, so only the cells away from it are spliced in.
    pub case: u8,
    pub c1: FiniteSupport,
    pub c2: FiniteSupport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WrapStatus {
    /// The cyclic update is a bijection.
    Bijective,
    /// Not injective, and the unwrapped pair collides on the line.
    Verified(LiftedCollision),
    /// Not injective, the unwrapped pair fails the line check, and the wrap
    /// is shorter than `2r + 1`.
    SeamArtifact,
    /// Not injective and the unwrapped pair fails the line check.
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeEntry {
    pub n: usize,
    pub wrap: Wrap,
    pub verdict: CyclicVerdict,
    pub status: WrapStatus,
    /// `m < 2r + 1`.
    pub short_wrap: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
    /// The `n` whose suffix was not found again, when the probe stopped early.
    pub stopped: Option<usize>,
}

impl ProbeReport {
    /// Entries with a line-verified collision.
    pub fn verified(&self) -> impl Iterator<Item = (&ProbeEntry, &LiftedCollision)> {
        self.entries.iter().filter_map(|e| match &e.status {
            WrapStatus::Verified(c) => Some((e, c)),
            _ => None,
        })
    }
}

/// Wrap `θ` for `n = 1..=n_max`, decide each cyclic update, and carry every
/// cyclic collision back to a pair of configurations on the line.
pub fn surjunctivity_probe(
    automaton: &Automaton,
    n_max: usize,
    search_cells: usize,
    method: Method,
    budget: &Budget,
) -> Result<ProbeReport> {
    if automaton.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: automaton.dim(),
        });
    }
    let r = automaton.radius();
    let mut entries = Vec::new();
    for n in 1..=n_max {
        let wrap = match wrap_distribution(automaton.dist(), n, search_cells) {
            Ok(w) => w,
            Err(Error::NotFound(_)) => {
                return Ok(ProbeReport {
                    entries,
                    stopped: Some(n),
                })
            }
            Err(e) => return Err(e),
        };
        let cyclic = Automaton::new(automaton.rules().clone(), wrap.dist.clone())?;
        let verdict = cyclic_bijectivity_check(&cyclic, method, budget)?;
        let short_wrap = (wrap.m as i64) < 2 * r + 1;
        let status = if verdict.is_bijective() {
            WrapStatus::Bijective
        } else {
            match lift_collision(automaton, &cyclic, &wrap, &verdict, n, budget)? {
                Some(c) => WrapStatus::Verified(c),
                None if short_wrap => WrapStatus::SeamArtifact,
                None => WrapStatus::Unverified,
            }
        };
        entries.push(ProbeEntry {
            n,
            wrap,
            verdict,
            status,
            short_wrap,
        });
    }
    Ok(ProbeReport { entries, stopped: None })
}

fn unwrap(word: &[State], lo: i64, hi: i64) -> FiniteSupport {
    FiniteSupport::line(0, (lo..=hi).map(|y| (y, word[index_mod(y, word.len())])))
}

fn lift_collision(
    automaton: &Automaton,
    cyclic: &Automaton,
    wrap: &Wrap,
    verdict: &CyclicVerdict,
    n: usize,
    budget: &Budget,
) -> Result<Option<LiftedCollision>> {
    let r = automaton.radius();
    let (i, j, m) = (wrap.start, wrap.end, wrap.m);
    let mut keep = vec![false; m];
    for y in i - 2 * r..=j + 2 * r {
        keep[index_mod(y, m)] = true;
    }
    if keep.iter().any(|k| !k) {
        if let Some((a, b)) = collision_agreeing_on(cyclic, &keep, budget)? {
            let hi = i + m as i64 - 1;
            let (c1, c2) = (unwrap(&a, i, hi), unwrap(&b, i, hi));
            if verify_collision(automaton, &c1, &c2)? {
                return Ok(Some(LiftedCollision { case: 2, c1, c2 }));
            }
        }
    }
    let Some((a, b)) = &verdict.collision else {
        return Ok(None);
    };
    let (lo, hi) = (i - n as i64, i + m as i64 - 1);
    let (c1, c2) = (unwrap(a, lo, hi), unwrap(b, lo, hi));
    Ok(verify_collision(automaton, &c1, &c2)?.then_some(LiftedCollision { case: 1, c1, c2 }))
}
