use super::{orphan_search, preinjectivity_search, Method, OrphanWitness, PreInjWitness};
use crate::engine::Automaton;
use crate::{Budget, Executor, Result, State};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurjectivityVerdict {
    /// No orphan on any scanned window up to this width.
    SurjectiveUpTo(usize),
    Orphan(OrphanWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjectivityVerdict {
    /// No collision supported on any scanned window up to this width.
    PreInjectiveUpTo(usize),
    Collision(PreInjWitness),
}

/// Both bounded searches side by side. `consistent` holds when both found a
/// failure or neither did; for a recurrent distribution an inconsistency
/// only means the bounds were too small.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoeReport {
    pub surjectivity: SurjectivityVerdict,
    pub injectivity: InjectivityVerdict,
    pub consistent: bool,
}

pub fn goe_consistency_check<E: Executor>(
    automaton: &Automaton,
    orphan_width: usize,
    collision_width: usize,
    backgrounds: &[State],
    method: Method,
    budget: &Budget,
    exec: &E,
) -> Result<GoeReport> {
    let surjectivity = match orphan_search(automaton, orphan_width, None, method, budget, exec)? {
        Some(o) => SurjectivityVerdict::Orphan(o),
        None => SurjectivityVerdict::SurjectiveUpTo(orphan_width),
    };
    let injectivity = match preinjectivity_search(
        automaton,
        collision_width,
        backgrounds,
        None,
        method,
        budget,
        exec,
    )? {
        Some(w) => InjectivityVerdict::Collision(w),
        None => InjectivityVerdict::PreInjectiveUpTo(collision_width),
    };
    let consistent = matches!(surjectivity, SurjectivityVerdict::Orphan(_))
        == matches!(injectivity, InjectivityVerdict::Collision(_));
    Ok(GoeReport {
        surjectivity,
        injectivity,
        consistent,
    })
}
