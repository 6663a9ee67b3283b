use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::Family;
use crate::analysis::{has_preimage, verify_collision, verify_orphan, Method, Mode, OrphanWitness, PreInjWitness};
use crate::config::{FiniteSupport, Pattern};
use crate::dist::Distribution;
use crate::engine::Automaton;
use crate::geometry::{Alphabet, Domain, Neighborhood};
use crate::rule::{LinearForm, LocalRule, RuleSet, TrackForm};
use crate::{checked_pow, Budget, Error, Result, RuleId};

const B: RuleId = Family::BLOCK;
const F: RuleId = Family::FILL;

/// Where the distinguished block goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// One block of length `n` starting at the given cell, filler elsewhere.
    SingleBlock(i64),
    /// The word `g f^n` (resp. `δ γ^n`) repeated, anchored at 0.
    Periodic,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    Ok(())
}

/// `{f_n, g_n}` on `(-n, .., n)` or `{γ_n, δ_n}` on `(0, .., n+1)`.
pub fn build_family_rules(family: Family, n: usize) -> Result<RuleSet> {
    check_n(n)?;
    let names = family.rule_names().map(String::from).to_vec();
    match family {
        Family::Moore => {
            let a = Alphabet::binary();
            let arity = 2 * n + 1;
            // neighbor k sits at offset k - n
            let f = LinearForm::single(vec![(0, 0), (n, 0)], false);
            let g = LinearForm::single((1..arity).map(|k| (k, 0)).collect(), false);
            RuleSet::new(
                a.clone(),
                Neighborhood::line_range(-(n as i64), n as i64)?,
                vec![
                    LocalRule::from_linear(a.clone(), arity, f)?,
                    LocalRule::from_linear(a, arity, g)?,
                ],
                names,
            )
        }
        Family::Myhill => {
            let a = Alphabet::new(vec![2, 2])?;
            let arity = n + 2;
            let second = || TrackForm::new((1..=n + 1).map(|k| (k, 1)).collect(), false);
            let gamma = LinearForm::new(vec![
                TrackForm::new(vec![(0, 0), (n + 1, 0), (0, 1)], false),
                second(),
            ]);
            let delta = LinearForm::new(vec![TrackForm::new((1..=n).map(|k| (k, 0)).collect(), false), second()]);
            RuleSet::new(
                a.clone(),
                Neighborhood::line_range(0, n as i64 + 1)?,
                vec![
                    LocalRule::from_linear(a.clone(), arity, gamma)?,
                    LocalRule::from_linear(a, arity, delta)?,
                ],
                names,
            )
        }
    }
}

/// Both families share the layout; rule 0 is the block rule, rule 1 the filler.
pub fn build_family_distribution(_family: Family, n: usize, placement: Placement) -> Result<Distribution> {
    check_n(n)?;
    Ok(match placement {
        Placement::SingleBlock(at) => Distribution::eventually_periodic(vec![F], vec![B; n], vec![F], at),
        Placement::Periodic => {
            let mut word = vec![F];
            word.extend(core::iter::repeat(B).take(n));
            Distribution::periodic(word)
        }
    })
}

/// The block start of a single-block distribution of the family.
fn block_start(automaton: &Automaton, n: usize) -> Result<i64> {
    match automaton.dist() {
        Distribution::EventuallyPeriodic {
            left,
            middle,
            right,
            middle_start,
        } if left == &[F] && right == &[F] && middle.len() == n && middle.iter().all(|&r| r == B) => {
            Ok(*middle_start)
        }
        _ => Err(Error::Precondition(format!(
            "expected a single-block distribution with a block of length {n}"
        ))),
    }
}

fn check_rules(automaton: &Automaton, family: Family, n: usize) -> Result<()> {
    if automaton.rules() != &build_family_rules(family, n)? {
        return Err(Error::Precondition(format!("expected the {} rules for n = {n}", family.name())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyWitness {
    /// `1` at the cell left of the block, `0` on the block: no pre-image.
    Orphan {
        configuration: FiniteSupport,
        witness: OrphanWitness,
    },
    /// All-zero versus a single `(1, 0)` right after the block.
    Collision(PreInjWitness),
}

/// Build and verify the witness for a single-block distribution.
pub fn family_witness(family: Family, n: usize, automaton: &Automaton, budget: &Budget) -> Result<FamilyWitness> {
    check_rules(automaton, family, n)?;
    let i = block_start(automaton, n)?;
    match family {
        Family::Moore => {
            let x = i - 1;
            let domain = Domain::interval(x, x + n as i64);
            let mut states = vec![0; n + 1];
            states[0] = 1;
            let witness = OrphanWitness {
                domain,
                pattern: Pattern::line(x, states),
                mode: Mode::Rank,
            };
            let mut ok = verify_orphan(automaton, &witness, Mode::Rank, budget)?;
            let cost = checked_pow(2, automaton.closure(&domain).len());
            if matches!(cost, Some(c) if c <= budget.enumeration) {
                ok &= verify_orphan(automaton, &witness, Mode::Exhaustive, budget)?;
            }
            if !ok {
                return Err(Error::Verification("the block orphan has a pre-image".into()));
            }
            Ok(FamilyWitness::Orphan {
                configuration: FiniteSupport::line(0, [(x, 1)]),
                witness,
            })
        }
        Family::Myhill => {
            let x = i;
            let at = x + n as i64;
            let one_zero = automaton.rules().alphabet().encode(&[1, 0])?;
            let c1 = FiniteSupport::uniform(0);
            let c2 = FiniteSupport::line(0, [(at, one_zero)]);
            if !verify_collision(automaton, &c1, &c2)? {
                return Err(Error::Verification("the block collision has different images".into()));
            }
            Ok(FamilyWitness::Collision(PreInjWitness {
                background: 0,
                window: Domain::interval(at, at),
                c1,
                c2,
                mode: Mode::Rank,
            }))
        }
    }
}

/// Block length `n` of a `γ/δ` rule set, read off its neighborhood.
fn myhill_n(automaton: &Automaton) -> Result<usize> {
    let rules = automaton.rules();
    let arity = rules.neighborhood().arity();
    if arity < 3 || automaton.dim() != 1 {
        return Err(Error::Precondition("expected gamma/delta rules".into()));
    }
    let n = arity - 2;
    check_rules(automaton, Family::Myhill, n)?;
    Ok(n)
}

/// A pre-image on `[A, B + n + 1]` of a target pattern on `[A, B]`, for a
/// `γ/δ` distribution whose `γ`-blocks near the window are at most `n` long
/// with at most one of length exactly `n`.
pub fn myhill_preimage(automaton: &Automaton, target: &Pattern, budget: &Budget) -> Result<Pattern> {
    let n = myhill_n(automaton)?;
    let domain = *target.domain();
    if domain.is_empty() {
        return Ok(Pattern::empty(1));
    }
    let (a, b) = (domain.lo(), domain.hi());
    let rules = automaton.dist().window(a - n as i64 - 1, b + 2 * n as i64 + 2)?;
    let mut runs = Vec::new();
    let mut run = 0usize;
    for &r in rules.iter().chain([&F]) {
        if r == B {
            run += 1;
        } else {
            if run > 0 {
                runs.push(run);
            }
            run = 0;
        }
    }
    if runs.iter().any(|&l| l > n) || runs.iter().filter(|&&l| l == n).count() > 1 {
        return Err(Error::Precondition(format!(
            "gamma blocks near the window must be at most {n} long, at most one of length {n}"
        )));
    }
    let Some(e) = has_preimage(automaton, &domain, target, Method::Rank, budget)? else {
        return Err(Error::Verification(format!(
            "no pre-image for target {:?} on {domain}",
            target.states()
        )));
    };
    if &automaton.apply_partial(&domain, &e)? != target {
        return Err(Error::Verification("pre-image does not reproduce the target".into()));
    }
    Ok(e)
}
