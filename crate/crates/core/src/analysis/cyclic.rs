use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{Method, Mode};
use crate::dist::Distribution;
use crate::engine::{Automaton, CyclicPlan};
use crate::gf2::{least_nonzero, BitVec, Gf2System};
use crate::{checked_pow, Budget, Error, Result, State};

/// Bijectivity of the update on `Σ^{Z_m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicVerdict {
    pub injective: bool,
    pub surjective: bool,
    pub mode: Mode,
    /// Rank of the linear part (rank mode only).
    pub rank: Option<usize>,
    /// Two distinct cyclic configurations with the same image, when not injective.
    pub collision: Option<(Vec<State>, Vec<State>)>,
}

impl CyclicVerdict {
    pub fn is_bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

fn cycle_len(automaton: &Automaton) -> Result<usize> {
    match automaton.dist() {
        Distribution::Cyclic { word } => Ok(word.len()),
        _ => Err(Error::Precondition("expected a cyclic distribution".into())),
    }
}

/// Decide injectivity and surjectivity of the cyclic update. On a finite
/// space the two coincide; a disagreement is reported as an error.
pub fn cyclic_bijectivity_check(automaton: &Automaton, method: Method, budget: &Budget) -> Result<CyclicVerdict> {
    let m = cycle_len(automaton)?;
    let linear = automaton.rules().is_linear();
    let mode = match method {
        Method::Rank if !linear => {
            return Err(Error::NoMethod("rank mode needs linear rules".into()));
        }
        Method::Auto if linear => Mode::Rank,
        Method::Rank => Mode::Rank,
        _ => Mode::Exhaustive,
    };
    let verdict = match mode {
        Mode::Rank => {
            let sys = Gf2System::for_cycle(automaton, None)?;
            let rank = sys.rank();
            let bits = sys.n_vars();
            let collision = least_nonzero(&sys.nullspace_basis()).map(|e| {
                let alphabet = automaton.rules().alphabet();
                let p = sys
                    .assignment_pattern(alphabet, &e, &crate::Domain::span(0, m))
                    .expect("cycle cells");
                (vec![0; m], p.into_states())
            });
            CyclicVerdict {
                injective: collision.is_none(),
                surjective: rank == sys.n_eqs() && bits == sys.n_eqs(),
                mode,
                rank: Some(rank),
                collision,
            }
        }
        _ => {
            let (images, collision) = enumerate(automaton, m, None, budget)?;
            let s = automaton.rules().alphabet().size() as u64;
            CyclicVerdict {
                injective: collision.is_none(),
                surjective: images == checked_pow(s, m).expect("within budget"),
                mode,
                rank: None,
                collision,
            }
        }
    };
    if verdict.injective != verdict.surjective {
        return Err(Error::Verification(
            "cyclic update is injective but not surjective or vice versa".into(),
        ));
    }
    Ok(verdict)
}

/// A colliding pair that agrees on every cycle position flagged in `keep`,
/// if one exists.
pub(crate) fn collision_agreeing_on(
    automaton: &Automaton,
    keep: &[bool],
    budget: &Budget,
) -> Result<Option<(Vec<State>, Vec<State>)>> {
    let m = cycle_len(automaton)?;
    if automaton.rules().is_linear() {
        let sys = Gf2System::for_cycle(automaton, None)?;
        let basis = sys.nullspace_basis();
        if basis.is_empty() {
            return Ok(None);
        }
        // combinations of the basis vanishing on every kept variable
        let kept: Vec<usize> = (0..sys.n_vars())
            .filter(|&i| keep[sys.var_label(i).0.x as usize])
            .collect();
        let rows = kept
            .iter()
            .map(|&v| BitVec::from_bools(basis.iter().map(|b| b.get(v))))
            .collect::<Vec<_>>();
        let restricted = Gf2System::from_rows(basis.len(), rows, BitVec::zeros(kept.len()))?;
        let elements: Vec<BitVec> = restricted
            .nullspace_basis()
            .iter()
            .map(|combo| {
                let mut e = BitVec::zeros(sys.n_vars());
                for j in combo.ones() {
                    e.xor_assign(&basis[j]);
                }
                e
            })
            .collect();
        return Ok(least_nonzero(&elements).map(|e| {
            let p = sys
                .assignment_pattern(automaton.rules().alphabet(), &e, &crate::Domain::span(0, m))
                .expect("cycle cells");
            (vec![0; m], p.into_states())
        }));
    }
    Ok(enumerate(automaton, m, Some(keep), budget)?.1)
}

/// Count distinct images; report the first collision in enumeration order
/// (restricted to pairs agreeing on `keep` when given).
fn enumerate(
    automaton: &Automaton,
    m: usize,
    keep: Option<&[bool]>,
    budget: &Budget,
) -> Result<(u64, Option<(Vec<State>, Vec<State>)>)> {
    let s = automaton.rules().alphabet().size();
    let total = budget.check_enumeration("cyclic enumeration", checked_pow(s as u64, m))?;
    let plan = CyclicPlan::new(automaton, m)?;
    let index = |w: &[State], mask: Option<&[bool]>| {
        w.iter()
            .enumerate()
            .rev()
            .filter(|(i, _)| mask.map_or(true, |k| k[*i]))
            .fold(0u64, |acc, (_, &v)| acc * s as u64 + v as u64)
    };
    let decode = |mut k: u64| {
        (0..m)
            .map(|_| {
                let v = (k % s as u64) as State;
                k /= s as u64;
                v
            })
            .collect::<Vec<State>>()
    };
    let mut seen = BitVec::zeros(total as usize);
    let mut images = 0u64;
    let mut first: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut collision = None;
    let mut word = vec![0 as State; m];
    let mut out = vec![0 as State; m];
    for k in 0..total {
        plan.eval(&word, &mut out);
        let img = index(&out, None);
        if !seen.get(img as usize) {
            seen.set(img as usize, true);
            images += 1;
        } else if collision.is_none() && keep.is_none() {
            let prev = *first.get(&(img, 0)).expect("seen image has a first pre-image");
            collision = Some((decode(prev), word.clone()));
        }
        if collision.is_none() {
            let key = (img, keep.map_or(0, |mask| index(&word, Some(mask))));
            match first.get(&key) {
                Some(&prev) if keep.is_some() => collision = Some((decode(prev), word.clone())),
                Some(_) => {}
                None => {
                    first.insert(key, k);
                }
            }
        }
        for d in word.iter_mut() {
            *d += 1;
            if *d < s {
                break;
            }
            *d = 0;
        }
    }
    Ok((images, collision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Alphabet, Neighborhood};
    use crate::rule::{LinearForm, LocalRule, RuleSet};
    use alloc::string::String;

    fn fg1() -> RuleSet {
        let a = Alphabet::binary();
        let f = LocalRule::from_linear(a.clone(), 3, LinearForm::single(vec![(0, 0), (1, 0)], false)).unwrap();
        let g = LocalRule::from_linear(a.clone(), 3, LinearForm::single(vec![(1, 0), (2, 0)], false)).unwrap();
        RuleSet::new(
            a,
            Neighborhood::line_range(-1, 1).unwrap(),
            vec![f, g],
            vec![String::from("f"), String::from("g")],
        )
        .unwrap()
    }

    #[test]
    fn gfgf_is_not_bijective() {
        let a = Automaton::new(fg1(), Distribution::cyclic(vec![1, 0, 1, 0])).unwrap();
        for method in [Method::Rank, Method::Exhaustive] {
            let v = cyclic_bijectivity_check(&a, method, &Budget::DEFAULT).unwrap();
            assert!(!v.injective && !v.surjective);
            let (x, y) = v.collision.unwrap();
            assert_ne!(x, y);
            let cx = a.apply_cyclic(&crate::Configuration::Cyclic { word: x }).unwrap();
            let cy = a.apply_cyclic(&crate::Configuration::Cyclic { word: y }).unwrap();
            assert_eq!(cx, cy);
        }
        let v = cyclic_bijectivity_check(&a, Method::Rank, &Budget::DEFAULT).unwrap();
        assert_eq!(v.rank, Some(2));
    }

    #[test]
    fn all_g_three_cycle() {
        let a = Automaton::new(fg1(), Distribution::cyclic(vec![1, 1, 1])).unwrap();
        let v = cyclic_bijectivity_check(&a, Method::Auto, &Budget::DEFAULT).unwrap();
        assert_eq!(v.rank, Some(2));
        assert!(!v.is_bijective());
    }

    #[test]
    fn identity_cycle_is_bijective() {
        let a2 = Alphabet::binary();
        let id = LocalRule::from_fn(a2.clone(), 1, |nb| nb[0]).unwrap();
        let rs = RuleSet::new(a2, Neighborhood::line(&[0]).unwrap(), vec![id], vec!["id".into()]).unwrap();
        let a = Automaton::new(rs, Distribution::cyclic(vec![0; 5])).unwrap();
        for method in [Method::Rank, Method::Exhaustive] {
            assert!(cyclic_bijectivity_check(&a, method, &Budget::DEFAULT).unwrap().is_bijective());
        }
    }

    #[test]
    fn restricted_collisions() {
        let a = Automaton::new(fg1(), Distribution::cyclic(vec![1, 0, 1, 0, 1, 1])).unwrap();
        let keep = [true, true, false, false, false, false];
        let lin = collision_agreeing_on(&a, &keep, &Budget::DEFAULT).unwrap().unwrap();
        assert_eq!(&lin.0[..2], &lin.1[..2]);
        let ex = enumerate(&a, 6, Some(&keep), &Budget::DEFAULT).unwrap().1.unwrap();
        assert_eq!(&ex.0[..2], &ex.1[..2]);
        let all = [true; 6];
        assert!(collision_agreeing_on(&a, &all, &Budget::DEFAULT).unwrap().is_none());
    }
}
