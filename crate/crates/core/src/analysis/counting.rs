use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::config::FiniteSupport;
use crate::engine::Automaton;
use crate::geometry::Domain;
use crate::{checked_pow, Budget, Configuration, Error, Result, State};

/// Sizes of `K` (configurations supported in `C'`) and of its image,
/// observed on `C'` inflated by the radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageCount {
    pub configurations: u64,
    pub images: u64,
}

impl ImageCount {
    /// `|H(K)| < |K|`: two configurations of `K` collide.
    pub fn pigeonhole(&self) -> bool {
        self.images < self.configurations
    }
}

/// Count the images of all configurations equal to `q` outside `c_prime`.
/// Outside `c_prime` inflated by `r` all those images agree, so distinct
/// images are told apart on the inflated window alone.
pub fn image_count_finite_support(
    automaton: &Automaton,
    c_prime: &Domain,
    q: State,
    budget: &Budget,
) -> Result<ImageCount> {
    automaton.rules().alphabet().check(q)?;
    if c_prime.is_empty() {
        return Ok(ImageCount {
            configurations: 1,
            images: 1,
        });
    }
    let s = automaton.rules().alphabet().size();
    let total = budget.check_enumeration("finite-support image count", checked_pow(s as u64, c_prime.len()))?;
    let window = c_prime.inflate(automaton.radius());
    let mut images: BTreeSet<Vec<State>> = BTreeSet::new();
    let mut digits = vec![0 as State; c_prime.len()];
    for _ in 0..total {
        let c = Configuration::FiniteSupport(FiniteSupport::new(
            q,
            c_prime.cells().zip(digits.iter().copied()),
        ));
        images.insert(automaton.apply_window(&c, &window)?.into_states());
        for d in digits.iter_mut() {
            *d += 1;
            if *d < s {
                break;
            }
            *d = 0;
        }
    }
    Ok(ImageCount {
        configurations: total,
        images: images.len() as u64,
    })
}

/// Which counting inequality to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `(s^{n^d} - 1)^{k^d} < s^{(kn - 2r)^d}`, solved for `k`.
    MooreD,
    /// `(s^n - 1)^m < s^{nm - 2r}`, solved for `m` (one dimension).
    Myhill1D,
}

/// Largest exponent (in bits) the exact comparison will materialize.
const MAX_BITS: u64 = 1 << 26;

fn pow_exact(base: u64, exp: u64) -> Result<BigUint> {
    let bits = (64 - base.leading_zeros()) as u64;
    if exp.saturating_mul(bits) > MAX_BITS {
        return Err(Error::BudgetExceeded {
            what: "counting bound exponent",
            needed: Some(exp),
            limit: MAX_BITS,
        });
    }
    Ok(BigUint::from(base).pow(u32::try_from(exp).map_err(|_| Error::BudgetExceeded {
        what: "counting bound exponent",
        needed: Some(exp),
        limit: u32::MAX as u64,
    })?))
}

fn inequality(kind: BoundKind, d: u32, s: u64, n: u64, r: u64, k: u64) -> Result<bool> {
    let overflow = || Error::BudgetExceeded {
        what: "counting bound exponent",
        needed: None,
        limit: u64::MAX,
    };
    let (block, count, side) = match kind {
        BoundKind::MooreD => {
            let block_cells = n.checked_pow(d).ok_or_else(overflow)?;
            let block = pow_exact(s, block_cells)? - 1u32;
            (block, k.checked_pow(d).ok_or_else(overflow)?, k * n)
        }
        BoundKind::Myhill1D => (pow_exact(s, n)? - 1u32, k, k * n),
    };
    // an interior of negative width is empty
    let side = side.saturating_sub(2 * r);
    let exp = match kind {
        BoundKind::MooreD => side.checked_pow(d).ok_or_else(overflow)?,
        BoundKind::Myhill1D => side,
    };
    let lhs = pow_big(&block, count)?;
    Ok(lhs < pow_exact(s, exp)?)
}

fn pow_big(base: &BigUint, exp: u64) -> Result<BigUint> {
    if exp.saturating_mul(base.bits()) > MAX_BITS {
        return Err(Error::BudgetExceeded {
            what: "counting bound exponent",
            needed: Some(exp),
            limit: MAX_BITS,
        });
    }
    Ok(base.pow(exp as u32))
}

/// The least `k` (resp. `m`) satisfying the counting inequality, checked to
/// fail at the value below and to hold for the ten values above.
pub fn counting_bound(kind: BoundKind, d: u32, s: u64, n: u64, r: u64) -> Result<u64> {
    if d == 0 || s == 0 || n == 0 || r == 0 {
        return Err(Error::Precondition("all parameters must be at least 1".into()));
    }
    if kind == BoundKind::Myhill1D && d != 1 {
        return Err(Error::Precondition("the myhill bound is one-dimensional".into()));
    }
    if s == 1 {
        // 0 < 1 as soon as the interior is empty or not
        return Ok(1);
    }
    let holds = |k: u64| inequality(kind, d, s, n, r, k);
    // past 2r/n the ratio of the two sides is monotone in k
    let start = (2 * r) / n + 1;
    let mut hi = start;
    while !holds(hi)? {
        hi = hi.checked_mul(2).ok_or(Error::BudgetExceeded {
            what: "counting bound search",
            needed: None,
            limit: u64::MAX,
        })?;
    }
    let mut lo = start;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    // below `start` the interior is empty, so nothing smaller can hold
    for k in 1..lo.min(start) {
        if holds(k)? {
            return Err(Error::Verification(alloc::format!("counting bound holds early at {k}")));
        }
    }
    if lo > 1 && holds(lo - 1)? {
        return Err(Error::Verification("counting bound is not minimal".into()));
    }
    for k in lo..=lo + 10 {
        if !holds(k)? {
            return Err(Error::Verification(alloc::format!("counting bound fails again at {k}")));
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::geometry::{Alphabet, Neighborhood};
    use crate::rule::{LinearForm, LocalRule, RuleSet};
    use alloc::string::String;

    #[test]
    fn known_bounds() {
        assert_eq!(counting_bound(BoundKind::MooreD, 1, 2, 1, 1).unwrap(), 3);
        assert_eq!(counting_bound(BoundKind::MooreD, 1, 2, 2, 1).unwrap(), 5);
        assert_eq!(counting_bound(BoundKind::Myhill1D, 1, 2, 1, 1).unwrap(), 3);
    }

    #[test]
    fn brute_force_minimality() {
        for s in 2..4u64 {
            for n in 1..4u64 {
                for r in 1..4u64 {
                    for kind in [BoundKind::MooreD, BoundKind::Myhill1D] {
                        let k = counting_bound(kind, 1, s, n, r).unwrap();
                        let first = (1..).find(|&k| inequality(kind, 1, s, n, r, k).unwrap()).unwrap();
                        assert_eq!(k, first);
                    }
                }
            }
        }
        let k = counting_bound(BoundKind::MooreD, 2, 2, 1, 1).unwrap();
        let first = (1..).find(|&k| inequality(BoundKind::MooreD, 2, 2, 1, 1, k).unwrap()).unwrap();
        assert_eq!(k, first);
    }

    #[test]
    fn periodic_gf_counts() {
        let a = Alphabet::binary();
        let f = LocalRule::from_linear(a.clone(), 3, LinearForm::single(vec![(0, 0), (1, 0)], false)).unwrap();
        let g = LocalRule::from_linear(a.clone(), 3, LinearForm::single(vec![(1, 0), (2, 0)], false)).unwrap();
        let rs = RuleSet::new(
            a,
            Neighborhood::line_range(-1, 1).unwrap(),
            vec![f, g],
            vec![String::from("f"), String::from("g")],
        )
        .unwrap();
        let au = Automaton::new(rs, Distribution::periodic(vec![1, 0])).unwrap();
        let c = image_count_finite_support(&au, &Domain::interval(0, 3), 0, &Budget::DEFAULT).unwrap();
        assert_eq!(c.configurations, 16);
        assert_eq!(c.images, 4);
        assert!(c.pigeonhole());
        let e = image_count_finite_support(&au, &Domain::empty(1), 0, &Budget::DEFAULT).unwrap();
        assert_eq!((e.configurations, e.images), (1, 1));
    }
}
