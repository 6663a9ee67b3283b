//! Global, partial and cyclic updates of a NUCA.

use alloc::format;
use alloc::vec::Vec;

use crate::config::{Configuration, Pattern};
use crate::dist::Distribution;
use crate::geometry::{Domain, Point};
use crate::rule::{LocalRule, RuleSet};
use crate::{Error, Result, RuleId, State};

/// A rule set together with a rule distribution over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    rules: RuleSet,
    dist: Distribution,
}

impl Automaton {
    pub fn new(rules: RuleSet, dist: Distribution) -> Result<Self> {
        dist.validate(rules.len())?;
        let dim = rules.neighborhood().dim();
        if dist.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: dist.dim(),
            });
        }
        Ok(Automaton { rules, dist })
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn dist(&self) -> &Distribution {
        &self.dist
    }

    pub fn dim(&self) -> u8 {
        self.rules.neighborhood().dim()
    }

    /// Largest absolute neighbor offset.
    pub fn radius(&self) -> i64 {
        self.rules.neighborhood().radius()
    }

    pub fn rule_id_at(&self, p: Point) -> Result<RuleId> {
        self.dist.at_point(p)
    }

    pub fn rule_at(&self, p: Point) -> Result<&LocalRule> {
        self.rules.rule(self.dist.at_point(p)?)
    }

    /// `N(D)`.
    pub fn closure(&self, domain: &Domain) -> Domain {
        domain.closure(self.rules.neighborhood())
    }

    fn check_domain(&self, domain: &Domain) -> Result<()> {
        if domain.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: domain.dim(),
            });
        }
        Ok(())
    }

    /// `H_θ(c)` restricted to `domain`.
    pub fn apply_window(&self, c: &Configuration, domain: &Domain) -> Result<Pattern> {
        self.check_domain(domain)?;
        let offsets = self.rules.neighborhood().offsets();
        let mut nb = alloc::vec![0 as State; offsets.len()];
        let mut out = Vec::with_capacity(domain.len());
        for p in domain.cells() {
            let rule = self.rule_at(p)?;
            for (slot, &o) in nb.iter_mut().zip(offsets) {
                *slot = c.at(p + o);
            }
            out.push(rule.eval(&nb)?);
        }
        Pattern::new(*domain, out)
    }

    /// `H_{θ|D}(p)` for a pattern `p` on `N(D)`.
    pub fn apply_partial(&self, domain: &Domain, p: &Pattern) -> Result<Pattern> {
        self.check_domain(domain)?;
        let closure = self.closure(domain);
        if domain.is_empty() {
            return Ok(Pattern::empty(domain.dim()));
        }
        if p.domain() != &closure {
            return Err(Error::DomainMismatch(format!(
                "pattern lives on {} but N({domain}) = {closure}",
                p.domain()
            )));
        }
        let plan = WindowPlan::new(self, domain)?;
        let size = self.rules.alphabet().size();
        for &v in p.states() {
            if v >= size {
                return Err(Error::StateOutOfRange { state: v, size });
            }
        }
        let mut out = alloc::vec![0; domain.len()];
        plan.eval(p.states(), &mut out);
        Pattern::new(*domain, out)
    }

    /// One step of the cyclic automaton: both the distribution and `c`
    /// must be cyclic of the same length.
    pub fn apply_cyclic(&self, c: &Configuration) -> Result<Configuration> {
        let word = match c {
            Configuration::Cyclic { word } => word,
            _ => {
                return Err(Error::Precondition(
                    "cyclic update needs a cyclic configuration".into(),
                ))
            }
        };
        let size = self.rules.alphabet().size();
        for &v in word {
            if v >= size {
                return Err(Error::StateOutOfRange { state: v, size });
            }
        }
        Ok(Configuration::Cyclic {
            word: CyclicPlan::new(self, word.len())?.step(word),
        })
    }

    /// Rows `0..=steps` of the space-time diagram of `c` on a 1-D window.
    /// Every row is computed exactly from `c`: the initial window is widened
    /// by the neighborhood reach of all remaining steps.
    pub fn trace(&self, c: &Configuration, window: &Domain, steps: usize) -> Result<Vec<Pattern>> {
        self.check_domain(window)?;
        if window.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: window.dim(),
            });
        }
        let (lo, hi) = self.rules.neighborhood().bounds();
        let t = steps as i64;
        let mut current = c.extract(&window.grow(Point::line(lo.x * t), Point::line(hi.x * t)));
        let mut rows = Vec::with_capacity(steps + 1);
        rows.push(current.restrict(window)?);
        for _ in 0..steps {
            let next = current.domain().grow(Point::line(-lo.x), Point::line(-hi.x));
            current = self.apply_partial(&next, &current)?;
            rows.push(current.restrict(window)?);
        }
        Ok(rows)
    }
}

/// Precomputed evaluation of `H_{θ|D}` on flat state arrays indexed by `N(D)`.
#[derive(Clone, Debug)]
pub(crate) struct WindowPlan<'a> {
    /// Per cell of `D`: its rule and the `N(D)` indices of its neighbors.
    cells: Vec<(&'a LocalRule, Vec<usize>)>,
}

impl<'a> WindowPlan<'a> {
    pub(crate) fn new(automaton: &'a Automaton, domain: &Domain) -> Result<Self> {
        let closure = automaton.closure(domain);
        let offsets = automaton.rules.neighborhood().offsets();
        let cells = domain
            .cells()
            .map(|p| {
                let rule = automaton.rule_at(p)?;
                let idx = offsets
                    .iter()
                    .map(|&o| closure.index_of(p + o).expect("neighbor inside closure"))
                    .collect();
                Ok((rule, idx))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowPlan { cells })
    }

    pub(crate) fn eval(&self, input: &[State], out: &mut [State]) {
        for ((rule, idx), o) in self.cells.iter().zip(out.iter_mut()) {
            let s = rule.alphabet().size() as usize;
            let k = idx.iter().fold(0usize, |acc, &i| acc * s + input[i] as usize);
            *o = rule.eval_index(k);
        }
    }
}

/// Precomputed cyclic update on `Z_m`.
#[derive(Clone, Debug)]
pub(crate) struct CyclicPlan<'a> {
    cells: Vec<(&'a LocalRule, Vec<usize>)>,
}

impl<'a> CyclicPlan<'a> {
    pub(crate) fn new(automaton: &'a Automaton, m: usize) -> Result<Self> {
        let word = match &automaton.dist {
            Distribution::Cyclic { word } => word,
            _ => {
                return Err(Error::Precondition(
                    "cyclic update needs a cyclic distribution".into(),
                ))
            }
        };
        if word.len() != m {
            return Err(Error::LengthMismatch {
                expected: word.len(),
                got: m,
            });
        }
        if automaton.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: automaton.dim(),
            });
        }
        let offsets = automaton.rules.neighborhood().offsets();
        let cells = (0..m as i64)
            .map(|x| {
                let rule = automaton.rules.rule(word[x as usize])?;
                let idx = offsets
                    .iter()
                    .map(|o| (x + o.x).rem_euclid(m as i64) as usize)
                    .collect();
                Ok((rule, idx))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CyclicPlan { cells })
    }

    pub(crate) fn eval(&self, input: &[State], out: &mut [State]) {
        for ((rule, idx), o) in self.cells.iter().zip(out.iter_mut()) {
            let s = rule.alphabet().size() as usize;
            let k = idx.iter().fold(0usize, |acc, &i| acc * s + input[i] as usize);
            *o = rule.eval_index(k);
        }
    }

    pub(crate) fn step(&self, input: &[State]) -> Vec<State> {
        let mut out = alloc::vec![0; input.len()];
        self.eval(input, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FiniteSupport;
    use crate::geometry::{Alphabet, Neighborhood};
    use crate::rule::LinearForm;
    use alloc::string::String;
    use alloc::vec;

    /// f1 = a_{-1} ^ a_0, g1 = a_0 ^ a_1 over offsets (-1, 0, 1).
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

    const F: RuleId = 0;
    const G: RuleId = 1;

    #[test]
    fn global_window_single_one() {
        let a = Automaton::new(fg1(), Distribution::uniform(G)).unwrap();
        let c: Configuration = FiniteSupport::line(0, [(0, 1)]).into();
        let p = a.apply_window(&c, &Domain::interval(-2, 2)).unwrap();
        assert_eq!(p.states(), &[0, 1, 1, 0, 0]);
    }

    #[test]
    fn partial_update_examples() {
        let a = Automaton::new(fg1(), Distribution::eventually_periodic(vec![G], vec![G, F], vec![G], 0)).unwrap();
        let d = Domain::interval(0, 1);
        for bits in 0..16u32 {
            let e: Vec<State> = (0..4).map(|k| bits >> (3 - k) & 1).collect();
            let p = a.apply_partial(&d, &Pattern::line(-1, e.clone())).unwrap();
            let x = e[1] ^ e[2];
            assert_eq!(p.states(), &[x, x]);
        }
        let single = Domain::interval(1, 1);
        let p = a.apply_partial(&single, &Pattern::line(0, vec![1, 1, 0])).unwrap();
        assert_eq!(p.states(), &[0]);
        let empty = Domain::empty(1);
        assert!(a.apply_partial(&empty, &Pattern::empty(1)).unwrap().states().is_empty());
        assert!(a.apply_partial(&d, &Pattern::line(0, vec![0; 4])).is_err());
    }

    #[test]
    fn cyclic_update() {
        let a = Automaton::new(fg1(), Distribution::cyclic(vec![G, F, G, F])).unwrap();
        let out = a.apply_cyclic(&Configuration::Cyclic { word: vec![1, 1, 0, 0] }).unwrap();
        assert_eq!(out, Configuration::Cyclic { word: vec![0, 0, 0, 0] });
        assert!(a.apply_cyclic(&Configuration::Cyclic { word: vec![1, 1, 0] }).is_err());

        let one = LocalRule::from_linear(Alphabet::binary(), 1, LinearForm::single(vec![], true)).unwrap();
        let rs = RuleSet::new(Alphabet::binary(), Neighborhood::line(&[0]).unwrap(), vec![one], vec!["one".into()]).unwrap();
        let a = Automaton::new(rs, Distribution::cyclic(vec![0])).unwrap();
        assert_eq!(
            a.apply_cyclic(&Configuration::Cyclic { word: vec![0] }).unwrap(),
            Configuration::Cyclic { word: vec![1] }
        );
    }

    #[test]
    fn trace_rows() {
        let a = Automaton::new(fg1(), Distribution::uniform(G)).unwrap();
        let c: Configuration = FiniteSupport::line(0, [(0, 1)]).into();
        let w = Domain::interval(-2, 2);
        let rows = a.trace(&c, &w, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].states(), &[0, 0, 1, 0, 0]);
        let rows = a.trace(&c, &w, 3).unwrap();
        assert_eq!(rows[1], a.apply_window(&c, &w).unwrap());
        // x ^ x+1 applied twice: c(x) ^ c(x+2)
        assert_eq!(rows[2].states(), &[1, 0, 1, 0, 0]);
        let zero = Configuration::uniform(0);
        for row in a.trace(&zero, &w, 4).unwrap() {
            assert!(row.states().iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn dimension_checks() {
        let p2 = Distribution::Periodic2 {
            width: 1,
            height: 1,
            word: vec![0],
            anchor: Point::ORIGIN,
        };
        assert!(matches!(Automaton::new(fg1(), p2), Err(Error::DimensionMismatch { .. })));
        assert!(Automaton::new(fg1(), Distribution::uniform(2)).is_err());
    }
}
