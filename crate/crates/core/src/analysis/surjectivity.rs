use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{default_scan_interval, Method, Mode};
use crate::config::Pattern;
use crate::engine::{Automaton, WindowPlan};
use crate::geometry::{Domain, Point};
use crate::gf2::{BitVec, Gf2System};
use crate::rule::{FiberForm, LinearForm};
use crate::{checked_pow, Budget, Error, Executor, Result, RuleId, State};

/// A pattern without any pre-image under `H_{θ|D}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrphanWitness {
    pub domain: Domain,
    pub pattern: Pattern,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surjectivity {
    Surjective(Mode),
    Orphan(OrphanWitness),
}

impl Surjectivity {
    pub fn is_surjective(&self) -> bool {
        matches!(self, Surjectivity::Surjective(_))
    }

    pub fn orphan(&self) -> Option<&OrphanWitness> {
        match self {
            Surjectivity::Orphan(o) => Some(o),
            Surjectivity::Surjective(_) => None,
        }
    }
}

fn rules_in(automaton: &Automaton, domain: &Domain) -> Result<BTreeSet<RuleId>> {
    domain.cells().map(|p| automaton.rule_id_at(p)).collect()
}

fn exhaustive_cost(automaton: &Automaton, domain: &Domain) -> Option<u64> {
    let s = automaton.rules().alphabet().size() as u64;
    let inputs = checked_pow(s, automaton.closure(domain).len())?;
    let outputs = checked_pow(s, domain.len())?;
    Some(inputs.max(outputs))
}

fn fiber_static_tracks(automaton: &Automaton, ids: &BTreeSet<RuleId>) -> Result<Option<usize>> {
    let mut tracks = None;
    for &id in ids {
        match automaton.rules().rule(id)?.fiber_form() {
            Some(f) if tracks.is_none() || tracks == Some(f.static_tracks) => {
                tracks = Some(f.static_tracks)
            }
            _ => return Ok(None),
        }
    }
    Ok(tracks)
}

fn choose_mode(automaton: &Automaton, domain: &Domain, method: Method, budget: &Budget) -> Result<Mode> {
    let ids = rules_in(automaton, domain)?;
    let linear = ids
        .iter()
        .map(|&id| automaton.rules().rule(id).map(|r| r.linear_form().is_some()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|l| l);
    let fiber = fiber_static_tracks(automaton, &ids)?.is_some();
    match method {
        Method::Rank if !linear => Err(not_linear(automaton, &ids)),
        Method::Rank => Ok(Mode::Rank),
        Method::Fiber if !fiber => Err(Error::NoMethod(
            "rules in the window do not share a static/action fiber structure".into(),
        )),
        Method::Fiber => Ok(Mode::Fiber),
        Method::Exhaustive => Ok(Mode::Exhaustive),
        Method::Auto if linear => Ok(Mode::Rank),
        Method::Auto => {
            let cost = exhaustive_cost(automaton, domain);
            if matches!(cost, Some(c) if c <= budget.enumeration) || !fiber {
                Ok(Mode::Exhaustive)
            } else {
                Ok(Mode::Fiber)
            }
        }
    }
}

fn not_linear(automaton: &Automaton, ids: &BTreeSet<RuleId>) -> Error {
    let bad = ids
        .iter()
        .find(|&&id| automaton.rules().rule(id).map_or(true, |r| r.linear_form().is_none()))
        .copied()
        .unwrap_or(0);
    Error::NotLinear {
        rule: automaton.rules().name(bad).into(),
    }
}

/// Decide whether `H_{θ|D}` is onto `Σ^D`, returning the least orphan when not.
pub fn partial_surjectivity_check(
    automaton: &Automaton,
    domain: &Domain,
    method: Method,
    budget: &Budget,
) -> Result<Surjectivity> {
    if domain.dim() != automaton.dim() {
        return Err(Error::DimensionMismatch {
            expected: automaton.dim(),
            got: domain.dim(),
        });
    }
    if domain.is_empty() {
        return Ok(Surjectivity::Surjective(Mode::Exhaustive));
    }
    let mode = choose_mode(automaton, domain, method, budget)?;
    let orphan = match mode {
        Mode::Exhaustive => exhaustive_orphan(automaton, domain, budget)?,
        Mode::Rank => rank_orphan(automaton, domain)?,
        Mode::Fiber => fiber_orphan(automaton, domain, budget)?,
    };
    Ok(match orphan {
        None => Surjectivity::Surjective(mode),
        Some(pattern) => Surjectivity::Orphan(OrphanWitness {
            domain: *domain,
            pattern,
            mode,
        }),
    })
}

/// A pre-image of `target` on `N(D)`, if one exists.
pub fn has_preimage(
    automaton: &Automaton,
    domain: &Domain,
    target: &Pattern,
    method: Method,
    budget: &Budget,
) -> Result<Option<Pattern>> {
    if target.domain() != domain {
        return Err(Error::DomainMismatch("target must live on the queried domain".into()));
    }
    if domain.is_empty() {
        return Ok(Some(Pattern::empty(domain.dim())));
    }
    match choose_mode(automaton, domain, method, budget)? {
        Mode::Rank => {
            let sys = Gf2System::for_window(automaton, domain, Some(target))?;
            sys.solve()
                .map(|x| sys.assignment_pattern(automaton.rules().alphabet(), &x, &automaton.closure(domain)))
                .transpose()
        }
        Mode::Exhaustive => exhaustive_preimage(automaton, domain, target, budget),
        Mode::Fiber => fiber_preimage(automaton, domain, target, budget),
    }
}

/// Re-check that an orphan has no pre-image, using the given mode.
pub fn verify_orphan(automaton: &Automaton, witness: &OrphanWitness, mode: Mode, budget: &Budget) -> Result<bool> {
    let method = match mode {
        Mode::Exhaustive => Method::Exhaustive,
        Mode::Rank => Method::Rank,
        Mode::Fiber => Method::Fiber,
    };
    Ok(has_preimage(automaton, &witness.domain, &witness.pattern, method, budget)?.is_none())
}

/// Scan windows of width `1..=max_width` with left ends in `scan` (default:
/// [`default_scan_interval`]) and return the first orphan found.
pub fn orphan_search<E: Executor>(
    automaton: &Automaton,
    max_width: usize,
    scan: Option<(i64, i64)>,
    method: Method,
    budget: &Budget,
    exec: &E,
) -> Result<Option<OrphanWitness>> {
    if max_width == 0 {
        return Err(Error::Precondition("max_width must be at least 1".into()));
    }
    if automaton.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: automaton.dim(),
        });
    }
    let (lo, hi) = match scan {
        Some(s) => s,
        None => default_scan_interval(automaton, max_width)?,
    };
    if hi < lo {
        return Ok(None);
    }
    let count = (hi - lo + 1) as usize;
    for w in 1..=max_width {
        let hit = exec.find_first(count, |k| {
            let d = Domain::span(lo + k as i64, w);
            Ok(match partial_surjectivity_check(automaton, &d, method, budget)? {
                Surjectivity::Orphan(o) => Some(o),
                Surjectivity::Surjective(_) => None,
            })
        })?;
        if let Some((_, o)) = hit {
            return Ok(Some(o));
        }
    }
    Ok(None)
}

/// Calls `visit` on every state tuple of length `len` in odometer order
/// (first entry fastest); stops early when `visit` returns true.
fn odometer(len: usize, s: State, mut visit: impl FnMut(&[State]) -> bool) {
    let mut digits = vec![0 as State; len];
    loop {
        if visit(&digits) {
            return;
        }
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            digits[i] += 1;
            if digits[i] < s {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn pattern_index(states: &[State], s: u64) -> u64 {
    states.iter().rev().fold(0, |acc, &v| acc * s + v as u64)
}

fn pattern_from_index(domain: &Domain, mut index: u64, s: u64) -> Pattern {
    let states = (0..domain.len())
        .map(|_| {
            let v = (index % s) as State;
            index /= s;
            v
        })
        .collect();
    Pattern::new(*domain, states).expect("length matches domain")
}

fn exhaustive_orphan(automaton: &Automaton, domain: &Domain, budget: &Budget) -> Result<Option<Pattern>> {
    budget.check_enumeration("exhaustive orphan search", exhaustive_cost(automaton, domain))?;
    let s = automaton.rules().alphabet().size();
    let plan = WindowPlan::new(automaton, domain)?;
    let total = checked_pow(s as u64, domain.len()).expect("checked above");
    let mut seen = BitVec::zeros(total as usize);
    let mut hits = 0u64;
    let mut out = vec![0 as State; domain.len()];
    odometer(automaton.closure(domain).len(), s, |input| {
        plan.eval(input, &mut out);
        let k = pattern_index(&out, s as u64) as usize;
        if !seen.get(k) {
            seen.set(k, true);
            hits += 1;
        }
        hits == total
    });
    Ok((0..total)
        .find(|&k| !seen.get(k as usize))
        .map(|k| pattern_from_index(domain, k, s as u64)))
}

fn exhaustive_preimage(
    automaton: &Automaton,
    domain: &Domain,
    target: &Pattern,
    budget: &Budget,
) -> Result<Option<Pattern>> {
    let closure = automaton.closure(domain);
    let s = automaton.rules().alphabet().size();
    budget.check_enumeration("exhaustive pre-image search", checked_pow(s as u64, closure.len()))?;
    let plan = WindowPlan::new(automaton, domain)?;
    let mut out = vec![0 as State; domain.len()];
    let mut found = None;
    odometer(closure.len(), s, |input| {
        plan.eval(input, &mut out);
        if out == target.states() {
            found = Some(input.to_vec());
            true
        } else {
            false
        }
    });
    found.map(|v| Pattern::new(closure, v)).transpose()
}

fn rank_orphan(automaton: &Automaton, domain: &Domain) -> Result<Option<Pattern>> {
    let sys = Gf2System::for_window(automaton, domain, None)?;
    sys.image_space()
        .least_outside()
        .map(|y| sys.equation_pattern(automaton.rules().alphabet(), &y, domain))
        .transpose()
}

/// Per-window data for fiberwise analysis.
struct Fiber<'a> {
    static_tracks: usize,
    static_size: u32,
    action_size: u32,
    closure: Domain,
    /// Per cell of D: the cell, its fiber form and the closure indices it reads.
    cells: Vec<(Point, &'a FiberForm, Vec<usize>)>,
}

impl<'a> Fiber<'a> {
    fn new(automaton: &'a Automaton, domain: &Domain) -> Result<Self> {
        let ids = rules_in(automaton, domain)?;
        let static_tracks = fiber_static_tracks(automaton, &ids)?
            .ok_or_else(|| Error::NoMethod("no common fiber structure".into()))?;
        let alphabet = automaton.rules().alphabet();
        let action_size = alphabet.stride(static_tracks - 1);
        let closure = automaton.closure(domain);
        let offsets = automaton.rules().neighborhood().offsets();
        let cells = domain
            .cells()
            .map(|p| {
                let form = automaton.rule_at(p)?.fiber_form().expect("checked above");
                let idx = offsets
                    .iter()
                    .map(|&o| closure.index_of(p + o).expect("inside closure"))
                    .collect();
                Ok((p, form, idx))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Fiber {
            static_tracks,
            static_size: alphabet.size() / action_size,
            action_size,
            closure,
            cells,
        })
    }

    fn action_bits(&self) -> usize {
        self.action_size.trailing_zeros() as usize
    }

    /// Static outputs and action forms of D under a static background.
    fn contexts(&self, statics: &[State]) -> (Vec<u32>, Vec<(Point, &'a LinearForm)>) {
        let mut outs = Vec::with_capacity(self.cells.len());
        let mut forms = Vec::with_capacity(self.cells.len());
        for (p, form, idx) in &self.cells {
            let ctx = form.context_index(idx.iter().map(|&i| statics[i]));
            let (out, lf) = &form.contexts[ctx];
            outs.push(*out);
            forms.push((*p, lf));
        }
        (outs, forms)
    }

    fn system(
        &self,
        automaton: &Automaton,
        forms: &[(Point, &LinearForm)],
        target: Option<&Pattern>,
    ) -> Gf2System {
        let alphabet = automaton.rules().alphabet();
        let tracks = alphabet.track_count();
        let vars = self
            .closure
            .cells()
            .flat_map(|p| (self.static_tracks..tracks).rev().map(move |t| (p, t)))
            .collect();
        let offsets = automaton.rules().neighborhood().offsets();
        Gf2System::assemble(
            alphabet,
            vars,
            forms,
            |p, k| Some(p + offsets[k]),
            |p| target.map_or(0, |t| t.get(p).unwrap_or(0)),
            true,
            self.static_tracks,
        )
    }

    fn cost(&self, domain: &Domain) -> Option<u64> {
        let backgrounds = checked_pow(self.static_size as u64, self.closure.len())?;
        let actions = checked_pow(2, domain.len() * self.action_bits())?;
        backgrounds.checked_mul(actions)
    }
}

fn fiber_orphan(automaton: &Automaton, domain: &Domain, budget: &Budget) -> Result<Option<Pattern>> {
    let fiber = Fiber::new(automaton, domain)?;
    budget.check_enumeration("fiberwise orphan search", fiber.cost(domain))?;
    let s = automaton.rules().alphabet().size() as u64;
    budget.check_enumeration("fiberwise orphan search", checked_pow(s, domain.len()))?;
    let k = domain.len() * fiber.action_bits();
    let targets = 1usize << k;
    let mut attained: BTreeMap<u64, BitVec> = BTreeMap::new();
    odometer(fiber.closure.len(), fiber.static_size, |statics| {
        let (outs, forms) = fiber.contexts(statics);
        let key = pattern_index(&outs, fiber.static_size as u64);
        let seen = attained.entry(key).or_insert_with(|| BitVec::zeros(targets));
        if seen.count_ones() == targets {
            return false;
        }
        let image = fiber.system(automaton, &forms, None).image_space();
        for y in 0..targets {
            if !seen.get(y) && image.contains(&BitVec::from_bools((0..k).map(|b| y >> b & 1 == 1))) {
                seen.set(y, true);
            }
        }
        false
    });
    let static_size = fiber.static_size as u64;
    let total = checked_pow(s, domain.len()).expect("checked above");
    for index in 0..total {
        let p = pattern_from_index(domain, index, s);
        let statics: Vec<u32> = p.states().iter().map(|&v| v / fiber.action_size).collect();
        let actions = p
            .states()
            .iter()
            .rev()
            .fold(0usize, |acc, &v| (acc << fiber.action_bits()) | (v % fiber.action_size) as usize);
        let key = pattern_index(&statics, static_size);
        if !attained.get(&key).is_some_and(|seen| seen.get(actions)) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn fiber_preimage(
    automaton: &Automaton,
    domain: &Domain,
    target: &Pattern,
    budget: &Budget,
) -> Result<Option<Pattern>> {
    let fiber = Fiber::new(automaton, domain)?;
    budget.check_enumeration(
        "fiberwise pre-image search",
        checked_pow(fiber.static_size as u64, fiber.closure.len()),
    )?;
    let alphabet = automaton.rules().alphabet();
    let want: Vec<u32> = target.states().iter().map(|&v| v / fiber.action_size).collect();
    let mut found = None;
    odometer(fiber.closure.len(), fiber.static_size, |statics| {
        let (outs, forms) = fiber.contexts(statics);
        if outs != want {
            return false;
        }
        let sys = fiber.system(automaton, &forms, Some(target));
        let Some(x) = sys.solve() else {
            return false;
        };
        let mut states: Vec<State> = statics.iter().map(|&v| v * fiber.action_size).collect();
        for i in x.ones() {
            let (cell, track) = sys.var_label(i);
            states[fiber.closure.index_of(cell).expect("closure cell")] += alphabet.stride(track);
        }
        found = Some(states);
        true
    });
    found.map(|v| Pattern::new(fiber.closure, v)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::geometry::{Alphabet, Neighborhood};
    use crate::rule::{LocalRule, RuleSet};
    use crate::Sequential;
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

    const F: RuleId = 0;
    const G: RuleId = 1;

    fn moore1() -> Automaton {
        Automaton::new(fg1(), Distribution::eventually_periodic(vec![G], vec![G, F], vec![G], 0)).unwrap()
    }

    #[test]
    fn uniform_g_is_surjective_on_windows() {
        let a = Automaton::new(fg1(), Distribution::uniform(G)).unwrap();
        for w in 1..=6 {
            for method in [Method::Exhaustive, Method::Rank] {
                let v = partial_surjectivity_check(&a, &Domain::span(0, w), method, &Budget::DEFAULT).unwrap();
                assert!(v.is_surjective());
            }
        }
    }

    #[test]
    fn gf_block_orphan() {
        let a = moore1();
        let d = Domain::interval(0, 1);
        for method in [Method::Exhaustive, Method::Rank] {
            let v = partial_surjectivity_check(&a, &d, method, &Budget::DEFAULT).unwrap();
            let o = v.orphan().expect("orphan");
            assert_eq!(o.pattern.states(), &[1, 0]);
            assert!(verify_orphan(&a, o, Mode::Exhaustive, &Budget::DEFAULT).unwrap());
            assert!(verify_orphan(&a, o, Mode::Rank, &Budget::DEFAULT).unwrap());
        }
    }

    #[test]
    fn orphan_search_finds_block() {
        let a = moore1();
        let o = orphan_search(&a, 4, None, Method::Auto, &Budget::DEFAULT, &Sequential)
            .unwrap()
            .unwrap();
        assert_eq!(o.domain, Domain::interval(0, 1));
        assert_eq!(o.pattern.states(), &[1, 0]);
        let all_f = Automaton::new(fg1(), Distribution::uniform(F)).unwrap();
        assert!(orphan_search(&all_f, 8, None, Method::Exhaustive, &Budget::DEFAULT, &Sequential)
            .unwrap()
            .is_none());
    }

    #[test]
    fn preimages_reproduce_targets() {
        let a = moore1();
        let d = Domain::interval(-1, 2);
        for bits in 0..16u32 {
            let t = Pattern::line(-1, (0..4).map(|k| bits >> k & 1).collect());
            let ex = has_preimage(&a, &d, &t, Method::Exhaustive, &Budget::DEFAULT).unwrap();
            let rk = has_preimage(&a, &d, &t, Method::Rank, &Budget::DEFAULT).unwrap();
            assert_eq!(ex.is_some(), rk.is_some());
            if let Some(p) = rk {
                assert_eq!(a.apply_partial(&d, &p).unwrap(), t);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let a = moore1();
        let tiny = Budget::with_limit(8);
        let r = partial_surjectivity_check(&a, &Domain::span(0, 4), Method::Exhaustive, &tiny);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    /// Two tracks: a static track copied through, and an action track that
    /// XORs its right neighbor when the static value is 1.
    fn fiber_rules() -> RuleSet {
        let a = Alphabet::new(vec![2, 2]).unwrap();
        let rule = LocalRule::from_fn(a.clone(), 2, |nb| {
            let st = nb[0] >> 1;
            let act = (nb[0] & 1) ^ (st & (nb[1] & 1));
            (st << 1) | act
        })
        .unwrap();
        let sq = LocalRule::from_fn(a.clone(), 2, |nb| {
            let st = nb[0] >> 1;
            // action output ignores the action inputs when static is 1
            let act = if st == 1 { 0 } else { nb[0] & 1 };
            (st << 1) | act
        })
        .unwrap();
        RuleSet::new(
            a,
            Neighborhood::line(&[0, 1]).unwrap(),
            vec![rule, sq],
            vec!["h".into(), "k".into()],
        )
        .unwrap()
    }

    #[test]
    fn fiber_mode_agrees_with_exhaustive() {
        let rs = fiber_rules();
        assert!(rs.rules().iter().all(|r| r.fiber_form().is_some()));
        for word in [vec![0], vec![1], vec![0, 1], vec![1, 1, 0]] {
            let a = Automaton::new(rs.clone(), Distribution::periodic(word)).unwrap();
            for w in 1..=3 {
                for lo in 0..3 {
                    let d = Domain::span(lo, w);
                    let ex = partial_surjectivity_check(&a, &d, Method::Exhaustive, &Budget::DEFAULT).unwrap();
                    let fb = partial_surjectivity_check(&a, &d, Method::Fiber, &Budget::DEFAULT).unwrap();
                    assert_eq!(ex.orphan().map(|o| &o.pattern), fb.orphan().map(|o| &o.pattern));
                    for idx in 0..(1u64 << (2 * w)) {
                        let t = pattern_from_index(&d, idx, 4);
                        let pe = has_preimage(&a, &d, &t, Method::Exhaustive, &Budget::DEFAULT).unwrap();
                        let pf = has_preimage(&a, &d, &t, Method::Fiber, &Budget::DEFAULT).unwrap();
                        assert_eq!(pe.is_some(), pf.is_some());
                        if let Some(p) = pf {
                            assert_eq!(a.apply_partial(&d, &p).unwrap(), t);
                        }
                    }
                }
            }
        }
    }
}
