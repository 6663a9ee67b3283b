use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Family;
use crate::analysis::{verify_collision, verify_orphan, Mode, OrphanWitness, PreInjWitness};
use crate::config::{Configuration, FiniteSupport, Pattern};
use crate::dist::{Assignment, Distribution, Template};
use crate::engine::Automaton;
use crate::geometry::{Alphabet, Domain, Neighborhood, Point};
use crate::recurrence::{factor_occurrences, Occurrences};
use crate::rule::{LocalRule, RuleSet, TABLE_LIMIT};
use crate::{checked_pow, Budget, Error, Result, RuleId, State};

/// Rules `h_t` over `[guess] x Σ`, one per template symbol. The guess track
/// is static; the action track follows `f` exactly where the guesses spell
/// the unique word's slot correctly inside a run `(a, 1, .., n, b)` with
/// `a != n`, `b != 1`, and follows `g` everywhere else.
///
/// Guesses are `1..=n`; track 0 stores `guess - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedRuleSet {
    base: RuleSet,
    f: RuleId,
    g: RuleId,
    word: Vec<RuleId>,
    position: i64,
    rules: RuleSet,
}

impl LiftedRuleSet {
    /// Length of the unique word (after extension).
    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Template symbols of the unique word.
    pub fn word(&self) -> &[RuleId] {
        &self.word
    }

    /// Leftmost cell of the unique word.
    pub fn position(&self) -> i64 {
        self.position
    }

    /// `f` and `g` over the symmetric neighborhood the lift uses.
    pub fn base(&self) -> &RuleSet {
        &self.base
    }

    pub fn f(&self) -> RuleId {
        self.f
    }

    pub fn g(&self) -> RuleId {
        self.g
    }

    /// `h_t` at index `t`.
    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.rules.alphabet()
    }

    pub fn encode(&self, guess: u32, action: State) -> Result<State> {
        if guess == 0 || guess as usize > self.n() {
            return Err(Error::Precondition(format!("guess {guess} outside 1..={}", self.n())));
        }
        self.base.alphabet().check(action)?;
        Ok((guess - 1) * self.base.alphabet().size() + action)
    }

    pub fn guess(&self, state: State) -> u32 {
        state / self.base.alphabet().size() + 1
    }

    pub fn action(&self, state: State) -> State {
        state % self.base.alphabet().size()
    }

    fn uses_f(&self, t: RuleId, guesses: &[u32]) -> bool {
        selects_f(&self.word, t, guesses)
    }

    /// The automaton `τ_α` for the template the lift was built from.
    pub fn automaton(&self, template: &Template, assignment: &Assignment) -> Result<Automaton> {
        Automaton::new(self.rules.clone(), assignment.apply(template)?)
    }
}

/// Whether template symbol `t` uses `f` given the guesses on `(-R, .., R)`.
fn selects_f(word: &[RuleId], t: RuleId, guesses: &[u32]) -> bool {
    let n = word.len() as i64;
    let r = (guesses.len() as i64 - 1) / 2;
    let at = |off: i64| guesses[(off + r) as usize];
    let m0 = at(0) as i64;
    word[(m0 - 1) as usize] == t
        && (1..=n).all(|k| at(k - m0) == k as u32)
        && at(-m0) != n as u32
        && at(n + 1 - m0) != 1
}

/// Build `h_t` for every template symbol from `f` and `g` of `base`.
///
/// `unique` is `(position, length)` of a word occurring exactly once in the
/// template layout. A length-1 word is extended by the next symbol, since
/// the run condition needs at least two guess values. Rules whose
/// neighborhood is not `(-R, .., R)` are widened with dummy neighbors.
pub fn template_lift(
    template: &Template,
    unique: (i64, usize),
    base: &RuleSet,
    f: RuleId,
    g: RuleId,
) -> Result<(LiftedRuleSet, Assignment)> {
    let layout = template.layout();
    if layout.dim() != 1 || base.neighborhood().dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 2,
        });
    }
    let (position, mut n) = unique;
    if n == 0 {
        return Err(Error::Precondition("empty unique word".into()));
    }
    let word = layout.window(position, position + n as i64 - 1)?;
    if factor_occurrences(layout, &word)? != Occurrences::Finite(vec![position]) {
        return Err(Error::Precondition("the word does not occur exactly once".into()));
    }
    if n == 1 {
        n = 2;
    }
    let word = layout.window(position, position + n as i64 - 1)?;
    let r = base.neighborhood().radius();
    let symmetric = Neighborhood::line_range(-r, r)?;
    let base = if base.neighborhood() == &symmetric { base.clone() } else { base.widen_to_symmetric()? };
    if (r as usize) < n {
        return Err(Error::Precondition(format!("radius {r} is below the unique word length {n}")));
    }
    let s = base.alphabet().size();
    let mut tracks = vec![n as u32];
    tracks.extend_from_slice(base.alphabet().tracks());
    let alphabet = Alphabet::new(tracks)?;
    let arity = symmetric.arity();
    let table_len = checked_pow(alphabet.size() as u64, arity);
    if !matches!(table_len, Some(l) if l <= TABLE_LIMIT) {
        return Err(Error::BudgetExceeded {
            what: "lifted rule table",
            needed: table_len,
            limit: TABLE_LIMIT,
        });
    }
    let fr = base.rule(f)?;
    let gr = base.rule(g)?;
    let mut rules = Vec::with_capacity(template.symbols().len());
    let mut names = Vec::with_capacity(template.symbols().len());
    for (t, name) in template.symbols().iter().enumerate() {
        let h = LocalRule::from_fn(alphabet.clone(), arity, |nb| {
            let guesses: Vec<u32> = nb.iter().map(|&v| v / s + 1).collect();
            let actions: Vec<State> = nb.iter().map(|&v| v % s).collect();
            let rule = if selects_f(&word, t as RuleId, &guesses) { fr } else { gr };
            (guesses[r as usize] - 1) * s + rule.eval_unchecked(&actions)
        })?;
        rules.push(h);
        names.push(format!("h_{name}"));
    }
    let rules = RuleSet::new(alphabet, symmetric, rules, names)?;
    let lifted = LiftedRuleSet {
        base,
        f,
        g,
        word,
        position,
        rules,
    };
    Ok((lifted, Assignment::identity(template.symbols().len())))
}

/// For each cell of `[lo, hi]`, the base rule (`f` or `g`) the lifted rule
/// applies there given the guess track of `c`.
pub fn induced_base_distribution(
    lifted: &LiftedRuleSet,
    automaton: &Automaton,
    c: &Configuration,
    lo: i64,
    hi: i64,
) -> Result<Distribution> {
    let r = lifted.base.neighborhood().radius();
    let mut window = Vec::with_capacity((hi - lo + 1).max(0) as usize);
    for y in lo..=hi {
        let t = automaton.rule_id_at(Point::line(y))?;
        let guesses: Vec<u32> = (-r..=r).map(|o| lifted.guess(c.at_x(y + o))).collect();
        window.push(if lifted.uses_f(t, &guesses) { lifted.f } else { lifted.g });
    }
    if window.is_empty() {
        return Err(Error::Precondition("empty window".into()));
    }
    Ok(Distribution::ExplicitWindow {
        window,
        start: lo,
        default: lifted.g,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftWitness {
    Orphan {
        configuration: FiniteSupport,
        witness: OrphanWitness,
    },
    Collision(PreInjWitness),
}

/// The counterexample with the correct guesses `1..n` on the unique word,
/// flanked by `1` on the left and `n` on the right.
pub fn lift_counterexample(
    lifted: &LiftedRuleSet,
    automaton: &Automaton,
    family: Family,
    budget: &Budget,
) -> Result<LiftWitness> {
    let n = lifted.n() as i64;
    let x = lifted.position - 1;
    let guesses = FiniteSupport::line(
        1,
        (1..=n).map(|k| (x + k, k as State)).chain([(x + n + 1, n as State)]),
    );
    lift_counterexample_with(lifted, automaton, family, &guesses, budget)
}

/// The counterexample over an explicit guess track (values `1..=n`). Refuses
/// guess tracks that do not switch on `f` at exactly the unique word.
pub fn lift_counterexample_with(
    lifted: &LiftedRuleSet,
    automaton: &Automaton,
    family: Family,
    guesses: &FiniteSupport,
    budget: &Budget,
) -> Result<LiftWitness> {
    let expected_tracks = match family {
        Family::Moore => 1,
        Family::Myhill => 2,
    };
    if lifted.base.alphabet().track_count() != expected_tracks {
        return Err(Error::Precondition(format!("the lift was not built from the {} rules", family.name())));
    }
    let n = lifted.n() as i64;
    let x = lifted.position - 1;
    let lift = |action: &dyn Fn(i64) -> State| -> Result<FiniteSupport> {
        let bg = lifted.encode(guesses.background(), 0)?;
        let cells = (x - 1..=x + n + 2)
            .chain(guesses.support().map(|p| p.x))
            .map(|y| Ok((Point::line(y), lifted.encode(guesses.get(Point::line(y)), action(y))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteSupport::new(bg, cells))
    };
    let plain = lift(&|_| 0)?;
    let r = lifted.base.neighborhood().radius();
    let span = r + n + 2;
    let induced = induced_base_distribution(
        lifted,
        automaton,
        &Configuration::FiniteSupport(plain.clone()),
        x - span,
        x + n + 1 + span,
    )?;
    let selected = (x - span..=x + n + 1 + span).all(|y| {
        let want = if y > x && y <= x + n { lifted.f } else { lifted.g };
        induced.at(y).ok() == Some(want)
    });
    if !selected {
        return Err(Error::Precondition(
            "the guess track does not switch on f at exactly the unique word".into(),
        ));
    }
    match family {
        Family::Moore => {
            let configuration = lift(&|y| (y == x) as State)?;
            let domain = Domain::interval(x, x + n + 1);
            let pattern = Configuration::FiniteSupport(configuration.clone()).extract(&domain);
            let witness = OrphanWitness {
                domain,
                pattern,
                mode: Mode::Fiber,
            };
            if !verify_orphan(automaton, &witness, Mode::Fiber, budget)? {
                return Err(Error::Verification("the lifted orphan has a pre-image".into()));
            }
            Ok(LiftWitness::Orphan { configuration, witness })
        }
        Family::Myhill => {
            let one_zero = lifted.base.alphabet().encode(&[1, 0])?;
            let at = x + n + 1;
            let c2 = lift(&|y| if y == at { one_zero } else { 0 })?;
            if !verify_collision(automaton, &plain, &c2)? {
                return Err(Error::Verification("the lifted collision has different images".into()));
            }
            Ok(LiftWitness::Collision(PreInjWitness {
                background: plain.background(),
                window: Domain::interval(at, at),
                c1: plain,
                c2,
                mode: Mode::Fiber,
            }))
        }
    }
}

/// Action track of `c` on a window.
#[allow(dead_code)]
pub(crate) fn action_pattern(lifted: &LiftedRuleSet, c: &Configuration, domain: &Domain) -> Pattern {
    let p = c.extract(domain);
    Pattern::line(domain.lo(), p.states().iter().map(|&v| lifted.action(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{partial_surjectivity_check, preinjectivity_search, Method};
    use crate::constructions::build_family_rules;
    use crate::Sequential;
    use alloc::string::String;
    use rand::{Rng, SeedableRng};

    const A: RuleId = 0;
    const BB: RuleId = 1;

    fn aba() -> Template {
        Template::new(
            vec![String::from("A"), String::from("B")],
            Distribution::eventually_periodic(vec![A], vec![BB, A], vec![A], 0),
        )
        .unwrap()
    }

    fn moore_lift() -> (LiftedRuleSet, Automaton) {
        let t = aba();
        let base = build_family_rules(Family::Moore, 2).unwrap();
        let (l, alpha) = template_lift(&t, (0, 1), &base, 0, 1).unwrap();
        let a = l.automaton(&t, &alpha).unwrap();
        (l, a)
    }

    #[test]
    fn lifted_shape() {
        let (l, a) = moore_lift();
        assert_eq!(l.n(), 2);
        assert_eq!(l.word(), &[BB, A]);
        assert_eq!(l.alphabet().tracks(), &[2, 2]);
        assert!(a.rules().rules().iter().all(|r| r.fiber_form().is_some()));
        // template B with guess 1, right neighbor A with guess 2, flanks 1 and 2
        let g = |v: u32| v;
        assert!(l.uses_f(BB, &[g(1), g(1), g(1), g(2), g(2)]));
        assert!(!l.uses_f(A, &[g(1), g(1), g(1), g(2), g(2)]));
        assert!(!l.uses_f(BB, &[g(1), g(2), g(1), g(2), g(2)]));
        assert!(!l.uses_f(BB, &[g(1), g(1), g(1), g(2), g(1)]));
    }

    #[test]
    fn moore_lift_witnesses() {
        let (l, a) = moore_lift();
        let w = lift_counterexample(&l, &a, Family::Moore, &Budget::DEFAULT).unwrap();
        let LiftWitness::Orphan { witness, .. } = w else { panic!() };
        assert_eq!(witness.domain, Domain::interval(-1, 2));
        assert!(verify_orphan(&a, &witness, Mode::Exhaustive, &Budget::DEFAULT).unwrap());
        assert!(preinjectivity_search(&a, 8, &[0], None, Method::Auto, &Budget::DEFAULT, &Sequential)
            .unwrap()
            .is_none());
        // wrong guesses everywhere: no f anywhere
        assert!(matches!(
            lift_counterexample_with(&l, &a, Family::Moore, &FiniteSupport::uniform(1), &Budget::DEFAULT),
            Err(Error::Precondition(_))
        ));
        assert!(lift_counterexample(&l, &a, Family::Myhill, &Budget::DEFAULT).is_err());
    }

    #[test]
    fn myhill_lift_witnesses() {
        let t = aba();
        let base = build_family_rules(Family::Myhill, 2).unwrap();
        let (l, alpha) = template_lift(&t, (0, 2), &base, 0, 1).unwrap();
        let a = l.automaton(&t, &alpha).unwrap();
        assert_eq!(l.base().neighborhood().radius(), 3);
        assert!(matches!(
            lift_counterexample(&l, &a, Family::Myhill, &Budget::DEFAULT).unwrap(),
            LiftWitness::Collision(_)
        ));
        for w in 1..=2 {
            let d = Domain::span(-1, w);
            assert!(partial_surjectivity_check(&a, &d, Method::Auto, &Budget::DEFAULT)
                .unwrap()
                .is_surjective());
        }
    }

    #[test]
    fn decomposition_matches() {
        let (l, a) = moore_lift();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let base = l.base().clone();
        for _ in 0..20 {
            let cells: Vec<(i64, State)> = (-6..8).map(|x| (x, rng.gen_range(0..4))).collect();
            let c = Configuration::FiniteSupport(FiniteSupport::line(0, cells));
            let window = Domain::interval(-4, 6);
            let theta = induced_base_distribution(&l, &a, &c, -4, 6).unwrap();
            let plain = Automaton::new(base.clone(), theta).unwrap();
            let lifted_out = a.apply_window(&c, &window).unwrap();
            let action = Configuration::ExplicitWindow {
                window: (-10..=12).map(|x| l.action(c.at_x(x))).collect(),
                start: -10,
                default: 0,
            };
            let plain_out = plain.apply_window(&action, &window).unwrap();
            let got: Vec<State> = lifted_out.states().iter().map(|&v| l.action(v)).collect();
            assert_eq!(got, plain_out.into_states());
        }
    }

    #[test]
    fn non_unique_words_are_refused() {
        let base = build_family_rules(Family::Moore, 2).unwrap();
        assert!(template_lift(&aba(), (1, 1), &base, 0, 1).is_err());
    }
}
