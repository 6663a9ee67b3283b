//! Local rules as truth tables, with optional GF(2) structure.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Alphabet, Neighborhood, Point};
use crate::{checked_pow, Error, Result, State};

/// Exhaustive linearity checks run only on tables up to this many entries.
pub const LINEAR_CHECK_LIMIT: usize = 1 << 20;
/// Fiber detection runs only on tables up to this many entries.
pub const FIBER_CHECK_LIMIT: usize = 1 << 22;
/// Largest table a rule may materialize.
pub const TABLE_LIMIT: u64 = 1 << 26;

/// One output track of a GF(2)-affine rule: the XOR of the listed
/// `(neighbor index, input track)` bits, plus a constant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TrackForm {
    pub terms: Vec<(usize, usize)>,
    pub constant: bool,
}

impl TrackForm {
    pub fn new(mut terms: Vec<(usize, usize)>, constant: bool) -> Self {
        // x ^ x = 0: repeated terms cancel in pairs
        terms.sort_unstable();
        let mut canonical: Vec<(usize, usize)> = Vec::with_capacity(terms.len());
        for t in terms {
            if canonical.last() == Some(&t) {
                canonical.pop();
            } else {
                canonical.push(t);
            }
        }
        TrackForm {
            terms: canonical,
            constant,
        }
    }
}

/// An affine form per output track.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub tracks: Vec<TrackForm>,
}

impl LinearForm {
    pub fn new(tracks: Vec<TrackForm>) -> Self {
        LinearForm { tracks }
    }

    /// Shorthand for single-track rules.
    pub fn single(terms: Vec<(usize, usize)>, constant: bool) -> Self {
        LinearForm {
            tracks: vec![TrackForm::new(terms, constant)],
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.tracks.iter().all(|t| !t.constant)
    }

    pub fn eval(&self, alphabet: &Alphabet, neighbors: &[State]) -> State {
        let mut out = 0;
        for (u, form) in self.tracks.iter().enumerate() {
            let mut bit = form.constant as u32;
            for &(i, t) in &form.terms {
                bit ^= alphabet.track_value(neighbors[i], t);
            }
            out += bit * alphabet.stride(u);
        }
        out
    }

    fn validate(&self, alphabet: &Alphabet, arity: usize) -> Result<()> {
        if !alphabet.is_binary() {
            return Err(Error::InvalidLinearForm("alphabet tracks must all be binary".into()));
        }
        if self.tracks.len() != alphabet.track_count() {
            return Err(Error::InvalidLinearForm(format!(
                "{} track forms for {} tracks",
                self.tracks.len(),
                alphabet.track_count()
            )));
        }
        for form in &self.tracks {
            for &(i, t) in &form.terms {
                if i >= arity || t >= alphabet.track_count() {
                    return Err(Error::InvalidLinearForm(format!("term ({i}, {t}) out of range")));
                }
            }
        }
        Ok(())
    }
}

/// Structure of a rule whose leading `static_tracks` tracks form a "static"
/// part and whose remaining tracks are binary "action" tracks: the static
/// output depends only on the static inputs, and for every fixed static
/// context the action output is an affine function of the action inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberForm {
    pub static_tracks: usize,
    /// Number of static values per cell.
    pub static_size: u32,
    /// Indexed by the static context (first neighbor most significant).
    pub contexts: Vec<(u32, LinearForm)>,
}

impl FiberForm {
    /// Static part of a state.
    pub fn static_part(&self, alphabet: &Alphabet, state: State) -> u32 {
        state / alphabet.stride(self.static_tracks - 1)
    }

    pub fn context_index(&self, statics: impl IntoIterator<Item = u32>) -> usize {
        statics
            .into_iter()
            .fold(0usize, |acc, v| acc * self.static_size as usize + v as usize)
    }
}

/// A local rule `f: Σ^m -> Σ` stored as a truth table of length `s^m`,
/// indexed by the neighbor tuple read as a base-`s` number (first neighbor
/// most significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalRule {
    alphabet: Alphabet,
    arity: usize,
    table: Vec<State>,
    linear: Option<LinearForm>,
    fiber: Option<FiberForm>,
}

impl LocalRule {
    pub fn from_table(alphabet: Alphabet, arity: usize, table: Vec<State>) -> Result<Self> {
        let expected = table_len(&alphabet, arity)?;
        if table.len() as u64 != expected {
            return Err(Error::TableLength {
                expected,
                got: table.len(),
            });
        }
        for &v in &table {
            alphabet.check(v)?;
        }
        let mut rule = LocalRule {
            alphabet,
            arity,
            table,
            linear: None,
            fiber: None,
        };
        rule.linear = rule.detect_linear();
        if rule.linear.is_none() {
            rule.fiber = rule.detect_fiber();
        }
        Ok(rule)
    }

    /// Tabulate `f` over all `s^m` neighbor tuples.
    pub fn from_fn(alphabet: Alphabet, arity: usize, f: impl Fn(&[State]) -> State) -> Result<Self> {
        let len = table_len(&alphabet, arity)? as usize;
        let s = alphabet.size();
        let mut digits = vec![0 as State; arity];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            table.push(f(&digits));
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < s {
                    break;
                }
                *d = 0;
            }
        }
        Self::from_table(alphabet, arity, table)
    }

    pub fn from_linear(alphabet: Alphabet, arity: usize, form: LinearForm) -> Result<Self> {
        form.validate(&alphabet, arity)?;
        let form = LinearForm::new(
            form.tracks
                .into_iter()
                .map(|t| TrackForm::new(t.terms, t.constant))
                .collect(),
        );
        let a = alphabet.clone();
        let rule = Self::from_fn(alphabet, arity, |nb| form.eval(&a, nb))?;
        debug_assert_eq!(rule.linear.as_ref(), Some(&form));
        Ok(rule)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[State] {
        &self.table
    }

    /// Canonical GF(2)-affine form, when one reproduces the whole table.
    pub fn linear_form(&self) -> Option<&LinearForm> {
        self.linear.as_ref()
    }

    pub fn fiber_form(&self) -> Option<&FiberForm> {
        self.fiber.as_ref()
    }

    pub fn eval(&self, neighbors: &[State]) -> Result<State> {
        if neighbors.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: neighbors.len(),
            });
        }
        for &v in neighbors {
            self.alphabet.check(v)?;
        }
        Ok(self.eval_unchecked(neighbors))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, neighbors: &[State]) -> State {
        self.table[self.index_of(neighbors)]
    }

    #[inline]
    pub(crate) fn index_of(&self, neighbors: &[State]) -> usize {
        let s = self.alphabet.size() as usize;
        neighbors.iter().fold(0usize, |acc, &v| acc * s + v as usize)
    }

    #[inline]
    pub(crate) fn eval_index(&self, index: usize) -> State {
        self.table[index]
    }

    /// The same rule read through a different neighborhood: new neighbor `k`
    /// maps to old neighbor `positions[k]` (or is ignored when `None`).
    pub fn reindex(&self, new_arity: usize, positions: &[Option<usize>]) -> Result<Self> {
        if positions.len() != new_arity {
            return Err(Error::LengthMismatch {
                expected: new_arity,
                got: positions.len(),
            });
        }
        let mut old = vec![0 as State; self.arity];
        let len = table_len(&self.alphabet, new_arity)? as usize;
        let s = self.alphabet.size();
        let mut digits = vec![0 as State; new_arity];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            for (k, p) in positions.iter().enumerate() {
                if let Some(i) = p {
                    old[*i] = digits[k];
                }
            }
            table.push(self.eval_unchecked(&old));
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < s {
                    break;
                }
                *d = 0;
            }
        }
        Self::from_table(self.alphabet.clone(), new_arity, table)
    }

    /// Find the affine form reproducing the table, if any.
    ///
    /// Only binary-track alphabets qualify, and only tables small enough for
    /// the exhaustive confirmation.
    fn detect_linear(&self) -> Option<LinearForm> {
        if !self.alphabet.is_binary() || self.table.len() > LINEAR_CHECK_LIMIT {
            return None;
        }
        let tracks = self.alphabet.track_count();
        let bits = self.arity * tracks;
        // With binary tracks the table index is the concatenation of the
        // neighbor state bits; output bit u is const ^ parity(index & mask_u).
        let base = self.table[0];
        let mut masks = vec![0usize; tracks];
        for bit in 0..bits {
            let out = self.table[1 << bit] ^ base;
            for (u, mask) in masks.iter_mut().enumerate() {
                if (out >> (tracks - 1 - u)) & 1 == 1 {
                    *mask |= 1 << bit;
                }
            }
        }
        for (index, &out) in self.table.iter().enumerate() {
            let mut expect = base;
            for (u, mask) in masks.iter().enumerate() {
                expect ^= ((index & mask).count_ones() & 1) << (tracks - 1 - u);
            }
            if expect != out {
                return None;
            }
        }
        let forms = masks
            .iter()
            .enumerate()
            .map(|(u, &mask)| {
                let terms = (0..bits)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| bit_to_term(b, self.arity, tracks))
                    .collect();
                TrackForm::new(terms, (base >> (tracks - 1 - u)) & 1 == 1)
            })
            .collect();
        Some(LinearForm::new(forms))
    }

    fn detect_fiber(&self) -> Option<FiberForm> {
        if self.table.len() > FIBER_CHECK_LIMIT {
            return None;
        }
        let tracks = self.alphabet.tracks();
        (1..tracks.len())
            .filter(|&k| tracks[k..].iter().all(|&t| t == 2))
            .find_map(|k| self.detect_fiber_with(k))
    }

    fn detect_fiber_with(&self, static_tracks: usize) -> Option<FiberForm> {
        let tracks = self.alphabet.track_count();
        let action_bits = tracks - static_tracks;
        let action_size = 1usize << action_bits;
        let static_size = self.alphabet.size() / action_size as u32;
        let m = self.arity;
        let contexts = checked_pow(static_size as u64, m)? as usize;
        let s = self.alphabet.size() as usize;
        let mut forms = Vec::with_capacity(contexts);
        let mut statics = vec![0usize; m];
        let mut nb = vec![0usize; m];
        for ctx in 0..contexts {
            let mut c = ctx;
            for i in (0..m).rev() {
                statics[i] = c % static_size as usize;
                c /= static_size as usize;
            }
            let index_of = |actions: &[usize]| -> usize {
                actions
                    .iter()
                    .zip(&statics)
                    .fold(0, |acc, (&a, &st)| acc * s + st * action_size + a)
            };
            nb.iter_mut().for_each(|v| *v = 0);
            let base = self.table[index_of(&nb)] as usize;
            let static_out = base / action_size;
            let base_action = base % action_size;
            // unit responses: neighbor i, action track bit b (b = 0 is the
            // least significant, i.e. the last track)
            let mut response = vec![0usize; m * action_bits];
            for i in 0..m {
                for b in 0..action_bits {
                    nb[i] = 1 << b;
                    let out = self.table[index_of(&nb)] as usize;
                    if out / action_size != static_out {
                        return None;
                    }
                    response[i * action_bits + b] = (out % action_size) ^ base_action;
                    nb[i] = 0;
                }
            }
            let total = checked_pow(action_size as u64, m)? as usize;
            for combo in 0..total {
                let mut c = combo;
                let mut expect = base_action;
                for i in (0..m).rev() {
                    nb[i] = c % action_size;
                    c /= action_size;
                    for b in 0..action_bits {
                        if nb[i] >> b & 1 == 1 {
                            expect ^= response[i * action_bits + b];
                        }
                    }
                }
                let out = self.table[index_of(&nb)] as usize;
                if out / action_size != static_out || out % action_size != expect {
                    return None;
                }
            }
            let track_forms = (0..action_bits)
                .map(|k| {
                    // output track static_tracks + k is action bit action_bits-1-k
                    let out_bit = action_bits - 1 - k;
                    let mut terms = Vec::new();
                    for i in 0..m {
                        for b in 0..action_bits {
                            if response[i * action_bits + b] >> out_bit & 1 == 1 {
                                terms.push((i, static_tracks + action_bits - 1 - b));
                            }
                        }
                    }
                    TrackForm::new(terms, base_action >> out_bit & 1 == 1)
                })
                .collect();
            forms.push((static_out as u32, LinearForm::new(track_forms)));
        }
        Some(FiberForm {
            static_tracks,
            static_size,
            contexts: forms,
        })
    }
}

fn table_len(alphabet: &Alphabet, arity: usize) -> Result<u64> {
    if arity == 0 {
        return Err(Error::InvalidNeighborhood("arity 0".into()));
    }
    match checked_pow(alphabet.size() as u64, arity) {
        Some(n) if n <= TABLE_LIMIT => Ok(n),
        needed => Err(Error::BudgetExceeded {
            what: "rule table",
            needed,
            limit: TABLE_LIMIT,
        }),
    }
}

/// Bit `b` of a binary table index, as (neighbor, track).
fn bit_to_term(bit: usize, arity: usize, tracks: usize) -> (usize, usize) {
    let neighbor = arity - 1 - bit / tracks;
    let track = tracks - 1 - bit % tracks;
    (neighbor, track)
}

/// A finite, named family of local rules sharing alphabet and neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    alphabet: Alphabet,
    neighborhood: Neighborhood,
    rules: Vec<LocalRule>,
    names: Vec<String>,
}

impl RuleSet {
    pub fn new(
        alphabet: Alphabet,
        neighborhood: Neighborhood,
        rules: Vec<LocalRule>,
        names: Vec<String>,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::IncompatibleRules("empty rule set".into()));
        }
        if rules.len() != names.len() {
            return Err(Error::IncompatibleRules(format!(
                "{} rules but {} names",
                rules.len(),
                names.len()
            )));
        }
        for (k, name) in names.iter().enumerate() {
            if names[..k].contains(name) {
                return Err(Error::IncompatibleRules(format!("duplicate rule name {name:?}")));
            }
        }
        for (rule, name) in rules.iter().zip(&names) {
            if rule.alphabet() != &alphabet {
                return Err(Error::IncompatibleRules(format!("rule {name} has a different alphabet")));
            }
            if rule.arity() != neighborhood.arity() {
                return Err(Error::IncompatibleRules(format!(
                    "rule {name} has arity {} but the neighborhood has {} offsets",
                    rule.arity(),
                    neighborhood.arity()
                )));
            }
        }
        Ok(RuleSet {
            alphabet,
            neighborhood,
            rules,
            names,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn neighborhood(&self) -> &Neighborhood {
        &self.neighborhood
    }

    pub fn rules(&self) -> &[LocalRule] {
        &self.rules
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, index: u32) -> Result<&LocalRule> {
        self.rules.get(index as usize).ok_or(Error::RuleOutOfRange {
            index,
            count: self.rules.len(),
        })
    }

    pub fn name(&self, index: u32) -> &str {
        &self.names[index as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// True when every rule carries an affine form.
    pub fn is_linear(&self) -> bool {
        self.rules.iter().all(|r| r.linear_form().is_some())
    }

    /// The same rules over the symmetric 1-D neighborhood `(-R, .., R)`,
    /// where `R` is the current radius; new offsets are dummy neighbors.
    pub fn widen_to_symmetric(&self) -> Result<Self> {
        if self.neighborhood.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.neighborhood.dim(),
            });
        }
        let r = self.neighborhood.radius();
        let wide = Neighborhood::line_range(-r, r)?;
        let positions: Vec<Option<usize>> = wide
            .offsets()
            .iter()
            .map(|&p| self.neighborhood.index_of(p))
            .collect();
        // every old neighbor must land somewhere (duplicated offsets would not)
        for i in 0..self.neighborhood.arity() {
            if !positions.contains(&Some(i)) {
                return Err(Error::InvalidNeighborhood("duplicate offsets".into()));
            }
        }
        let rules = self
            .rules
            .iter()
            .map(|r| r.reindex(wide.arity(), &positions))
            .collect::<Result<Vec<_>>>()?;
        RuleSet::new(self.alphabet.clone(), wide, rules, self.names.clone())
    }

    /// Offset of neighbor `i`.
    pub fn offset(&self, i: usize) -> Point {
        self.neighborhood.offsets()[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> LocalRule {
        LocalRule::from_fn(Alphabet::binary(), 3, |a| a[0] ^ a[1]).unwrap()
    }

    fn g1() -> LocalRule {
        LocalRule::from_fn(Alphabet::binary(), 3, |a| a[1] ^ a[2]).unwrap()
    }

    #[test]
    fn eval_xor_rules() {
        assert_eq!(f1().eval(&[1, 0, 0]).unwrap(), 1);
        assert_eq!(g1().eval(&[0, 0, 1]).unwrap(), 1);
        assert_eq!(f1().eval(&[0, 0, 0]).unwrap(), 0);
        assert_eq!(g1().eval(&[0, 0, 0]).unwrap(), 0);
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(f1().eval(&[1, 0]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(f1().eval(&[0, 2, 0]), Err(Error::StateOutOfRange { .. })));
    }

    #[test]
    fn detects_linear_forms() {
        let f = f1();
        let form = f.linear_form().unwrap();
        assert_eq!(form.tracks[0].terms, vec![(0, 0), (1, 0)]);
        assert!(!form.tracks[0].constant);

        let majority = LocalRule::from_fn(Alphabet::binary(), 3, |a| {
            (a[0] + a[1] + a[2] >= 2) as u32
        })
        .unwrap();
        assert!(majority.linear_form().is_none());

        let zero = LocalRule::from_fn(Alphabet::binary(), 3, |_| 0).unwrap();
        let form = zero.linear_form().unwrap();
        assert!(form.tracks[0].terms.is_empty() && !form.tracks[0].constant);

        let one = LocalRule::from_fn(Alphabet::binary(), 1, |_| 1).unwrap();
        assert!(one.linear_form().unwrap().tracks[0].constant);
    }

    #[test]
    fn multi_track_linear_form() {
        let a = Alphabet::new(vec![2, 2]).unwrap();
        // track0 out = a0.track1, track1 out = a0.track0 ^ a1.track1
        let form = LinearForm::new(vec![
            TrackForm::new(vec![(0, 1)], false),
            TrackForm::new(vec![(1, 1), (0, 0)], true),
        ]);
        let rule = LocalRule::from_linear(a.clone(), 2, form.clone()).unwrap();
        assert_eq!(rule.linear_form().unwrap().tracks[1].terms, vec![(0, 0), (1, 1)]);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(rule.eval(&[x, y]).unwrap(), form.eval(&a, &[x, y]));
            }
        }
    }

    #[test]
    fn repeated_terms_cancel() {
        let t = TrackForm::new(vec![(1, 0), (0, 0), (1, 0)], false);
        assert_eq!(t.terms, vec![(0, 0)]);
    }

    #[test]
    fn table_length_checked() {
        assert!(matches!(
            LocalRule::from_table(Alphabet::binary(), 2, vec![0, 1, 1]),
            Err(Error::TableLength { expected: 4, got: 3 })
        ));
        assert!(LocalRule::from_table(Alphabet::binary(), 1, vec![0, 2]).is_err());
    }

    #[test]
    fn detects_fibers() {
        // static track of size 3 selects between two XOR rules on one bit
        let a = Alphabet::new(vec![3, 2]).unwrap();
        let rule = LocalRule::from_fn(a.clone(), 2, |nb| {
            let g0 = a.track_value(nb[0], 0);
            let (x0, x1) = (a.track_value(nb[0], 1), a.track_value(nb[1], 1));
            let bit = if a.track_value(nb[1], 0) == 2 { x0 ^ x1 } else { x1 ^ 1 };
            a.encode(&[g0, bit]).unwrap()
        })
        .unwrap();
        assert!(rule.linear_form().is_none());
        let fiber = rule.fiber_form().unwrap();
        assert_eq!(fiber.static_tracks, 1);
        assert_eq!(fiber.contexts.len(), 9);
        let (out, form) = &fiber.contexts[fiber.context_index([1, 2])];
        assert_eq!(*out, 1);
        assert_eq!(form.tracks[0].terms, vec![(0, 1), (1, 1)]);
        let (_, form) = &fiber.contexts[fiber.context_index([0, 0])];
        assert_eq!(form.tracks[0].terms, vec![(1, 1)]);
        assert!(form.tracks[0].constant);
    }

    #[test]
    fn widen_to_symmetric_preserves_behaviour() {
        let a = Alphabet::binary();
        let n = Neighborhood::line(&[0, 1, 2]).unwrap();
        let r = LocalRule::from_fn(a.clone(), 3, |nb| nb[0] ^ nb[2]).unwrap();
        let set = RuleSet::new(a, n, vec![r], vec!["h".into()]).unwrap();
        let wide = set.widen_to_symmetric().unwrap();
        assert_eq!(wide.neighborhood().arity(), 5);
        // offsets -2..2; old offsets 0 and 2 are new indices 2 and 4
        let w = wide.rule(0).unwrap();
        assert_eq!(w.eval(&[1, 1, 1, 0, 0]).unwrap(), 1);
        assert_eq!(w.eval(&[1, 1, 1, 0, 1]).unwrap(), 0);
        assert_eq!(w.linear_form().unwrap().tracks[0].terms, vec![(2, 0), (4, 0)]);
    }

    #[test]
    fn rule_set_validation() {
        let a = Alphabet::binary();
        let n = Neighborhood::line_range(-1, 1).unwrap();
        assert!(RuleSet::new(a.clone(), n.clone(), vec![f1(), g1()], vec!["f".into()]).is_err());
        assert!(RuleSet::new(a.clone(), n.clone(), vec![f1(), g1()], vec!["f".into(), "f".into()]).is_err());
        let short = LocalRule::from_fn(a.clone(), 2, |_| 0).unwrap();
        assert!(RuleSet::new(a, n, vec![short], vec!["s".into()]).is_err());
    }
}
