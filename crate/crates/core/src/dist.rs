//! Finite presentations of rule distributions `θ: Z^d -> R` and of templates.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry::Point;
use crate::{Error, Result, RuleId};

/// A substitutive (morphic) distribution: `σ^depth(seed)` laid out to the
/// right of `anchor`, mirrored to the left of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitutive {
    substitution: Vec<Vec<RuleId>>,
    seed: RuleId,
    depth: usize,
    anchor: i64,
    expansion: Vec<RuleId>,
}

impl Substitutive {
    /// Materializes the expansion, failing once it would exceed `max_cells`.
    pub fn new(
        substitution: Vec<Vec<RuleId>>,
        seed: RuleId,
        depth: usize,
        anchor: i64,
        max_cells: usize,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidPresentation("substitution depth must be positive".into()));
        }
        if substitution.iter().any(|w| w.is_empty()) {
            return Err(Error::InvalidPresentation("empty substitution image".into()));
        }
        let alphabet = substitution.len() as u32;
        if seed >= alphabet || substitution.iter().flatten().any(|&s| s >= alphabet) {
            return Err(Error::InvalidPresentation(
                "substitution refers to a symbol without an image".into(),
            ));
        }
        let mut word = alloc::vec![seed];
        for _ in 0..depth {
            let len: usize = word.iter().map(|&s| substitution[s as usize].len()).sum();
            if len > max_cells {
                return Err(Error::BudgetExceeded {
                    what: "substitutive expansion",
                    needed: Some(len as u64),
                    limit: max_cells as u64,
                });
            }
            word = word
                .iter()
                .flat_map(|&s| substitution[s as usize].iter().copied())
                .collect();
        }
        Ok(Substitutive {
            substitution,
            seed,
            depth,
            anchor,
            expansion: word,
        })
    }

    /// The classic Thue–Morse substitution `0 -> 01, 1 -> 10`.
    pub fn thue_morse(depth: usize, max_cells: usize) -> Result<Self> {
        Self::new(alloc::vec![alloc::vec![0, 1], alloc::vec![1, 0]], 0, depth, 0, max_cells)
    }

    pub fn substitution(&self) -> &[Vec<RuleId>] {
        &self.substitution
    }

    pub fn seed(&self) -> RuleId {
        self.seed
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn anchor(&self) -> i64 {
        self.anchor
    }

    /// The one-sided expansion `σ^depth(seed)`.
    pub fn expansion(&self) -> &[RuleId] {
        &self.expansion
    }

    /// Cells with a defined value: `[anchor - len, anchor + len - 1]`.
    pub fn materialized_range(&self) -> (i64, i64) {
        let len = self.expansion.len() as i64;
        (self.anchor - len, self.anchor + len - 1)
    }

    pub fn at(&self, x: i64) -> Result<RuleId> {
        let k = if x >= self.anchor {
            x - self.anchor
        } else {
            self.anchor - 1 - x
        };
        self.expansion
            .get(k as usize)
            .copied()
            .ok_or(Error::OutsideExpansion {
                cell: x,
                len: self.expansion.len(),
            })
    }
}

/// A finite description of an infinite rule distribution (or of a template
/// layout: the same presentations serve any finite symbol set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distribution {
    /// `word[(x - anchor) mod |word|]`.
    Periodic { word: Vec<RuleId>, anchor: i64 },
    /// `...left left | middle | right right...` with `middle` starting at
    /// `middle_start`; the left tail ends with `left`'s last symbol at
    /// `middle_start - 1`, the right tail starts with `right[0]`.
    EventuallyPeriodic {
        left: Vec<RuleId>,
        middle: Vec<RuleId>,
        right: Vec<RuleId>,
        middle_start: i64,
    },
    Substitutive(Substitutive),
    /// `window` from `start`, `default` everywhere else.
    ExplicitWindow {
        window: Vec<RuleId>,
        start: i64,
        default: RuleId,
    },
    /// A distribution on `Z_m`, `m = word.len()`; line cells are read mod `m`.
    Cyclic { word: Vec<RuleId> },
    /// A doubly periodic distribution on `Z^2`, `word` row-major with
    /// `word[0]` at `anchor`.
    Periodic2 {
        width: usize,
        height: usize,
        word: Vec<RuleId>,
        anchor: Point,
    },
}

impl Distribution {
    pub fn periodic(word: Vec<RuleId>) -> Self {
        Distribution::Periodic { word, anchor: 0 }
    }

    pub fn uniform(rule: RuleId) -> Self {
        Distribution::Periodic {
            word: alloc::vec![rule],
            anchor: 0,
        }
    }

    pub fn eventually_periodic(
        left: Vec<RuleId>,
        middle: Vec<RuleId>,
        right: Vec<RuleId>,
        middle_start: i64,
    ) -> Self {
        Distribution::EventuallyPeriodic {
            left,
            middle,
            right,
            middle_start,
        }
    }

    pub fn cyclic(word: Vec<RuleId>) -> Self {
        Distribution::Cyclic { word }
    }

    pub fn dim(&self) -> u8 {
        match self {
            Distribution::Periodic2 { .. } => 2,
            _ => 1,
        }
    }

    /// Check the structural invariants and that every symbol is `< symbols`.
    pub fn validate(&self, symbols: usize) -> Result<()> {
        let nonempty = |w: &[RuleId], what: &str| {
            if w.is_empty() {
                Err(Error::InvalidPresentation(format!("empty {what} word")))
            } else {
                Ok(())
            }
        };
        match self {
            Distribution::Periodic { word, .. } | Distribution::Cyclic { word } => {
                nonempty(word, "periodic")?
            }
            Distribution::EventuallyPeriodic {
                left,
                middle,
                right,
                ..
            } => {
                nonempty(left, "left")?;
                nonempty(middle, "middle")?;
                nonempty(right, "right")?;
            }
            Distribution::Substitutive(_) => {}
            Distribution::ExplicitWindow { window, .. } => nonempty(window, "window")?,
            Distribution::Periodic2 {
                width,
                height,
                word,
                ..
            } => {
                nonempty(word, "periodic")?;
                if width * height != word.len() {
                    return Err(Error::InvalidPresentation(format!(
                        "{}x{} tile with {} symbols",
                        width,
                        height,
                        word.len()
                    )));
                }
            }
        }
        if let Some(&bad) = self.symbols().range(symbols as RuleId..).next() {
            return Err(Error::RuleOutOfRange {
                index: bad,
                count: symbols,
            });
        }
        Ok(())
    }

    /// Every symbol the presentation can produce.
    pub fn symbols(&self) -> BTreeSet<RuleId> {
        match self {
            Distribution::Periodic { word, .. }
            | Distribution::Cyclic { word }
            | Distribution::Periodic2 { word, .. } => word.iter().copied().collect(),
            Distribution::EventuallyPeriodic {
                left,
                middle,
                right,
                ..
            } => left.iter().chain(middle).chain(right).copied().collect(),
            Distribution::Substitutive(s) => s.expansion.iter().copied().collect(),
            Distribution::ExplicitWindow {
                window, default, ..
            } => window.iter().copied().chain([*default]).collect(),
        }
    }

    /// Rule at cell `x` of the line.
    pub fn at(&self, x: i64) -> Result<RuleId> {
        match self {
            Distribution::Periodic { word, anchor } => Ok(word[index_mod(x - anchor, word.len())]),
            Distribution::EventuallyPeriodic {
                left,
                middle,
                right,
                middle_start,
            } => {
                let i = *middle_start;
                let j = i + middle.len() as i64 - 1;
                Ok(if x < i {
                    left[index_mod(x - i, left.len())]
                } else if x <= j {
                    middle[(x - i) as usize]
                } else {
                    right[index_mod(x - j - 1, right.len())]
                })
            }
            Distribution::Substitutive(s) => s.at(x),
            Distribution::ExplicitWindow {
                window,
                start,
                default,
            } => {
                let k = x - start;
                Ok(if k >= 0 && (k as usize) < window.len() {
                    window[k as usize]
                } else {
                    *default
                })
            }
            Distribution::Cyclic { word } => Ok(word[index_mod(x, word.len())]),
            Distribution::Periodic2 { .. } => self.at_point(Point::line(x)),
        }
    }

    /// Rule at a cell of `Z^d`. 1-D presentations read `p.x`.
    pub fn at_point(&self, p: Point) -> Result<RuleId> {
        match self {
            Distribution::Periodic2 {
                width,
                height,
                word,
                anchor,
            } => {
                let col = index_mod(p.x - anchor.x, *width);
                let row = index_mod(p.y - anchor.y, *height);
                Ok(word[row * width + col])
            }
            _ => self.at(p.x),
        }
    }

    /// The rules on `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<Vec<RuleId>> {
        (lo..=hi).map(|x| self.at(x)).collect()
    }

    /// Relabel every symbol through `f` (e.g. a template assignment).
    pub fn map_symbols(&self, f: impl Fn(RuleId) -> RuleId) -> Self {
        let map = |w: &[RuleId]| w.iter().map(|&s| f(s)).collect::<Vec<_>>();
        match self {
            Distribution::Periodic { word, anchor } => Distribution::Periodic {
                word: map(word),
                anchor: *anchor,
            },
            Distribution::EventuallyPeriodic {
                left,
                middle,
                right,
                middle_start,
            } => Distribution::EventuallyPeriodic {
                left: map(left),
                middle: map(middle),
                right: map(right),
                middle_start: *middle_start,
            },
            Distribution::Substitutive(s) => Distribution::Substitutive(Substitutive {
                substitution: s.substitution.clone(),
                seed: s.seed,
                depth: s.depth,
                anchor: s.anchor,
                expansion: map(&s.expansion),
            }),
            Distribution::ExplicitWindow {
                window,
                start,
                default,
            } => Distribution::ExplicitWindow {
                window: map(window),
                start: *start,
                default: f(*default),
            },
            Distribution::Cyclic { word } => Distribution::Cyclic { word: map(word) },
            Distribution::Periodic2 {
                width,
                height,
                word,
                anchor,
            } => Distribution::Periodic2 {
                width: *width,
                height: *height,
                word: map(word),
                anchor: *anchor,
            },
        }
    }
}

/// `x mod n` in `0..n`.
pub(crate) fn index_mod(x: i64, n: usize) -> usize {
    x.rem_euclid(n as i64) as usize
}

/// A rule distribution template: a layout over abstract template symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    symbols: Vec<String>,
    layout: Distribution,
}

impl Template {
    pub fn new(symbols: Vec<String>, layout: Distribution) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidPresentation("template without symbols".into()));
        }
        layout.validate(symbols.len())?;
        Ok(Template { symbols, layout })
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn layout(&self) -> &Distribution {
        &self.layout
    }

    pub fn symbol_index(&self, name: &str) -> Option<RuleId> {
        self.symbols.iter().position(|s| s == name).map(|i| i as RuleId)
    }
}

/// A total map from template symbols to rule indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    rules: Vec<RuleId>,
}

impl Assignment {
    pub fn new(rules: Vec<RuleId>) -> Self {
        Assignment { rules }
    }

    pub fn identity(symbols: usize) -> Self {
        Assignment {
            rules: (0..symbols as RuleId).collect(),
        }
    }

    pub fn rules(&self) -> &[RuleId] {
        &self.rules
    }

    /// The distribution `τ_α`.
    pub fn apply(&self, template: &Template) -> Result<Distribution> {
        if self.rules.len() != template.symbols.len() {
            return Err(Error::InvalidPresentation(format!(
                "assignment covers {} of {} template symbols",
                self.rules.len(),
                template.symbols.len()
            )));
        }
        Ok(template.layout.map_symbols(|t| self.rules[t as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const F: RuleId = 0;
    const G: RuleId = 1;

    #[test]
    fn periodic_lookup() {
        let d = Distribution::Periodic {
            word: vec![G, F],
            anchor: 0,
        };
        assert_eq!(d.at(5).unwrap(), F);
        assert_eq!(d.at(-2).unwrap(), G);
        for x in -10..10 {
            assert_eq!(d.at(x).unwrap(), d.at(x + 2).unwrap());
        }
    }

    #[test]
    fn eventually_periodic_lookup() {
        let d = Distribution::eventually_periodic(vec![G], vec![G, F], vec![G], 0);
        assert_eq!(d.at(1).unwrap(), F);
        assert_eq!(d.at(-7).unwrap(), G);
        assert_eq!(d.at(0).unwrap(), G);
        assert_eq!(d.at(2).unwrap(), G);

        // tail phases: left ends with its last symbol at i-1, right starts with right[0]
        let d = Distribution::eventually_periodic(vec![0, 1], vec![2], vec![3, 4], 10);
        assert_eq!(d.window(7, 13).unwrap(), vec![1, 0, 1, 2, 3, 4, 3]);
    }

    #[test]
    fn cyclic_lookup() {
        let d = Distribution::cyclic(vec![G, F, G, F]);
        assert_eq!(d.at(-1).unwrap(), F);
        assert_eq!(d.at(4).unwrap(), G);
    }

    #[test]
    fn explicit_window_lookup() {
        let d = Distribution::ExplicitWindow {
            window: vec![2, 3],
            start: -1,
            default: 0,
        };
        assert_eq!(d.window(-3, 2).unwrap(), vec![0, 0, 2, 3, 0, 0]);
    }

    #[test]
    fn thue_morse_prefix_stable() {
        let a = Substitutive::thue_morse(5, 1 << 10).unwrap();
        let b = Substitutive::thue_morse(6, 1 << 10).unwrap();
        assert_eq!(a.expansion().len(), 32);
        assert_eq!(&b.expansion()[..32], a.expansion());
        assert_eq!(&a.expansion()[..8], &[0, 1, 1, 0, 1, 0, 0, 1]);
        // mirrored to the left of the anchor
        assert_eq!(a.at(-1).unwrap(), a.at(0).unwrap());
        assert_eq!(a.at(-3).unwrap(), a.at(2).unwrap());
        assert!(matches!(a.at(32), Err(Error::OutsideExpansion { .. })));
        assert!(matches!(a.at(-33), Err(Error::OutsideExpansion { .. })));
    }

    #[test]
    fn substitution_budget() {
        assert!(matches!(
            Substitutive::thue_morse(11, 1024),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(Substitutive::new(vec![vec![]], 0, 1, 0, 10).is_err());
        assert!(Substitutive::new(vec![vec![1]], 0, 1, 0, 10).is_err());
    }

    #[test]
    fn validation() {
        assert!(Distribution::periodic(vec![]).validate(2).is_err());
        assert!(Distribution::periodic(vec![0, 2]).validate(2).is_err());
        assert!(Distribution::eventually_periodic(vec![0], vec![], vec![0], 0)
            .validate(1)
            .is_err());
        let p2 = Distribution::Periodic2 {
            width: 2,
            height: 2,
            word: vec![0, 1, 1],
            anchor: Point::ORIGIN,
        };
        assert!(p2.validate(2).is_err());
    }

    #[test]
    fn periodic2_lookup() {
        let d = Distribution::Periodic2 {
            width: 2,
            height: 2,
            word: vec![0, 1, 2, 3],
            anchor: Point::new(1, 1),
        };
        assert_eq!(d.at_point(Point::new(1, 1)).unwrap(), 0);
        assert_eq!(d.at_point(Point::new(2, 1)).unwrap(), 1);
        assert_eq!(d.at_point(Point::new(0, 0)).unwrap(), 3);
        assert_eq!(d.dim(), 2);
    }

    #[test]
    fn template_assignment() {
        let t = Template::new(
            vec!["A".into(), "B".into()],
            Distribution::eventually_periodic(vec![0], vec![1, 0], vec![0], 0),
        )
        .unwrap();
        let d = Assignment::new(vec![5, 7]).apply(&t).unwrap();
        assert_eq!(d.window(-1, 2).unwrap(), vec![5, 7, 5, 5]);
        assert!(Assignment::new(vec![1]).apply(&t).is_err());
        assert_eq!(t.symbol_index("B"), Some(1));
    }
}
