//! Finite presentations of configurations and finite patterns.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::dist::index_mod;
use crate::geometry::{Domain, Point};
use crate::{Error, Result, State};

/// A configuration equal to `background` outside a finite set of cells.
/// Cells holding the background value are never stored, so the stored key
/// set is exactly the `q`-support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSupport {
    background: State,
    cells: BTreeMap<Point, State>,
}

impl FiniteSupport {
    pub fn new(background: State, cells: impl IntoIterator<Item = (Point, State)>) -> Self {
        let cells = cells.into_iter().filter(|&(_, v)| v != background).collect();
        FiniteSupport { background, cells }
    }

    /// Shorthand for line configurations.
    pub fn line(background: State, cells: impl IntoIterator<Item = (i64, State)>) -> Self {
        Self::new(background, cells.into_iter().map(|(x, v)| (Point::line(x), v)))
    }

    pub fn uniform(background: State) -> Self {
        FiniteSupport {
            background,
            cells: BTreeMap::new(),
        }
    }

    pub fn background(&self) -> State {
        self.background
    }

    pub fn get(&self, p: Point) -> State {
        self.cells.get(&p).copied().unwrap_or(self.background)
    }

    /// `(cell, state)` pairs of the support, in cell order.
    pub fn cells(&self) -> impl Iterator<Item = (Point, State)> + '_ {
        self.cells.iter().map(|(&p, &v)| (p, v))
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.cells.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    /// Smallest box containing the support, or `None` for a uniform configuration.
    pub fn bounding_box(&self, dim: u8) -> Option<Domain> {
        bounding_box(self.cells.keys().copied(), dim)
    }
}

/// Smallest `dim`-dimensional box containing `points`.
pub fn bounding_box(points: impl IntoIterator<Item = Point>, dim: u8) -> Option<Domain> {
    let mut points = points.into_iter();
    let first = points.next()?;
    let (mut lo, mut hi) = (first, first);
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    Some(if dim == 1 {
        Domain::interval(lo.x, hi.x)
    } else {
        Domain::rect(lo, (hi.x - lo.x + 1) as usize, (hi.y - lo.y + 1) as usize)
    })
}

/// A finite description of a configuration `c: Z^d -> Σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Configuration {
    FiniteSupport(FiniteSupport),
    /// `word[(x - anchor) mod |word|]`.
    Periodic { word: Vec<State>, anchor: i64 },
    /// Doubly periodic, `word` row-major with `word[0]` at `anchor`.
    Periodic2 {
        width: usize,
        height: usize,
        word: Vec<State>,
        anchor: Point,
    },
    /// A configuration on `Z_m`, `m = word.len()`; line cells are read mod `m`.
    Cyclic { word: Vec<State> },
    /// `window` from `start`, `default` elsewhere.
    ExplicitWindow {
        window: Vec<State>,
        start: i64,
        default: State,
    },
}

impl From<FiniteSupport> for Configuration {
    fn from(c: FiniteSupport) -> Self {
        Configuration::FiniteSupport(c)
    }
}

impl Configuration {
    pub fn uniform(state: State) -> Self {
        Configuration::FiniteSupport(FiniteSupport::uniform(state))
    }

    /// Structural checks plus every state `< size`.
    pub fn validate(&self, size: u32) -> Result<()> {
        let check = |v: State| {
            if v < size {
                Ok(())
            } else {
                Err(Error::StateOutOfRange { state: v, size })
            }
        };
        match self {
            Configuration::FiniteSupport(c) => {
                check(c.background)?;
                c.cells.values().try_for_each(|&v| check(v))
            }
            Configuration::Periodic { word, .. }
            | Configuration::Cyclic { word }
            | Configuration::ExplicitWindow { window: word, .. } => {
                if word.is_empty() {
                    return Err(Error::InvalidPresentation("empty configuration word".into()));
                }
                if let Configuration::ExplicitWindow { default, .. } = self {
                    check(*default)?;
                }
                word.iter().try_for_each(|&v| check(v))
            }
            Configuration::Periodic2 {
                width,
                height,
                word,
                ..
            } => {
                if word.is_empty() || width * height != word.len() {
                    return Err(Error::InvalidPresentation(
                        "periodic tile does not match its dimensions".into(),
                    ));
                }
                word.iter().try_for_each(|&v| check(v))
            }
        }
    }

    /// State at cell `p`. 1-D presentations read `p.x`.
    pub fn at(&self, p: Point) -> State {
        match self {
            Configuration::FiniteSupport(c) => c.get(p),
            Configuration::Periodic { word, anchor } => word[index_mod(p.x - anchor, word.len())],
            Configuration::Periodic2 {
                width,
                height,
                word,
                anchor,
            } => {
                let col = index_mod(p.x - anchor.x, *width);
                let row = index_mod(p.y - anchor.y, *height);
                word[row * width + col]
            }
            Configuration::Cyclic { word } => word[index_mod(p.x, word.len())],
            Configuration::ExplicitWindow {
                window,
                start,
                default,
            } => {
                let k = p.x - start;
                if k >= 0 && (k as usize) < window.len() {
                    window[k as usize]
                } else {
                    *default
                }
            }
        }
    }

    pub fn at_x(&self, x: i64) -> State {
        self.at(Point::line(x))
    }

    /// `result(x) = self(x - by)`.
    pub fn shift(&self, by: Point) -> Self {
        match self {
            Configuration::FiniteSupport(c) => Configuration::FiniteSupport(FiniteSupport {
                background: c.background,
                cells: c.cells.iter().map(|(&p, &v)| (p + by, v)).collect(),
            }),
            Configuration::Periodic { word, anchor } => Configuration::Periodic {
                word: word.clone(),
                anchor: anchor + by.x,
            },
            Configuration::Periodic2 {
                width,
                height,
                word,
                anchor,
            } => Configuration::Periodic2 {
                width: *width,
                height: *height,
                word: word.clone(),
                anchor: *anchor + by,
            },
            Configuration::Cyclic { word } => {
                let m = word.len();
                Configuration::Cyclic {
                    word: (0..m as i64).map(|k| word[index_mod(k - by.x, m)]).collect(),
                }
            }
            Configuration::ExplicitWindow {
                window,
                start,
                default,
            } => Configuration::ExplicitWindow {
                window: window.clone(),
                start: start + by.x,
                default: *default,
            },
        }
    }

    /// `c|_D`.
    pub fn extract(&self, domain: &Domain) -> Pattern {
        Pattern {
            domain: *domain,
            states: domain.cells().map(|p| self.at(p)).collect(),
        }
    }
}

/// Cells where two configurations differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSet {
    pub cells: Vec<Point>,
    /// No differences exist outside the scanned window.
    pub complete: bool,
}

/// Cells of `window` where `c` and `e` differ. The result is marked complete
/// when it provably lists every difference: identical presentations, or two
/// finite-support configurations over the same background whose differing
/// cells all lie inside `window`.
pub fn diff_set(c: &Configuration, e: &Configuration, window: &Domain) -> DiffSet {
    let cells: Vec<Point> = window.cells().filter(|&p| c.at(p) != e.at(p)).collect();
    let complete = if c == e {
        true
    } else if let (Configuration::FiniteSupport(a), Configuration::FiniteSupport(b)) = (c, e) {
        a.background == b.background
            && a
                .cells
                .keys()
                .chain(b.cells.keys())
                .all(|&p| a.get(p) == b.get(p) || window.contains(p))
    } else {
        false
    };
    DiffSet { cells, complete }
}

/// A finite pattern `p: D -> Σ`, states in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    domain: Domain,
    states: Vec<State>,
}

impl Pattern {
    pub fn new(domain: Domain, states: Vec<State>) -> Result<Self> {
        if states.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: states.len(),
            });
        }
        Ok(Pattern { domain, states })
    }

    /// A pattern on `[lo, lo + states.len() - 1]`.
    pub fn line(lo: i64, states: Vec<State>) -> Self {
        Pattern {
            domain: Domain::span(lo, states.len()),
            states,
        }
    }

    pub fn empty(dim: u8) -> Self {
        Pattern {
            domain: Domain::empty(dim),
            states: Vec::new(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn into_states(self) -> Vec<State> {
        self.states
    }

    pub fn get(&self, p: Point) -> Option<State> {
        self.domain.index_of(p).map(|i| self.states[i])
    }

    /// Restriction to a sub-box of the domain.
    pub fn restrict(&self, sub: &Domain) -> Result<Pattern> {
        let states = sub
            .cells()
            .map(|p| {
                self.get(p)
                    .ok_or_else(|| Error::DomainMismatch(alloc::format!("{sub} is not inside {}", self.domain)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern {
            domain: *sub,
            states,
        })
    }

    /// The configuration equal to this pattern on its domain and to
    /// `background` elsewhere.
    pub fn to_configuration(&self, background: State) -> Configuration {
        Configuration::FiniteSupport(FiniteSupport::new(
            background,
            self.domain.cells().zip(self.states.iter().copied()),
        ))
    }
}

/// `r` such that `p1(x) = p2(x + r)` on the whole domain of `p1`, if any.
pub fn is_translated_copy(p1: &Pattern, p2: &Pattern) -> Option<Point> {
    if !p1.domain.same_shape(&p2.domain) || p1.states != p2.states {
        return None;
    }
    Some(p2.domain.origin() - p1.domain.origin())
}
