//! Recurrence of rule distributions: factor counting, unique patterns,
//! gap tables and the tail-subword property.
//!
//! Periodic and eventually periodic presentations are decided exactly.
//! Substitutive presentations are only scanned over their materialized
//! range, and every verdict about them says so.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::{Error, Result, RuleId};

/// How often a pattern occurs in a distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Occurrences {
    Infinite,
    /// Exact count with the left ends of all occurrences.
    Finite(Vec<i64>),
    /// Occurrences inside the scanned range only; nothing is known outside.
    Scanned { positions: Vec<i64>, range: (i64, i64) },
}

impl Occurrences {
    /// The number of occurrences, when it is known exactly.
    pub fn exact_count(&self) -> Option<usize> {
        match self {
            Occurrences::Finite(p) => Some(p.len()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recurrence {
    Recurrent,
    /// `pattern` occurs exactly once, at `position`.
    NonRecurrent { pattern: Vec<RuleId>, position: i64 },
    /// Every factor up to this length seen in the scanned range occurs
    /// there at least twice.
    BoundedRecurrent { length: usize, range: (i64, i64) },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniformRecurrence {
    /// `widths[k - 1]` is `w(k)`: every window of that width contains every
    /// factor of length `k`. `exact` is false for scanned presentations.
    UniformlyRecurrent { widths: Vec<usize>, exact: bool },
    /// `pattern` occurs in the distribution but not in the window `[lo, hi]`,
    /// however wide such windows are taken.
    Fails { pattern: Vec<RuleId>, window: (i64, i64) },
}

/// A factor that occurs exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquePattern {
    pub position: i64,
    pub pattern: Vec<RuleId>,
}

impl UniquePattern {
    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailProperty {
    /// Every suffix of the left part occurs in the right part.
    SuffixesInRight,
    /// Every prefix of the right part occurs in the left part.
    PrefixesInLeft,
    Both,
    /// Both properties fail at or below this length.
    NeitherUpTo(usize),
}

/// Eventually periodic parts of a 1-D presentation.
struct Parts<'a> {
    left: &'a [RuleId],
    middle: &'a [RuleId],
    right: &'a [RuleId],
    i: i64,
}

impl Parts<'_> {
    fn j(&self) -> i64 {
        self.i + self.middle.len() as i64 - 1
    }

    fn lcm(&self) -> usize {
        lcm(self.left.len(), self.right.len())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The exact eventually periodic form of a presentation, when it has one
/// (explicit windows have constant tails).
pub fn as_eventually_periodic(dist: &Distribution) -> Option<Distribution> {
    match dist {
        Distribution::EventuallyPeriodic { .. } => Some(dist.clone()),
        Distribution::ExplicitWindow {
            window,
            start,
            default,
        } => Some(Distribution::eventually_periodic(
            vec![*default],
            window.clone(),
            vec![*default],
            *start,
        )),
        _ => None,
    }
}

fn parts(dist: &Distribution) -> Option<Parts<'_>> {
    match dist {
        Distribution::EventuallyPeriodic {
            left,
            middle,
            right,
            middle_start,
        } => Some(Parts {
            left,
            middle,
            right,
            i: *middle_start,
        }),
        _ => None,
    }
}

fn line_only(dist: &Distribution) -> Result<()> {
    if dist.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: dist.dim(),
        });
    }
    Ok(())
}

/// Does `p` occur in the bi-infinite repetition of `word`?
fn occurs_in_closure(word: &[RuleId], p: &[RuleId]) -> bool {
    (0..word.len()).any(|s| p.iter().enumerate().all(|(k, &v)| word[(s + k) % word.len()] == v))
}

fn occurs_at(dist: &Distribution, x: i64, p: &[RuleId]) -> Result<bool> {
    for (k, &v) in p.iter().enumerate() {
        if dist.at(x + k as i64)? != v {
            return Ok(false);
        }
    }
    Ok(true)
}

fn scan(dist: &Distribution, lo: i64, hi: i64, p: &[RuleId]) -> Result<Vec<i64>> {
    let mut hits = Vec::new();
    let mut x = lo;
    while x + p.len() as i64 - 1 <= hi {
        if occurs_at(dist, x, p)? {
            hits.push(x);
        }
        x += 1;
    }
    Ok(hits)
}

/// Count the occurrences of the factor `p`.
pub fn factor_occurrences(dist: &Distribution, p: &[RuleId]) -> Result<Occurrences> {
    line_only(dist)?;
    if p.is_empty() {
        return Err(Error::Precondition("empty pattern".into()));
    }
    match dist {
        Distribution::Periodic { word, .. } | Distribution::Cyclic { word } => {
            Ok(if occurs_in_closure(word, p) {
                Occurrences::Infinite
            } else {
                Occurrences::Finite(Vec::new())
            })
        }
        Distribution::Substitutive(s) => {
            let (lo, hi) = s.materialized_range();
            Ok(Occurrences::Scanned {
                positions: scan(dist, lo, hi, p)?,
                range: (lo, hi),
            })
        }
        Distribution::ExplicitWindow { .. } => {
            factor_occurrences(&as_eventually_periodic(dist).expect("explicit window"), p)
        }
        Distribution::EventuallyPeriodic { .. } => {
            let q = parts(dist).expect("eventually periodic");
            if occurs_in_closure(q.left, p) || occurs_in_closure(q.right, p) {
                return Ok(Occurrences::Infinite);
            }
            // every remaining occurrence meets the middle
            let len = p.len() as i64;
            Ok(Occurrences::Finite(scan(dist, q.i - len + 1, q.j() + len - 1, p)?))
        }
        Distribution::Periodic2 { .. } => unreachable!("checked dimension"),
    }
}

/// The least period of a globally periodic eventually periodic
/// presentation, if it is periodic at all.
pub fn global_period(dist: &Distribution) -> Option<usize> {
    let q = parts(dist)?;
    let l = q.lcm();
    let bound = q.middle.len() + 2 * l;
    (1..=bound).find(|&p| {
        let p = p as i64;
        // both ends of every compared pair fall in one tail outside this range
        let lo = q.i - p - l as i64;
        let hi = q.j() + l as i64;
        (lo..=hi).all(|x| dist.at(x).ok() == dist.at(x + p).ok())
    })
}

/// Decide recurrence: every factor that occurs, occurs at least twice.
///
/// `max_length` bounds the factor lengths for scanned (substitutive)
/// presentations.
pub fn is_recurrent(dist: &Distribution, max_length: usize) -> Result<Recurrence> {
    line_only(dist)?;
    match dist {
        Distribution::Periodic { .. } | Distribution::Cyclic { .. } => Ok(Recurrence::Recurrent),
        Distribution::ExplicitWindow { .. } => {
            is_recurrent(&as_eventually_periodic(dist).expect("explicit window"), max_length)
        }
        Distribution::EventuallyPeriodic { .. } => {
            if global_period(dist).is_some() {
                return Ok(Recurrence::Recurrent);
            }
            let u = shortest_unique_pattern(dist)?;
            Ok(Recurrence::NonRecurrent {
                pattern: u.pattern,
                position: u.position,
            })
        }
        Distribution::Substitutive(s) => {
            let (lo, hi) = s.materialized_range();
            let mut length = 0;
            for k in 1..=max_length {
                let counts = factor_counts(dist, lo, hi, k)?;
                if counts.values().any(|v| v.len() < 2) {
                    break;
                }
                length = k;
            }
            Ok(Recurrence::BoundedRecurrent {
                length,
                range: (lo, hi),
            })
        }
        Distribution::Periodic2 { .. } => unreachable!("checked dimension"),
    }
}

/// Left ends of every length-`k` factor inside `[lo, hi]`.
fn factor_counts(dist: &Distribution, lo: i64, hi: i64, k: usize) -> Result<BTreeMap<Vec<RuleId>, Vec<i64>>> {
    let cells = dist.window(lo, hi)?;
    let mut map: BTreeMap<Vec<RuleId>, Vec<i64>> = BTreeMap::new();
    if cells.len() >= k {
        for (s, w) in cells.windows(k).enumerate() {
            map.entry(w.to_vec()).or_default().push(lo + s as i64);
        }
    }
    Ok(map)
}

/// Least window width containing an occurrence for the given occurrence
/// left ends in `[lo, hi]`, counting the range edges.
fn window_for(positions: &[i64], lo: i64, hi: i64, k: usize) -> usize {
    let k = k as i64;
    let mut w = positions[0] - lo + k;
    for pair in positions.windows(2) {
        w = w.max(pair[1] - pair[0] + k - 1);
    }
    w = w.max(hi - positions[positions.len() - 1] + 1);
    w as usize
}

/// Gap table `w(k)` for `k = 1..=max_length`, or a factor missing from
/// arbitrarily wide windows.
pub fn uniform_recurrence_check(dist: &Distribution, max_length: usize) -> Result<UniformRecurrence> {
    match dist {
        Distribution::Periodic { word, .. } | Distribution::Cyclic { word } => Ok(UniformRecurrence::UniformlyRecurrent {
            widths: (1..=max_length).map(|k| cyclic_width(word, k)).collect(),
            exact: true,
        }),
        Distribution::Periodic2 {
            width,
            height,
            word,
            ..
        } => Ok(UniformRecurrence::UniformlyRecurrent {
            widths: (1..=max_length)
                .map(|k| torus_width(word, *width, *height, k))
                .collect(),
            exact: true,
        }),
        Distribution::ExplicitWindow { .. } => {
            uniform_recurrence_check(&as_eventually_periodic(dist).expect("explicit window"), max_length)
        }
        Distribution::EventuallyPeriodic { .. } => {
            if let Some(p) = global_period(dist) {
                let q = parts(dist).expect("eventually periodic");
                let word = dist.window(q.i, q.i + p as i64 - 1)?;
                return uniform_recurrence_check(&Distribution::periodic(word), max_length);
            }
            let q = parts(dist).expect("eventually periodic");
            let span = (max_length + 2 * q.lcm()) as i64;
            let (lo, hi) = (q.i - span, q.j() + span);
            let mut widths = Vec::with_capacity(max_length);
            for k in 1..=max_length {
                let counts = factor_counts(dist, lo, hi, k)?;
                for pattern in counts.keys() {
                    // a factor missing from a tail is missing from every window deep inside it
                    if !occurs_in_closure(q.right, pattern) {
                        let a = q.j() + 1;
                        return Ok(UniformRecurrence::Fails {
                            pattern: pattern.clone(),
                            window: (a, a + span),
                        });
                    }
                    if !occurs_in_closure(q.left, pattern) {
                        let b = q.i - 1;
                        return Ok(UniformRecurrence::Fails {
                            pattern: pattern.clone(),
                            window: (b - span, b),
                        });
                    }
                }
                // every factor recurs in both tails within one period, so the
                // scanned range shows every gap; edges are not real gaps
                let inner = |pos: &Vec<i64>| {
                    pos.windows(2)
                        .map(|w| (w[1] - w[0]) as usize + k - 1)
                        .max()
                        .unwrap_or(0)
                };
                widths.push(counts.values().map(inner).max().unwrap_or(k));
            }
            Ok(UniformRecurrence::UniformlyRecurrent { widths, exact: true })
        }
        Distribution::Substitutive(s) => {
            let (lo, hi) = s.materialized_range();
            let mut widths = Vec::with_capacity(max_length);
            for k in 1..=max_length {
                let counts = factor_counts(dist, lo, hi, k)?;
                widths.push(
                    counts
                        .values()
                        .map(|pos| window_for(pos, lo, hi, k))
                        .max()
                        .unwrap_or(k),
                );
            }
            Ok(UniformRecurrence::UniformlyRecurrent { widths, exact: false })
        }
    }
}

/// `w(k)` for the bi-infinite repetition of `word`.
fn cyclic_width(word: &[RuleId], k: usize) -> usize {
    let m = word.len();
    let factor = |s: usize| (0..k).map(|t| word[(s + t) % m]).collect::<Vec<_>>();
    let mut occ: BTreeMap<Vec<RuleId>, Vec<usize>> = BTreeMap::new();
    for s in 0..m {
        occ.entry(factor(s)).or_default().push(s);
    }
    occ.values()
        .map(|pos| {
            let gap = pos
                .windows(2)
                .map(|w| w[1] - w[0])
                .chain([pos[0] + m - pos[pos.len() - 1]])
                .max()
                .expect("nonempty");
            gap + k - 1
        })
        .max()
        .expect("nonempty word")
}

/// `w(k)` for `k x k` blocks of a doubly periodic tiling: the least `w` such
/// that every `w x w` window contains every block.
fn torus_width(word: &[RuleId], width: usize, height: usize, k: usize) -> usize {
    let block = |x: usize, y: usize| {
        let mut b = Vec::with_capacity(k * k);
        for dy in 0..k {
            for dx in 0..k {
                b.push(word[((y + dy) % height) * width + (x + dx) % width]);
            }
        }
        b
    };
    let mut ids: BTreeMap<Vec<RuleId>, usize> = BTreeMap::new();
    let mut at = vec![0usize; width * height];
    for y in 0..height {
        for x in 0..width {
            let n = ids.len();
            at[y * width + x] = *ids.entry(block(x, y)).or_insert(n);
        }
    }
    let kinds = ids.len();
    let mut w = k;
    loop {
        let reach = w - k + 1;
        let ok = (0..height).all(|y0| {
            (0..width).all(|x0| {
                let mut seen = BTreeSet::new();
                for dy in 0..reach {
                    for dx in 0..reach {
                        seen.insert(at[((y0 + dy) % height) * width + (x0 + dx) % width]);
                    }
                }
                seen.len() == kinds
            })
        });
        if ok {
            return w;
        }
        w += 1;
    }
}

/// The shortest, then leftmost, factor occurring exactly once.
pub fn shortest_unique_pattern(dist: &Distribution) -> Result<UniquePattern> {
    line_only(dist)?;
    let ep = as_eventually_periodic(dist)
        .ok_or_else(|| Error::Precondition("unique patterns are exact only for eventually periodic presentations".into()))?;
    if global_period(&ep).is_some() {
        return Err(Error::Precondition("the distribution is periodic, hence recurrent".into()));
    }
    let q = parts(&ep).expect("eventually periodic");
    // a non-periodic presentation has a unique factor covering the middle and
    // a stretch of each tail longer than any period
    let bound = q.middle.len() + 2 * q.lcm() + q.left.len() + q.right.len() + 2;
    for k in 1..=bound {
        let len = k as i64;
        for x in q.i - len + 1..=q.j() {
            let pattern = ep.window(x, x + len - 1)?;
            if factor_occurrences(&ep, &pattern)? == Occurrences::Finite(vec![x]) {
                return Ok(UniquePattern { position: x, pattern });
            }
        }
    }
    Err(Error::NotFound("no unique factor within the length bound".into()))
}

/// Length beyond which the tail comparison repeats itself.
pub fn conclusive_length(dist: &Distribution) -> Option<usize> {
    let q = parts(dist)?;
    Some(q.middle.len() + 2 * q.lcm())
}

/// Check, for lengths `1..=max_length`, whether each suffix of the part left
/// of the middle occurs right of it, and whether each prefix of the right part
/// occurs left of it.
pub fn tail_subword_property(dist: &Distribution, max_length: usize) -> Result<TailProperty> {
    let ep = as_eventually_periodic(dist)
        .ok_or_else(|| Error::Precondition("expected an eventually periodic presentation".into()))?;
    let q = parts(&ep).expect("eventually periodic");
    let mut suffix_fail = None;
    let mut prefix_fail = None;
    for k in 1..=max_length {
        let len = k as i64;
        if suffix_fail.is_none() && !occurs_in_closure(q.right, &ep.window(q.i - len, q.i - 1)?) {
            suffix_fail = Some(k);
        }
        if prefix_fail.is_none() && !occurs_in_closure(q.left, &ep.window(q.j() + 1, q.j() + len)?) {
            prefix_fail = Some(k);
        }
    }
    Ok(match (suffix_fail, prefix_fail) {
        (None, None) => TailProperty::Both,
        (None, Some(_)) => TailProperty::SuffixesInRight,
        (Some(_), None) => TailProperty::PrefixesInLeft,
        (Some(a), Some(b)) => TailProperty::NeitherUpTo(a.max(b)),
    })
}
