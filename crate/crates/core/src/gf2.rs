//! Linear algebra over GF(2) for XOR-linear automata.
//!
//! Variables and equations are `(cell, track)` bits. Inside a cell the
//! tracks are numbered from the last one to the first, so that a larger
//! index always means a more significant bit of the pattern read as a
//! number whose last cell is the most significant digit. Elimination picks
//! the lowest free column as pivot; with free variables set to zero this
//! yields the least solution in that order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::config::Pattern;
use crate::engine::Automaton;
use crate::geometry::{Alphabet, Domain, Point};
use crate::rule::LinearForm;
use crate::{Error, Result, State};

/// A fixed-length bit vector packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND.
    pub fn dot(&self, other: &BitVec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set index at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from / 64;
        let mut word = self.words[w] & (!0u64 << (from % 64));
        loop {
            if word != 0 {
                let i = w * 64 + word.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            word = self.words[w];
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut next = self.next_one(0);
        core::iter::from_fn(move || {
            let i = next?;
            next = self.next_one(i + 1);
            Some(i)
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Bit `(cell, track)` positions of a sequence of cells, tracks reversed
/// inside each cell.
fn bit_layout(cells: impl Iterator<Item = Point>, tracks: usize) -> Vec<(Point, usize)> {
    cells
        .flat_map(|p| (0..tracks).rev().map(move |t| (p, t)))
        .collect()
}

/// A linear system `A x = b` over GF(2) whose variables and equations are
/// labelled by `(cell, track)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2System {
    n_vars: usize,
    rows: Vec<BitVec>,
    rhs: BitVec,
    vars: Vec<(Point, usize)>,
    eqs: Vec<(Point, usize)>,
    var_index: BTreeMap<(Point, usize), usize>,
    eq_index: BTreeMap<(Point, usize), usize>,
}

impl Gf2System {
    /// A bare system with anonymous labels (variable `k` is `(k, 0)`).
    pub fn from_rows(n_vars: usize, rows: Vec<BitVec>, rhs: BitVec) -> Result<Self> {
        if rhs.len() != rows.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                got: rhs.len(),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n_vars) {
            return Err(Error::LengthMismatch {
                expected: n_vars,
                got: r.len(),
            });
        }
        let vars = (0..n_vars as i64).map(|k| (Point::line(k), 0)).collect();
        let eqs = (0..rows.len() as i64).map(|k| (Point::line(k), 0)).collect();
        Ok(Self::labelled(n_vars, rows, rhs, vars, eqs))
    }

    fn labelled(
        n_vars: usize,
        rows: Vec<BitVec>,
        rhs: BitVec,
        vars: Vec<(Point, usize)>,
        eqs: Vec<(Point, usize)>,
    ) -> Self {
        let var_index = vars.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let eq_index = eqs.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Gf2System {
            n_vars,
            rows,
            rhs,
            vars,
            eqs,
            var_index,
            eq_index,
        }
    }

    /// Pre-images of `target` under `H_{θ|D}`: variables are the bits of
    /// `N(D)`, equations the bits of `D`. Without a target the right-hand
    /// side holds only the folded constants, i.e. it is the image of zero.
    pub fn for_window(automaton: &Automaton, domain: &Domain, target: Option<&Pattern>) -> Result<Self> {
        let alphabet = automaton.rules().alphabet();
        let closure = automaton.closure(domain);
        let vars = if domain.is_empty() {
            Vec::new()
        } else {
            bit_layout(closure.cells(), alphabet.track_count())
        };
        let forms = domain
            .cells()
            .map(|p| Ok((p, linear_form_at(automaton, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let target = match target {
            Some(t) if t.domain() != domain => {
                return Err(Error::DomainMismatch("target pattern must live on D".into()))
            }
            Some(t) => Some(t),
            None => None,
        };
        let offsets = automaton.rules().neighborhood().offsets();
        Ok(Self::assemble(alphabet, vars, &forms, |p, k| Some(p + offsets[k]), |p| {
            target.map_or(0, |t| t.get(p).unwrap_or(0))
        }, true, 0))
    }

    /// The homogeneous system for configurations supported in `support`,
    /// with one equation per bit of `eq_window`. Constants drop out because
    /// the system describes differences of two configurations.
    pub fn for_kernel(automaton: &Automaton, support: &Domain, eq_window: &Domain) -> Result<Self> {
        let alphabet = automaton.rules().alphabet();
        let vars = bit_layout(support.cells(), alphabet.track_count());
        let forms = eq_window
            .cells()
            .map(|p| Ok((p, linear_form_at(automaton, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let offsets = automaton.rules().neighborhood().offsets();
        Ok(Self::assemble(
            alphabet,
            vars,
            &forms,
            |p, k| Some(p + offsets[k]),
            |_| 0,
            false,
            0,
        ))
    }

    /// Pre-images of `target` under the cyclic update (all cells are variables).
    pub fn for_cycle(automaton: &Automaton, target: Option<&[State]>) -> Result<Self> {
        let m = match automaton.dist() {
            crate::Distribution::Cyclic { word } => word.len(),
            _ => {
                return Err(Error::Precondition(
                    "cyclic system needs a cyclic distribution".into(),
                ))
            }
        };
        if let Some(t) = target {
            if t.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: t.len(),
                });
            }
        }
        let alphabet = automaton.rules().alphabet();
        let cells = Domain::span(0, m);
        let vars = bit_layout(cells.cells(), alphabet.track_count());
        let forms = cells
            .cells()
            .map(|p| Ok((p, linear_form_at(automaton, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let offsets = automaton.rules().neighborhood().offsets();
        Ok(Self::assemble(
            alphabet,
            vars,
            &forms,
            |p, k| Some(Point::line((p.x + offsets[k].x).rem_euclid(m as i64))),
            |p| target.map_or(0, |t| t[p.x as usize]),
            true,
            0,
        ))
    }

    /// Shared assembly: one equation per `(cell, output track)` of `forms`.
    /// `locate` maps a neighbor slot to the variable cell; cells without a
    /// variable contribute zero. `target` gives the desired output state.
    /// Form track `t` is alphabet track `first_track + t`.
    pub(crate) fn assemble(
        alphabet: &Alphabet,
        vars: Vec<(Point, usize)>,
        forms: &[(Point, &LinearForm)],
        locate: impl Fn(Point, usize) -> Option<Point>,
        target: impl Fn(Point) -> State,
        with_constants: bool,
        first_track: usize,
    ) -> Self {
        let var_index: BTreeMap<(Point, usize), usize> =
            vars.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let n_vars = vars.len();
        let mut eqs = Vec::new();
        let mut rows = Vec::new();
        let mut rhs_bits = Vec::new();
        for &(p, form) in forms {
            let want = target(p);
            for t in (0..form.tracks.len()).rev() {
                let tf = &form.tracks[t];
                let mut row = BitVec::zeros(n_vars);
                for &(k, track) in &tf.terms {
                    if let Some(cell) = locate(p, k) {
                        if let Some(&v) = var_index.get(&(cell, track)) {
                            row.toggle(v);
                        }
                    }
                }
                let bit = alphabet.track_value(want, first_track + t) == 1;
                rows.push(row);
                rhs_bits.push(bit ^ (with_constants && tf.constant));
                eqs.push((p, first_track + t));
            }
        }
        Gf2System {
            n_vars,
            rows,
            rhs: BitVec::from_bools(rhs_bits),
            eq_index: eqs.iter().enumerate().map(|(i, &k)| (k, i)).collect(),
            vars,
            eqs,
            var_index,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_eqs(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn rhs(&self) -> &BitVec {
        &self.rhs
    }

    pub fn var_label(&self, i: usize) -> (Point, usize) {
        self.vars[i]
    }

    pub fn eq_label(&self, i: usize) -> (Point, usize) {
        self.eqs[i]
    }

    pub fn var_index(&self, cell: Point, track: usize) -> Option<usize> {
        self.var_index.get(&(cell, track)).copied()
    }

    pub fn eq_index(&self, cell: Point, track: usize) -> Option<usize> {
        self.eq_index.get(&(cell, track)).copied()
    }

    /// The same matrix with another right-hand side.
    pub fn with_rhs(&self, rhs: BitVec) -> Result<Self> {
        if rhs.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                expected: self.rows.len(),
                got: rhs.len(),
            });
        }
        Ok(Gf2System { rhs, ..self.clone() })
    }

    pub fn eliminate(&self) -> Echelon {
        Echelon::new(self.n_vars, self.rows.clone(), self.rhs.clone(), false)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().rank()
    }

    /// Least solution (largest index most significant), if any.
    pub fn solve(&self) -> Option<BitVec> {
        self.eliminate().solution()
    }

    /// Basis of `{x : A x = 0}` in reduced echelon form.
    pub fn nullspace_basis(&self) -> Vec<BitVec> {
        self.eliminate().nullspace_basis()
    }

    /// The set of right-hand sides for which the system is solvable,
    /// shifted by the current right-hand side: `y` is attainable iff
    /// `A x = y xor rhs` is solvable.
    pub fn image_space(&self) -> ImageSpace {
        let e = Echelon::new(self.n_vars, self.rows.clone(), self.rhs.clone(), true);
        ImageSpace {
            constraints: e.left_kernel,
            offset: self.rhs.clone(),
        }
    }

    /// Variable assignment as states on the cells of `domain`.
    pub fn assignment_pattern(&self, alphabet: &Alphabet, x: &BitVec, domain: &Domain) -> Result<Pattern> {
        let mut states = vec![0 as State; domain.len()];
        for i in x.ones() {
            let (cell, track) = self.vars[i];
            let k = domain
                .index_of(cell)
                .ok_or_else(|| Error::DomainMismatch("variable outside the requested domain".into()))?;
            states[k] += alphabet.stride(track);
        }
        Pattern::new(*domain, states)
    }

    /// Equation-indexed bits as states on the cells of `domain`.
    pub fn equation_pattern(&self, alphabet: &Alphabet, y: &BitVec, domain: &Domain) -> Result<Pattern> {
        let mut states = vec![0 as State; domain.len()];
        for i in y.ones() {
            let (cell, track) = self.eqs[i];
            let k = domain
                .index_of(cell)
                .ok_or_else(|| Error::DomainMismatch("equation outside the requested domain".into()))?;
            states[k] += alphabet.stride(track);
        }
        Pattern::new(*domain, states)
    }
}

pub(crate) fn linear_form_at(automaton: &Automaton, p: Point) -> Result<&LinearForm> {
    let id = automaton.rule_id_at(p)?;
    automaton
        .rules()
        .rule(id)?
        .linear_form()
        .ok_or_else(|| Error::NotLinear {
            rule: automaton.rules().name(id).into(),
        })
}

/// Reduced row echelon form of an augmented system.
#[derive(Clone, Debug)]
pub struct Echelon {
    n_vars: usize,
    /// Nonzero reduced rows with their right-hand sides, pivot order.
    rows: Vec<(usize, BitVec, bool)>,
    consistent: bool,
    left_kernel: Vec<BitVec>,
}

impl Echelon {
    fn new(n_vars: usize, rows: Vec<BitVec>, rhs: BitVec, track: bool) -> Self {
        let n_eqs = rows.len();
        let mut work: Vec<(BitVec, bool, Option<BitVec>)> = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, rhs.get(i), track.then(|| BitVec::unit(n_eqs, i))))
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (column, row)
        let mut next = 0;
        for col in 0..n_vars {
            let Some(found) = (next..work.len()).find(|&r| work[r].0.get(col)) else {
                continue;
            };
            work.swap(next, found);
            let (prow, prhs, ptrack) = work[next].clone();
            for (r, item) in work.iter_mut().enumerate() {
                if r != next && item.0.get(col) {
                    item.0.xor_assign(&prow);
                    item.1 ^= prhs;
                    if let (Some(t), Some(pt)) = (item.2.as_mut(), ptrack.as_ref()) {
                        t.xor_assign(pt);
                    }
                }
            }
            pivots.push((col, next));
            next += 1;
        }
        let consistent = work[next..].iter().all(|(_, b, _)| !b);
        let left_kernel = work[next..].iter().filter_map(|(_, _, t)| t.clone()).collect();
        let rows = pivots
            .into_iter()
            .map(|(col, r)| (col, work[r].0.clone(), work[r].1))
            .collect();
        Echelon {
            n_vars,
            rows,
            consistent,
            left_kernel,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.0).collect()
    }

    /// Free variables zero, pivots from the reduced right-hand side.
    pub fn solution(&self) -> Option<BitVec> {
        if !self.consistent {
            return None;
        }
        let mut x = BitVec::zeros(self.n_vars);
        for (col, _, b) in &self.rows {
            x.set(*col, *b);
        }
        Some(x)
    }

    /// One basis vector per free column, in increasing column order.
    pub fn nullspace_basis(&self) -> Vec<BitVec> {
        let mut is_pivot = vec![false; self.n_vars];
        for (col, _, _) in &self.rows {
            is_pivot[*col] = true;
        }
        (0..self.n_vars)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::unit(self.n_vars, f);
                for (col, row, _) in &self.rows {
                    if row.get(f) {
                        v.set(*col, true);
                    }
                }
                v
            })
            .collect()
    }
}

/// An affine subspace of right-hand sides, given by parity constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSpace {
    constraints: Vec<BitVec>,
    offset: BitVec,
}

impl ImageSpace {
    pub fn dim_deficit(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_everything(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn contains(&self, y: &BitVec) -> bool {
        let mut z = y.clone();
        z.xor_assign(&self.offset);
        self.constraints.iter().all(|c| !c.dot(&z))
    }

    /// The least vector outside the space (largest index most significant).
    pub fn least_outside(&self) -> Option<BitVec> {
        let n = self.offset.len();
        let zero = BitVec::zeros(n);
        if !self.contains(&zero) {
            return Some(zero);
        }
        // the space is linear now; e_k is outside iff some constraint reads bit k
        (0..n)
            .find(|&k| self.constraints.iter().any(|c| c.get(k)))
            .map(|k| BitVec::unit(n, k))
    }
}

/// The least nonzero element of the span of `basis` (largest index most
/// significant), or `None` for the zero space.
pub fn least_nonzero(basis: &[BitVec]) -> Option<BitVec> {
    let mut basis: Vec<BitVec> = basis.iter().filter(|v| !v.is_zero()).cloned().collect();
    let n = basis.first()?.len();
    // reduce to an independent set
    let mut independent: Vec<BitVec> = Vec::new();
    for mut v in basis.drain(..) {
        for b in &independent {
            if let Some(top) = highest_one(b) {
                if v.get(top) {
                    v.xor_assign(b);
                }
            }
        }
        if !v.is_zero() {
            // keep the set in "distinct leading bit" form
            let top = highest_one(&v).expect("nonzero");
            for b in independent.iter_mut() {
                if b.get(top) {
                    b.xor_assign(&v);
                }
            }
            independent.push(v);
        }
    }
    let mut space = independent;
    for k in (0..n).rev() {
        if space.len() == 1 {
            break;
        }
        if let Some(i) = space.iter().position(|v| v.get(k)) {
            let pivot = space.swap_remove(i);
            for v in space.iter_mut() {
                if v.get(k) {
                    v.xor_assign(&pivot);
                }
            }
        }
    }
    space.pop()
}

fn highest_one(v: &BitVec) -> Option<usize> {
    (0..v.len()).rev().find(|&i| v.get(i))
}
