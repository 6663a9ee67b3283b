//! Cells, box-shaped domains, alphabets and neighborhoods.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use crate::{Error, Result, State};

/// A cell of `Z` (with `y == 0`) or `Z^2`.
///
/// Points order row-major: by `y`, then by `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// A cell of the line.
    pub const fn line(x: i64) -> Self {
        Point { x, y: 0 }
    }

    pub fn max_abs(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A finite box of cells: an interval of the line or a rectangle of the plane.
///
/// Cells are enumerated row-major. A box with zero width or height is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    dim: u8,
    origin: Point,
    width: usize,
    height: usize,
}

impl Domain {
    /// The interval `[lo, hi]`; empty when `hi < lo`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        let width = if hi < lo { 0 } else { (hi - lo + 1) as usize };
        Domain {
            dim: 1,
            origin: Point::line(lo),
            width,
            height: 1,
        }
    }

    /// The interval of `width` cells starting at `lo`.
    pub fn span(lo: i64, width: usize) -> Self {
        Domain {
            dim: 1,
            origin: Point::line(lo),
            width,
            height: 1,
        }
    }

    pub fn empty(dim: u8) -> Self {
        Domain {
            dim,
            origin: Point::ORIGIN,
            width: 0,
            height: if dim == 1 { 1 } else { 0 },
        }
    }

    /// The `width x height` rectangle with lower-left corner `origin`.
    pub fn rect(origin: Point, width: usize, height: usize) -> Self {
        Domain {
            dim: 2,
            origin,
            width,
            height,
        }
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Leftmost cell of a 1-D domain.
    pub fn lo(&self) -> i64 {
        self.origin.x
    }

    /// Rightmost cell of a 1-D domain (`lo - 1` when empty).
    pub fn hi(&self) -> i64 {
        self.origin.x + self.width as i64 - 1
    }

    pub fn contains(&self, p: Point) -> bool {
        self.index_of(p).is_some()
    }

    /// Row-major position of `p`, if inside.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        let dx = p.x - self.origin.x;
        let dy = p.y - self.origin.y;
        if dx < 0 || dy < 0 || dx as usize >= self.width || dy as usize >= self.height {
            return None;
        }
        Some(dy as usize * self.width + dx as usize)
    }

    pub fn cell_at(&self, index: usize) -> Point {
        let (row, col) = (index / self.width, index % self.width);
        Point::new(self.origin.x + col as i64, self.origin.y + row as i64)
    }

    pub fn cells(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.cell_at(i))
    }

    pub fn translate(&self, by: Point) -> Self {
        Domain {
            origin: self.origin + by,
            ..*self
        }
    }

    /// Grow the box by `lo` (usually non-positive) at the low corner and by
    /// `hi` at the high corner. Empty domains stay empty.
    pub fn grow(&self, lo: Point, hi: Point) -> Self {
        if self.is_empty() {
            return *self;
        }
        let width = (self.width as i64 + hi.x - lo.x).max(0) as usize;
        let height = if self.dim == 1 {
            1
        } else {
            (self.height as i64 + hi.y - lo.y).max(0) as usize
        };
        let origin = if self.dim == 1 {
            Point::line(self.origin.x + lo.x)
        } else {
            self.origin + lo
        };
        Domain {
            dim: self.dim,
            origin,
            width,
            height,
        }
    }

    /// Grow by `amount` on every side.
    pub fn inflate(&self, amount: i64) -> Self {
        let lo = if self.dim == 1 {
            Point::line(-amount)
        } else {
            Point::new(-amount, -amount)
        };
        self.grow(lo, -lo)
    }

    /// Bounding box of `N(D) = D + offsets`.
    pub fn closure(&self, nbhd: &Neighborhood) -> Self {
        let (lo, hi) = nbhd.bounds();
        self.grow(lo, hi)
    }

    pub fn same_shape(&self, other: &Domain) -> bool {
        self.dim == other.dim
            && ((self.is_empty() && other.is_empty())
                || (self.width == other.width && self.height == other.height))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "[{}, {}]", self.lo(), self.hi())
        } else {
            write!(f, "{}+{}x{}", self.origin, self.width, self.height)
        }
    }
}

/// A finite state set, possibly a product of tracks.
///
/// States are mixed-radix integers: track 0 is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    tracks: Vec<u32>,
    strides: Vec<u32>,
    size: u32,
}

impl Alphabet {
    pub fn new(tracks: Vec<u32>) -> Result<Self> {
        if tracks.is_empty() {
            return Err(Error::InvalidAlphabet("no tracks".into()));
        }
        let mut size: u32 = 1;
        for &t in &tracks {
            if t == 0 {
                return Err(Error::InvalidAlphabet("track of size 0".into()));
            }
            size = size
                .checked_mul(t)
                .ok_or_else(|| Error::InvalidAlphabet(format!("size overflow: {tracks:?}")))?;
        }
        let mut strides = alloc::vec![1u32; tracks.len()];
        for k in (0..tracks.len() - 1).rev() {
            strides[k] = strides[k + 1] * tracks[k + 1];
        }
        Ok(Alphabet {
            tracks,
            strides,
            size,
        })
    }

    /// Single-track alphabet `{0, .., size - 1}`.
    pub fn with_size(size: u32) -> Result<Self> {
        Self::new(alloc::vec![size])
    }

    pub fn binary() -> Self {
        Self::new(alloc::vec![2]).expect("valid")
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn tracks(&self) -> &[u32] {
        &self.tracks
    }

    pub fn track_count(&self) -> usize {
        self.tracks.len()
    }

    /// Every track has exactly two values, so states are bit vectors.
    pub fn is_binary(&self) -> bool {
        self.tracks.iter().all(|&t| t == 2)
    }

    pub fn contains(&self, state: State) -> bool {
        state < self.size
    }

    pub fn check(&self, state: State) -> Result<()> {
        if self.contains(state) {
            Ok(())
        } else {
            Err(Error::StateOutOfRange {
                state,
                size: self.size,
            })
        }
    }

    pub fn track_value(&self, state: State, track: usize) -> u32 {
        (state / self.strides[track]) % self.tracks[track]
    }

    pub fn decode(&self, state: State) -> Vec<u32> {
        (0..self.tracks.len())
            .map(|t| self.track_value(state, t))
            .collect()
    }

    pub fn encode(&self, values: &[u32]) -> Result<State> {
        if values.len() != self.tracks.len() {
            return Err(Error::LengthMismatch {
                expected: self.tracks.len(),
                got: values.len(),
            });
        }
        let mut state = 0;
        for (k, (&v, &t)) in values.iter().zip(&self.tracks).enumerate() {
            if v >= t {
                return Err(Error::StateOutOfRange { state: v, size: t });
            }
            state += v * self.strides[k];
        }
        Ok(state)
    }

    pub(crate) fn stride(&self, track: usize) -> u32 {
        self.strides[track]
    }
}

/// An ordered tuple of neighbor offsets. Order matters: rule tables are
/// indexed with the first neighbor as the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Neighborhood {
    dim: u8,
    offsets: Vec<Point>,
}

impl Neighborhood {
    pub fn new(dim: u8, offsets: Vec<Point>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidNeighborhood(format!("unsupported dimension {dim}")));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidNeighborhood("no offsets".into()));
        }
        if dim == 1 && offsets.iter().any(|p| p.y != 0) {
            return Err(Error::InvalidNeighborhood("1-D offset with y != 0".into()));
        }
        Ok(Neighborhood { dim, offsets })
    }

    pub fn line(offsets: &[i64]) -> Result<Self> {
        Self::new(1, offsets.iter().map(|&x| Point::line(x)).collect())
    }

    /// Consecutive offsets `lo, lo + 1, .., hi`.
    pub fn line_range(lo: i64, hi: i64) -> Result<Self> {
        Self::new(1, (lo..=hi).map(Point::line).collect())
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }

    pub fn arity(&self) -> usize {
        self.offsets.len()
    }

    pub fn radius(&self) -> i64 {
        self.offsets.iter().map(|p| p.max_abs()).max().unwrap_or(0)
    }

    /// Componentwise minimum and maximum offset.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = self.offsets[0];
        let mut hi = self.offsets[0];
        for p in &self.offsets[1..] {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn index_of(&self, offset: Point) -> Option<usize> {
        self.offsets.iter().position(|&p| p == offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix_round_trip() {
        let a = Alphabet::new(alloc::vec![3, 2, 4]).unwrap();
        assert_eq!(a.size(), 24);
        for v in 0..a.size() {
            assert_eq!(a.encode(&a.decode(v)).unwrap(), v);
        }
        // track 0 is the most significant digit
        assert_eq!(a.encode(&[1, 0, 0]).unwrap(), 8);
        assert_eq!(a.track_value(8, 0), 1);
    }

    #[test]
    fn two_track_binary_layout() {
        let a = Alphabet::new(alloc::vec![2, 2]).unwrap();
        assert!(a.is_binary());
        assert_eq!(a.encode(&[1, 0]).unwrap(), 2);
        assert_eq!(a.decode(1), alloc::vec![0, 1]);
    }

    #[test]
    fn alphabet_rejects_bad_tracks() {
        assert!(Alphabet::new(alloc::vec![]).is_err());
        assert!(Alphabet::new(alloc::vec![2, 0]).is_err());
        assert!(Alphabet::new(alloc::vec![u32::MAX, 2]).is_err());
        let a = Alphabet::binary();
        assert!(a.encode(&[2]).is_err());
        assert!(a.check(2).is_err());
    }

    #[test]
    fn neighborhood_radius_and_bounds() {
        let n = Neighborhood::line(&[0, 1, 2, 3]).unwrap();
        assert_eq!(n.radius(), 3);
        assert_eq!(n.bounds(), (Point::line(0), Point::line(3)));
        assert!(Neighborhood::line(&[]).is_err());
        let m = Neighborhood::new(2, alloc::vec![Point::new(-1, 0), Point::new(0, 2)]).unwrap();
        assert_eq!(m.radius(), 2);
    }

    #[test]
    fn domain_closure_and_indexing() {
        let d = Domain::interval(0, 1);
        let n = Neighborhood::line_range(-1, 1).unwrap();
        let c = d.closure(&n);
        assert_eq!((c.lo(), c.hi()), (-1, 2));
        assert_eq!(d.index_of(Point::line(1)), Some(1));
        assert_eq!(d.index_of(Point::line(2)), None);
        assert!(Domain::interval(3, 2).is_empty());
        assert!(Domain::interval(3, 2).closure(&n).is_empty());

        let r = Domain::rect(Point::new(0, 0), 2, 3);
        let cells: Vec<_> = r.cells().collect();
        assert_eq!(cells[2], Point::new(0, 1));
        assert_eq!(r.index_of(Point::new(1, 2)), Some(5));
        assert_eq!(r.inflate(1).len(), 4 * 5);
    }
}
