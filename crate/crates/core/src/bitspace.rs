//! Colored partitions of small Boolean vector spaces.
//!
//! A [`Partition`] is a set of variable coordinates together with a coloring
//! of every point of `{F,T}^k`: GREEN points are allowed assignments, RED
//! points are disallowed. Cells are indexed LSB-first over ascending
//! coordinates: the coordinate at position `i` contributes `b_i << i`, so
//! for coordinates `(u1,u2,u3)` the assignment `(T,F,T)` is cell `5`.
//!
//! Two cellwise operators act on colors: [`Op::Ws`] keeps GREEN whenever
//! either side is GREEN (disjunction on the allowed set), [`Op::Bs`] keeps
//! RED whenever either side is RED (conjunction). Everything else here is
//! built from those two plus coordinate bookkeeping: [`cross`] for
//! extension by disjoint coordinates, [`project`] for the WS fold onto a
//! sub-space, [`lift`] for the cylinder back up, [`impose`] for the BS of a
//! lifted sub-space partition, and [`bc`] / [`bc_uni`] for the symmetric and
//! one-directional combination of two overlapping spaces.

use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

/// Largest number of coordinates a partition may carry.
pub const MAX_COORDS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitspaceError {
    #[error("partition needs at least one coordinate")]
    NoCoords,
    #[error("{0} coordinates exceeds the limit of {MAX_COORDS}")]
    TooManyCoords(usize),
    #[error("coordinate 0 is not a variable id")]
    ZeroCoord,
    #[error("coordinates {0:?} are not strictly ascending")]
    UnsortedCoords(Vec<u32>),
    #[error("coordinate lists differ: {left:?} vs {right:?}")]
    CoordMismatch { left: Vec<u32>, right: Vec<u32> },
    #[error("coordinate lists overlap on {0:?}")]
    Overlap(Vec<u32>),
    #[error("coordinates {left:?} and {right:?} share nothing")]
    Disjoint { left: Vec<u32>, right: Vec<u32> },
    #[error("{sub:?} is not a subset of {sup:?}")]
    NotSubset { sub: Vec<u32>, sup: Vec<u32> },
    #[error("cell {cell} is outside a space of {cells} cells")]
    CellOutOfRange { cell: usize, cells: usize },
}

pub type Result<T> = std::result::Result<T, BitspaceError>;

/// Allowed / disallowed marker of a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Red, Color::Green];

    pub fn is_green(self) -> bool {
        self == Color::Green
    }

    pub fn from_green(green: bool) -> Self {
        if green {
            Color::Green
        } else {
            Color::Red
        }
    }

    /// GREEN preserving combination.
    pub fn ws(self, other: Color) -> Color {
        Color::from_green(self.is_green() || other.is_green())
    }

    /// RED preserving combination.
    pub fn bs(self, other: Color) -> Color {
        Color::from_green(self.is_green() && other.is_green())
    }

    pub fn apply(op: Op, a: Color, b: Color) -> Color {
        match op {
            Op::Ws => a.ws(b),
            Op::Bs => a.bs(b),
        }
    }
}

pub fn ws(a: Color, b: Color) -> Color {
    a.ws(b)
}

pub fn bs(a: Color, b: Color) -> Color {
    a.bs(b)
}

/// Selects one of the two cellwise operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Ws,
    Bs,
}

impl Op {
    /// Identity color: RED for WS, GREEN for BS.
    pub fn identity(self) -> Color {
        match self {
            Op::Ws => Color::Red,
            Op::Bs => Color::Green,
        }
    }

    fn word(self, a: u64, b: u64) -> u64 {
        match self {
            Op::Ws => a | b,
            Op::Bs => a & b,
        }
    }
}

type Coords = SmallVec<[u32; 4]>;
type Words = SmallVec<[u64; 1]>;

/// A colored space over ascending coordinates. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    coords: Coords,
    words: Words,
}

fn word_count(k: usize) -> usize {
    (1usize << k).div_ceil(64)
}

fn tail_mask(k: usize) -> u64 {
    let cells = 1usize << k;
    if cells >= 64 {
        u64::MAX
    } else {
        (1u64 << cells) - 1
    }
}

fn check_coords(coords: &[u32]) -> Result<()> {
    if coords.is_empty() {
        return Err(BitspaceError::NoCoords);
    }
    if coords.len() > MAX_COORDS {
        return Err(BitspaceError::TooManyCoords(coords.len()));
    }
    if coords[0] == 0 {
        return Err(BitspaceError::ZeroCoord);
    }
    if coords.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BitspaceError::UnsortedCoords(coords.to_vec()));
    }
    Ok(())
}

/// Positions of `sub` inside `sup`; both ascending.
fn positions(sub: &[u32], sup: &[u32]) -> Result<SmallVec<[usize; 4]>> {
    sub.iter()
        .map(|c| {
            sup.binary_search(c).map_err(|_| BitspaceError::NotSubset {
                sub: sub.to_vec(),
                sup: sup.to_vec(),
            })
        })
        .collect()
}

/// Collects the bits of `cell` found at `positions` into a dense index.
#[inline]
fn gather(cell: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((cell >> p) & 1) << i))
}

fn sorted_union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().filter(|c| b.binary_search(c).is_ok()).copied().collect()
}

impl Partition {
    fn filled(coords: &[u32], green: bool) -> Result<Self> {
        check_coords(coords)?;
        let k = coords.len();
        let n = word_count(k);
        let mut words: Words = SmallVec::from_elem(if green { u64::MAX } else { 0 }, n);
        words[n - 1] &= tail_mask(k);
        Ok(Partition {
            coords: coords.iter().copied().collect(),
            words,
        })
    }

    pub fn all_green(coords: &[u32]) -> Result<Self> {
        Self::filled(coords, true)
    }

    pub fn all_red(coords: &[u32]) -> Result<Self> {
        Self::filled(coords, false)
    }

    /// Builds a partition with at most six coordinates from a single mask word.
    pub fn from_mask(coords: &[u32], mask: u64) -> Result<Self> {
        check_coords(coords)?;
        if coords.len() > 6 {
            return Err(BitspaceError::TooManyCoords(coords.len()));
        }
        let tail = tail_mask(coords.len());
        if mask & !tail != 0 {
            return Err(BitspaceError::CellOutOfRange {
                cell: 63 - mask.leading_zeros() as usize,
                cells: 1 << coords.len(),
            });
        }
        Ok(Partition {
            coords: coords.iter().copied().collect(),
            words: SmallVec::from_elem(mask, 1),
        })
    }

    pub fn from_green_cells(coords: &[u32], cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut p = Self::all_red(coords)?;
        let n = p.num_cells();
        for cell in cells {
            if cell >= n {
                return Err(BitspaceError::CellOutOfRange { cell, cells: n });
            }
            p.set(cell, true);
        }
        Ok(p)
    }

    /// Colors every cell by evaluating `f` on its index.
    pub fn from_fn(coords: &[u32], mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut p = Self::all_red(coords)?;
        for cell in 0..p.num_cells() {
            if f(cell) {
                p.set(cell, true);
            }
        }
        Ok(p)
    }

    fn set(&mut self, cell: usize, green: bool) {
        let bit = 1u64 << (cell % 64);
        if green {
            self.words[cell / 64] |= bit;
        } else {
            self.words[cell / 64] &= !bit;
        }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn num_cells(&self) -> usize {
        1 << self.coords.len()
    }

    pub fn is_green(&self, cell: usize) -> bool {
        (self.words[cell / 64] >> (cell % 64)) & 1 == 1
    }

    pub fn color(&self, cell: usize) -> Color {
        Color::from_green(self.is_green(cell))
    }

    pub fn green_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn green_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_cells()).filter(move |&c| self.is_green(c))
    }

    /// True when no cell is GREEN.
    pub fn is_all_red(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_all_green(&self) -> bool {
        let n = self.words.len();
        self.words[..n - 1].iter().all(|&w| w == u64::MAX) && self.words[n - 1] == tail_mask(self.dim())
    }

    /// The whole mask as one word, for partitions of at most six coordinates.
    pub fn mask(&self) -> Option<u64> {
        (self.dim() <= 6).then(|| self.words[0])
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// GREEN set inclusion over identical coordinates.
    pub fn is_subset_of(&self, other: &Partition) -> bool {
        self.coords == other.coords && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Uppercase hex of the mask, most significant cell first, one digit per
    /// four cells (at least one digit).
    pub fn to_hex(&self) -> String {
        let digits = (self.num_cells() / 4).max(1);
        let mut s = String::with_capacity(digits + 2);
        s.push_str("0x");
        for d in (0..digits).rev() {
            let word = self.words[(d * 4) / 64];
            let nibble = (word >> ((d * 4) % 64)) & 0xF;
            s.push(char::from_digit(nibble as u32, 16).unwrap().to_ascii_uppercase());
        }
        s
    }
}

impl fmt::Display for Partition {
    /// `u1,u2,u3:RGGGGGGG` with cells in index order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "u{c}")?;
        }
        f.write_str(":")?;
        for cell in 0..self.num_cells() {
            f.write_str(if self.is_green(cell) { "G" } else { "R" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn cellwise(op: Op, p: &Partition, q: &Partition) -> Result<Partition> {
    if p.coords != q.coords {
        return Err(BitspaceError::CoordMismatch {
            left: p.coords.to_vec(),
            right: q.coords.to_vec(),
        });
    }
    Ok(Partition {
        coords: p.coords.clone(),
        words: p.words.iter().zip(&q.words).map(|(&a, &b)| op.word(a, b)).collect(),
    })
}

/// Extends two spaces over disjoint coordinates into their product space.
pub fn cross(op: Op, p: &Partition, q: &Partition) -> Result<Partition> {
    let shared = intersection(&p.coords, &q.coords);
    if !shared.is_empty() {
        return Err(BitspaceError::Overlap(shared));
    }
    let coords = sorted_union(&p.coords, &q.coords);
    check_coords(&coords)?;
    let pp = positions(&p.coords, &coords)?;
    let qp = positions(&q.coords, &coords)?;
    Partition::from_fn(&coords, |cell| {
        Color::apply(op, p.color(gather(cell, &pp)), q.color(gather(cell, &qp))).is_green()
    })
}

/// WS fold of `p` onto `target`: a target cell is GREEN iff some cell of its
/// fiber in `p` is GREEN.
pub fn project(p: &Partition, target: &[u32]) -> Result<Partition> {
    check_coords(target)?;
    let pos = positions(target, &p.coords)?;
    let mut out = Partition::all_red(target)?;
    for cell in p.green_cells() {
        out.set(gather(cell, &pos), true);
    }
    Ok(out)
}

/// Cylindrical extension of `p` over the coordinates of `target` it lacks.
pub fn lift(p: &Partition, target: &[u32]) -> Result<Partition> {
    check_coords(target)?;
    let pos = positions(&p.coords, target)?;
    Partition::from_fn(target, |cell| p.is_green(gather(cell, &pos)))
}

/// BS of `p` with `q` lifted onto `p`'s coordinates.
pub fn impose(p: &Partition, q: &Partition) -> Result<Partition> {
    cellwise(Op::Bs, p, &lift(q, &p.coords)?)
}

fn shared_coords(p: &Partition, q: &Partition) -> Result<Vec<u32>> {
    let shared = intersection(&p.coords, &q.coords);
    if shared.is_empty() {
        return Err(BitspaceError::Disjoint {
            left: p.coords.to_vec(),
            right: q.coords.to_vec(),
        });
    }
    Ok(shared)
}

/// Symmetric combination of two overlapping spaces: both are projected onto
/// their shared coordinates with WS, the projections are met with BS, and the
/// meet is imposed back on each operand.
pub fn bc(p: &Partition, q: &Partition) -> Result<(Partition, Partition)> {
    let shared = shared_coords(p, q)?;
    let meet = cellwise(Op::Bs, &project(p, &shared)?, &project(q, &shared)?)?;
    Ok((impose(p, &meet)?, impose(q, &meet)?))
}

/// One-directional combination: `q`'s projection onto the shared coordinates
/// imposed on `p`. `q` is left as is.
pub fn bc_uni(p: &Partition, q: &Partition) -> Result<Partition> {
    let shared = shared_coords(p, q)?;
    impose(p, &project(q, &shared)?)
}

/// Folds `parts` into one partition over the union of their coordinates,
/// starting from the identity color of `op`.
pub fn assemble(parts: &[Partition], op: Op) -> Result<Partition> {
    let coords = parts.iter().fold(Vec::new(), |acc, p| sorted_union(&acc, &p.coords));
    let mut acc = Partition::filled(&coords, op.identity().is_green())?;
    for part in parts {
        acc = cellwise(op, &acc, &lift(part, &coords)?)?;
    }
    Ok(acc)
}
