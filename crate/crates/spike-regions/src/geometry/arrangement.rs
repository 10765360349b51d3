//! Exact 2D line arrangements: incremental region counting and cell-complex
//! construction with rational coordinates.

use super::{GeometryError, ParallelFamily};
use crate::domain::BoxDomain;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, Signed, Zero};
use std::collections::{BTreeSet, HashMap, HashSet};

/// Canonical integer line `a x + b y = c`: gcd(a, b, c) = 1 and the first
/// nonzero of (a, b) is positive, so coincident inputs unify and parallels
/// share (a, b).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Line {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl Line {
    fn new(a: &BigRational, b: &BigRational, c: &BigRational) -> Line {
        let scale = BigRational::from_integer(a.denom().lcm(b.denom()).lcm(c.denom()));
        let mut ia = (a * &scale).to_integer();
        let mut ib = (b * &scale).to_integer();
        let mut ic = (c * &scale).to_integer();
        let g = ia.gcd(&ib).gcd(&ic);
        if !g.is_zero() {
            ia /= &g;
            ib /= &g;
            ic /= &g;
        }
        let flip = if ia.is_zero() {
            ib.is_negative()
        } else {
            ia.is_negative()
        };
        if flip {
            ia = -ia;
            ib = -ib;
            ic = -ic;
        }
        Line {
            a: ia,
            b: ib,
            c: ic,
        }
    }

    fn is_parallel(&self, other: &Line) -> bool {
        (&self.a * &other.b - &other.a * &self.b).is_zero()
    }

    fn intersect(&self, other: &Line) -> Option<(BigRational, BigRational)> {
        let det = &self.a * &other.b - &other.a * &self.b;
        if det.is_zero() {
            return None;
        }
        let x = BigRational::new(&self.c * &other.b - &other.c * &self.b, det.clone());
        let y = BigRational::new(&self.a * &other.c - &other.a * &self.c, det);
        Some((x, y))
    }

    /// Sign of `a x + b y - c` at a point.
    fn side(&self, x: &BigRational, y: &BigRational) -> i8 {
        let v = x * &self.a + y * &self.b - BigRational::from_integer(self.c.clone());
        if v.is_zero() {
            0
        } else if v.is_negative() {
            -1
        } else {
            1
        }
    }

    /// y-coordinate where the line crosses the vertical `x = x0`.
    fn y_at(&self, x0: &BigRational) -> Option<BigRational> {
        if self.b.is_zero() {
            return None;
        }
        let num = BigRational::from_integer(self.c.clone()) - x0 * &self.a;
        Some(num / BigRational::from_integer(self.b.clone()))
    }

    /// x-coordinate where the line crosses the horizontal `y = y0`.
    fn x_at(&self, y0: &BigRational) -> Option<BigRational> {
        if self.a.is_zero() {
            return None;
        }
        let num = BigRational::from_integer(self.c.clone()) - y0 * &self.b;
        Some(num / BigRational::from_integer(self.a.clone()))
    }
}

/// Canonical deduplicated lines of a family list, tagged with their family
/// index. Requires exact mode and 2D nonzero directions.
pub(crate) fn lines_of_families(
    families: &[ParallelFamily],
) -> Result<Vec<(Line, usize)>, GeometryError> {
    let mut seen: HashSet<Line> = HashSet::new();
    let mut out = Vec::new();
    for (idx, fam) in families.iter().enumerate() {
        if fam.offsets.is_empty() {
            continue;
        }
        if fam.direction.len() != 2 {
            return Err(GeometryError::NotTwoDimensional(fam.direction.len()));
        }
        if fam.direction.iter().all(crate::scalar::Scalar::is_zero) {
            return Err(GeometryError::InvalidParameter(
                "family with zero direction".into(),
            ));
        }
        let a = fam.direction[0]
            .as_rational()
            .ok_or(GeometryError::ExactModeRequired)?;
        let b = fam.direction[1]
            .as_rational()
            .ok_or(GeometryError::ExactModeRequired)?;
        for off in &fam.offsets {
            let c = off.as_rational().ok_or(GeometryError::ExactModeRequired)?;
            let line = Line::new(a, b, c);
            if seen.insert(line.clone()) {
                out.push((line, idx));
            }
        }
    }
    Ok(out)
}

/// Number of regions the families cut out of the plane, by incremental
/// insertion: a new line adds one region plus one per distinct intersection
/// point it has with previously inserted lines.
pub fn count_exact_2d(families: &[ParallelFamily]) -> Result<u64, GeometryError> {
    let lines = lines_of_families(families)?;
    let mut count: u64 = 1;
    for (i, (line, _)) in lines.iter().enumerate() {
        let mut points: HashSet<(BigRational, BigRational)> = HashSet::new();
        for (prev, _) in &lines[..i] {
            if let Some(p) = line.intersect(prev) {
                points.insert(p);
            }
        }
        count += 1 + points.len() as u64;
    }
    Ok(count)
}

/// A cell of the clipped arrangement: an interior representative point and
/// the side of every line.
#[derive(Debug, Clone)]
pub struct CellGeometry {
    pub representative: (BigRational, BigRational),
    pub signs: Vec<i8>,
}

/// Cells of a 2D arrangement clipped to a box, with the symmetric adjacency
/// relation "shares a one-dimensional boundary segment".
#[derive(Debug, Clone)]
pub struct CellComplex2D {
    pub cells: Vec<CellGeometry>,
    pub adjacency: Vec<(usize, usize)>,
}

/// Builds the clipped cell complex by slab subdivision: every cell of the
/// clipped arrangement contains the midpoint of some (slab, segment) pair,
/// and cells are identified by their sign vector (regions of a line
/// arrangement are convex, hence connected).
pub fn cell_complex_2d(
    families: &[ParallelFamily],
    clip: &BoxDomain,
) -> Result<CellComplex2D, GeometryError> {
    if clip.dim() != 2 {
        return Err(GeometryError::NotTwoDimensional(clip.dim()));
    }
    let lines: Vec<Line> = lines_of_families(families)?
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    let x_lo = clip.lo()[0]
        .as_rational()
        .ok_or(GeometryError::ExactModeRequired)?
        .clone();
    let x_hi = clip.hi()[0]
        .as_rational()
        .ok_or(GeometryError::ExactModeRequired)?
        .clone();
    let y_lo = clip.lo()[1]
        .as_rational()
        .ok_or(GeometryError::ExactModeRequired)?
        .clone();
    let y_hi = clip.hi()[1]
        .as_rational()
        .ok_or(GeometryError::ExactModeRequired)?
        .clone();

    let in_x = |x: &BigRational| x >= &x_lo && x <= &x_hi;
    let mut xs: BTreeSet<BigRational> = BTreeSet::new();
    xs.insert(x_lo.clone());
    xs.insert(x_hi.clone());
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[..i] {
            if let Some((x, _)) = a.intersect(b) {
                if in_x(&x) {
                    xs.insert(x);
                }
            }
        }
        // vertical lines and box-edge crossings bound cells too
        for edge in [&y_lo, &y_hi] {
            if let Some(x) = a.x_at(edge) {
                if in_x(&x) {
                    xs.insert(x);
                }
            }
        }
    }
    let xs: Vec<BigRational> = xs.into_iter().collect();

    let two = BigRational::from_integer(BigInt::from(2));
    let mut cells: Vec<CellGeometry> = Vec::new();
    let mut index_of: HashMap<Vec<i8>, usize> = HashMap::new();
    for w in xs.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let mid_x = (&w[0] + &w[1]) / &two;
        let mut ys: BTreeSet<BigRational> = BTreeSet::new();
        ys.insert(y_lo.clone());
        ys.insert(y_hi.clone());
        for line in &lines {
            if let Some(y) = line.y_at(&mid_x) {
                if y > y_lo && y < y_hi {
                    ys.insert(y);
                }
            }
        }
        let ys: Vec<BigRational> = ys.into_iter().collect();
        for wy in ys.windows(2) {
            let mid_y = (&wy[0] + &wy[1]) / &two;
            let signs: Vec<i8> = lines
                .iter()
                .map(|l| {
                    let s = l.side(&mid_x, &mid_y);
                    debug_assert!(s != 0, "sample point on a line");
                    s
                })
                .collect();
            if !index_of.contains_key(&signs) {
                index_of.insert(signs.clone(), cells.len());
                cells.push(CellGeometry {
                    representative: (mid_x.clone(), mid_y),
                    signs,
                });
            }
        }
    }

    // deterministic ordering by sign vector
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].signs.cmp(&cells[b].signs));
    let cells: Vec<CellGeometry> = order.into_iter().map(|i| cells[i].clone()).collect();

    // cells sharing all signs but one are split by exactly that line and
    // share a 1D piece of it inside the box
    let mut adjacency = Vec::new();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let diff = cells[i]
                .signs
                .iter()
                .zip(&cells[j].signs)
                .filter(|(a, b)| a != b)
                .count();
            if diff == 1 {
                adjacency.push((i, j));
            }
        }
    }
    Ok(CellComplex2D { cells, adjacency })
}

/// Region count together with the clipped complex. The counts agree whenever
/// the box contains every intersection point of the arrangement.
pub fn count_and_complex_2d(
    families: &[ParallelFamily],
    clip: &BoxDomain,
) -> Result<(u64, CellComplex2D), GeometryError> {
    Ok((count_exact_2d(families)?, cell_complex_2d(families, clip)?))
}

/// Checks the general-position certificate: no two lines from different
/// families are parallel and no point lies on three or more lines.
pub fn verify_general_position(families: &[ParallelFamily]) -> Result<bool, GeometryError> {
    let lines = lines_of_families(families)?;
    for (i, (la, fa)) in lines.iter().enumerate() {
        for (lb, fb) in &lines[..i] {
            if fa != fb && la.is_parallel(lb) {
                return Ok(false);
            }
        }
    }
    let mut through: HashMap<(BigRational, BigRational), HashSet<usize>> = HashMap::new();
    for (i, (la, _)) in lines.iter().enumerate() {
        for (j, (lb, _)) in lines[..i].iter().enumerate() {
            if let Some(p) = la.intersect(lb) {
                let entry = through.entry(p).or_default();
                entry.insert(i);
                entry.insert(j);
                if entry.len() >= 3 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
