//! Regular triangulations by lifting and taking the lower hull.
//!
//! Points may live in any affine subspace of ℚ^d; they are first mapped to
//! intrinsic coordinates by a coordinate projection that is injective on their
//! affine hull. Every point must be a vertex of the convex hull.

use itertools::Itertools;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::linalg::{det_integer, rref, sub, Rat, RatMat, RatVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("no points to triangulate")]
    Empty,
    #[error("lifting is not generic: a lower face is not a simplex")]
    NonGeneric,
    #[error("heights and points differ in length")]
    Length,
}

/// Heights `base^1, base^2, …` along the moment curve.
pub fn moment_heights(n: usize, base: u32) -> Vec<Rat> {
    moment_heights_big(n, base as u64)
}

/// Affine dimension of the points and the coordinates of each point in a
/// coordinate projection that is injective on the affine hull.
pub fn intrinsic_coordinates(points: &[RatVec]) -> (usize, Vec<RatVec>) {
    let base = &points[0];
    let diffs: Vec<RatVec> = points[1..].iter().map(|p| sub(p, base)).collect();
    if diffs.is_empty() {
        return (0, vec![Vec::new()]);
    }
    let m = RatMat::from_rows(&diffs).expect("uniform dimension");
    let (_, pivots) = rref(&m);
    let coords = points.iter().map(|p| pivots.iter().map(|&c| p[c].clone()).collect()).collect();
    (pivots.len(), coords)
}

/// Maximal cells of the regular subdivision induced by `heights`, each a sorted
/// list of point indices. Fails when the subdivision is not a triangulation.
pub fn regular_triangulation(
    points: &[RatVec],
    heights: &[Rat],
) -> Result<Vec<Vec<usize>>, TriangulationError> {
    if points.is_empty() {
        return Err(TriangulationError::Empty);
    }
    if points.len() != heights.len() {
        return Err(TriangulationError::Length);
    }
    let (k, coords) = intrinsic_coordinates(points);
    if k == 0 {
        return Ok(vec![vec![0]]);
    }
    let n = points.len();
    let lifted = integer_lift(&coords, heights);
    let diff = |i: usize, o: usize| -> Vec<BigInt> { lifted[i].iter().zip(&lifted[o]).map(|(a, b)| a - b).collect() };
    let mut cells = Vec::new();
    for subset in (0..n).combinations(k + 1) {
        let o = subset[0];
        let rows: Vec<Vec<BigInt>> = subset[1..].iter().map(|&i| diff(i, o)).collect();
        // the height column's cofactor vanishes iff the subset is affinely dependent
        let normal: Vec<BigInt> = (0..=k)
            .map(|m| {
                let minor = rows.iter().map(|r| [&r[..m], &r[m + 1..]].concat()).collect();
                let v = det_integer(minor);
                if (k + m) % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let up = normal[k].sign();
        if up == Sign::NoSign {
            continue;
        }
        let mut lower = true;
        let mut tie = false;
        for i in (0..n).filter(|i| !subset.contains(i)) {
            let gap: BigInt = normal.iter().zip(diff(i, o)).map(|(a, b)| a * b).sum();
            match gap.sign() {
                Sign::NoSign => tie = true,
                s if s != up => {
                    lower = false;
                    break;
                }
                _ => {}
            }
        }
        if lower {
            if tie {
                return Err(TriangulationError::NonGeneric);
            }
            cells.push(subset);
        }
    }
    Ok(cells)
}

/// Rows `(coords, height)` scaled by one common positive integer.
fn integer_lift(coords: &[RatVec], heights: &[Rat]) -> Vec<Vec<BigInt>> {
    let mut l = BigInt::one();
    for x in coords.iter().flatten().chain(heights) {
        l = l.lcm(x.denom());
    }
    coords
        .iter()
        .zip(heights)
        .map(|(c, h)| c.iter().chain([h]).map(|x| x.numer() * (&l / x.denom())).collect())
        .collect()
}

/// Triangulation lifting point `i` to `base^(i+1)`, or to `base^(n−i)` when
/// `reverse` is set. When the lifting is not generic the base is squared, up to
/// three times; large bases approach a placing triangulation, which always is one.
pub fn moment_triangulation(
    points: &[RatVec],
    base: u32,
    reverse: bool,
) -> Result<Vec<Vec<usize>>, TriangulationError> {
    let mut b = base as u64;
    let mut last = TriangulationError::NonGeneric;
    for _ in 0..4 {
        let mut heights = moment_heights_big(points.len(), b);
        if reverse {
            heights.reverse();
        }
        match regular_triangulation(points, &heights) {
            Err(TriangulationError::NonGeneric) => last = TriangulationError::NonGeneric,
            other => return other,
        }
        b *= b;
    }
    Err(last)
}

fn moment_heights_big(n: usize, base: u64) -> Vec<Rat> {
    let b = Rat::from_integer(base.into());
    let mut h = Vec::with_capacity(n);
    let mut cur = Rat::one();
    for _ in 0..n {
        cur *= &b;
        h.push(cur.clone());
    }
    h
}
