//! The central arrangement {v⊥ : v a vertex of P} and its chambers.
//!
//! On each open chamber the combinatorial type of the sections P ∩ x⊥ is
//! constant. The fan of this arrangement is the normal fan of the zonotope
//! Z(P) = Σ_v [−v, v], whose generators are returned by [`zonotope_generators`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use itertools::Itertools;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{
    add, dot, is_zero_vec, kernel_basis, max_margin_point, neg, primitive, primitive_keep_sign,
    scale, sign, sub, LinalgError, Rat, RatMat, RatVec,
};
use crate::polytope::VPolytope;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("polytope has no nonzero vertex")]
    NoNormals,
    #[error("point has length {found}, expected {expected}")]
    Dimension { found: usize, expected: usize },
    #[error("cannot locate the origin")]
    ZeroPoint,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Vertex directions up to nonzero scalar, each primitive with first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalSet {
    dim: usize,
    normals: Vec<RatVec>,
}

impl NormalSet {
    pub fn new(dim: usize, directions: &[RatVec]) -> Result<NormalSet, ArrangementError> {
        let mut seen = HashSet::new();
        let mut normals = Vec::new();
        for v in directions {
            if v.len() != dim {
                return Err(ArrangementError::Dimension { found: v.len(), expected: dim });
            }
            if is_zero_vec(v) {
                continue;
            }
            let n = primitive(v);
            if seen.insert(n.clone()) {
                normals.push(n);
            }
        }
        if normals.is_empty() {
            return Err(ArrangementError::NoNormals);
        }
        Ok(NormalSet { dim, normals })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[RatVec] {
        &self.normals
    }

    pub fn m(&self) -> usize {
        self.normals.len()
    }

    /// Sign of ⟨n_i, x⟩ for every normal.
    pub fn sign_vector(&self, x: &[Rat]) -> Vec<i8> {
        self.normals.iter().map(|n| sign(&dot(n, x))).collect()
    }
}

pub fn build_normals(p: &VPolytope) -> Result<NormalSet, ArrangementError> {
    NormalSet::new(p.dim(), p.vertices())
}

/// Generators of Z(P); the arrangement fan is the normal fan of Z(P).
pub fn zonotope_generators(p: &VPolytope) -> Result<Vec<RatVec>, ArrangementError> {
    Ok(build_normals(p)?.normals)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub id: usize,
    pub signs: Vec<i8>,
    /// Primitive integer point with sign_i·⟨n_i, witness⟩ > 0 for all i.
    pub witness: RatVec,
    /// Extreme rays of the closed cone, primitive, in increasing order.
    pub rays: Vec<RatVec>,
}

impl Chamber {
    pub fn contains(&self, ns: &NormalSet, x: &[Rat]) -> bool {
        ns.sign_vector(x) == self.signs
    }
}

fn strict_witness(rows: &[(RatVec, i8)]) -> Result<Option<RatVec>, LinalgError> {
    let sol = max_margin_point(rows)?;
    Ok(sol.is_strict().then(|| primitive_keep_sign(&sol.point)))
}

/// Extends one partial chamber by hyperplane `k`, returning the nonempty children.
fn split(
    ns: &NormalSet,
    signs: &[i8],
    witness: &RatVec,
    k: usize,
) -> Result<Vec<(Vec<i8>, RatVec)>, LinalgError> {
    let here = sign(&dot(&ns.normals[k], witness));
    let mut out = Vec::with_capacity(2);
    for s in [-1i8, 1] {
        let mut child = signs.to_vec();
        child.push(s);
        if here == s {
            out.push((child, witness.clone()));
            continue;
        }
        let rows: Vec<(RatVec, i8)> =
            ns.normals[..=k].iter().cloned().zip(child.iter().copied()).collect();
        if let Some(w) = strict_witness(&rows)? {
            out.push((child, w));
        }
    }
    Ok(out)
}

/// Candidate extreme rays: both generators of every 1-dimensional intersection
/// of d−1 hyperplanes, with their sign vectors.
struct RayCandidates {
    rays: Vec<(RatVec, Vec<i8>)>,
}

impl RayCandidates {
    fn new(ns: &NormalSet) -> RayCandidates {
        let d = ns.dim;
        let mut set = BTreeSet::new();
        if d == 1 {
            set.insert(vec![Rat::from_integer(1.into())]);
        } else {
            for subset in (0..ns.m()).combinations(d - 1) {
                let rows: Vec<RatVec> = subset.iter().map(|&i| ns.normals[i].clone()).collect();
                let k = kernel_basis(&RatMat::from_rows(&rows).expect("uniform"));
                if k.len() == 1 {
                    set.insert(k.into_iter().next().expect("one vector"));
                }
            }
        }
        let rays = set
            .into_iter()
            .flat_map(|r| [neg(&r), r])
            .map(|r| {
                let s = ns.sign_vector(&r);
                (r, s)
            })
            .collect();
        RayCandidates { rays }
    }

    fn for_signs(&self, signs: &[i8]) -> Vec<RatVec> {
        let mut out: Vec<RatVec> = self
            .rays
            .iter()
            .filter(|(_, rs)| rs.iter().zip(signs).all(|(&r, &s)| r == 0 || r == s))
            .map(|(r, _)| r.clone())
            .collect();
        out.sort();
        out
    }
}

/// Extreme rays of the closure of chamber `c`.
pub fn chamber_rays(ns: &NormalSet, c: &Chamber) -> Vec<RatVec> {
    RayCandidates::new(ns).for_signs(&c.signs)
}

/// All open chambers by incremental insertion, sorted by sign vector (−1 < +1),
/// with ids equal to their rank in that order.
pub fn enumerate_chambers(ns: &NormalSet) -> Result<Vec<Chamber>, ArrangementError> {
    let n0 = &ns.normals[0];
    let mut partial: Vec<(Vec<i8>, RatVec)> = vec![(vec![-1], neg(n0)), (vec![1], n0.clone())];
    for k in 1..ns.m() {
        let next: Result<Vec<Vec<(Vec<i8>, RatVec)>>, LinalgError> =
            partial.par_iter().map(|(s, w)| split(ns, s, w, k)).collect();
        partial = next?.into_iter().flatten().collect();
    }
    partial.sort_by(|a, b| a.0.cmp(&b.0));
    let cands = RayCandidates::new(ns);
    Ok(partial
        .into_iter()
        .enumerate()
        .map(|(id, (signs, witness))| {
            let rays = cands.for_signs(&signs);
            Chamber { id, signs, witness, rays }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Chamber(usize),
    /// Indices of the hyperplanes containing the point.
    OnWall(Vec<usize>),
}

pub fn locate(ns: &NormalSet, chambers: &[Chamber], x: &[Rat]) -> Result<Location, ArrangementError> {
    if x.len() != ns.dim {
        return Err(ArrangementError::Dimension { found: x.len(), expected: ns.dim });
    }
    if is_zero_vec(x) {
        return Err(ArrangementError::ZeroPoint);
    }
    let s = ns.sign_vector(x);
    let zeros: Vec<usize> = (0..s.len()).filter(|&i| s[i] == 0).collect();
    if !zeros.is_empty() {
        return Ok(Location::OnWall(zeros));
    }
    let idx = chambers
        .binary_search_by(|c| c.signs.cmp(&s))
        .expect("every sign vector of a nonzero point off the walls is a chamber");
    Ok(Location::Chamber(chambers[idx].id))
}

/// Chambers whose closure contains `x`.
pub fn incident_chambers(ns: &NormalSet, chambers: &[Chamber], x: &[Rat]) -> Vec<usize> {
    let s = ns.sign_vector(x);
    chambers
        .iter()
        .filter(|c| c.signs.iter().zip(&s).all(|(&a, &b)| b == 0 || a == b))
        .map(|c| c.id)
        .collect()
}

/// Two chambers sharing a (d−1)-dimensional wall on hyperplane `hyperplane`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub a: usize,
    pub b: usize,
    pub hyperplane: usize,
    /// A point in the relative interior of the wall.
    pub witness: RatVec,
}

/// Wall-adjacent chamber pairs, sorted by `(a, b)` with `a < b`.
///
/// Sign vectors at Hamming distance one always share a full wall: the segment
/// between the two witnesses keeps every other sign and crosses the differing
/// hyperplane at a point of the wall's relative interior.
pub fn adjacency_graph(ns: &NormalSet, chambers: &[Chamber]) -> Vec<Wall> {
    let index: HashMap<&[i8], usize> = chambers.iter().map(|c| (c.signs.as_slice(), c.id)).collect();
    let mut walls = Vec::new();
    for c in chambers {
        let mut flipped = c.signs.clone();
        for k in 0..flipped.len() {
            flipped[k] = -flipped[k];
            if let Some(&other) = index.get(flipped.as_slice()) {
                if c.id < other {
                    let w1 = &c.witness;
                    let w2 = &chambers[other].witness;
                    let n = &ns.normals[k];
                    let lambda = dot(n, w1) / dot(n, &sub(w1, w2));
                    let point = add(w1, &scale(&sub(w2, w1), &lambda));
                    walls.push(Wall { a: c.id, b: other, hyperplane: k, witness: primitive_keep_sign(&point) });
                }
            }
            flipped[k] = -flipped[k];
        }
    }
    walls.sort_by_key(|w| (w.a, w.b));
    walls
}

/// Independent wall check: strict feasibility of the other sign constraints
/// restricted to hyperplane `k`.
pub fn wall_is_full(ns: &NormalSet, signs: &[i8], k: usize) -> Result<bool, LinalgError> {
    let basis = kernel_basis(&RatMat::from_rows(&[ns.normals[k].clone()]).expect("row"));
    let mut rows = Vec::new();
    for (i, (n, &s)) in ns.normals.iter().zip(signs).enumerate() {
        if i == k {
            continue;
        }
        let restricted: RatVec = basis.iter().map(|b| dot(n, b)).collect();
        if is_zero_vec(&restricted) {
            return Ok(false);
        }
        rows.push((restricted, s));
    }
    if rows.is_empty() {
        return Ok(true);
    }
    Ok(max_margin_point(&rows)?.is_strict())
}

/// Random point of the open chamber: a positive multiple of the witness plus a
/// nonnegative integer combination of the rays.
pub fn random_interior_point<R: Rng>(c: &Chamber, rng: &mut R) -> RatVec {
    let mut x = scale(&c.witness, &Rat::from_integer(rng.gen_range(1..=4).into()));
    for r in &c.rays {
        let t = Rat::from_integer(rng.gen_range(0..=6).into());
        x = add(&x, &scale(r, &t));
    }
    x
}

/// Random point in the relative interior of a wall.
pub fn random_wall_point<R: Rng>(ns: &NormalSet, chambers: &[Chamber], wall: &Wall, rng: &mut R) -> RatVec {
    let n = &ns.normals[wall.hyperplane];
    let mut x = scale(&wall.witness, &Rat::from_integer(rng.gen_range(1..=4).into()));
    for r in chambers[wall.a].rays.iter().filter(|r| dot(n, r).is_zero()) {
        let t = Rat::from_integer(rng.gen_range(0..=6).into());
        x = add(&x, &scale(r, &t));
    }
    x
}

/// DOT description of the adjacency graph; `labels[id]` becomes the node label.
pub fn to_dot(chambers: &[Chamber], walls: &[Wall], labels: Option<&[String]>) -> String {
    let mut out = String::from("graph chambers {\n");
    for c in chambers {
        match labels {
            Some(l) => writeln!(out, "  c{} [label=\"{}\"];", c.id, l[c.id]).expect("string write"),
            None => writeln!(out, "  c{};", c.id).expect("string write"),
        }
    }
    for w in walls {
        writeln!(out, "  c{} -- c{};", w.a, w.b).expect("string write");
    }
    out.push_str("}\n");
    out
}

/// Σ_{j ≤ d} C(m, j), the chamber count of a generic arrangement.
pub fn generic_chamber_bound(m: usize, d: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for j in 0..=d.min(m) {
        total += binom;
        binom = binom * (m - j) as u128 / (j + 1) as u128;
    }
    total
}
