//! Full-dimensional polytopes in V-representation with exact facets and edges.

use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{
    det, det_integer, dot, is_zero_vec, neg, primitive_keep_sign, rank, sign, sub, DisplayVec, Rat, RatMat,
    RatVec,
};
use crate::poly::MAX_VARS;
use crate::triangulate::{moment_triangulation, TriangulationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("polytope has no vertices")]
    Empty,
    #[error("vertex {index} has length {found}, expected {expected}")]
    Dimension { index: usize, found: usize, expected: usize },
    #[error("dimension {0} unsupported (1 ≤ d ≤ {max})", max = MAX_VARS)]
    UnsupportedDimension(usize),
    #[error("vertices {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("vertices span an affine subspace of dimension {found} < {expected}; polytope must be full-dimensional")]
    NotFullDimensional { found: usize, expected: usize },
    #[error("point {index} {point} is not a vertex of the convex hull")]
    Redundant { index: usize, point: String },
    #[error("apex {0} is not strictly outside the polytope")]
    ApexInside(String),
    #[error("facet triangulation failed: {0}")]
    Triangulation(#[from] TriangulationError),
}

/// Facet inequality ⟨normal, x⟩ ≤ offset with a primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HFacet {
    pub normal: RatVec,
    pub offset: Rat,
}

impl HFacet {
    /// `offset − ⟨normal, x⟩`: positive strictly inside, zero on the facet hyperplane.
    pub fn slack(&self, x: &[Rat]) -> Rat {
        &self.offset - dot(&self.normal, x)
    }
}

/// A 1-face given by vertex indices `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginPosition {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginReport {
    pub position: OriginPosition,
    pub origin_is_vertex: bool,
    /// Facets whose affine span passes through the origin.
    pub facet_spans: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<RatVec>,
    facets: Vec<HFacet>,
    facet_vertices: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

/// Supporting hyperplanes spanned by `d` affinely independent points, each with its
/// incident point set. Points need not be in convex position.
fn supporting_facets(points: &[RatVec], d: usize) -> Vec<(HFacet, Vec<usize>)> {
    let n = points.len();
    // one common scale turns every point into an integer vector
    let mut l = BigInt::one();
    for x in points.iter().flatten() {
        l = l.lcm(x.denom());
    }
    let ints: Vec<Vec<BigInt>> =
        points.iter().map(|p| p.iter().map(|x| x.numer() * (&l / x.denom())).collect()).collect();
    let mut found: Vec<(HFacet, Vec<usize>)> = Vec::new();
    let mut found_sets: Vec<HashSet<usize>> = Vec::new();
    for subset in (0..n).combinations(d) {
        if found_sets.iter().any(|s| subset.iter().all(|i| s.contains(i))) {
            continue;
        }
        let base = &ints[subset[0]];
        let diffs: Vec<Vec<BigInt>> =
            subset[1..].iter().map(|&i| ints[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        let normal: Vec<BigInt> = (0..d)
            .map(|m| {
                let minor = diffs.iter().map(|r| [&r[..m], &r[m + 1..]].concat()).collect();
                let v = det_integer(minor);
                if m % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        if normal.iter().all(Zero::is_zero) {
            continue;
        }
        let offset: BigInt = normal.iter().zip(base).map(|(a, b)| a * b).sum();
        let mut pos = false;
        let mut negative = false;
        let mut incident = Vec::new();
        for (i, p) in ints.iter().enumerate() {
            let v: BigInt = normal.iter().zip(p).map(|(a, b)| a * b).sum::<BigInt>() - &offset;
            if v.is_positive() {
                pos = true;
            } else if v.is_negative() {
                negative = true;
            } else {
                incident.push(i);
            }
            if pos && negative {
                break;
            }
        }
        if pos && negative {
            continue;
        }
        let normal = primitive_keep_sign(&normal.into_iter().map(Rat::from_integer).collect::<Vec<_>>());
        let offset = dot(&normal, &points[subset[0]]);
        let facet = if pos {
            HFacet { normal: neg(&normal), offset: -offset }
        } else {
            HFacet { normal, offset }
        };
        found_sets.push(incident.iter().copied().collect());
        found.push((facet, incident));
    }
    found
}

fn affine_dimension(points: &[RatVec]) -> usize {
    let base = &points[0];
    let diffs: Vec<RatVec> = points[1..].iter().map(|p| sub(p, base)).collect();
    if diffs.is_empty() {
        return 0;
    }
    rank(&RatMat::from_rows(&diffs).expect("uniform"))
}

fn is_vertex(index: usize, facets: &[(HFacet, Vec<usize>)], d: usize) -> bool {
    let normals: Vec<RatVec> = facets
        .iter()
        .filter(|(_, inc)| inc.contains(&index))
        .map(|(f, _)| f.normal.clone())
        .collect();
    !normals.is_empty() && rank(&RatMat::from_rows(&normals).expect("uniform")) == d
}

fn check_points(points: &[RatVec]) -> Result<usize, PolytopeError> {
    let Some(first) = points.first() else {
        return Err(PolytopeError::Empty);
    };
    let d = first.len();
    if d == 0 || d > MAX_VARS {
        return Err(PolytopeError::UnsupportedDimension(d));
    }
    for (index, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(PolytopeError::Dimension { index, found: p.len(), expected: d });
        }
    }
    let found = affine_dimension(points);
    if found < d {
        return Err(PolytopeError::NotFullDimensional { found, expected: d });
    }
    Ok(d)
}

/// Vertices of the convex hull of a full-dimensional point set, in input order
/// with duplicates dropped.
pub fn convex_hull_vertices(points: &[RatVec]) -> Result<Vec<RatVec>, PolytopeError> {
    let mut seen = HashSet::new();
    let pts: Vec<RatVec> = points.iter().filter(|p| seen.insert((*p).clone())).cloned().collect();
    let d = check_points(&pts)?;
    let facets = supporting_facets(&pts, d);
    Ok((0..pts.len()).filter(|&i| is_vertex(i, &facets, d)).map(|i| pts[i].clone()).collect())
}

impl VPolytope {
    /// Validates the vertex list and computes facets and edges.
    pub fn new(vertices: Vec<RatVec>) -> Result<VPolytope, PolytopeError> {
        let d = check_points(&vertices)?;
        let mut seen = std::collections::HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if let Some(j) = seen.insert(v.clone(), i) {
                return Err(PolytopeError::Duplicate(j, i));
            }
        }
        let found = supporting_facets(&vertices, d);
        for index in 0..vertices.len() {
            if !is_vertex(index, &found, d) {
                return Err(PolytopeError::Redundant {
                    index,
                    point: DisplayVec(&vertices[index]).to_string(),
                });
            }
        }
        let (facets, facet_vertices): (Vec<_>, Vec<_>) = found.into_iter().unzip();
        let edges = compute_edges(vertices.len(), d, &facet_vertices);
        Ok(VPolytope { dim: d, vertices, facets, facet_vertices, edges })
    }

    pub fn from_i64(vertices: &[&[i64]]) -> Result<VPolytope, PolytopeError> {
        VPolytope::new(vertices.iter().map(|v| crate::linalg::rat_vec(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RatVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HFacet] {
        &self.facets
    }

    /// Indices of the vertices on facet `f`, increasing.
    pub fn facet_vertices(&self, f: usize) -> &[usize] {
        &self.facet_vertices[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Facets containing both endpoints of `e`.
    pub fn edge_facets(&self, e: &Edge) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&f| {
                let fv = &self.facet_vertices[f];
                fv.binary_search(&e.i).is_ok() && fv.binary_search(&e.j).is_ok()
            })
            .collect()
    }

    /// `(f₀, f₁)`.
    pub fn f01(&self) -> (usize, usize) {
        (self.vertices.len(), self.edges.len())
    }

    pub fn classify_origin(&self) -> OriginReport {
        let facet_spans: Vec<usize> =
            (0..self.facets.len()).filter(|&f| self.facets[f].offset.is_zero()).collect();
        let position = if self.facets.iter().any(|f| f.offset.is_negative()) {
            OriginPosition::Exterior
        } else if facet_spans.is_empty() {
            OriginPosition::Interior
        } else {
            OriginPosition::Boundary
        };
        OriginReport {
            position,
            origin_is_vertex: self.vertices.iter().any(|v| is_zero_vec(v)),
            facet_spans,
        }
    }

    /// True when the vertex set is invariant under x ↦ −x.
    pub fn is_centrally_symmetric(&self) -> bool {
        let set: HashSet<&RatVec> = self.vertices.iter().collect();
        self.vertices.iter().all(|v| set.contains(&neg(v)))
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    pub fn barycenter(&self) -> RatVec {
        let n = Rat::from_integer(BigInt::from(self.vertices.len()));
        (0..self.dim)
            .map(|k| self.vertices.iter().map(|v| v[k].clone()).sum::<Rat>() / &n)
            .collect()
    }

    /// Triangulation of facet `f` into (d−1)-simplices, as vertex-index lists.
    fn facet_cells(&self, f: usize) -> Result<Vec<Vec<usize>>, PolytopeError> {
        let fv = &self.facet_vertices[f];
        let pts: Vec<RatVec> = fv.iter().map(|&i| self.vertices[i].clone()).collect();
        // heights increase towards the front of the list
        let cells = moment_triangulation(&pts, 3, true)?;
        Ok(cells.into_iter().map(|c| c.into_iter().map(|k| fv[k]).collect()).collect())
    }

    /// Volume of conv(F ∪ {apex}) for facet `f`.
    fn pyramid_volume(&self, f: usize, apex: &[Rat]) -> Result<Rat, PolytopeError> {
        let mut total = Rat::zero();
        for cell in self.facet_cells(f)? {
            let rows: Vec<RatVec> = cell.iter().map(|&i| sub(&self.vertices[i], apex)).collect();
            total += det(&RatMat::from_rows(&rows).expect("square")).expect("square").abs();
        }
        Ok(total / factorial(self.dim))
    }

    /// Exact d-volume: pyramids from the vertex barycenter over triangulated facets.
    pub fn volume(&self) -> Result<Rat, PolytopeError> {
        let c = self.barycenter();
        let mut total = Rat::zero();
        for f in 0..self.facets.len() {
            total += self.pyramid_volume(f, &c)?;
        }
        Ok(total)
    }

    /// Σ_F sgn(F)·vol(conv(F ∪ {apex})) for an apex strictly outside the polytope,
    /// where sgn(F) is +1 when apex and polytope lie on the same side of F.
    pub fn signed_pyramid_volume(&self, apex: &[Rat]) -> Result<Rat, PolytopeError> {
        if self.contains(apex) {
            return Err(PolytopeError::ApexInside(DisplayVec(apex).to_string()));
        }
        let mut total = Rat::zero();
        for (f, facet) in self.facets.iter().enumerate() {
            match sign(&facet.slack(apex)) {
                1 => total += self.pyramid_volume(f, apex)?,
                -1 => total -= self.pyramid_volume(f, apex)?,
                _ => {}
            }
        }
        Ok(total)
    }
}

fn compute_edges(n: usize, d: usize, facet_vertices: &[Vec<usize>]) -> Vec<Edge> {
    if d == 1 {
        return vec![Edge { i: 0, j: 1 }];
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let shared: Vec<&Vec<usize>> = facet_vertices
                .iter()
                .filter(|fv| fv.binary_search(&i).is_ok() && fv.binary_search(&j).is_ok())
                .collect();
            if shared.is_empty() {
                continue;
            }
            let common = (0..n).filter(|k| shared.iter().all(|fv| fv.binary_search(k).is_ok())).count();
            if common == 2 {
                edges.push(Edge { i, j });
            }
        }
    }
    edges
}

pub(crate) fn factorial(n: usize) -> Rat {
    Rat::from_integer((1..=n as u64).map(BigInt::from).product())
}
