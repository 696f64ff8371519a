//! The intersection body IP: per-chamber rational pieces of its radial function.
//!
//! For x in an open chamber the section P ∩ x⊥ has a fixed combinatorial type.
//! Its vertices are v_i(x) = (⟨b_i,x⟩a_i − ⟨a_i,x⟩b_i)/⟨b_i−a_i,x⟩ for the
//! crossed edges [a_i, b_i], and coning each triangulated facet section from the
//! origin gives ‖x‖·Vol(P ∩ x⊥) as a signed sum of determinants. Dividing by
//! ‖x‖² yields the radial function ρ(x) = p̃(x)/q(x).

mod eval;
mod mesh;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::{self, ArrangementError, Chamber, NormalSet, Wall};
use crate::linalg::{det, dot, proportional, sign, sub, Rat, RatMat, RatVec};
use crate::poly::{content_inverse, poly_det, LinForm, Poly, PolyError, RatFun};
use crate::polytope::{factorial, Edge, VPolytope};
use crate::triangulate::{moment_triangulation, TriangulationError};

pub use eval::{DegreeReport, Membership, RadialValue};
pub use mesh::{Mesh, MeshError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BodyError {
    #[error("intersection bodies need dimension at least 2, got {0}")]
    Dimension(usize),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("chamber {chamber}: raw numerator is not divisible by ‖x‖²")]
    NotDivisible { chamber: usize },
    #[error("chamber {chamber}: {reason}")]
    InvalidCombinatorics { chamber: usize, reason: String },
    #[error("chamber {chamber}: degree {degree} exceeds the bound {bound}")]
    DegreeBound { chamber: usize, degree: u32, bound: usize },
    #[error("point has length {found}, expected {expected}")]
    PointDimension { found: usize, expected: usize },
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// ρ(x) = Vol_{d−1}(P ∩ x⊥)/‖x‖.
    TrueVolume,
    /// The true radial function divided by d, matching the 1/d! simplex convention.
    Paper,
}

impl Mode {
    /// Factor relating the determinant sum to q: (d−1)! or d!.
    fn denominator_factor(self, d: usize) -> Rat {
        match self {
            Mode::TrueVolume => factorial(d - 1),
            Mode::Paper => factorial(d),
        }
    }
}

/// The section vertex of the edge [a, b] as a function of x.
pub fn symbolic_vertex(a: &[Rat], b: &[Rat]) -> Result<Vec<RatFun>, BodyError> {
    if a == b {
        return Err(BodyError::InvalidEdge("endpoints coincide".into()));
    }
    if a.iter().all(Zero::is_zero) || b.iter().all(Zero::is_zero) || proportional(a, b) {
        return Err(BodyError::InvalidEdge("edge span contains the origin".into()));
    }
    let bx = Poly::linear(b);
    let ax = Poly::linear(a);
    let den = Poly::linear(&sub(b, a));
    (0..a.len())
        .map(|k| Ok(RatFun::new(&bx.scale(&a[k]) - &ax.scale(&b[k]), den.clone())?))
        .collect()
}

/// Numerator row ⟨b,x⟩a − ⟨a,x⟩b of the section vertex of [a, b].
fn vertex_row(a: &[Rat], b: &[Rat]) -> Vec<Poly> {
    let bx = Poly::linear(b);
    let ax = Poly::linear(a);
    (0..a.len()).map(|k| &bx.scale(&a[k]) - &ax.scale(&b[k])).collect()
}

/// The concrete section vertex of [a, b] at x.
fn vertex_at(a: &[Rat], b: &[Rat], x: &[Rat]) -> RatVec {
    let ax = dot(a, x);
    let bx = dot(b, x);
    let den = &bx - &ax;
    a.iter().zip(b).map(|(ai, bi)| (&bx * ai - &ax * bi) / &den).collect()
}

fn edge_points<'a>(p: &'a VPolytope, e: &Edge) -> (&'a RatVec, &'a RatVec) {
    (&p.vertices()[e.i], &p.vertices()[e.j])
}

/// Combinatorial type of P ∩ x⊥ on one chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionCombinatorics {
    pub chamber: usize,
    /// Indices into `P.edges()` of edges with endpoints strictly on opposite sides.
    pub crossed_edges: Vec<usize>,
    /// Facet index → crossed edges on that facet, for facets not through the origin.
    pub section_facets: BTreeMap<usize, Vec<usize>>,
    /// (d−1)-subsets of crossed edges triangulating the facet sections.
    pub cells: Vec<Vec<usize>>,
    /// sign(offset) of each cell's host facet.
    pub cell_signs: Vec<i8>,
    /// Orientation sign of det[v₁(x); …; v_{d−1}(x); x] on the chamber.
    pub cell_orientations: Vec<i8>,
    /// Number of vertices of the section polytope.
    pub f0: usize,
}

pub fn section_combinatorics(p: &VPolytope, c: &Chamber) -> Result<SectionCombinatorics, BodyError> {
    let d = p.dim();
    let w = &c.witness;
    let mut crossed = Vec::new();
    for (k, e) in p.edges().iter().enumerate() {
        let (a, b) = edge_points(p, e);
        let (sa, sb) = (sign(&dot(a, w)), sign(&dot(b, w)));
        if sa * sb < 0 {
            crossed.push(k);
        } else if (sa == 0 && a.iter().any(|x| !x.is_zero())) || (sb == 0 && b.iter().any(|x| !x.is_zero())) {
            return Err(BodyError::InvalidCombinatorics {
                chamber: c.id,
                reason: "a nonzero vertex lies on the witness hyperplane".into(),
            });
        }
    }
    let origin_vertex = p.vertices().iter().any(|v| v.iter().all(Zero::is_zero));
    let f0 = crossed.len() + usize::from(origin_vertex);

    let mut section_facets = BTreeMap::new();
    let mut cells = Vec::new();
    let mut cell_signs = Vec::new();
    let mut cell_orientations = Vec::new();
    for (f, facet) in p.facets().iter().enumerate() {
        let s = sign(&facet.offset);
        if s == 0 {
            continue;
        }
        let fv = p.facet_vertices(f);
        let on: Vec<usize> = crossed
            .iter()
            .copied()
            .filter(|&k| {
                let e = &p.edges()[k];
                fv.binary_search(&e.i).is_ok() && fv.binary_search(&e.j).is_ok()
            })
            .collect();
        if on.is_empty() {
            continue;
        }
        let points: Vec<RatVec> = on
            .iter()
            .map(|&k| {
                let (a, b) = edge_points(p, &p.edges()[k]);
                vertex_at(a, b, w)
            })
            .collect();
        for cell in moment_triangulation(&points, 3, false)? {
            if cell.len() != d - 1 {
                return Err(BodyError::InvalidCombinatorics {
                    chamber: c.id,
                    reason: format!("facet {f} section has dimension {} instead of {}", cell.len() - 1, d - 2),
                });
            }
            let mut rows: Vec<RatVec> = cell.iter().map(|&i| points[i].clone()).collect();
            rows.push(w.clone());
            let o = sign(&det(&RatMat::from_rows(&rows).expect("square")).expect("square"));
            if o == 0 {
                return Err(BodyError::InvalidCombinatorics {
                    chamber: c.id,
                    reason: "degenerate section cell".into(),
                });
            }
            cells.push(cell.iter().map(|&i| on[i]).collect());
            cell_signs.push(s);
            cell_orientations.push(o);
        }
        section_facets.insert(f, on);
    }
    Ok(SectionCombinatorics {
        chamber: c.id,
        crossed_edges: crossed,
        section_facets,
        cells,
        cell_signs,
        cell_orientations,
        f0,
    })
}

/// The rational piece ρ = p̃/q of the radial function on one chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberPiece {
    pub chamber: usize,
    pub p_tilde: Poly,
    pub q: Poly,
    /// normalize(q − p̃); `None` on zero pieces.
    pub boundary: Option<Poly>,
    pub degree: u32,
    pub is_zero: bool,
    pub mode: Mode,
}

impl ChamberPiece {
    pub fn zero(chamber: usize, d: usize, mode: Mode) -> ChamberPiece {
        ChamberPiece {
            chamber,
            p_tilde: Poly::zero(d),
            q: Poly::one(d),
            boundary: None,
            degree: 0,
            is_zero: true,
            mode,
        }
    }

    /// Builds a piece from (p̃, q), normalizing jointly and deriving the boundary.
    pub fn from_pair(chamber: usize, p_tilde: Poly, q: Poly, mode: Mode) -> ChamberPiece {
        let d = q.nvars();
        if p_tilde.is_zero() {
            return ChamberPiece::zero(chamber, d, mode);
        }
        let mut c = content_inverse(p_tilde.terms().chain(q.terms()).map(|(_, c)| c));
        if q.leading_term().expect("nonzero q").1.is_negative() {
            c = -c;
        }
        let (p_tilde, q) = (p_tilde.scale(&c), q.scale(&c));
        let boundary = (&q - &p_tilde).normalized();
        let degree = boundary.degree().unwrap_or(0);
        ChamberPiece { chamber, p_tilde, q, boundary: Some(boundary), degree, is_zero: false, mode }
    }

    /// p̃(x)/q(x), or `None` where q vanishes.
    pub fn evaluate(&self, x: &[Rat]) -> Option<Rat> {
        let q = self.q.evaluate(x).expect("dimension checked by caller");
        if q.is_zero() {
            return None;
        }
        Some(self.p_tilde.evaluate(x).expect("dimension checked by caller") / q)
    }
}

/// Intermediate products of the assembly, exposed for verification.
#[derive(Debug, Clone)]
pub struct Assembly {
    /// Σ orientation·sign·det(M̂)·(L / cell denominator); divisible by ‖x‖².
    pub raw: Poly,
    /// The common denominator L, with ‖x‖·Vol = raw / ((d−1)!·L).
    pub denominator: Poly,
    /// Distinct primitive linear factors of L with exponents.
    pub factors: Vec<(LinForm, u32)>,
}

/// Assembles the raw numerator and common denominator of ‖x‖·Vol(P ∩ x⊥).
pub fn assemble(p: &VPolytope, sc: &SectionCombinatorics) -> Result<Assembly, BodyError> {
    let d = p.dim();
    let mut forms: Vec<LinForm> = Vec::new();
    let mut cell_data = Vec::with_capacity(sc.cells.len());
    let mut max_exp: Vec<u32> = Vec::new();
    for cell in &sc.cells {
        let mut exps: BTreeMap<usize, u32> = BTreeMap::new();
        let mut scalar = Rat::one();
        let mut rows = Vec::with_capacity(d);
        for &k in cell {
            let (a, b) = edge_points(p, &p.edges()[k]);
            let form = LinForm(sub(b, a));
            let canon = form.canonical();
            let nz = form.0.iter().position(|x| !x.is_zero()).expect("nonzero form");
            scalar *= &form.0[nz] / &canon.0[nz];
            let idx = match forms.iter().position(|f| f == &canon) {
                Some(i) => i,
                None => {
                    forms.push(canon);
                    max_exp.push(0);
                    forms.len() - 1
                }
            };
            *exps.entry(idx).or_default() += 1;
            rows.push(vertex_row(a, b));
        }
        rows.push((0..d).map(|i| Poly::var(d, i)).collect());
        for (&i, &e) in &exps {
            max_exp[i] = max_exp[i].max(e);
        }
        cell_data.push((rows, exps, scalar));
    }
    let factor_polys: Vec<Poly> = forms.iter().map(LinForm::to_poly).collect();
    // cells sharing the same missing factors are summed before multiplying
    let mut by_missing: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (((rows, exps, scalar), s), o) in cell_data.into_iter().zip(&sc.cell_signs).zip(&sc.cell_orientations) {
        let missing: Vec<u32> =
            max_exp.iter().enumerate().map(|(i, m)| m - exps.get(&i).copied().unwrap_or(0)).collect();
        let c = Rat::from_integer(BigInt::from(s * o)) / scalar;
        by_missing.entry(missing).or_insert_with(|| Poly::zero(d)).add_assign_ref(&poly_det(&rows)?.scale(&c));
    }
    let mut raw = Poly::zero(d);
    for (missing, mut term) in by_missing {
        for (f, &e) in factor_polys.iter().zip(&missing) {
            for _ in 0..e {
                term = &term * f;
            }
        }
        raw.add_assign_ref(&term);
    }
    let mut denominator = Poly::one(d);
    for (f, &e) in factor_polys.iter().zip(&max_exp) {
        denominator = &denominator * &f.pow(e);
    }
    Ok(Assembly { raw, denominator, factors: forms.into_iter().zip(max_exp).collect() })
}

/// Symbolic piece of the radial function on chamber `c`.
pub fn chamber_radial(
    p: &VPolytope,
    c: &Chamber,
    sc: &SectionCombinatorics,
    mode: Mode,
) -> Result<ChamberPiece, BodyError> {
    let d = p.dim();
    if d < 2 {
        return Err(BodyError::Dimension(d));
    }
    let asm = assemble(p, sc)?;
    if asm.raw.is_zero() {
        if !sc.cells.is_empty() {
            return Err(BodyError::InvalidCombinatorics {
                chamber: c.id,
                reason: "nonempty section with zero volume".into(),
            });
        }
        return Ok(ChamberPiece::zero(c.id, d, mode));
    }
    let Some(mut p_tilde) = asm.raw.exact_divide(&Poly::norm_sq(d))? else {
        return Err(BodyError::NotDivisible { chamber: c.id });
    };
    let mut q_forms: Vec<(Poly, u32)> = Vec::new();
    for (f, e) in asm.factors {
        let fp = f.to_poly();
        let mut e = e;
        while e > 0 {
            match p_tilde.exact_divide(&fp)? {
                Some(g) => {
                    p_tilde = g;
                    e -= 1;
                }
                None => break,
            }
        }
        q_forms.push((fp, e));
    }
    let mut q = Poly::constant(d, mode.denominator_factor(d));
    for (fp, e) in &q_forms {
        q = &q * &fp.pow(*e);
    }
    let piece = ChamberPiece::from_pair(c.id, p_tilde, q, mode);
    let qw = piece.q.evaluate(&c.witness)?;
    if qw.is_zero() {
        return Err(BodyError::InvalidCombinatorics { chamber: c.id, reason: "q vanishes at the witness".into() });
    }
    if piece.evaluate(&c.witness).is_none_or(|v| v <= Rat::zero()) {
        return Err(BodyError::InvalidCombinatorics {
            chamber: c.id,
            reason: "nonpositive radial value at the witness".into(),
        });
    }
    Ok(piece)
}

/// The full piecewise-rational radial function of IP.
#[derive(Debug, Clone)]
pub struct IntersectionBody {
    polytope: VPolytope,
    normals: NormalSet,
    chambers: Vec<Chamber>,
    combinatorics: Vec<SectionCombinatorics>,
    pieces: Vec<ChamberPiece>,
    mode: Mode,
}

impl IntersectionBody {
    /// Runs chamber enumeration and the per-chamber symbolic computation. Chambers
    /// are processed in parallel on the current rayon pool.
    pub fn compute(polytope: VPolytope, mode: Mode) -> Result<IntersectionBody, BodyError> {
        let d = polytope.dim();
        if d < 2 {
            return Err(BodyError::Dimension(d));
        }
        let normals = arrangement::build_normals(&polytope)?;
        let chambers = arrangement::enumerate_chambers(&normals)?;
        let results: Result<Vec<(SectionCombinatorics, ChamberPiece)>, BodyError> = chambers
            .par_iter()
            .map(|c| {
                let sc = section_combinatorics(&polytope, c)?;
                let piece = chamber_radial(&polytope, c, &sc, mode)?;
                Ok((sc, piece))
            })
            .collect();
        let (combinatorics, pieces) = results?.into_iter().unzip();
        Ok(IntersectionBody { polytope, normals, chambers, combinatorics, pieces, mode })
    }

    /// Reassembles a body from externally supplied pieces, e.g. a stored result
    /// that is to be verified. Chambers and combinatorics are recomputed.
    pub fn with_pieces(
        polytope: VPolytope,
        mode: Mode,
        pieces: Vec<ChamberPiece>,
    ) -> Result<IntersectionBody, BodyError> {
        let normals = arrangement::build_normals(&polytope)?;
        let chambers = arrangement::enumerate_chambers(&normals)?;
        let combinatorics = chambers
            .iter()
            .map(|c| section_combinatorics(&polytope, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntersectionBody { polytope, normals, chambers, combinatorics, pieces, mode })
    }

    pub fn polytope(&self) -> &VPolytope {
        &self.polytope
    }

    pub fn normals(&self) -> &NormalSet {
        &self.normals
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn combinatorics(&self) -> &[SectionCombinatorics] {
        &self.combinatorics
    }

    pub fn pieces(&self) -> &[ChamberPiece] {
        &self.pieces
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn walls(&self) -> Vec<Wall> {
        arrangement::adjacency_graph(&self.normals, &self.chambers)
    }

    /// (chamber id, boundary polynomial, degree) for every nonzero piece.
    pub fn boundary_components(&self) -> Vec<(usize, Poly, u32)> {
        self.pieces
            .iter()
            .filter_map(|p| p.boundary.as_ref().map(|b| (p.chamber, b.clone(), p.degree)))
            .collect()
    }

    /// Distinct boundary polynomials with the chambers carrying them.
    pub fn distinct_components(&self) -> Vec<(Poly, Vec<usize>)> {
        let mut out: Vec<(Poly, Vec<usize>)> = Vec::new();
        for (id, b, _) in self.boundary_components() {
            match out.iter_mut().find(|(p, _)| p == &b) {
                Some((_, ids)) => ids.push(id),
                None => out.push((b, vec![id])),
            }
        }
        out
    }
}

/// One piece per chamber in canonical chamber order.
pub fn radial_function(p: &VPolytope, mode: Mode) -> Result<Vec<ChamberPiece>, BodyError> {
    Ok(IntersectionBody::compute(p.clone(), mode)?.pieces)
}

#[cfg(test)]
mod tests;
