//! Triangle meshes of ∂IP for d = 3, with exact vertex positions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{BodyError, ChamberPiece, IntersectionBody};
use crate::arrangement::Chamber;
use crate::linalg::{add, det, dot, kernel_basis, primitive_keep_sign, scale, sub, to_f64, Rat, RatMat, RatVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("meshing needs d = 3, got d = {0}")]
    Dimension(usize),
    #[error(transparent)]
    Body(#[from] BodyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh {
    /// Exact boundary points ρ(w)·w.
    pub vertices: Vec<RatVec>,
    /// Vertex index triples with det[a, b, c] ≥ 0 (outward orientation).
    pub triangles: Vec<[usize; 3]>,
    /// Chamber id and the range of its triangles.
    pub groups: Vec<(usize, Range<usize>)>,
}

/// Rays of a pointed 3-dimensional cone in cyclic order around `witness`.
fn cyclic_order(rays: &[RatVec], witness: &[Rat]) -> Vec<RatVec> {
    let basis = kernel_basis(&RatMat::from_rows(&[witness.to_vec()]).expect("row"));
    let coords: Vec<(Rat, Rat)> = rays.iter().map(|r| (dot(r, &basis[0]), dot(r, &basis[1]))).collect();
    let half = |(x, y): &(Rat, Rat)| u8::from(!(y.is_positive() || (y.is_zero() && x.is_positive())));
    let mut idx: Vec<usize> = (0..rays.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (&coords[i], &coords[j]);
        half(a).cmp(&half(b)).then_with(|| {
            let cross = &a.0 * &b.1 - &a.1 * &b.0;
            if cross.is_positive() {
                Ordering::Less
            } else if cross.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
    idx.into_iter().map(|i| rays[i].clone()).collect()
}

fn subdivide(tris: Vec<[RatVec; 3]>) -> Vec<[RatVec; 3]> {
    let mid = |a: &RatVec, b: &RatVec| primitive_keep_sign(&add(a, b));
    let mut out = Vec::with_capacity(4 * tris.len());
    for [a, b, c] in tris {
        let (ab, bc, ca) = (mid(&a, &b), mid(&b, &c), mid(&c, &a));
        out.push([a, ab.clone(), ca.clone()]);
        out.push([ab.clone(), b, bc.clone()]);
        out.push([ca.clone(), bc.clone(), c]);
        out.push([ab, bc, ca]);
    }
    out
}

/// The boundary point ρ(w)·w of the piece, moving w slightly into the chamber
/// where q vanishes on the closure.
fn boundary_point(piece: &ChamberPiece, c: &Chamber, w: &RatVec) -> RatVec {
    let scale_up = Rat::from_integer(BigInt::from(1_000_000));
    let mut dir = w.clone();
    loop {
        if let Some(r) = piece.evaluate(&dir) {
            return scale(&dir, &r);
        }
        dir = add(&scale(&dir, &scale_up), &c.witness);
    }
}

fn orientation(a: &RatVec, b: &RatVec, c: &RatVec) -> Rat {
    det(&RatMat::from_rows(&[a.clone(), b.clone(), c.clone()]).expect("3x3")).expect("3x3")
}

/// Positive when `d` lies strictly outside the plane of the outward triangle `abc`.
fn above(a: &RatVec, b: &RatVec, c: &RatVec, d: &RatVec) -> bool {
    orientation(&sub(b, a), &sub(c, a), &sub(d, a)).is_positive()
}

/// Flips interior edges of one patch whose fold is strictly reflex, while the
/// flipped triangles stay positively oriented. Each flip strictly enlarges the
/// enclosed volume, so the loop terminates; on a convex patch no reflex edge
/// survives.
fn flip_reflex(vertices: &[RatVec], tris: &mut [[usize; 3]]) {
    loop {
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                edges.insert((tri[k], tri[(k + 1) % 3]), t);
            }
        }
        let mut flipped = false;
        'search: for t1 in 0..tris.len() {
            for k in 0..3 {
                let [a, b, c] = [tris[t1][k], tris[t1][(k + 1) % 3], tris[t1][(k + 2) % 3]];
                let Some(&t2) = edges.get(&(b, a)) else { continue };
                let d = tris[t2].into_iter().find(|&i| i != a && i != b).expect("triangle");
                if edges.contains_key(&(c, d)) || edges.contains_key(&(d, c)) {
                    continue;
                }
                let v = |i: usize| &vertices[i];
                if !above(v(a), v(b), v(c), v(d)) {
                    continue;
                }
                if !orientation(v(c), v(a), v(d)).is_positive() || !orientation(v(d), v(b), v(c)).is_positive() {
                    continue;
                }
                tris[t1] = [c, a, d];
                tris[t2] = [d, b, c];
                flipped = true;
                break 'search;
            }
        }
        if !flipped {
            return;
        }
    }
}

impl IntersectionBody {
    /// Fan-triangulates every nonzero chamber's spherical polygon, refines each
    /// triangle `refinement` times (×4 per level), lifts directions to ∂IP and
    /// flips reflex diagonals inside each patch where the lifted points allow it.
    pub fn mesh_boundary(&self, refinement: u32) -> Result<Mesh, MeshError> {
        let d = self.polytope.dim();
        if d != 3 {
            return Err(MeshError::Dimension(d));
        }
        let mut mesh = Mesh { vertices: Vec::new(), triangles: Vec::new(), groups: Vec::new() };
        let mut index: HashMap<RatVec, usize> = HashMap::new();
        for (c, piece) in self.chambers.iter().zip(&self.pieces) {
            if piece.is_zero {
                continue;
            }
            let ring = cyclic_order(&c.rays, &c.witness);
            let mut tris: Vec<[RatVec; 3]> =
                (1..ring.len() - 1).map(|i| [ring[0].clone(), ring[i].clone(), ring[i + 1].clone()]).collect();
            for _ in 0..refinement {
                tris = subdivide(tris);
            }
            let start = mesh.triangles.len();
            let mut local: HashMap<RatVec, usize> = HashMap::new();
            for [a, b, cc] in tris {
                let mut ids = [0usize; 3];
                for (slot, w) in ids.iter_mut().zip([&a, &b, &cc]) {
                    *slot = *local.entry(w.clone()).or_insert_with(|| {
                        let x = boundary_point(piece, c, w);
                        *index.entry(x.clone()).or_insert_with(|| {
                            mesh.vertices.push(x);
                            mesh.vertices.len() - 1
                        })
                    });
                }
                if orientation(&a, &b, &cc).is_negative() {
                    ids.swap(1, 2);
                }
                mesh.triangles.push(ids);
            }
            flip_reflex(&mesh.vertices, &mut mesh.triangles[start..]);
            mesh.groups.push((c.id, start..mesh.triangles.len()));
        }
        Ok(mesh)
    }
}

fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let prec = (11 - mag).max(0) as usize;
    let s = format!("{x:.prec$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

impl Mesh {
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let c: Vec<String> = v.iter().map(|x| fmt_sig(to_f64(x))).collect();
            writeln!(out, "v {}", c.join(" ")).expect("string write");
        }
        for (id, range) in &self.groups {
            writeln!(out, "g chamber_{id}").expect("string write");
            for t in &self.triangles[range.clone()] {
                writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).expect("string write");
            }
        }
        out
    }

    /// Pairs of adjacent triangles whose shared edge folds inward: the far
    /// vertex of one lies more than `tol` outside the other's plane.
    pub fn reflex_edges(&self, tol: f64) -> Vec<(usize, usize)> {
        let pts: Vec<[f64; 3]> =
            self.vertices.iter().map(|v| [to_f64(&v[0]), to_f64(&v[1]), to_f64(&v[2])]).collect();
        let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        let normal = |t: usize| {
            let [a, b, c] = self.triangles[t].map(|i| pts[i]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            (len > 0.0).then(|| [n[0] / len, n[1] / len, n[2] / len])
        };
        let mut out = Vec::new();
        let mut keys: Vec<_> = edges.into_iter().collect();
        keys.sort();
        for ((a, b), ts) in keys {
            let [t1, t2] = ts[..] else { continue };
            let Some(n) = normal(t1) else { continue };
            let far = self.triangles[t2].into_iter().find(|&i| i != a && i != b).expect("triangle");
            let p = pts[far];
            let o = pts[a];
            let dist = n[0] * (p[0] - o[0]) + n[1] * (p[1] - o[1]) + n[2] * (p[2] - o[2]);
            if dist > tol {
                out.push((t1.min(t2), t1.max(t2)));
            }
        }
        out
    }
}
