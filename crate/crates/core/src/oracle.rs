//! Direct per-direction checks that share no code with the symbolic pipeline.
//!
//! `section_volume_scaled` recomputes the section P ∩ x⊥ from scratch at a
//! concrete direction: crossed edges, rational vertices, facet groups and its
//! own lower-hull triangulation. Everything is exact except the Monte Carlo
//! estimator.

use std::cmp::Ordering;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::body::{BodyError, IntersectionBody, Mode, RadialValue};
use crate::linalg::{det, det_integer, dot, is_zero_vec, norm_sq, sign, to_f64, Rat, RatMat, RatVec};
use crate::polytope::{PolytopeError, VPolytope};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("direction has length {found}, expected {expected}")]
    Dimension { found: usize, expected: usize },
    #[error("direction lies on the hyperplane of vertex {0}")]
    OnWall(usize),
    #[error("no generic lifting found for a facet section")]
    NonGeneric,
    #[error("expected a centrally symmetric polygon")]
    NotSymmetricPolygon,
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Body(#[from] BodyError),
}

/// Heights `base^1, base^2, …` assigned along the lexicographic order of the
/// points, largest point first when `descending`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lifting {
    pub base: u64,
    pub descending: bool,
}

impl Lifting {
    pub const ORACLE: Lifting = Lifting { base: 2, descending: true };
    pub const ALTERNATE: Lifting = Lifting { base: 3, descending: false };
}

fn check_direction(p: &VPolytope, x: &[Rat]) -> Result<(), OracleError> {
    if x.len() != p.dim() {
        return Err(OracleError::Dimension { found: x.len(), expected: p.dim() });
    }
    if is_zero_vec(x) {
        return Err(OracleError::ZeroDirection);
    }
    Ok(())
}

fn factorial(n: usize) -> Rat {
    Rat::from_integer((1..=n as u64).map(BigInt::from).product())
}

/// Section points grouped by the facets of P they lie on. The origin is never
/// included; it only lies on facets through the origin, which carry weight 0.
fn facet_groups(p: &VPolytope, x: &[Rat]) -> Result<Vec<Vec<RatVec>>, OracleError> {
    let heights: Vec<Rat> = p.vertices().iter().map(|v| dot(v, x)).collect();
    for (i, (v, h)) in p.vertices().iter().zip(&heights).enumerate() {
        if h.is_zero() && !is_zero_vec(v) {
            return Err(OracleError::OnWall(i));
        }
    }
    let mut groups = vec![Vec::new(); p.facets().len()];
    for e in p.edges() {
        let (ha, hb) = (&heights[e.i], &heights[e.j]);
        if sign(ha) * sign(hb) >= 0 {
            continue;
        }
        let (a, b) = (&p.vertices()[e.i], &p.vertices()[e.j]);
        // a + t(b − a) with ⟨·, x⟩ = 0
        let t = -ha / (hb - ha);
        let point: RatVec = a.iter().zip(b).map(|(ai, bi)| ai + &t * (bi - ai)).collect();
        for (f, facet) in p.facets().iter().enumerate() {
            if facet.slack(a).is_zero() && facet.slack(b).is_zero() {
                groups[f].push(point.clone());
            }
        }
    }
    Ok(groups)
}

fn powers(n: usize, base: &BigInt) -> Vec<Rat> {
    let mut cur = BigInt::one();
    (0..n)
        .map(|_| {
            cur *= base;
            Rat::from_integer(cur.clone())
        })
        .collect()
}

/// Coordinates of the section points in a projection that is injective on
/// the flat {⟨normal, ·⟩ = c, ⟨x, ·⟩ = 0}: two coordinates whose 2×2 minor of
/// [normal; x] is nonzero are dropped. Points and heights are scaled to
/// integers by a common factor.
fn flat_coordinates(points: &[RatVec], heights: &[Rat], normal: &[Rat], x: &[Rat]) -> Vec<Vec<BigInt>> {
    let d = x.len();
    let (i, j) = (0..d)
        .tuple_combinations()
        .find(|&(i, j)| !(&normal[i] * &x[j] - &normal[j] * &x[i]).is_zero())
        .expect("facet normal and direction are independent");
    let rows: Vec<Vec<Rat>> = points
        .iter()
        .zip(heights)
        .map(|(p, h)| {
            let mut r: Vec<Rat> = (0..d).filter(|&c| c != i && c != j).map(|c| p[c].clone()).collect();
            r.push(h.clone());
            r
        })
        .collect();
    let mut l = BigInt::one();
    for v in rows.iter().flatten() {
        l = num_integer::Integer::lcm(&l, v.denom());
    }
    rows.into_iter()
        .map(|r| r.into_iter().map(|v| (v * Rat::from_integer(l.clone())).to_integer()).collect())
        .collect()
}

/// Lower-hull cells of the lifted points, which span a (d−2)-flat inside the
/// hyperplanes ⟨normal, ·⟩ = c and ⟨x, ·⟩ = 0. `None` when some lower facet
/// carries more than d−1 points.
fn lower_hull(points: &[RatVec], heights: &[Rat], normal: &[Rat], x: &[Rat]) -> Option<Vec<Vec<usize>>> {
    let lifted = flat_coordinates(points, heights, normal, x);
    let k = x.len() - 2;
    let diff = |i: usize, o: usize| -> Vec<BigInt> { lifted[i].iter().zip(&lifted[o]).map(|(a, b)| a - b).collect() };
    let mut cells = Vec::new();
    for subset in (0..points.len()).combinations(k + 1) {
        let o = subset[0];
        let rows: Vec<Vec<BigInt>> = subset[1..].iter().map(|&i| diff(i, o)).collect();
        // normal covector by cofactor expansion along an appended row
        let mut c: Vec<BigInt> = (0..=k)
            .map(|m| {
                let minor: Vec<Vec<BigInt>> = rows
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(col, _)| col != m).map(|(_, v)| v.clone()).collect())
                    .collect();
                let v = det_integer(minor);
                if (k + m) % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        if c[k].is_zero() {
            continue;
        }
        if c[k].is_negative() {
            c.iter_mut().for_each(|v| *v = -&*v);
        }
        let mut lower = true;
        let mut tie = false;
        for j in (0..points.len()).filter(|j| !subset.contains(j)) {
            let s: BigInt = c.iter().zip(diff(j, o)).map(|(a, b)| a * b).sum();
            if s.is_negative() {
                lower = false;
                break;
            }
            if s.is_zero() {
                tie = true;
            }
        }
        if lower {
            if tie {
                return None;
            }
            cells.push(subset);
        }
    }
    Some(cells)
}

fn triangulate_group(
    points: &[RatVec],
    normal: &[Rat],
    x: &[Rat],
    lifting: Lifting,
) -> Result<Vec<Vec<usize>>, OracleError> {
    let d = x.len();
    if points.len() == d - 1 {
        return Ok(vec![(0..points.len()).collect()]);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let o = points[i].cmp(&points[j]);
        if lifting.descending {
            o.reverse()
        } else {
            o
        }
    });
    let mut base = BigInt::from(lifting.base);
    for _ in 0..4 {
        let h = powers(points.len(), &base);
        let mut heights = vec![Rat::zero(); points.len()];
        for (rank, &i) in order.iter().enumerate() {
            heights[i] = h[rank].clone();
        }
        if let Some(cells) = lower_hull(points, &heights, normal, x) {
            return Ok(cells);
        }
        base = &base * &base;
    }
    Err(OracleError::NonGeneric)
}

/// W(x) = ‖x‖·Vol_{d−1}(P ∩ x⊥), exactly rational, using the default lifting.
pub fn section_volume_scaled(p: &VPolytope, x: &[Rat]) -> Result<Rat, OracleError> {
    section_volume_scaled_with(p, x, Lifting::ORACLE)
}

/// W(x) with an explicit choice of lifting for the facet triangulations.
pub fn section_volume_scaled_with(p: &VPolytope, x: &[Rat], lifting: Lifting) -> Result<Rat, OracleError> {
    check_direction(p, x)?;
    let d = p.dim();
    let groups = facet_groups(p, x)?;
    let mut total = Rat::zero();
    for (facet, group) in p.facets().iter().zip(&groups) {
        let s = sign(&facet.offset);
        if s == 0 || group.len() < d - 1 {
            continue;
        }
        let mut sum = Rat::zero();
        for cell in triangulate_group(group, &facet.normal, x, lifting)? {
            let mut rows: Vec<RatVec> = cell.iter().map(|&i| group[i].clone()).collect();
            rows.push(x.to_vec());
            sum += det(&RatMat::from_rows(&rows).expect("square")).expect("square").abs();
        }
        if s > 0 {
            total += sum;
        } else {
            total -= sum;
        }
    }
    Ok(total / factorial(d - 1))
}

/// The radial value W(x)/‖x‖² in the given normalization.
pub fn radial_value(p: &VPolytope, x: &[Rat], mode: Mode) -> Result<Rat, OracleError> {
    let w = section_volume_scaled(p, x)? / norm_sq(x);
    Ok(match mode {
        Mode::TrueVolume => w,
        Mode::Paper => w / Rat::from_integer(p.dim().into()),
    })
}

/// Signed pyramid decomposition from an exterior apex against the direct volume.
pub fn lemma31_check(p: &VPolytope, apex: &[Rat]) -> Result<bool, OracleError> {
    Ok(p.signed_pyramid_volume(apex)? == p.volume()?)
}

/// ρ_P(y) = min offset/⟨n, y⟩ over facets with ⟨n, y⟩ > 0.
fn polygon_radial(p: &VPolytope, y: &[Rat]) -> Rat {
    p.facets()
        .iter()
        .filter_map(|f| {
            let s = dot(&f.normal, y);
            s.is_positive().then(|| &f.offset / s)
        })
        .min()
        .expect("bounded polygon")
}

/// For a centrally symmetric polygon, checks ρ_IP(x) = λ·ρ_P(−x₂, x₁) at
/// `samples` random rational points, with λ = 2 for true volumes and 1 for the
/// paper normalization.
pub fn rotate2d_check<R: Rng>(body: &IntersectionBody, samples: usize, rng: &mut R) -> Result<bool, OracleError> {
    let p = body.polytope();
    if p.dim() != 2 || !p.is_centrally_symmetric() {
        return Err(OracleError::NotSymmetricPolygon);
    }
    let factor = Rat::from_integer(match body.mode() {
        Mode::TrueVolume => 2.into(),
        Mode::Paper => 1.into(),
    });
    for _ in 0..samples {
        let x = loop {
            let x: RatVec = (0..2)
                .map(|_| Rat::new(rng.gen_range(-1000i64..=1000).into(), rng.gen_range(1i64..=50).into()))
                .collect();
            if !is_zero_vec(&x) {
                break x;
            }
        };
        let rotated = vec![-&x[1], x[0].clone()];
        let expected = &factor * polygon_radial(p, &rotated);
        match body.evaluate_radial(&x)? {
            RadialValue::Finite(r) if r == expected => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

const CHUNK: u64 = 1 << 14;

/// Orthonormal basis of x⊥ by Gram–Schmidt on the coordinate vectors.
fn complement_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![x.iter().map(|v| v / nx).collect()];
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap_or(Ordering::Equal));
    for i in order {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-9 {
            basis.push(v.into_iter().map(|a| a / n).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Hit-or-miss estimate of Vol_{d−1}(P ∩ x⊥) over the bounding box of the
/// section in an orthonormal frame of x⊥. Samples are drawn in chunks, chunk
/// `c` from ChaCha stream `c` under `seed`, so the result is independent of
/// the thread count.
pub fn montecarlo_section_volume(
    p: &VPolytope,
    x: &[Rat],
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, OracleError> {
    check_direction(p, x)?;
    if samples == 0 {
        return Err(OracleError::NoSamples);
    }
    let zero = MonteCarloEstimate { estimate: 0.0, std_error: 0.0, samples };
    let heights: Vec<Rat> = p.vertices().iter().map(|v| dot(v, x)).collect();
    let mut section: Vec<RatVec> = Vec::new();
    for (v, h) in p.vertices().iter().zip(&heights) {
        if h.is_zero() {
            section.push(v.clone());
        }
    }
    for e in p.edges() {
        let (ha, hb) = (&heights[e.i], &heights[e.j]);
        if sign(ha) * sign(hb) < 0 {
            let (a, b) = (&p.vertices()[e.i], &p.vertices()[e.j]);
            let t = -ha / (hb - ha);
            section.push(a.iter().zip(b).map(|(ai, bi)| ai + &t * (bi - ai)).collect());
        }
    }
    if section.len() < p.dim() {
        return Ok(zero);
    }
    let xf: Vec<f64> = x.iter().map(to_f64).collect();
    let basis = complement_basis(&xf);
    let k = basis.len();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for s in &section {
        let sf: Vec<f64> = s.iter().map(to_f64).collect();
        for (j, b) in basis.iter().enumerate() {
            let c: f64 = sf.iter().zip(b).map(|(a, b)| a * b).sum();
            lo[j] = lo[j].min(c);
            hi[j] = hi[j].max(c);
        }
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    if box_volume <= 0.0 {
        return Ok(zero);
    }
    let facets: Vec<(Vec<f64>, f64)> =
        p.facets().iter().map(|f| (f.normal.iter().map(to_f64).collect(), to_f64(&f.offset))).collect();
    let d = p.dim();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut y = vec![0.0; d];
            let mut count = 0u64;
            for _ in 0..n {
                y.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..k {
                    let t = rng.gen_range(lo[j]..hi[j]);
                    y.iter_mut().zip(&basis[j]).for_each(|(v, b)| *v += t * b);
                }
                if facets.iter().all(|(n, o)| n.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() <= *o) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let frac = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        estimate: box_volume * frac,
        std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
    })
}
