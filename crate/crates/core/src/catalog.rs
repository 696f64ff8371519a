//! Standard test polytopes and random generators.

use itertools::Itertools;
use rand::Rng;

use crate::linalg::{neg, rat_vec, RatVec};
use crate::polytope::{convex_hull_vertices, VPolytope};

/// The cube [−1,1]^d, vertices in lexicographic order.
pub fn cube(d: usize) -> VPolytope {
    translated_cube(&vec![0; d])
}

/// [−1,1]^d + shift.
pub fn translated_cube(shift: &[i64]) -> VPolytope {
    let verts = (0..shift.len())
        .map(|_| [-1i64, 1])
        .multi_cartesian_product()
        .map(|v| rat_vec(&v.iter().zip(shift).map(|(a, s)| a + s).collect::<Vec<_>>()))
        .collect();
    VPolytope::new(verts).expect("cube is valid")
}

/// [0,2]³, with the origin as a vertex.
pub fn vertex_cube() -> VPolytope {
    translated_cube(&[1, 1, 1])
}

/// conv{0, e₁, …, e_d}.
pub fn standard_simplex(d: usize) -> VPolytope {
    let mut verts = vec![vec![0i64; d]];
    for i in 0..d {
        let mut e = vec![0i64; d];
        e[i] = 1;
        verts.push(e);
    }
    VPolytope::new(verts.iter().map(|v| rat_vec(v)).collect()).expect("simplex is valid")
}

/// The tetrahedron inscribed in [−1,1]³ sharing the cube's vertex directions.
pub fn tetrahedron() -> VPolytope {
    VPolytope::from_i64(&[&[-1, -1, -1], &[-1, 1, 1], &[1, -1, 1], &[1, 1, -1]]).expect("valid")
}

/// A 4-simplex with an edge through the origin.
pub fn simplex_510() -> VPolytope {
    VPolytope::from_i64(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, -1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]])
        .expect("valid")
}

/// The centrally symmetric hexagon conv{±(2,0), ±(1,2), ±(−1,2)}.
pub fn hexagon() -> VPolytope {
    VPolytope::from_i64(&[&[2, 0], &[1, 2], &[-1, 2], &[-2, 0], &[-1, -2], &[1, -2]]).expect("valid")
}

/// Convex hull of `n` random integer points in [−r, r]^d, resampled until full-dimensional.
pub fn random_polytope<R: Rng>(rng: &mut R, d: usize, n: usize, r: i64) -> VPolytope {
    loop {
        let pts: Vec<RatVec> =
            (0..n).map(|_| rat_vec(&(0..d).map(|_| rng.gen_range(-r..=r)).collect::<Vec<_>>())).collect();
        if let Ok(hull) = convex_hull_vertices(&pts) {
            if let Ok(p) = VPolytope::new(hull) {
                return p;
            }
        }
    }
}

/// Centrally symmetric polygon: hull of `k` random integer points in [−r, r]² and their negatives.
pub fn random_symmetric_polygon<R: Rng>(rng: &mut R, k: usize, r: i64) -> VPolytope {
    loop {
        let mut pts: Vec<RatVec> = Vec::new();
        for _ in 0..k {
            let v = rat_vec(&[rng.gen_range(-r..=r), rng.gen_range(-r..=r)]);
            pts.push(neg(&v));
            pts.push(v);
        }
        if let Ok(hull) = convex_hull_vertices(&pts) {
            if let Ok(p) = VPolytope::new(hull) {
                return p;
            }
        }
    }
}
