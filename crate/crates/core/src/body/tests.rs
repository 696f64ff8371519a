use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::Zero;

use rand::{Rng, SeedableRng};

use super::*;
use crate::arrangement::{locate, random_interior_point, random_wall_point, Location};
use crate::catalog;
use crate::linalg::{frac, rat, rat_vec};
use crate::poly::parse_poly;

fn poly(s: &str, d: usize) -> Poly {
    parse_poly(s, d).unwrap()
}

fn piece_at<'a>(body: &'a IntersectionBody, x: &[i64]) -> &'a ChamberPiece {
    match locate(body.normals(), body.chambers(), &rat_vec(x)).unwrap() {
        Location::Chamber(id) => &body.pieces()[id],
        other => panic!("{other:?}"),
    }
}

/// True when ρ = p/q matches the piece after some signed coordinate permutation.
fn piece_in_orbit(piece: &ChamberPiece, p: &Poly, q: &Poly) -> bool {
    let n = q.nvars();
    (0..n).permutations(n).any(|perm| {
        (0..1u32 << n).any(|mask| {
            let s: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let pp = piece.p_tilde.signed_permutation(&perm, &s);
            let pq = piece.q.signed_permutation(&perm, &s);
            &pp * q == p * &pq
        })
    })
}

#[test]
fn symbolic_vertex_of_a_cube_edge() {
    let v = symbolic_vertex(&rat_vec(&[1, 1, -1]), &rat_vec(&[1, 1, 1])).unwrap();
    assert_eq!(v[0], RatFun::new(Poly::one(3), Poly::one(3)).unwrap());
    assert_eq!(v[1], RatFun::new(Poly::one(3), Poly::one(3)).unwrap());
    assert_eq!(v[2], RatFun::new(poly("-x - y", 3), poly("z", 3)).unwrap());
    assert!(symbolic_vertex(&rat_vec(&[1, 0]), &rat_vec(&[1, 0])).is_err());
    assert!(symbolic_vertex(&rat_vec(&[0, 1]), &rat_vec(&[0, -1])).is_err());
}

#[test]
fn symbolic_vertices_lie_in_the_hyperplane() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut done = 0;
    while done < 50 {
        let a = rat_vec(&(0..3).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>());
        let b = rat_vec(&(0..3).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>());
        let Ok(v) = symbolic_vertex(&a, &b) else { continue };
        // ⟨v, x⟩·den = Σ num_k·x_k must vanish identically
        let den = Poly::linear(&sub(&b, &a));
        let mut total = Poly::zero(3);
        for (k, f) in v.iter().enumerate() {
            let scaled = (&f.num * &den).exact_divide(&f.den).unwrap().unwrap();
            total.add_assign_ref(&(&scaled * &Poly::var(3, k)));
        }
        assert!(total.is_zero());
        done += 1;
    }
}

#[test]
fn cube_sections() {
    let p = catalog::cube(3);
    let body = IntersectionBody::compute(p, Mode::TrueVolume).unwrap();
    let id = piece_at(&body, &[0, 0, 1]).chamber;
    let sc = &body.combinatorics()[id];
    assert_eq!(sc.crossed_edges.len(), 4);
    assert_eq!(sc.section_facets.len(), 4);
    assert_eq!(sc.cells.len(), 4);
    assert!(sc.cell_signs.iter().all(|&s| s == 1));
    let id = piece_at(&body, &[-1, 1, 1]).chamber;
    let sc = &body.combinatorics()[id];
    assert_eq!(sc.crossed_edges.len(), 6);
    assert_eq!(sc.cells.len(), 6);
}

#[test]
fn cube_pieces_in_both_modes() {
    let paper = IntersectionBody::compute(catalog::cube(3), Mode::Paper).unwrap();
    let c1 = piece_at(&paper, &[0, 0, 1]);
    assert_eq!(c1.p_tilde, poly("4", 3));
    assert_eq!(c1.q, poly("3*z", 3));
    assert_eq!(c1.boundary, Some(poly("3*z - 4", 3)));
    let c2 = piece_at(&paper, &[-1, 1, 1]);
    assert_eq!(c2.degree, 3);
    let cubic = poly("6*x*y*z - 2*x^2 - 4*x*y - 2*y^2 - 4*x*z + 4*y*z - 2*z^2", 3);
    assert!(c2.boundary.as_ref().unwrap().equal_up_to_signed_permutation(&cubic));
    let hex = piece_at(&paper, &[1, 1, 1]);
    assert_eq!(hex.q, poly("3*x*y*z", 3));
    assert_eq!(hex.p_tilde, poly("-x^2 + 2*x*y + 2*x*z - y^2 + 2*y*z - z^2", 3));

    let truev = IntersectionBody::compute(catalog::cube(3), Mode::TrueVolume).unwrap();
    let c1 = piece_at(&truev, &[0, 0, 1]);
    assert_eq!((c1.p_tilde.clone(), c1.q.clone()), (poly("4", 3), poly("z", 3)));
    let antipode = piece_at(&truev, &[0, 0, -1]);
    assert_eq!((antipode.p_tilde.clone(), antipode.q.clone()), (poly("-4", 3), poly("z", 3)));
}

#[test]
fn radial_values_and_membership() {
    let body = IntersectionBody::compute(catalog::cube(3), Mode::TrueVolume).unwrap();
    let v = |x: &[i64]| body.evaluate_radial(&rat_vec(x)).unwrap();
    assert_eq!(v(&[0, 0, 1]), RadialValue::Finite(rat(4)));
    assert_eq!(v(&[0, 0, 2]), RadialValue::Finite(rat(2)));
    assert_eq!(v(&[0, 0, 0]), RadialValue::Infinite);
    // (1,1,1) hexagon of area 3√3 at distance √3: ρ = 3
    assert_eq!(v(&[1, 1, 1]), RadialValue::Finite(rat(3)));
    let m = |x: &[i64]| body.membership(&rat_vec(x)).unwrap();
    assert_eq!(m(&[0, 0, 3]), Membership::Inside);
    assert_eq!(m(&[0, 0, 4]), Membership::Boundary);
    assert_eq!(m(&[0, 0, 5]), Membership::Outside);
    // on the wall x = y the two pieces agree
    assert_eq!(v(&[1, -1, 3]), RadialValue::Finite(frac(4, 3)));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let x = rat_vec(&(0..3).map(|_| rng.gen_range(-9..=9)).collect::<Vec<_>>());
        if x.iter().all(Zero::is_zero) {
            continue;
        }
        let nx: RatVec = x.iter().map(|a| -a).collect();
        assert_eq!(body.membership(&x).unwrap(), body.membership(&nx).unwrap());
    }
}

#[test]
fn cube_degree_tables() {
    let expect: [(usize, &[(u32, usize)], usize); 3] =
        [(2, &[(1, 4)], 1), (3, &[(1, 6), (3, 8)], 5), (4, &[(1, 8), (3, 32), (4, 64)], 14)];
    for (d, hist, bound) in expect {
        let body = IntersectionBody::compute(catalog::cube(d), Mode::TrueVolume).unwrap();
        let report = body.degree_table().unwrap();
        assert_eq!(report.histogram, hist.iter().copied().collect::<BTreeMap<_, _>>());
        assert_eq!(report.global_bound, bound);
        assert!(report.satisfied);
        let linear: Vec<&ChamberPiece> = body.pieces().iter().filter(|p| p.degree == 1).collect();
        assert_eq!(linear.len(), 2 * d);
        for piece in linear {
            let w = &body.chambers()[piece.chamber].witness;
            assert_eq!(w.iter().filter(|x| !x.is_zero()).count(), 1);
        }
    }
}

#[test]
fn vertex_cube_shapes() {
    let body = IntersectionBody::compute(catalog::vertex_cube(), Mode::Paper).unwrap();
    assert_eq!(body.pieces().len(), 32);
    assert_eq!(body.pieces().iter().filter(|p| p.is_zero).count(), 2);
    let shapes = [
        (poly("2*x", 3), poly("3*y*z", 3), 6),
        (poly("2*x + 4*z", 3), poly("3*y*z", 3), 12),
        // the section is a full facet projection, e.g. at (3,−1,−1)
        (poly("4", 3), poly("3*x", 3), 6),
        (poly("2*x^2 + 4*x*y + 2*y^2 + 4*x*z + 2*z^2", 3), poly("3*x*y*z", 3), 6),
    ];
    for (p, q, count) in shapes {
        let n = body.pieces().iter().filter(|pc| !pc.is_zero && piece_in_orbit(pc, &p, &q)).count();
        assert_eq!(n, count, "shape {p}/{q}");
    }
    assert_eq!(body.evaluate_radial(&rat_vec(&[1, 1, 1])).unwrap(), RadialValue::Finite(Rat::zero()));
}

#[test]
fn tetrahedron_components() {
    let body = IntersectionBody::compute(catalog::tetrahedron(), Mode::Paper).unwrap();
    let quartic = poly("6*x^2*y^2 - 6*x^2*z^2 - 6*y^2*z^2 + 6*z^4 + 4*x^2*z + 4*y^2*z - 4*z^3", 3);
    let expanded = &(&poly("6*x - 6*y", 3) * &poly("x - z", 3)) * &poly("y + z", 3);
    let cubic_paper = &expanded + &poly("-2*x^2 + 4*x*y + 4*x*z - 2*y^2 - 4*y*z - 2*z^2", 3);
    let b1 = piece_at(&body, &[0, 0, 1]).boundary.clone().unwrap();
    assert!(b1.equal_up_to_signed_permutation(&quartic), "{b1}");
    let degrees: BTreeMap<u32, usize> = body.degree_table().unwrap().histogram;
    assert_eq!(degrees, BTreeMap::from([(3, 8), (4, 6)]));
    assert!(body.boundary_components().iter().any(|(_, b, _)| b.equal_up_to_signed_permutation(&cubic_paper)));
}

#[test]
fn simplex_with_edge_through_origin() {
    let body = IntersectionBody::compute(catalog::simplex_510(), Mode::TrueVolume).unwrap();
    assert_eq!(body.pieces().len(), 16);
    assert!(body.pieces().iter().all(|p| !p.is_zero));
    let report = body.degree_table().unwrap();
    assert_eq!(report.histogram, BTreeMap::from([(3, 4), (5, 12)]));
}

#[test]
fn homogeneity_and_wall_continuity() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for p in [catalog::cube(3), catalog::tetrahedron(), catalog::hexagon()] {
        let body = IntersectionBody::compute(p, Mode::TrueVolume).unwrap();
        for piece in body.pieces() {
            let dq = piece.q.is_homogeneous().unwrap();
            assert_eq!(piece.p_tilde.is_homogeneous().unwrap() + 1, dq);
        }
        for wall in body.walls() {
            for _ in 0..5 {
                let x = random_wall_point(body.normals(), body.chambers(), &wall, &mut rng);
                let a = body.pieces()[wall.a].evaluate(&x).unwrap();
                let b = body.pieces()[wall.b].evaluate(&x).unwrap();
                assert_eq!(a, b);
            }
        }
        for c in body.chambers() {
            let x = random_interior_point(c, &mut rng);
            let two = Rat::from_integer(2.into());
            let RadialValue::Finite(r1) = body.evaluate_radial(&x).unwrap() else { panic!() };
            let RadialValue::Finite(r2) = body.evaluate_radial(&crate::linalg::scale(&x, &two)).unwrap() else {
                panic!()
            };
            assert_eq!(r1, r2 * two);
        }
    }
}

#[test]
fn antipodal_pieces_of_symmetric_polytopes() {
    let body = IntersectionBody::compute(catalog::cube(3), Mode::TrueVolume).unwrap();
    for c in body.chambers() {
        let anti: Vec<i8> = c.signs.iter().map(|s| -s).collect();
        let other = body.chambers().iter().find(|o| o.signs == anti).unwrap();
        let a = &body.pieces()[c.id];
        let b = &body.pieces()[other.id];
        let flipped = ChamberPiece::from_pair(b.chamber, a.p_tilde.negate_variables(), a.q.negate_variables(), a.mode);
        assert_eq!((flipped.p_tilde, flipped.q), (b.p_tilde.clone(), b.q.clone()));
        assert_eq!(a.degree, b.degree);
    }
}

#[test]
fn origin_outside_and_summary() {
    let body = IntersectionBody::compute(catalog::translated_cube(&[3, 0, 0]), Mode::TrueVolume).unwrap();
    assert_eq!(body.evaluate_radial(&rat_vec(&[0, 0, 0])).unwrap(), RadialValue::Finite(Rat::zero()));
    assert!(body.pieces().iter().any(|p| p.is_zero));
    let sym = IntersectionBody::compute(catalog::cube(3), Mode::Paper).unwrap();
    let distinct = sym.distinct_components();
    assert_eq!(distinct.len(), 14);
    assert!(distinct.iter().all(|(_, ids)| ids.len() == 1));
}

