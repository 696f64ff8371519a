//! The invariant suite run by `ibody check`, and replay of stored results.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{self, incident_chambers, random_interior_point, random_wall_point};
use crate::body::{assemble, IntersectionBody, RadialValue};
use crate::io::{parse_mode, polytope_hash, ResultFile};
use crate::linalg::{neg, parse_rat, to_f64, Rat, RatVec};
use crate::oracle;
use crate::poly::Poly;
use crate::polytope::{OriginPosition, VPolytope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Fail)
    }

    fn record(&mut self, name: &'static str, result: Result<String, String>) {
        let (status, detail) = match result {
            Ok(d) => (Status::Pass, d),
            Err(d) => (Status::Fail, d),
        };
        self.outcomes.push(CheckOutcome { name, status, detail });
    }

    fn skip(&mut self, name: &'static str, why: &str) {
        self.outcomes.push(CheckOutcome { name, status: Status::Skipped, detail: why.to_string() });
    }

    /// One line per check: `PASS name: detail`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let tag = match o.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("{tag} {}: {}\n", o.name, o.detail));
        }
        out
    }
}

fn value_of(body: &IntersectionBody, x: &[Rat]) -> Result<Rat, String> {
    match body.evaluate_radial(x).map_err(|e| e.to_string())? {
        RadialValue::Finite(r) => Ok(r),
        RadialValue::Infinite => Err("infinite value at a nonzero point".into()),
    }
}

fn oracle_equality(body: &IntersectionBody, samples: usize, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let p = body.polytope();
    let mut points = 0usize;
    for c in body.chambers() {
        let mut xs = vec![c.witness.clone()];
        xs.extend((0..samples).map(|_| random_interior_point(c, rng)));
        for x in xs {
            let piece = &body.pieces()[c.id];
            let got = if piece.is_zero { Rat::zero() } else { piece.evaluate(&x).ok_or("q vanishes")? };
            let want = oracle::radial_value(p, &x, body.mode()).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("chamber {} at {:?}: piece gives {got}, direct volume gives {want}", c.id, x));
            }
            points += 1;
        }
    }
    Ok(format!("{points} points"))
}

fn divisibility(body: &IntersectionBody) -> Result<String, String> {
    let d = body.polytope().dim();
    let norm = Poly::norm_sq(d);
    for sc in body.combinatorics() {
        let asm = assemble(body.polytope(), sc).map_err(|e| e.to_string())?;
        if asm.raw.exact_divide(&norm).map_err(|e| e.to_string())?.is_none() {
            return Err(format!("chamber {}: raw numerator not divisible by ‖x‖²", sc.chamber));
        }
    }
    Ok(format!("{} chambers", body.chambers().len()))
}

fn homogeneity(body: &IntersectionBody) -> Result<String, String> {
    for piece in body.pieces().iter().filter(|p| !p.is_zero) {
        let (Some(dp), Some(dq)) = (piece.p_tilde.is_homogeneous(), piece.q.is_homogeneous()) else {
            return Err(format!("chamber {}: inhomogeneous piece", piece.chamber));
        };
        if dq != dp + 1 {
            return Err(format!("chamber {}: deg p̃ = {dp}, deg q = {dq}", piece.chamber));
        }
    }
    Ok("deg q = deg p̃ + 1 on every nonzero piece".into())
}

fn wall_continuity(body: &IntersectionBody, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let walls = body.walls();
    for w in &walls {
        let x = random_wall_point(body.normals(), body.chambers(), w, rng);
        let values: Vec<Option<Rat>> = incident_chambers(body.normals(), body.chambers(), &x)
            .into_iter()
            .map(|id| body.pieces()[id].evaluate(&x))
            .collect();
        if values.windows(2).any(|v| v[0] != v[1]) {
            return Err(format!("wall between chambers {} and {} at {:?}", w.a, w.b, x));
        }
    }
    Ok(format!("{} walls", walls.len()))
}

fn antipodal(body: &IntersectionBody, samples: usize, rng: &mut ChaCha8Rng) -> Result<String, String> {
    for c in body.chambers() {
        let mut xs = vec![c.witness.clone()];
        xs.extend((0..samples).map(|_| random_interior_point(c, rng)));
        for x in xs {
            if value_of(body, &x)? != value_of(body, &neg(&x))? {
                return Err(format!("ρ(x) ≠ ρ(−x) at {:?}", x));
            }
        }
    }
    Ok("ρ(−x) = ρ(x)".into())
}

fn exterior_apex(p: &VPolytope, rng: &mut ChaCha8Rng) -> RatVec {
    let r = p.vertices().iter().flatten().map(|x| to_f64(x).abs().ceil() as i64 + 1).max().unwrap_or(1);
    loop {
        let x: RatVec = (0..p.dim()).map(|_| Rat::from_integer(rng.gen_range(-3 * r..=3 * r).into())).collect();
        if !p.contains(&x) {
            return x;
        }
    }
}

fn pyramid_volumes(p: &VPolytope, count: usize, rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..count {
        let apex = exterior_apex(p, rng);
        if !oracle::lemma31_check(p, &apex).map_err(|e| e.to_string())? {
            return Err(format!("apex {:?}", apex));
        }
    }
    Ok(format!("{count} exterior apexes"))
}

/// Runs every applicable invariant; `samples` random points are drawn per
/// chamber in addition to its witness.
pub fn run_checks(body: &IntersectionBody, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::default();
    let p = body.polytope();
    report.record("oracle-equality", oracle_equality(body, samples, &mut rng));
    report.record("divisibility", divisibility(body));
    report.record("homogeneity", homogeneity(body));
    report.record(
        "degree-bounds",
        body.degree_table().map(|r| format!("global bound {}", r.global_bound)).map_err(|e| e.to_string()),
    );
    if p.classify_origin().position == OriginPosition::Interior {
        report.record("wall-continuity", wall_continuity(body, &mut rng));
    } else {
        report.skip("wall-continuity", "origin is not interior");
    }
    if p.is_centrally_symmetric() {
        report.record("antipodal-symmetry", antipodal(body, samples, &mut rng));
    } else {
        report.skip("antipodal-symmetry", "polytope is not centrally symmetric");
    }
    report.record("signed-pyramid-volume", pyramid_volumes(p, samples.clamp(1, 5), &mut rng));
    if p.dim() == 2 && p.is_centrally_symmetric() {
        let ok = oracle::rotate2d_check(body, samples.max(1) * 10, &mut rng);
        report.record(
            "planar-rotation-law",
            match ok {
                Ok(true) => Ok("ρ_IP(x) = λ·ρ_P(Rx)".into()),
                Ok(false) => Err("identity violated".into()),
                Err(e) => Err(e.to_string()),
            },
        );
    } else {
        report.skip("planar-rotation-law", "needs a centrally symmetric polygon");
    }
    report
}

/// The first invariant a stored result violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

fn violation(invariant: &'static str, detail: impl Into<String>) -> Violation {
    Violation { invariant, detail: detail.into() }
}

/// Replays a stored result against the polytope it claims to describe.
pub fn verify_result(p: &VPolytope, result: &ResultFile) -> Result<(), Violation> {
    if result.polytope.hash != polytope_hash(p) {
        return Err(violation("polytope-hash", "stored hash does not match the polytope"));
    }
    let mode = parse_mode(&result.mode).map_err(|e| violation("mode", e.to_string()))?;
    let normals = arrangement::build_normals(p).map_err(|e| violation("hyperplane-count", e.to_string()))?;
    if result.m != normals.m() {
        return Err(violation("hyperplane-count", format!("stored {}, recomputed {}", result.m, normals.m())));
    }
    let chambers = arrangement::enumerate_chambers(&normals).map_err(|e| violation("chamber-count", e.to_string()))?;
    if result.chambers.len() != chambers.len() {
        return Err(violation(
            "chamber-count",
            format!("stored {}, recomputed {}", result.chambers.len(), chambers.len()),
        ));
    }
    for (rec, c) in result.chambers.iter().zip(&chambers) {
        if rec.id != c.id || rec.signs != c.signs {
            return Err(violation("chamber-order", format!("record {} does not match chamber {}", rec.id, c.id)));
        }
        let w: Vec<Rat> = rec
            .witness
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<_, _>>()
            .map_err(|e| violation("witness", format!("chamber {}: {e}", rec.id)))?;
        if w.len() != p.dim() || normals.sign_vector(&w) != rec.signs {
            return Err(violation("witness", format!("chamber {}: witness is not inside its chamber", rec.id)));
        }
    }
    let pieces = result.pieces(p.dim()).map_err(|e| violation("polynomial-syntax", e.to_string()))?;
    for (rec, piece) in result.chambers.iter().zip(&pieces) {
        if piece.is_zero != piece.p_tilde.is_zero() {
            return Err(violation("zero-flag", format!("chamber {}", rec.id)));
        }
        if piece.is_zero {
            continue;
        }
        match (piece.p_tilde.is_homogeneous(), piece.q.is_homogeneous()) {
            (Some(dp), Some(dq)) if dq == dp + 1 => {}
            _ => return Err(violation("homogeneity", format!("chamber {}", rec.id))),
        }
        let expected = (&piece.q - &piece.p_tilde).normalized();
        if piece.boundary.as_ref() != Some(&expected) || expected.degree() != Some(piece.degree) {
            return Err(violation("boundary", format!("chamber {}: boundary is not normalize(q − p̃)", rec.id)));
        }
    }
    for (c, piece) in chambers.iter().zip(&pieces) {
        let got = if piece.is_zero {
            Rat::zero()
        } else {
            piece.evaluate(&c.witness).ok_or_else(|| violation("oracle-equality", "q vanishes at the witness"))?
        };
        let want = oracle::radial_value(p, &c.witness, mode).map_err(|e| violation("oracle-equality", e.to_string()))?;
        if got != want {
            return Err(violation("oracle-equality", format!("chamber {}: stored {got}, direct {want}", c.id)));
        }
    }
    let body = IntersectionBody::with_pieces(p.clone(), mode, pieces)
        .map_err(|e| violation("degree-bounds", e.to_string()))?;
    let report = body.degree_report();
    if report.histogram != result.degree_histogram {
        return Err(violation("degree-histogram", "histogram does not match the stored degrees"));
    }
    if report.f0_per_chamber != result.bounds.f0_per_chamber
        || report.global_bound != result.bounds.global
        || report.satisfied != result.bounds.satisfied
    {
        return Err(violation("degree-bounds", "stored bounds do not match"));
    }
    if !report.satisfied {
        return Err(violation("degree-bounds", "a degree exceeds its bound"));
    }
    Ok(())
}
