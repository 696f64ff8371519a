use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{BodyError, IntersectionBody};
use crate::arrangement::{incident_chambers, locate, Location};
use crate::linalg::Rat;
use crate::polytope::OriginPosition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadialValue {
    Finite(Rat),
    /// ρ(0) when the origin lies in P.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::Inside => "inside",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        }
    }

    pub fn contains(self) -> bool {
        self != Membership::Outside
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    /// Boundary degree → number of nonzero chambers.
    pub histogram: BTreeMap<u32, usize>,
    /// Vertex count of the section polytope on each chamber.
    pub f0_per_chamber: Vec<usize>,
    /// f₁(P) − (d−1), halved when P = −P.
    pub global_bound: usize,
    pub satisfied: bool,
}

impl IntersectionBody {
    fn check_point(&self, x: &[Rat]) -> Result<(), BodyError> {
        let d = self.polytope.dim();
        if x.len() != d {
            return Err(BodyError::PointDimension { found: x.len(), expected: d });
        }
        Ok(())
    }

    /// ρ(x) = p̃(x)/q(x) on the chamber of x. On walls the maximum over the
    /// incident nonzero pieces is taken; ρ(0) is ∞ when 0 ∈ P and 0 otherwise.
    pub fn evaluate_radial(&self, x: &[Rat]) -> Result<RadialValue, BodyError> {
        self.check_point(x)?;
        if x.iter().all(Zero::is_zero) {
            let inside = self.polytope.classify_origin().position != OriginPosition::Exterior;
            return Ok(if inside { RadialValue::Infinite } else { RadialValue::Finite(Rat::zero()) });
        }
        let value = match locate(&self.normals, &self.chambers, x)? {
            Location::Chamber(id) => {
                let piece = &self.pieces[id];
                if piece.is_zero {
                    Rat::zero()
                } else {
                    piece.evaluate(x).ok_or_else(|| BodyError::InvalidCombinatorics {
                        chamber: id,
                        reason: "q vanishes inside the chamber".into(),
                    })?
                }
            }
            Location::OnWall(_) => incident_chambers(&self.normals, &self.chambers, x)
                .into_iter()
                .filter(|&id| !self.pieces[id].is_zero)
                .filter_map(|id| self.pieces[id].evaluate(x))
                .max()
                .unwrap_or_else(Rat::zero),
        };
        Ok(RadialValue::Finite(value))
    }

    /// Classifies x against IP via ρ(x) ≥ 1.
    pub fn membership(&self, x: &[Rat]) -> Result<Membership, BodyError> {
        Ok(match self.evaluate_radial(x)? {
            RadialValue::Infinite => Membership::Inside,
            RadialValue::Finite(r) => match r.cmp(&Rat::one()) {
                std::cmp::Ordering::Greater => Membership::Inside,
                std::cmp::Ordering::Equal => Membership::Boundary,
                std::cmp::Ordering::Less => Membership::Outside,
            },
        })
    }

    /// f₁(P) − (d−1), halved (rounded down) for centrally symmetric P.
    pub fn degree_bound(&self) -> usize {
        let (_, f1) = self.polytope.f01();
        let b = f1.saturating_sub(self.polytope.dim() - 1);
        if self.polytope.is_centrally_symmetric() {
            b / 2
        } else {
            b
        }
    }

    /// Degree histogram with bound checks; a violated bound is an error.
    pub fn degree_table(&self) -> Result<DegreeReport, BodyError> {
        let report = self.degree_report();
        for (piece, sc) in self.pieces.iter().zip(&self.combinatorics) {
            if piece.is_zero {
                continue;
            }
            let bound = sc.f0.min(report.global_bound);
            if piece.degree as usize > bound {
                return Err(BodyError::DegreeBound { chamber: piece.chamber, degree: piece.degree, bound });
            }
        }
        Ok(report)
    }

    /// Degree histogram and bounds without failing on violations.
    pub fn degree_report(&self) -> DegreeReport {
        let mut histogram = BTreeMap::new();
        for p in self.pieces.iter().filter(|p| !p.is_zero) {
            *histogram.entry(p.degree).or_insert(0) += 1;
        }
        let f0_per_chamber: Vec<usize> = self.combinatorics.iter().map(|sc| sc.f0).collect();
        let global_bound = self.degree_bound();
        let satisfied = self
            .pieces
            .iter()
            .zip(&f0_per_chamber)
            .all(|(p, &f0)| p.is_zero || (p.degree as usize <= f0 && p.degree as usize <= global_bound));
        DegreeReport { histogram, f0_per_chamber, global_bound, satisfied }
    }
}
