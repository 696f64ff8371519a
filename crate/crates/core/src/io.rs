//! JSON polytope input, JSON result files, and the OBJ/DOT writers.
//!
//! Rationals are always serialized as strings ("4/3", "-2"); polynomials use
//! the canonical text rendering of [`Poly`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::body::{ChamberPiece, IntersectionBody, Mode};
use crate::linalg::{parse_rat, Rat, RatVec};
use crate::poly::{parse_poly, Poly, PolyError};
use crate::polytope::{PolytopeError, VPolytope};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex {vertex}, coordinate {coord}: irrational coordinates unsupported ({text})")]
    Irrational { vertex: usize, coord: usize, text: String },
    #[error("vertex {vertex}, coordinate {coord}: expected an integer or a \"p/q\" string, got {text}")]
    Coordinate { vertex: usize, coord: usize, text: String },
    #[error("vertex {vertex} has {found} coordinates but dimension is {expected}")]
    Dimension { vertex: usize, found: usize, expected: usize },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("unknown mode {0:?} (expected \"true-volume\" or \"paper\")")]
    Mode(String),
    #[error("chamber {chamber}: {source}")]
    Poly { chamber: usize, source: PolyError },
}

/// `{"dimension": d, "vertices": [[…], …], "name": …}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dimension: usize,
    pub vertices: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn parse_coordinate(v: &Value, vertex: usize, coord: usize) -> Result<Rat, InputError> {
    let text = v.to_string();
    let irrational = || InputError::Irrational { vertex, coord, text: text.clone() };
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            parse_rat(&n.to_string()).map_err(|_| InputError::Coordinate { vertex, coord, text: text.clone() })
        }
        Value::Number(_) => Err(irrational()),
        Value::String(s) => parse_rat(s).map_err(|_| {
            let looks_real = s.contains(['.', 'e', 'E']) || s.contains("sqrt") || s.contains('√');
            if looks_real {
                irrational()
            } else {
                InputError::Coordinate { vertex, coord, text: text.clone() }
            }
        }),
        _ => Err(InputError::Coordinate { vertex, coord, text: text.clone() }),
    }
}

impl PolytopeFile {
    pub fn from_json(s: &str) -> Result<PolytopeFile, InputError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_polytope(p: &VPolytope, name: Option<&str>) -> PolytopeFile {
        PolytopeFile {
            dimension: p.dim(),
            vertices: p.vertices().iter().map(|v| v.iter().map(|x| Value::String(x.to_string())).collect()).collect(),
            name: name.map(str::to_string),
        }
    }

    pub fn to_polytope(&self) -> Result<VPolytope, InputError> {
        let mut vertices: Vec<RatVec> = Vec::with_capacity(self.vertices.len());
        for (i, row) in self.vertices.iter().enumerate() {
            if row.len() != self.dimension {
                return Err(InputError::Dimension { vertex: i, found: row.len(), expected: self.dimension });
            }
            vertices.push(row.iter().enumerate().map(|(j, v)| parse_coordinate(v, i, j)).collect::<Result<_, _>>()?);
        }
        Ok(VPolytope::new(vertices)?)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }
}

/// SHA-256 over `d` followed by one line per vertex, coordinates as rational strings.
pub fn polytope_hash(p: &VPolytope) -> String {
    let mut h = Sha256::new();
    h.update(p.dim().to_string().as_bytes());
    for v in p.vertices() {
        h.update(b"\n");
        h.update(v.iter().map(Rat::to_string).collect::<Vec<_>>().join(" ").as_bytes());
    }
    hex::encode(h.finalize())
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::TrueVolume => "true-volume",
        Mode::Paper => "paper",
    }
}

pub fn parse_mode(s: &str) -> Result<Mode, InputError> {
    match s {
        "true-volume" | "true" => Ok(Mode::TrueVolume),
        "paper" => Ok(Mode::Paper),
        other => Err(InputError::Mode(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeId {
    pub name: String,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberRecord {
    pub id: usize,
    pub signs: Vec<i8>,
    pub witness: Vec<String>,
    pub rays: Vec<Vec<String>>,
    pub p_tilde: String,
    pub q: String,
    pub boundary: Option<String>,
    pub degree: u32,
    pub is_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub f0_per_chamber: Vec<usize>,
    pub global: usize,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub polytope: PolytopeId,
    pub mode: String,
    pub m: usize,
    pub chambers: Vec<ChamberRecord>,
    pub degree_histogram: BTreeMap<u32, usize>,
    pub bounds: Bounds,
}

fn rat_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(Rat::to_string).collect()
}

impl ResultFile {
    pub fn from_body(body: &IntersectionBody, name: &str) -> ResultFile {
        let report = body.degree_report();
        let chambers = body
            .chambers()
            .iter()
            .zip(body.pieces())
            .map(|(c, piece)| ChamberRecord {
                id: c.id,
                signs: c.signs.clone(),
                witness: rat_strings(&c.witness),
                rays: c.rays.iter().map(|r| rat_strings(r)).collect(),
                p_tilde: piece.p_tilde.to_string(),
                q: piece.q.to_string(),
                boundary: piece.boundary.as_ref().map(Poly::to_string),
                degree: piece.degree,
                is_zero: piece.is_zero,
            })
            .collect();
        ResultFile {
            polytope: PolytopeId { name: name.to_string(), hash: polytope_hash(body.polytope()) },
            mode: mode_name(body.mode()).to_string(),
            m: body.normals().m(),
            chambers,
            degree_histogram: report.histogram,
            bounds: Bounds {
                f0_per_chamber: report.f0_per_chamber,
                global: report.global_bound,
                satisfied: report.satisfied,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<ResultFile, InputError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Pieces re-parsed from the stored polynomial strings.
    pub fn pieces(&self, nvars: usize) -> Result<Vec<ChamberPiece>, InputError> {
        let mode = parse_mode(&self.mode)?;
        self.chambers
            .iter()
            .map(|c| {
                let parse = |s: &str| parse_poly(s, nvars).map_err(|source| InputError::Poly { chamber: c.id, source });
                Ok(ChamberPiece {
                    chamber: c.id,
                    p_tilde: parse(&c.p_tilde)?,
                    q: parse(&c.q)?,
                    boundary: c.boundary.as_deref().map(parse).transpose()?,
                    degree: c.degree,
                    is_zero: c.is_zero,
                    mode,
                })
            })
            .collect()
    }
}

/// DOT adjacency graph with every chamber labeled by its boundary degree (0 on zero pieces).
pub fn degree_graph_dot(body: &IntersectionBody) -> String {
    let labels: Vec<String> = body.pieces().iter().map(|p| p.degree.to_string()).collect();
    crate::arrangement::to_dot(body.chambers(), &body.walls(), Some(&labels))
}
