//! Exact intersection bodies of polytopes with rational vertices.
//!
//! The radial function of the intersection body is piecewise rational over the
//! chambers of the central arrangement {v⊥ : v a vertex}. This crate enumerates
//! those chambers, computes each rational piece symbolically, extracts boundary
//! polynomials with their degrees, and checks everything against a direct
//! section-volume computation.

pub mod catalog;
pub mod linalg;
pub mod poly;
pub mod polytope;
pub mod triangulate;
pub mod arrangement;
pub mod body;
pub mod oracle;
pub mod io;
pub mod verify;
