//! Strict-feasibility linear program for open polyhedral cones.
//!
//! maximize t subject to s_i·<n_i, x> >= t, -1 <= x_j <= 1, t >= 0.
//!
//! The free vector x is split as x = x⁺ - x⁻ with 0 <= x⁺, x⁻ <= 1 so every
//! right-hand side is nonnegative and the all-slack basis is feasible. Dense
//! tableau, Bland's rule.

use num_traits::{One, Signed, Zero};

use super::{dot, LinalgError, Rat, RatVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginSolution {
    pub point: RatVec,
    pub margin: Rat,
}

impl MarginSolution {
    /// True when the open cone is nonempty.
    pub fn is_strict(&self) -> bool {
        self.margin.is_positive()
    }
}

/// Solves the margin LP for constraints `(normal, sign)`; `sign` is `+1` or `-1`.
pub fn max_margin_point(rows: &[(RatVec, i8)]) -> Result<MarginSolution, LinalgError> {
    let Some((first, _)) = rows.first() else {
        return Err(LinalgError::Precondition("empty constraint sequence".into()));
    };
    let d = first.len();
    for (n, s) in rows {
        if n.len() != d {
            return Err(LinalgError::Dimension(format!(
                "normal of length {} in dimension {d}",
                n.len()
            )));
        }
        if n.iter().all(Zero::is_zero) {
            return Err(LinalgError::Precondition("zero normal".into()));
        }
        if *s != 1 && *s != -1 {
            return Err(LinalgError::Precondition(format!("sign {s} is not ±1")));
        }
    }

    let k = rows.len();
    let n_struct = 2 * d + 1;
    let t_col = 2 * d;
    let m = k + 2 * d;
    let n_cols = n_struct + m;
    // row layout: n_cols coefficients followed by the rhs
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (normal, s) in rows {
        let mut row = vec![Rat::zero(); n_cols + 1];
        for j in 0..d {
            let c = if *s > 0 { normal[j].clone() } else { -&normal[j] };
            row[j] = -&c;
            row[d + j] = c;
        }
        row[t_col] = Rat::one();
        tab.push(row);
    }
    for j in 0..2 * d {
        let mut row = vec![Rat::zero(); n_cols + 1];
        row[j] = Rat::one();
        row[n_cols] = Rat::one();
        tab.push(row);
    }
    for (i, row) in tab.iter_mut().enumerate() {
        row[n_struct + i] = Rat::one();
    }
    let mut basis: Vec<usize> = (n_struct..n_cols).collect();
    // reduced costs; objective value kept in the last slot (negated)
    let mut obj = vec![Rat::zero(); n_cols + 1];
    obj[t_col] = Rat::one();

    while let Some(enter) = (0..n_cols).find(|&j| obj[j].is_positive()) {
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[n_cols] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            // cannot happen: t is bounded by the box
            return Err(LinalgError::Precondition("unbounded margin program".into()));
        };
        pivot(&mut tab, &mut obj, r, enter);
        basis[r] = enter;
    }

    let mut values = vec![Rat::zero(); n_struct];
    for (i, &b) in basis.iter().enumerate() {
        if b < n_struct {
            values[b] = tab[i][n_cols].clone();
        }
    }
    let point: RatVec = (0..d).map(|j| &values[j] - &values[d + j]).collect();
    // recompute the margin from the point so it is exactly min_i s_i<n_i,x>
    let margin = rows
        .iter()
        .map(|(n, s)| if *s > 0 { dot(n, &point) } else { -dot(n, &point) })
        .min()
        .expect("nonempty");
    debug_assert!(margin >= values[t_col]);
    Ok(MarginSolution { point, margin })
}

fn pivot(tab: &mut [Vec<Rat>], obj: &mut [Rat], r: usize, c: usize) {
    let inv = tab[r][c].recip();
    for x in tab[r].iter_mut() {
        if !x.is_zero() {
            *x *= &inv;
        }
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (x, p) in obj.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, rat_vec};

    #[test]
    fn halfspace() {
        let sol = max_margin_point(&[(rat_vec(&[1, 0]), 1)]).unwrap();
        assert_eq!(sol.margin, rat(1));
        assert_eq!(sol.point[0], rat(1));
        assert!(sol.point[1].abs() <= rat(1));
    }

    #[test]
    fn contradictory_signs() {
        let sol = max_margin_point(&[(rat_vec(&[1, 0]), 1), (rat_vec(&[1, 0]), -1)]).unwrap();
        assert!(!sol.is_strict());
    }

    #[test]
    fn empty_is_error() {
        assert!(max_margin_point(&[]).is_err());
        assert!(max_margin_point(&[(rat_vec(&[0, 0]), 1)]).is_err());
    }

    #[test]
    fn cube_vertex_sign_pattern() {
        // the 7 nonzero vertices of [0,2]^3 scaled down, i.e. vertex directions of the
        // cube up to ±, all positive at (1,2,3)
        let dirs: [[i64; 3]; 7] =
            [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]];
        let target = rat_vec(&[1, 2, 3]);
        let rows: Vec<(RatVec, i8)> = dirs
            .iter()
            .map(|v| {
                let n = rat_vec(v);
                let s = crate::linalg::sign(&dot(&n, &target));
                (n, s)
            })
            .collect();
        assert!(rows.iter().all(|(_, s)| *s == 1));
        let sol = max_margin_point(&rows).unwrap();
        assert!(sol.is_strict());
        for (n, s) in &rows {
            let v = dot(n, &sol.point) * rat(*s as i64);
            assert!(v >= sol.margin);
        }
    }

    #[test]
    fn centered_cube_normals_mixed_pattern() {
        let normals = [[1, 1, 1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]];
        let x = rat_vec(&[-1, 2, 4]);
        let rows: Vec<(RatVec, i8)> = normals
            .iter()
            .map(|v| {
                let n = rat_vec(v);
                let s = crate::linalg::sign(&dot(&n, &x));
                (n, s)
            })
            .collect();
        let sol = max_margin_point(&rows).unwrap();
        assert!(sol.is_strict());
        for (n, s) in &rows {
            assert_eq!(crate::linalg::sign(&dot(n, &sol.point)), *s);
        }
    }
}
