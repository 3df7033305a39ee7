//! Dense linear least squares via Householder QR, with an SVD condition estimate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Designs whose 2-norm condition estimate exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub coefficients: Vec<f64>,
    /// Residuals `y - X c`, one per row.
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
    pub residual_norm: f64,
    /// Ratio of largest to smallest singular value of the design matrix.
    pub condition: f64,
}

/// Solves `min ||X c - y||` for a row-major design of `n_cols` columns.
pub fn solve(rows: &[Vec<f64>], targets: &[f64], n_cols: usize) -> Result<LsqSolution> {
    let n_rows = rows.len();
    if n_rows != targets.len() {
        return Err(Error::domain(format!(
            "{} design rows but {} targets",
            n_rows,
            targets.len()
        )));
    }
    if n_rows < n_cols {
        return Err(Error::domain(format!(
            "need at least {n_cols} samples, got {n_rows}"
        )));
    }
    let x = DMatrix::from_fn(n_rows, n_cols, |i, j| rows[i][j]);
    let y = DVector::from_column_slice(targets);

    let sv = x.singular_values();
    let s_max = sv.max();
    let s_min = sv.min();
    let condition = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::RankDeficient {
            condition,
            limit: CONDITION_LIMIT,
        });
    }

    let qr = x.clone().qr();
    let qty = qr.q().transpose() * &y;
    let r = qr.r();
    let c = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient {
        condition: f64::INFINITY,
        limit: CONDITION_LIMIT,
    })?;

    let resid = &y - &x * &c;
    let residual_norm = resid.norm();
    Ok(LsqSolution {
        coefficients: c.iter().copied().collect(),
        residuals: resid.iter().copied().collect(),
        rms_residual: residual_norm / (n_rows as f64).sqrt(),
        residual_norm,
        condition,
    })
}
