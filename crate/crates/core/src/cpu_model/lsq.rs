//! Dense least squares by Householder QR.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LsqError {
    #[error("underdetermined system: {rows} rows for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("design matrix is rank deficient (column {0})")]
    RankDeficient(usize),
    #[error("non-finite value in system")]
    NonFinite,
}

/// Minimizes `‖A·x − b‖² + λ‖x‖²` over `x`.
///
/// `rows` holds the rows of `A`, all of length `cols`. A positive `ridge`
/// appends `√λ·I` below `A`, which also makes the system solvable with fewer
/// rows than unknowns.
pub fn solve(rows: &[Vec<f64>], b: &[f64], cols: usize, ridge: f64) -> Result<Vec<f64>, LsqError> {
    assert_eq!(rows.len(), b.len(), "row/target length mismatch");
    if cols == 0 {
        return Ok(Vec::new());
    }
    let extra = if ridge > 0.0 { cols } else { 0 };
    let m = rows.len() + extra;
    if m < cols {
        return Err(LsqError::Underdetermined {
            rows: rows.len(),
            cols,
        });
    }

    // Column-major copy of the (possibly augmented) system.
    let mut a = vec![vec![0.0; m]; cols];
    let mut y = vec![0.0; m];
    for (i, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), cols);
        for (j, v) in row.iter().enumerate() {
            a[j][i] = *v;
        }
        y[i] = b[i];
    }
    if extra > 0 {
        let s = ridge.sqrt();
        for j in 0..cols {
            a[j][rows.len() + j] = s;
        }
    }
    if a.iter().flatten().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(LsqError::NonFinite);
    }

    let col_norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut diag = vec![0.0; cols];
    for k in 0..cols {
        let alpha = {
            let n = norm(&a[k][k..]);
            if a[k][k] > 0.0 {
                -n
            } else {
                n
            }
        };
        diag[k] = alpha;
        // Rank test relative to the original column scale.
        if alpha.abs() <= 1e-12 * col_norms[k].max(f64::MIN_POSITIVE) * (m as f64) {
            return Err(LsqError::RankDeficient(k));
        }
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(k + 1) {
            apply_reflector(&v, vnorm2, &mut col[k..]);
        }
        apply_reflector(&v, vnorm2, &mut y[k..]);
    }

    // Back substitution on R x = Qᵀy.
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut acc = y[k];
        for j in k + 1..cols {
            acc -= a[j][k] * x[j];
        }
        x[k] = acc / diag[k];
    }
    Ok(x)
}

fn norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow on large counts.
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

fn apply_reflector(v: &[f64], vnorm2: f64, target: &mut [f64]) {
    let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= f * vi;
    }
}
