//! Reference least-squares solver through the normal equations.
//!
//! Forms `XᵀX c = Xᵀy` explicitly and solves it by Gaussian elimination with
//! partial pivoting. It shares no code with the QR path in [`super::lsq`] and
//! exists to cross-check it (tests and `acm oracle lsq`).

use super::{FittedCpu, OperatorObservation, FEATURES};

/// Solves the normal equations of an `n × p` system. Returns `None` when the
/// Gram matrix is singular to working precision.
pub fn normal_equations(rows: &[Vec<f64>], y: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut gram = vec![vec![0.0; p + 1]; p];
    for (row, target) in rows.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                gram[i][j] += row[i] * row[j];
            }
            gram[i][p] += row[i] * target;
        }
    }
    let scale = (0..p).fold(0.0f64, |m, i| m.max(gram[i][i].abs()));
    for col in 0..p {
        let pivot = (col..p).max_by(|&a, &b| gram[a][col].abs().total_cmp(&gram[b][col].abs()))?;
        if gram[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        gram.swap(col, pivot);
        let pivot_row = gram[col].clone();
        for (r, row) in gram.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * pv;
                }
            }
        }
    }
    Some((0..p).map(|i| gram[i][p] / gram[i][i]).collect())
}

/// Oracle counterpart of [`super::fit`]: same target and column rules,
/// unclamped coefficients.
pub fn fit_observations(obs: &[OperatorObservation], scale_factor: f64) -> Option<FittedCpu> {
    let active: Vec<usize> = (0..FEATURES)
        .filter(|&j| obs.iter().any(|o| o.features()[j] != 0.0))
        .collect();
    if obs.len() < active.len() {
        return None;
    }
    let rows: Vec<Vec<f64>> = obs
        .iter()
        .map(|o| active.iter().map(|&j| o.features()[j]).collect())
        .collect();
    let y: Vec<f64> = obs
        .iter()
        .map(|o| o.exec_time * scale_factor - o.disk_cost)
        .collect();
    let sol = normal_equations(&rows, &y, active.len())?;
    let mut out = [None; FEATURES];
    for (k, &j) in active.iter().enumerate() {
        out[j] = Some(sol[k]);
    }
    Some(FittedCpu {
        c_t: out[0],
        c_o: out[1],
        c_i: out[2],
    })
}
