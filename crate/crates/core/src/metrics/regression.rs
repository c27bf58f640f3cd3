use serde::Serialize;

use super::MetricError;

/// Pivots below this fraction of the largest diagonal entry count as singular.
const SINGULAR_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionStats {
    pub multiple_r: f64,
    pub r_square: f64,
    pub adjusted_r_square: f64,
    pub standard_error: f64,
    pub observations: usize,
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

/// Solves `a · x = b` in place by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, MetricError> {
    let p = b.len();
    let scale = (0..p).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).expect("non-empty");
        if !(a[pivot][col].abs() > SINGULAR_RELATIVE * scale) {
            return Err(MetricError::SingularDesign);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..p {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (t, v) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *t -= f * v;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; p];
    for row in (0..p).rev() {
        let tail: f64 = (row + 1..p).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Least squares with an intercept; each row of `design` holds one observation's predictors.
///
/// The normal equations are formed on mean-centred columns, which keeps exact linear data
/// exact. A constant response has nothing to explain and reports `R² = 0`.
pub fn ols_regression(design: &[Vec<f64>], y: &[f64]) -> Result<RegressionStats, MetricError> {
    let n = y.len();
    if design.len() != n {
        return Err(MetricError::LengthMismatch(design.len(), n));
    }
    let p = design.first().map_or(0, Vec::len);
    if p == 0 || design.iter().any(|r| r.len() != p) {
        return Err(MetricError::SingularDesign);
    }
    if n <= p + 1 {
        return Err(MetricError::TooFewObservations { n, predictors: p });
    }
    let nf = n as f64;
    let x_mean: Vec<f64> = (0..p).map(|l| design.iter().map(|r| r[l]).sum::<f64>() / nf).collect();
    let y_mean = y.iter().sum::<f64>() / nf;

    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &yi) in design.iter().zip(y) {
        let centred: Vec<f64> = row.iter().zip(&x_mean).map(|(x, m)| x - m).collect();
        for a in 0..p {
            xty[a] += centred[a] * (yi - y_mean);
            for b in 0..p {
                xtx[a][b] += centred[a] * centred[b];
            }
        }
    }
    let slopes = solve(xtx, xty)?;
    let intercept = y_mean - slopes.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();

    let sse: f64 = design
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fit = intercept + row.iter().zip(&slopes).map(|(x, b)| x * b).sum::<f64>();
            (yi - fit).powi(2)
        })
        .sum();
    let sst: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let dof = (n - p - 1) as f64;
    let r_square = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else { 0.0 };
    Ok(RegressionStats {
        multiple_r: r_square.sqrt(),
        r_square,
        adjusted_r_square: 1.0 - (1.0 - r_square) * (nf - 1.0) / dof,
        standard_error: (sse / dof).sqrt(),
        observations: n,
        intercept,
        slopes,
    })
}

/// One-predictor convenience wrapper.
pub fn simple_regression(x: &[f64], y: &[f64]) -> Result<RegressionStats, MetricError> {
    let design: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    ols_regression(&design, y)
}
