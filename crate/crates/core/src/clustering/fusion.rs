use super::{BpClass, ClusterError, ClusterModel};

const ROW_TOLERANCE: f64 = 1e-9;

/// Non-negative rows that each sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    rows: Vec<Vec<f64>>,
    cols: usize,
}

impl MembershipMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ClusterError> {
        let cols = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            let invalid = |reason: String| ClusterError::InvalidMembership { row: i, reason };
            if r.len() != cols {
                return Err(invalid(format!("{} columns, expected {cols}", r.len())));
            }
            if r.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(invalid(format!("entries {r:?}")));
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(invalid(format!("sums to {sum}")));
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols)
    }
}

/// Per-class membership of each point: soft cluster memberships summed over the clusters
/// mapped to each class. Requires a class map on the model.
pub fn class_memberships(model: &ClusterModel, data: &[Vec<f64>]) -> Result<MembershipMatrix, ClusterError> {
    let map = model.class_map().ok_or(ClusterError::EmptyModel)?;
    let rows = data
        .iter()
        .map(|p| {
            let mut row = vec![0.0; BpClass::ALL.len()];
            for (w, c) in model.soft_membership(p).into_iter().zip(map) {
                row[c.index()] += w;
            }
            row
        })
        .collect();
    MembershipMatrix::new(rows)
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Row-wise product of two class-aligned memberships, renormalized.
///
/// The class is the largest column (ties to the lower index). Rows whose product vanishes
/// take `second`'s row.
pub fn fuse(first: &MembershipMatrix, second: &MembershipMatrix) -> Result<(MembershipMatrix, Vec<BpClass>), ClusterError> {
    if first.shape() != second.shape() {
        return Err(ClusterError::ShapeMismatch(first.shape(), second.shape()));
    }
    let mut classes = Vec::with_capacity(first.rows.len());
    let rows: Vec<Vec<f64>> = first
        .rows
        .iter()
        .zip(&second.rows)
        .map(|(a, b)| {
            let product: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
            let total: f64 = product.iter().sum();
            let row = if total > 0.0 {
                product.into_iter().map(|x| x / total).collect()
            } else {
                b.clone()
            };
            classes.push(argmax(&row));
            row
        })
        .collect();
    let classes = classes
        .into_iter()
        .map(|i| BpClass::from_index(i).expect("three class columns"))
        .collect();
    Ok((MembershipMatrix::new(rows)?, classes))
}
