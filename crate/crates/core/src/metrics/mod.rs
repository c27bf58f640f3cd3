//! Cluster validity indices, partition agreement scores and least-squares statistics.
//!
//! Distances are Euclidean throughout. Davies-Bouldin follows the usual lower-is-better
//! definition.

mod indices;
mod regression;

pub use indices::{davies_bouldin, dunn_index, homogeneity_completeness, jaccard_similarity, silhouette};
pub use regression::{ols_regression, simple_regression, RegressionStats};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("not enough samples")]
    Empty,
    #[error("need at least 2 non-empty clusters, got {0}")]
    TooFewClusters(usize),
    #[error("assignment refers to missing cluster {0}")]
    UnknownCluster(usize),
    #[error("clusters {0} and {1} share a centroid")]
    DegenerateClusters(usize, usize),
    #[error("every cluster has zero diameter")]
    ZeroDiameter,
    #[error("design matrix is singular")]
    SingularDesign,
    #[error("{n} observations cannot fit {predictors} predictors plus an intercept")]
    TooFewObservations { n: usize, predictors: usize },
}

/// One evaluation of a trained pipeline. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub davies_bouldin: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub jaccard: f64,
    pub silhouette: f64,
    pub dunn: f64,
    pub accuracy: f64,
    pub seed: u64,
    pub training_percent: u32,
    pub epochs: u32,
    pub method: String,
    /// Clips dropped before training because no frame was voiced.
    pub skipped_clips: usize,
}

impl EvaluationReport {
    /// True when every score is finite and inside its documented range.
    pub fn in_range(&self) -> bool {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        self.davies_bouldin.is_finite()
            && self.davies_bouldin >= 0.0
            && unit(self.homogeneity)
            && unit(self.completeness)
            && unit(self.jaccard)
            && (-1.0..=1.0).contains(&self.silhouette)
            && self.dunn.is_finite()
            && self.dunn >= 0.0
            && unit(self.accuracy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }

    /// Writes `reports` as CSV with a header row.
    pub fn write_csv<'a>(reports: impl IntoIterator<Item = &'a EvaluationReport>, out: impl std::io::Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in reports {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> EvaluationReport {
        EvaluationReport {
            davies_bouldin: 0.5,
            homogeneity: 0.8,
            completeness: 0.7,
            jaccard: 0.6,
            silhouette: 0.3,
            dunn: 0.9,
            accuracy: 0.75,
            seed: 7,
            training_percent: 90,
            epochs: 10,
            method: "ffi_fusion".into(),
            skipped_clips: 0,
        }
    }

    #[test]
    fn csv_column_order() {
        let mut buf = Vec::new();
        EvaluationReport::write_csv([&report()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "davies_bouldin,homogeneity,completeness,jaccard,silhouette,dunn,accuracy,seed,training_percent,epochs,method,skipped_clips"
        );
        assert_eq!(lines.next().unwrap(), "0.5,0.8,0.7,0.6,0.3,0.9,0.75,7,90,10,ffi_fusion,0");
    }

    #[test]
    fn json_roundtrip_and_order() {
        let r = report();
        let text = r.to_json();
        assert!(text.find("davies_bouldin").unwrap() < text.find("accuracy").unwrap());
        assert_eq!(serde_json::from_str::<EvaluationReport>(&text).unwrap(), r);
    }

    #[test]
    fn range_check() {
        assert!(report().in_range());
        let mut r = report();
        r.silhouette = f64::NAN;
        assert!(!r.in_range());
    }
}
