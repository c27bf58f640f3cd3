//! Dataset manifests, the synthetic corpus, experiment runs and parameter sweeps.

mod experiment;
mod manifest;
mod plot;
mod sweep;
mod synth;

pub use experiment::{
    evaluate, predict, prepare_corpus, run_experiment, stratified_split, Corpus, ExperimentConfig, Method, OptimizerSettings, Prediction,
};
pub use manifest::{DatasetManifest, ManifestRow, Sex};
pub use plot::{render_metric_plot, PLOTTED_METRICS};
pub use sweep::{sweep, write_sweep, CellFailure, SweepGrid, SweepOutcome};
pub use synth::{generate_synthetic, ClassVoice, SyntheticSpec};

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::audio::AudioError;
use crate::clustering::ClusterError;
use crate::features::FeatureError;
use crate::metrics::MetricError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} usable clips, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("every prediction falls in one class; geometric indices are undefined")]
    DegeneratePrediction,
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Io { .. } => "io_failure",
            HarnessError::Manifest { .. } => "manifest",
            HarnessError::InvalidConfig(_) => "invalid_config",
            HarnessError::InsufficientData { .. } => "insufficient_data",
            HarnessError::DegeneratePrediction => "degenerate_prediction",
            HarnessError::Audio(_) => "audio",
            HarnessError::Feature(_) => "feature",
            HarnessError::Cluster(_) => "clustering",
            HarnessError::Metric(_) => "metric",
            HarnessError::Csv(_) => "csv",
            HarnessError::Json(_) => "json",
        }
    }

    /// `{"error": kind, "message": text}` for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wire<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Wire {
            error: self.kind(),
            message: self.to_string(),
        })
        .expect("strings serialize")
    }
}
