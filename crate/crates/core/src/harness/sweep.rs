use std::fs;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::{evaluate, prepare_corpus, ExperimentConfig};
use super::plot::{render_metric_plot, PLOTTED_METRICS};
use super::{DatasetManifest, HarnessError};
use crate::metrics::EvaluationReport;

/// Cartesian grid of training shares and epoch counts around a base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepGrid {
    pub base: ExperimentConfig,
    pub training_percents: Vec<u32>,
    pub epochs: Vec<u32>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            base: ExperimentConfig::default(),
            training_percents: vec![40, 50, 60, 70, 80, 90],
            epochs: vec![10, 20, 30, 40, 50],
        }
    }
}

impl SweepGrid {
    /// Cells in row-major order (training share outer, epochs inner) with their ids.
    pub fn cells(&self) -> Vec<(String, ExperimentConfig)> {
        self.training_percents
            .iter()
            .flat_map(|&tp| {
                self.epochs.iter().map(move |&ep| {
                    let cfg = ExperimentConfig {
                        training_percent: tp,
                        epochs: ep,
                        ..self.base.clone()
                    };
                    (cell_id(tp, ep), cfg)
                })
            })
            .collect()
    }
}

pub(crate) fn cell_id(training_percent: u32, epochs: u32) -> String {
    format!("tp{training_percent}_ep{epochs}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: String,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// Successful cells in grid order.
    pub reports: Vec<EvaluationReport>,
    pub failures: Vec<CellFailure>,
}

/// Runs every grid cell. Features are extracted once; cells run in parallel and a failing cell
/// is recorded without stopping the others.
pub fn sweep(manifest: &DatasetManifest, grid: &SweepGrid) -> Result<SweepOutcome, HarnessError> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(HarnessError::InvalidConfig("empty sweep grid".into()));
    }
    let corpus = prepare_corpus(manifest, &grid.base.preprocess, &grid.base.features)?;
    let results: Vec<(String, Result<EvaluationReport, HarnessError>)> = cells
        .into_par_iter()
        .map(|(id, cfg)| {
            let r = evaluate(&corpus, &cfg);
            (id, r)
        })
        .collect();
    info!("evaluated {} sweep cells", results.len());
    let mut out = SweepOutcome::default();
    for (cell, r) in results {
        match r {
            Ok(report) => out.reports.push(report),
            Err(e) => {
                warn!("sweep cell {cell} failed: {e}");
                out.failures.push(CellFailure {
                    cell,
                    kind: e.kind().into(),
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

/// Writes `sweep.csv`, `failures.json` and, if asked, one SVG per metric under `plots/`.
pub fn write_sweep(outcome: &SweepOutcome, out_dir: impl AsRef<Path>, plots: bool) -> Result<(), HarnessError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    let csv_path = out_dir.join("sweep.csv");
    let file = fs::File::create(&csv_path).map_err(HarnessError::io(&csv_path))?;
    EvaluationReport::write_csv(&outcome.reports, file)?;

    let failures_path = out_dir.join("failures.json");
    let text = serde_json::to_string_pretty(&outcome.failures)?;
    fs::write(&failures_path, text + "\n").map_err(HarnessError::io(&failures_path))?;

    if plots {
        let dir = out_dir.join("plots");
        fs::create_dir_all(&dir).map_err(HarnessError::io(&dir))?;
        for metric in PLOTTED_METRICS {
            let path = dir.join(format!("{metric}.svg"));
            fs::write(&path, render_metric_plot(metric, &outcome.reports)).map_err(HarnessError::io(&path))?;
        }
    }
    Ok(())
}
