use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use vocal_bp::features::{csv_header, impute_formants, mean_formants, FeatureConfig};
use vocal_bp::harness::{
    generate_synthetic, prepare_corpus, run_experiment, sweep, write_sweep, DatasetManifest, ExperimentConfig, HarnessError,
    SweepGrid, SyntheticSpec,
};
use vocal_bp::audio::PreprocessConfig;

#[derive(Parser)]
#[command(version, about = "Blood-pressure class estimation from speech recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a labelled corpus of WAV files plus manifest.csv.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and evaluate one configuration; writes the report as JSON.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a grid of training shares and epoch counts.
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write one SVG line plot per metric.
        #[arg(long)]
        plots: bool,
    },
    /// Dump the clip-level feature table as CSV.
    Features {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON with `preprocess` and `features` sections.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(serde::Deserialize, Default)]
#[serde(default)]
struct FeatureOnlyConfig {
    preprocess: PreprocessConfig,
    features: FeatureConfig,
}

fn features(manifest: &Path, out: &Path, config: Option<&Path>) -> Result<(), HarnessError> {
    let cfg: FeatureOnlyConfig = match config {
        Some(p) => read_json(p)?,
        None => FeatureOnlyConfig::default(),
    };
    let manifest = DatasetManifest::load(manifest)?;
    let corpus = prepare_corpus(&manifest, &cfg.preprocess, &cfg.features)?;
    let vectors = impute_formants(&corpus.features, mean_formants(&corpus.features));
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(csv_header())?;
    for (clip, v) in corpus.features.iter().zip(&vectors) {
        let mut record = vec![clip.id.clone()];
        record.extend(v.to_vec().iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Generate { spec, out } => {
            let spec: SyntheticSpec = read_json(&spec)?;
            generate_synthetic(&spec, &out)?;
        }
        Command::Run { manifest, config, out } => {
            let cfg: ExperimentConfig = read_json(&config)?;
            let report = run_experiment(&DatasetManifest::load(&manifest)?, &cfg)?;
            fs::write(&out, report.to_json() + "\n").map_err(|source| HarnessError::Io { path: out, source })?;
        }
        Command::Sweep {
            manifest,
            grid,
            out,
            plots,
        } => {
            let grid: SweepGrid = read_json(&grid)?;
            let outcome = sweep(&DatasetManifest::load(&manifest)?, &grid)?;
            write_sweep(&outcome, &out, plots)?;
        }
        Command::Features { manifest, out, config } => features(&manifest, &out, config.as_deref())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
