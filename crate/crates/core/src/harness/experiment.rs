use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DatasetManifest, HarnessError};
use crate::audio::{load_wav, preprocess, AudioClip, PreprocessConfig};
use crate::clustering::{
    accuracy_fitness, bp_class_from_label, class_memberships, ffi_cluster, fuse, kmeans_batch, majority_class_map,
    BpClass, ClusterModel,
};
use crate::features::{extract_feature_vector, impute_formants, mean_formants, ClipFeatures, FeatureConfig, FeatureError, Standardizer};
use crate::ffi::{Bounds, FfiConfig, Variant};
use crate::metrics::{davies_bouldin, dunn_index, homogeneity_completeness, jaccard_similarity, silhouette, EvaluationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Batch plus incremental k-means fused with optimizer-searched centroids.
    #[default]
    FfiFusion,
    KmeansOnly,
    FfiOnly,
    /// Optimizer-searched centroids using only instructor-style updates.
    TloOnly,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FfiFusion => "ffi_fusion",
            Method::KmeansOnly => "kmeans_only",
            Method::FfiOnly => "ffi_only",
            Method::TloOnly => "tlo_only",
        }
    }
}

/// Optimizer settings for centroid search; bounds come from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub population_size: usize,
    pub max_iterations: usize,
    pub a4_epsilon: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            population_size: 20,
            max_iterations: 100,
            a4_epsilon: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Share of each class used for training: 40, 50, …, 90.
    pub training_percent: u32,
    /// Replay passes of the training stream through the incremental update: 10, 20, …, 50.
    pub epochs: u32,
    pub seed: u64,
    pub k: usize,
    pub method: Method,
    pub kmeans_max_iters: usize,
    pub preprocess: PreprocessConfig,
    pub features: FeatureConfig,
    pub optimizer: OptimizerSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            training_percent: 90,
            epochs: 10,
            seed: 0,
            k: 3,
            method: Method::default(),
            kmeans_max_iters: 100,
            preprocess: PreprocessConfig::default(),
            features: FeatureConfig::default(),
            optimizer: OptimizerSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if !(40..=90).contains(&self.training_percent) || !self.training_percent.is_multiple_of(10) {
            return bad(format!("training_percent {} not in 40, 50, ..., 90", self.training_percent));
        }
        if !(10..=50).contains(&self.epochs) || !self.epochs.is_multiple_of(10) {
            return bad(format!("epochs {} not in 10, 20, ..., 50", self.epochs));
        }
        if self.k != BpClass::ALL.len() {
            return bad(format!("k = {} but there are 3 blood-pressure classes", self.k));
        }
        if self.kmeans_max_iters == 0 {
            return bad("kmeans_max_iters must be positive".into());
        }
        self.ffi_template(Variant::FactFindingInstructor)
            .validate()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))
    }

    fn ffi_template(&self, variant: Variant) -> FfiConfig {
        FfiConfig {
            population_size: self.optimizer.population_size,
            max_iterations: self.optimizer.max_iterations,
            a4_epsilon: self.optimizer.a4_epsilon,
            seed: self.seed,
            variant,
            ..FfiConfig::new(Bounds::uniform(0.0, 1.0, 1).expect("unit box"))
        }
    }
}

/// Extracted features for every usable clip in a manifest.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub features: Vec<ClipFeatures>,
    pub classes: Vec<BpClass>,
    /// Clips left out because no frame was voiced, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// Loads, preprocesses and describes every clip, in parallel, keeping manifest order.
pub fn prepare_corpus(
    manifest: &DatasetManifest,
    preprocess_cfg: &PreprocessConfig,
    feature_cfg: &FeatureConfig,
) -> Result<Corpus, HarnessError> {
    let results: Vec<Result<Option<ClipFeatures>, HarnessError>> = (0..manifest.len())
        .into_par_iter()
        .map(|i| {
            let raw = load_wav(manifest.resolve(i))?;
            let label = manifest.rows[i].label();
            let clip = AudioClip::new(raw.id.clone(), raw.samples().to_vec(), raw.sample_rate_hz(), Some(label))?;
            match extract_feature_vector(&preprocess(&clip, preprocess_cfg), feature_cfg) {
                Ok(f) => Ok(Some(f)),
                Err(FeatureError::NoVoicedFrames(_)) => Ok(None),
                Err(e) => Err(e.into()),
            }
        })
        .collect();

    let mut corpus = Corpus {
        features: vec![],
        classes: vec![],
        skipped: vec![],
    };
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Some(f) => {
                corpus.features.push(f);
                corpus.classes.push(bp_class_from_label(&manifest.rows[i].label()));
            }
            None => {
                let id = manifest.rows[i].clip_path.display().to_string();
                warn!("{id}: no voiced frames, clip skipped");
                corpus.skipped.push((id, "no voiced frames".into()));
            }
        }
    }
    info!("extracted features for {} clips, skipped {}", corpus.features.len(), corpus.skipped.len());
    Ok(corpus)
}

/// Per-class shuffled split; each class contributes `round(n_c · percent / 100)` training
/// samples, halves rounding up.
pub fn stratified_split(classes: &[BpClass], training_percent: u32, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (vec![], vec![]);
    for class in BpClass::ALL {
        let mut members: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == class).collect();
        members.shuffle(&mut rng);
        let n_train = (members.len() * training_percent as usize + 50) / 100;
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    (train, test)
}

/// Trained models' decisions on every sample of the corpus.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub classes: Vec<BpClass>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Standardized feature rows, all samples.
    pub rows: Vec<Vec<f64>>,
}

/// Replays the training stream `epochs` times, each pass in a fresh seeded order, then maps
/// clusters to their training majority.
fn replay(model: &mut ClusterModel, train_rows: &[Vec<f64>], truth: &[BpClass], epochs: u32, seed: u64) -> Result<(), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..train_rows.len()).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            model.incremental_update(&train_rows[i])?;
        }
    }
    let map = majority_class_map(&model.assign_all(train_rows), truth, model.k());
    model.set_class_map(map.classes)?;
    Ok(())
}

/// Splits, standardizes on the training share, trains per `cfg.method` and labels every clip.
pub fn predict(corpus: &Corpus, cfg: &ExperimentConfig) -> Result<Prediction, HarnessError> {
    let (train, test) = stratified_split(&corpus.classes, cfg.training_percent, cfg.seed);
    if train.len() < cfg.k || test.is_empty() {
        return Err(HarnessError::InsufficientData {
            needed: cfg.k + 1,
            got: corpus.features.len(),
        });
    }
    let fallback = mean_formants(train.iter().map(|&i| &corpus.features[i]));
    let raw: Vec<Vec<f64>> = impute_formants(&corpus.features, fallback).iter().map(|v| v.to_vec()).collect();
    let train_raw: Vec<Vec<f64>> = train.iter().map(|&i| raw[i].clone()).collect();
    let scaler = Standardizer::fit(&train_raw);
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| scaler.transform(r)).collect();
    let train_rows: Vec<Vec<f64>> = train.iter().map(|&i| rows[i].clone()).collect();
    let truth: Vec<BpClass> = train.iter().map(|&i| corpus.classes[i]).collect();

    let kmeans = || -> Result<ClusterModel, HarnessError> {
        let mut m = kmeans_batch(&train_rows, cfg.k, cfg.kmeans_max_iters, cfg.seed)?.model;
        replay(&mut m, &train_rows, &truth, cfg.epochs, cfg.seed)?;
        Ok(m)
    };
    let searched = |variant| -> Result<ClusterModel, HarnessError> {
        let mut m = ffi_cluster(&train_rows, &truth, cfg.k, &cfg.ffi_template(variant))?.model;
        replay(&mut m, &train_rows, &truth, cfg.epochs, cfg.seed)?;
        Ok(m)
    };
    let hard = |m: &ClusterModel| -> Vec<BpClass> { rows.iter().map(|r| m.predict_class(r).expect("class map set")).collect() };

    let classes = match cfg.method {
        Method::KmeansOnly => hard(&kmeans()?),
        Method::FfiOnly => hard(&searched(Variant::FactFindingInstructor)?),
        Method::TloOnly => hard(&searched(Variant::InstructorOnly)?),
        Method::FfiFusion => {
            let m1 = class_memberships(&kmeans()?, &rows)?;
            let m2 = class_memberships(&searched(Variant::FactFindingInstructor)?, &rows)?;
            fuse(&m1, &m2)?.1
        }
    };
    Ok(Prediction {
        classes,
        train,
        test,
        rows,
    })
}

fn class_centroids(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = rows[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (r, &j) in rows.iter().zip(labels) {
        counts[j] += 1;
        sums[j].iter_mut().zip(r).for_each(|(s, x)| *s += x);
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, n)| s.into_iter().map(|x| x / n.max(1) as f64).collect())
        .collect()
}

/// Trains per `cfg.method` on the training split and scores the result.
///
/// Agreement scores and accuracy use the held-out clips. The geometric indices (Davies-Bouldin,
/// silhouette, Dunn) need several points per predicted class, so they are computed over every
/// standardized clip grouped by predicted class.
pub fn evaluate(corpus: &Corpus, cfg: &ExperimentConfig) -> Result<EvaluationReport, HarnessError> {
    cfg.validate()?;
    let p = predict(corpus, cfg)?;
    let truth_test: Vec<BpClass> = p.test.iter().map(|&i| corpus.classes[i]).collect();
    let pred_test: Vec<BpClass> = p.test.iter().map(|&i| p.classes[i]).collect();
    let accuracy = accuracy_fitness(&pred_test, &truth_test)?;
    let (homogeneity, completeness) = homogeneity_completeness(&truth_test, &pred_test)?;
    let jaccard = if pred_test.len() >= 2 { jaccard_similarity(&truth_test, &pred_test)? } else { 1.0 };

    let labels: Vec<usize> = p.classes.iter().map(|c| c.index()).collect();
    let distinct = BpClass::ALL.iter().filter(|c| p.classes.contains(c)).count();
    if distinct < 2 {
        return Err(HarnessError::DegeneratePrediction);
    }
    let centroids = class_centroids(&p.rows, &labels, BpClass::ALL.len());
    Ok(EvaluationReport {
        davies_bouldin: davies_bouldin(&p.rows, &labels, &centroids)?,
        homogeneity,
        completeness,
        jaccard,
        silhouette: silhouette(&p.rows, &labels)?,
        dunn: dunn_index(&p.rows, &labels)?,
        accuracy,
        seed: cfg.seed,
        training_percent: cfg.training_percent,
        epochs: cfg.epochs,
        method: cfg.method.name().into(),
        skipped_clips: corpus.skipped.len(),
    })
}

/// Full pipeline from manifest to report.
pub fn run_experiment(manifest: &DatasetManifest, cfg: &ExperimentConfig) -> Result<EvaluationReport, HarnessError> {
    cfg.validate()?;
    let corpus = prepare_corpus(manifest, &cfg.preprocess, &cfg.features)?;
    let report = evaluate(&corpus, cfg)?;
    info!("{} at {}% training: accuracy {}", report.method, report.training_percent, report.accuracy);
    Ok(report)
}
