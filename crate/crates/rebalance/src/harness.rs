//! Stratified cross-validation with deterministic baseline classifiers
//! and wall-clock phase timing.
//!
//! A fold plan is fixed by `(dataset, n_folds, seed)` alone, so every
//! sampler measured under the same seed sees identical splits and the
//! comparisons are paired. Oversampling only ever touches a fold's train
//! half; the test half is evaluated untouched. Reported times come from a
//! monotonic clock and `total_time` is the exact sum of the two phases.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{evaluate, ConfusionMatrix, MetricReport};
use crate::rng::{stream_key, RandomStream};
use crate::samplers::{common, transform, SamplerConfig, SamplerId};

// Stream namespaces, disjoint from the sampler namespaces in the same
// seed space.
const TAG_FOLDS: u64 = 6;
const TAG_SUBSET: u64 = 7;

/// Variance floor for the Gaussian baseline; keeps constant features from
/// collapsing the likelihood.
const VAR_FLOOR: f64 = 1e-9;

/// One cross-validation split, both sides as row ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<u64>,
    pub test: Vec<u64>,
}

/// A full cross-validation assignment. Test sets partition the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub folds: Vec<Fold>,
    pub seed: u64,
}

/// Identifies one built-in baseline classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierId {
    GaussianNb,
    NearestCentroid,
}

impl ClassifierId {
    pub const ALL: [ClassifierId; 2] = [ClassifierId::GaussianNb, ClassifierId::NearestCentroid];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierId::GaussianNb => "gaussian_nb",
            ClassifierId::NearestCentroid => "nearest_centroid",
        }
    }
}

impl fmt::Display for ClassifierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ClassifierId::ALL.iter().map(|c| c.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown classifier '{s}'; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

/// Experiment knobs that sit outside `SamplerConfig`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOptions {
    pub n_folds: usize,
    /// Min-max scale each feature from train statistics before sampling.
    pub normalize: bool,
    pub dataset_name: String,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            n_folds: 5,
            normalize: false,
            dataset_name: "dataset".into(),
        }
    }
}

/// One (dataset, sampler, classifier, fold) measurement.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    /// Sampler name, or "none" for the unsampled baseline.
    pub sampler: String,
    pub classifier: String,
    pub fold: usize,
    pub metrics: MetricReport,
    pub sampling_time: f64,
    pub classifier_time: f64,
    pub total_time: f64,
}

/// One timing measurement: median of three runs at a given subset size.
#[derive(Debug, Clone, Serialize)]
pub struct TimingRow {
    pub sampler: String,
    pub size: usize,
    pub seconds: f64,
}

/// Assigns every row to exactly one test fold, class by class, so each
/// fold's class counts stay within one row of the stratified ideal.
pub fn stratified_folds(ds: &Dataset, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    if n_folds < 2 {
        return Err(Error::InvalidConfig(
            "cross-validation needs at least 2 folds".into(),
        ));
    }
    for class in ds.class_counts() {
        if class.count < n_folds {
            return Err(Error::ClassTooSmall {
                label: class.label,
                count: class.count,
                n_folds,
            });
        }
    }

    let mut test_ids: Vec<Vec<u64>> = vec![Vec::new(); n_folds];
    for class in ds.class_counts() {
        let mut members: Vec<u64> = (0..ds.n_rows())
            .filter(|&i| ds.labels()[i] == class.label)
            .map(|i| ds.row_ids()[i])
            .collect();
        // Fisher-Yates on a per-class stream, then round-robin dealing.
        let mut rng = RandomStream::new(seed, stream_key(&[TAG_FOLDS, class.label as u64]));
        for i in (1..members.len()).rev() {
            members.swap(i, rng.below(i + 1));
        }
        for (i, id) in members.iter().enumerate() {
            test_ids[i % n_folds].push(*id);
        }
    }

    let folds = test_ids
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let held: HashSet<u64> = test.iter().copied().collect();
            let train: Vec<u64> = ds
                .row_ids()
                .iter()
                .copied()
                .filter(|id| !held.contains(id))
                .collect();
            Fold { train, test }
        })
        .collect();
    Ok(FoldPlan {
        n_folds,
        folds,
        seed,
    })
}

/// Per-feature `(min, max)` over a dataset, the statistics `minmax_apply`
/// consumes.
pub fn minmax_fit(ds: &Dataset) -> Vec<(f64, f64)> {
    let mut stats = vec![(f64::INFINITY, f64::NEG_INFINITY); ds.n_cols()];
    for i in 0..ds.n_rows() {
        for (s, &v) in stats.iter_mut().zip(ds.row(i)) {
            s.0 = s.0.min(v);
            s.1 = s.1.max(v);
        }
    }
    stats
}

/// Rescales every feature to `(v - min) / (max - min)` using the supplied
/// statistics. Constant columns map to 0; values outside the fitted range
/// land outside `[0, 1]` rather than being clamped.
pub fn minmax_apply(ds: &Dataset, stats: &[(f64, f64)]) -> Dataset {
    debug_assert_eq!(stats.len(), ds.n_cols());
    let mut features = Vec::with_capacity(ds.n_rows() * ds.n_cols());
    for i in 0..ds.n_rows() {
        for (&(lo, hi), &v) in stats.iter().zip(ds.row(i)) {
            let span = hi - lo;
            features.push(if span > 0.0 { (v - lo) / span } else { 0.0 });
        }
    }
    Dataset::with_template(ds, features, ds.labels().to_vec(), ds.row_ids().to_vec())
}

/// Rewrites row ids to `base, base + 1, ..` in row order. Sampling a fold's
/// train half behind a base above every original id guarantees synthetic
/// ids can never collide with test ids.
fn shift_ids(ds: &Dataset, base: u64) -> Dataset {
    let ids = (0..ds.n_rows() as u64).map(|i| base + i).collect();
    Dataset::with_template(ds, ds.features().to_vec(), ds.labels().to_vec(), ids)
}

/// Runs one sampler/classifier pair over a fresh fold plan. `None` runs
/// the unsampled baseline.
pub fn run_experiment(
    ds: &Dataset,
    sampler: Option<SamplerId>,
    classifier: ClassifierId,
    cfg: &SamplerConfig,
    opts: &RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    let plan = stratified_folds(ds, opts.n_folds, cfg.seed)?;
    run_with_plan(ds, &plan, sampler, classifier, cfg, opts)
}

/// Runs one sampler/classifier pair over an existing fold plan, so several
/// samplers can share identical splits. Records come out in fold order.
pub fn run_with_plan(
    ds: &Dataset,
    plan: &FoldPlan,
    sampler: Option<SamplerId>,
    classifier: ClassifierId,
    cfg: &SamplerConfig,
    opts: &RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let index = common::id_index(ds);
    let mut records = Vec::with_capacity(plan.folds.len());
    for (fold_idx, fold) in plan.folds.iter().enumerate() {
        let train_pos: Vec<usize> = fold.train.iter().map(|id| index[id]).collect();
        let test_pos: Vec<usize> = fold.test.iter().map(|id| index[id]).collect();
        let mut train = ds.take_rows(&train_pos);
        let mut test = ds.take_rows(&test_pos);
        if opts.normalize {
            let stats = minmax_fit(&train);
            train = minmax_apply(&train, &stats);
            test = minmax_apply(&test, &stats);
        }
        let train = shift_ids(&train, ds.max_row_id() + 1);

        let sampling_start = Instant::now();
        let balanced = match sampler {
            None => train.clone(),
            Some(s) => transform(&train, s, cfg)?,
        };
        let sampling_time = sampling_start.elapsed().as_secs_f64();

        let classifier_start = Instant::now();
        let predicted = classify_baseline(&balanced, &test, classifier)?;
        let classifier_time = classifier_start.elapsed().as_secs_f64();

        // Leak check: no row the classifier trained on may carry a test id.
        let held: HashSet<u64> = fold.test.iter().copied().collect();
        for id in balanced.row_ids() {
            assert!(!held.contains(id), "row {id} leaked into fold {fold_idx}");
        }

        let cm = ConfusionMatrix::with_classes(test.labels(), &predicted, ds.n_classes() as usize)?;
        records.push(ExperimentRecord {
            dataset: opts.dataset_name.clone(),
            sampler: sampler.map_or("none", SamplerId::name).to_string(),
            classifier: classifier.name().to_string(),
            fold: fold_idx,
            metrics: evaluate(&cm, cfg.beta),
            sampling_time,
            classifier_time,
            total_time: sampling_time + classifier_time,
        });
    }
    Ok(records)
}

/// Predicts test labels with one of the built-in baselines.
pub fn classify_baseline(
    train: &Dataset,
    test: &Dataset,
    classifier: ClassifierId,
) -> Result<Vec<u32>> {
    match classifier {
        ClassifierId::GaussianNb => gaussian_nb_predict(train, test, false),
        ClassifierId::NearestCentroid => nearest_centroid_predict(train, test),
    }
}

struct ClassStats {
    count: usize,
    mean: Vec<f64>,
    var: Vec<f64>,
}

/// Per-class count, feature means, and floored population variances.
/// Every class in the label space must have at least one row.
fn class_stats(train: &Dataset) -> Result<Vec<ClassStats>> {
    let c = train.n_classes();
    let d = train.n_cols();
    let mut stats: Vec<ClassStats> = (0..c)
        .map(|_| ClassStats {
            count: 0,
            mean: vec![0.0; d],
            var: vec![0.0; d],
        })
        .collect();
    for i in 0..train.n_rows() {
        let s = &mut stats[train.labels()[i] as usize];
        s.count += 1;
        for (m, &v) in s.mean.iter_mut().zip(train.row(i)) {
            *m += v;
        }
    }
    for (label, s) in stats.iter_mut().enumerate() {
        if s.count == 0 {
            return Err(Error::UnknownLabel(label as u32));
        }
        for m in &mut s.mean {
            *m /= s.count as f64;
        }
    }
    for i in 0..train.n_rows() {
        let s = &mut stats[train.labels()[i] as usize];
        for ((v, &m), &x) in s.var.iter_mut().zip(&s.mean).zip(train.row(i)) {
            *v += (x - m) * (x - m);
        }
    }
    for s in &mut stats {
        for v in &mut s.var {
            *v = (*v / s.count as f64).max(VAR_FLOOR);
        }
    }
    Ok(stats)
}

/// Diagonal Gaussian naive Bayes: argmax over class log-posteriors, ties
/// to the lowest label. `uniform_priors` drops the class-frequency term.
pub fn gaussian_nb_predict(
    train: &Dataset,
    test: &Dataset,
    uniform_priors: bool,
) -> Result<Vec<u32>> {
    if train.n_cols() != test.n_cols() {
        return Err(Error::ShapeMismatch(format!(
            "train has {} columns, test has {}",
            train.n_cols(),
            test.n_cols()
        )));
    }
    let stats = class_stats(train)?;
    let total = train.n_rows() as f64;
    let priors: Vec<f64> = stats
        .iter()
        .map(|s| {
            if uniform_priors {
                0.0
            } else {
                (s.count as f64 / total).ln()
            }
        })
        .collect();

    Ok((0..test.n_rows())
        .map(|i| {
            let row = test.row(i);
            let mut best = 0u32;
            let mut best_score = f64::NEG_INFINITY;
            for (c, s) in stats.iter().enumerate() {
                let mut score = priors[c];
                for ((&x, &m), &v) in row.iter().zip(&s.mean).zip(&s.var) {
                    score -= 0.5 * (std::f64::consts::TAU * v).ln();
                    score -= (x - m) * (x - m) / (2.0 * v);
                }
                if score > best_score {
                    best_score = score;
                    best = c as u32;
                }
            }
            best
        })
        .collect())
}

/// Nearest class mean under Euclidean distance, ties to the lowest label.
pub fn nearest_centroid_predict(train: &Dataset, test: &Dataset) -> Result<Vec<u32>> {
    if train.n_cols() != test.n_cols() {
        return Err(Error::ShapeMismatch(format!(
            "train has {} columns, test has {}",
            train.n_cols(),
            test.n_cols()
        )));
    }
    let stats = class_stats(train)?;
    Ok((0..test.n_rows())
        .map(|i| {
            let row = test.row(i);
            let mut best = 0u32;
            let mut best_d = f64::INFINITY;
            for (c, s) in stats.iter().enumerate() {
                let d: f64 = row
                    .iter()
                    .zip(&s.mean)
                    .map(|(&x, &m)| (x - m) * (x - m))
                    .sum();
                if d < best_d {
                    best_d = d;
                    best = c as u32;
                }
            }
            best
        })
        .collect())
}

/// Draws a deterministic stratified subset of `size` rows; per-class
/// shares follow the original proportions within one row.
pub fn stratified_subset(ds: &Dataset, size: usize, seed: u64) -> Result<Dataset> {
    if size > ds.n_rows() {
        return Err(Error::InvalidConfig(format!(
            "subset of {size} rows exceeds the {} available",
            ds.n_rows()
        )));
    }
    let classes = ds.class_counts();
    let weights: Vec<f64> = classes.iter().map(|c| c.count as f64).collect();
    let ties: Vec<u64> = classes.iter().map(|c| c.label as u64).collect();
    let quotas = common::allocate_quotas(&weights, size, &ties);

    let mut keep: Vec<usize> = Vec::with_capacity(size);
    for (class, &quota) in classes.iter().zip(&quotas) {
        let mut members: Vec<usize> = (0..ds.n_rows())
            .filter(|&i| ds.labels()[i] == class.label)
            .collect();
        let mut rng = RandomStream::new(
            seed,
            stream_key(&[TAG_SUBSET, size as u64, class.label as u64]),
        );
        for i in (1..members.len()).rev() {
            members.swap(i, rng.below(i + 1));
        }
        keep.extend_from_slice(&members[..quota]);
    }
    keep.sort_unstable();
    Ok(ds.take_rows(&keep))
}

/// Times `transform` for every sampler at every subset size: median of
/// three runs, rows in `(sampler, size)` order. Sizes must be strictly
/// ascending; every sampler sees the identical subset at a given size.
pub fn timing_scan(
    ds: &Dataset,
    sampler_ids: &[SamplerId],
    sizes: &[usize],
    cfg: &SamplerConfig,
) -> Result<Vec<TimingRow>> {
    cfg.validate()?;
    let mut seen = HashSet::new();
    for &s in sampler_ids {
        if !seen.insert(s) {
            return Err(Error::InvalidConfig(format!(
                "sampler '{s}' listed more than once"
            )));
        }
    }
    for pair in sizes.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidConfig(
                "subset sizes must be strictly ascending".into(),
            ));
        }
    }

    let subsets: Vec<Dataset> = sizes
        .iter()
        .map(|&s| stratified_subset(ds, s, cfg.seed))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(sampler_ids.len() * sizes.len());
    for &sampler in sampler_ids {
        for (subset, &size) in subsets.iter().zip(sizes) {
            let mut times = [0.0f64; 3];
            for t in &mut times {
                let start = Instant::now();
                std::hint::black_box(transform(subset, sampler, cfg)?);
                *t = start.elapsed().as_secs_f64();
            }
            times.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite times"));
            rows.push(TimingRow {
                sampler: sampler.name().to_string(),
                size,
                seconds: times[1],
            });
        }
    }
    Ok(rows)
}
