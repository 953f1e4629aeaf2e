//! Oversampling algorithms and the multi-class balancing transform.
//!
//! Every sampler consumes an immutable [`Dataset`](crate::Dataset), a target
//! class label, and a count of rows to synthesize, and produces a
//! [`SyntheticBatch`]. Batches carry per-row [`Provenance`] so callers can
//! audit how each synthetic row was built. [`transform`] composes samplers
//! over all under-represented classes to equalize class counts.
//!
//! Determinism contract: for a fixed dataset, configuration, and seed, every
//! sampler emits a byte-identical batch regardless of the rayon thread count.
//! Each random decision draws from its own counter-keyed stream, so no draw
//! order depends on scheduling.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

mod adasyn;
mod ans;
mod borderline;
mod ccr;
mod cluster;
pub(crate) mod common;
mod gaussian;
mod kmeans_smote;
mod mwmote;
mod nras;
mod random;
mod rbo;
mod safe_level;
mod smote;
mod smote_d;

pub use ccr::{CleaningPlan, Relocation};

/// Identifies one oversampling algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerId {
    RandomOversample,
    Smote,
    GaussianSmote,
    SmoteD,
    Adasyn,
    BorderlineSmote,
    SafeLevelSmote,
    ClusterSmote,
    #[serde(rename = "kmeans_smote")]
    KMeansSmote,
    Ccr,
    Nras,
    Ans,
    Mwmote,
    Rbo,
}

impl SamplerId {
    /// Every sampler, in a stable presentation order.
    pub const ALL: [SamplerId; 14] = [
        SamplerId::RandomOversample,
        SamplerId::Smote,
        SamplerId::GaussianSmote,
        SamplerId::SmoteD,
        SamplerId::Adasyn,
        SamplerId::BorderlineSmote,
        SamplerId::SafeLevelSmote,
        SamplerId::ClusterSmote,
        SamplerId::KMeansSmote,
        SamplerId::Ccr,
        SamplerId::Nras,
        SamplerId::Ans,
        SamplerId::Mwmote,
        SamplerId::Rbo,
    ];

    /// Stable command-line name.
    pub fn name(self) -> &'static str {
        match self {
            SamplerId::RandomOversample => "random_oversample",
            SamplerId::Smote => "smote",
            SamplerId::GaussianSmote => "gaussian_smote",
            SamplerId::SmoteD => "smote_d",
            SamplerId::Adasyn => "adasyn",
            SamplerId::BorderlineSmote => "borderline_smote",
            SamplerId::SafeLevelSmote => "safe_level_smote",
            SamplerId::ClusterSmote => "cluster_smote",
            SamplerId::KMeansSmote => "kmeans_smote",
            SamplerId::Ccr => "ccr",
            SamplerId::Nras => "nras",
            SamplerId::Ans => "ans",
            SamplerId::Mwmote => "mwmote",
            SamplerId::Rbo => "rbo",
        }
    }

    /// Numeric tag mixed into every random stream key so two samplers never
    /// share a stream even under identical configurations.
    pub(crate) fn tag(self) -> u64 {
        match self {
            SamplerId::RandomOversample => 1,
            SamplerId::Smote => 2,
            SamplerId::GaussianSmote => 3,
            SamplerId::SmoteD => 4,
            SamplerId::Adasyn => 5,
            SamplerId::BorderlineSmote => 6,
            SamplerId::SafeLevelSmote => 7,
            SamplerId::ClusterSmote => 8,
            SamplerId::KMeansSmote => 9,
            SamplerId::Ccr => 10,
            SamplerId::Nras => 11,
            SamplerId::Ans => 12,
            SamplerId::Mwmote => 13,
            SamplerId::Rbo => 14,
        }
    }
}

impl std::str::FromStr for SamplerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SamplerId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown sampler {s:?}; expected one of: {}",
                    SamplerId::ALL.map(SamplerId::name).join(", ")
                ))
            })
    }
}

impl std::fmt::Display for SamplerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tuning knobs shared by all samplers. Each algorithm reads only the fields
/// it uses; the rest are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Neighbor count for interpolation partner lookups.
    pub k: usize,
    /// Neighbor count for the noise filter stage (mwmote).
    pub k1: usize,
    /// Neighbor count for the borderline-majority stage (mwmote).
    pub k2: usize,
    /// Neighbor count for the informative-minority stage (mwmote).
    pub k3: usize,
    /// Cluster count for cluster_smote.
    pub cluster_k: usize,
    /// Cluster count for the mwmote grouping stage.
    pub mwmote_cluster_k: usize,
    /// Spread of the offset along the base-partner segment (gaussian_smote).
    pub sigma: f64,
    /// Relocation budget each minority row may spend pushing majority rows
    /// out of its sphere (ccr).
    pub energy: f64,
    /// Fraction of the dataset size bounding the outcast threshold scan (ans).
    pub c_max_ratio: f64,
    /// Upper bound on how many rows a radius query may return while counting
    /// in-sphere neighbors (ans, ccr).
    pub radius_neighbor_cap: usize,
    /// Clusters whose (majority+1)/(minority+1) ratio meets or exceeds this
    /// are discarded as seed regions (kmeans_smote).
    pub imbalance_ratio_threshold: f64,
    /// Exponent applied to mean intra-cluster distance when weighting sparse
    /// clusters (kmeans_smote). Defaults to the feature count.
    pub density_exponent: Option<f64>,
    /// Ceiling on any single row's closeness score (mwmote).
    pub mwmote_c_max: f64,
    /// Cutoff applied to inverse squared distance before rescaling (mwmote).
    pub mwmote_cf_th: f64,
    /// Minimum minority neighbors required to keep a seed row (nras).
    pub nras_threshold: usize,
    /// Kernel width of the class potential (rbo).
    pub rbo_gamma: f64,
    /// Random-walk steps attempted per synthetic row (rbo).
    pub rbo_iterations: usize,
    /// Per-coordinate step magnitude bound of the walk (rbo).
    pub rbo_step_size: f64,
    /// Probability scale on the walk length; 1.0 runs every step (rbo).
    pub rbo_stop_probability: f64,
    /// Fractional surplus of attempts allowed when some attempts abort
    /// (safe_level_smote).
    pub safe_level_correction_rate: f64,
    /// Weight of recall against precision in the F-score metric.
    pub beta: f64,
    /// Root seed; all random streams derive from it.
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            k: 5,
            k1: 5,
            k2: 5,
            k3: 5,
            cluster_k: 5,
            mwmote_cluster_k: 10,
            sigma: 0.5,
            energy: 1.0,
            c_max_ratio: 0.25,
            radius_neighbor_cap: 100,
            imbalance_ratio_threshold: 10.0,
            density_exponent: None,
            mwmote_c_max: 3.0,
            mwmote_cf_th: 50.0,
            nras_threshold: 3,
            rbo_gamma: 1.0,
            rbo_iterations: 1,
            rbo_step_size: 0.01,
            rbo_stop_probability: 1.0,
            safe_level_correction_rate: 0.05,
            beta: 1.0,
            seed: 42,
        }
    }
}

impl SamplerConfig {
    /// Rejects values outside each field's documented domain.
    pub fn validate(&self) -> Result<()> {
        fn positive_count(name: &str, value: usize) -> Result<()> {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
            Ok(())
        }
        fn positive_finite(name: &str, value: f64) -> Result<()> {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
            Ok(())
        }
        fn unit_interval(name: &str, value: f64) -> Result<()> {
            if !value.is_finite() || value <= 0.0 || value > 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, 1], got {value}"
                )));
            }
            Ok(())
        }

        positive_count("k", self.k)?;
        positive_count("k1", self.k1)?;
        positive_count("k2", self.k2)?;
        positive_count("k3", self.k3)?;
        positive_count("cluster_k", self.cluster_k)?;
        positive_count("mwmote_cluster_k", self.mwmote_cluster_k)?;
        positive_count("radius_neighbor_cap", self.radius_neighbor_cap)?;
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sigma must be a non-negative finite number, got {}",
                self.sigma
            )));
        }
        positive_finite("energy", self.energy)?;
        unit_interval("c_max_ratio", self.c_max_ratio)?;
        positive_finite("imbalance_ratio_threshold", self.imbalance_ratio_threshold)?;
        if let Some(de) = self.density_exponent {
            positive_finite("density_exponent", de)?;
        }
        positive_finite("mwmote_c_max", self.mwmote_c_max)?;
        positive_finite("mwmote_cf_th", self.mwmote_cf_th)?;
        positive_finite("rbo_gamma", self.rbo_gamma)?;
        positive_finite("rbo_step_size", self.rbo_step_size)?;
        unit_interval("rbo_stop_probability", self.rbo_stop_probability)?;
        unit_interval("safe_level_correction_rate", self.safe_level_correction_rate)?;
        positive_finite("beta", self.beta)?;
        Ok(())
    }
}

/// How one synthetic row was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Provenance {
    /// Row id of the seed example the row grew from.
    pub base_row_id: u64,
    /// Row id of the second endpoint, when the method used one.
    pub partner_row_id: Option<u64>,
    /// Generation mechanism: "interpolate", "duplicate", "gaussian", "box",
    /// or "walk".
    pub method: &'static str,
}

/// Synthetic rows produced for a single class.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBatch {
    features: Vec<f64>,
    n_cols: usize,
    /// Class label every row in the batch carries.
    pub label: u32,
    /// Per-row generation record, aligned with the rows.
    pub provenance: Vec<Provenance>,
}

impl SyntheticBatch {
    pub(crate) fn new(features: Vec<f64>, n_cols: usize, label: u32, provenance: Vec<Provenance>) -> Self {
        debug_assert_eq!(features.len(), provenance.len() * n_cols);
        Self { features, n_cols, label, provenance }
    }

    pub(crate) fn empty(n_cols: usize, label: u32) -> Self {
        Self { features: Vec::new(), n_cols, label, provenance: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Row-major feature block, `len() * n_cols()` values.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_cols..(i + 1) * self.n_cols]
    }
}

/// Generates `n_to_add` synthetic rows of class `minority_label`.
///
/// The dataset provides the geometric context (neighbor lookups may consult
/// every class), while generated rows always carry `minority_label`. A class
/// with a single example cannot support neighborhood analysis, so any sampler
/// other than plain duplication falls back to duplication with a warning.
/// Samplers whose seed selection can come up empty (borderline_smote,
/// kmeans_smote, nras, ans, mwmote) report [`Error::EmptySeedSet`] and leave
/// the fallback decision to the caller.
pub fn oversample(
    ds: &Dataset,
    minority_label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
    sampler: SamplerId,
) -> Result<SyntheticBatch> {
    oversample_with_cleaning(ds, minority_label, n_to_add, cfg, sampler).map(|(_, batch)| batch)
}

/// Like [`oversample`], but additionally returns the dataset-editing plan for
/// samplers that relocate existing rows. Only [`SamplerId::Ccr`] produces a
/// plan; every other sampler returns `None`.
pub fn oversample_with_cleaning(
    ds: &Dataset,
    minority_label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
    sampler: SamplerId,
) -> Result<(Option<CleaningPlan>, SyntheticBatch)> {
    cfg.validate()?;
    let minority_count = ds.labels().iter().filter(|&&l| l == minority_label).count();
    if minority_count == 0 {
        return Err(Error::UnknownLabel(minority_label));
    }
    if n_to_add == 0 {
        return Ok((None, SyntheticBatch::empty(ds.n_cols(), minority_label)));
    }
    if minority_count < 2 && sampler != SamplerId::RandomOversample {
        log::warn!(
            "{} needs at least 2 rows of class {} but found {}; duplicating instead",
            sampler.name(),
            minority_label,
            minority_count
        );
        let minority = ds.filter_by_label(minority_label, true);
        let batch = common::duplicate_uniform(&minority, minority_label, n_to_add, cfg, sampler.tag());
        return Ok((None, batch));
    }

    let batch = match sampler {
        SamplerId::RandomOversample => random::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::Smote => smote::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::GaussianSmote => gaussian::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::SmoteD => smote_d::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::Adasyn => adasyn::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::BorderlineSmote => borderline::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::SafeLevelSmote => safe_level::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::ClusterSmote => cluster::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::KMeansSmote => kmeans_smote::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::Ccr => {
            let (plan, batch) = ccr::clean_and_oversample(ds, minority_label, n_to_add, cfg)?;
            return Ok((Some(plan), batch));
        }
        SamplerId::Nras => nras::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::Ans => ans::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::Mwmote => mwmote::oversample(ds, minority_label, n_to_add, cfg)?,
        SamplerId::Rbo => rbo::oversample(ds, minority_label, n_to_add, cfg)?,
    };
    Ok((None, batch))
}

/// Balances every class up to the size of the largest one.
///
/// Classes are processed in ascending label order. Each pass runs `sampler`
/// against the current working dataset, so relocations made by earlier
/// passes (ccr) are visible to later ones. Synthetic rows receive fresh row
/// ids counting up from one past the largest input id. A sampler pass that
/// finds no usable seed rows falls back to random duplication with a
/// warning, so the returned dataset is always exactly balanced.
pub fn transform(ds: &Dataset, sampler: SamplerId, cfg: &SamplerConfig) -> Result<Dataset> {
    cfg.validate()?;
    let counts = ds.class_counts();
    if counts.len() < 2 {
        return Err(Error::SingleClass);
    }
    let majority = counts.iter().map(|c| c.count).max().expect("at least two classes");

    let mut working = ds.clone();
    // Row ids are unique, so positions never shift; one map serves all passes.
    let id_to_pos: std::collections::HashMap<u64, usize> = working
        .row_ids()
        .iter()
        .enumerate()
        .map(|(pos, &id)| (id, pos))
        .collect();

    let mut next_id = ds.max_row_id() + 1;
    let mut synth_features: Vec<f64> = Vec::new();
    let mut synth_labels: Vec<u32> = Vec::new();
    let mut synth_ids: Vec<u64> = Vec::new();

    for class in &counts {
        let deficit = majority - class.count;
        if deficit == 0 {
            continue;
        }
        let outcome = oversample_with_cleaning(&working, class.label, deficit, cfg, sampler);
        let (plan, batch) = match outcome {
            Err(Error::EmptySeedSet { sampler: name }) => {
                log::warn!(
                    "{name} found no seed rows for class {}; duplicating instead",
                    class.label
                );
                let batch =
                    oversample(&working, class.label, deficit, cfg, SamplerId::RandomOversample)?;
                (None, batch)
            }
            other => other?,
        };
        if let Some(plan) = plan {
            for relocation in &plan.relocations {
                let pos = id_to_pos[&relocation.row_id];
                working.set_row(pos, &relocation.position);
            }
        }
        synth_features.extend_from_slice(batch.features());
        synth_labels.extend(std::iter::repeat(class.label).take(batch.len()));
        synth_ids.extend(next_id..next_id + batch.len() as u64);
        next_id += batch.len() as u64;
    }

    if synth_ids.is_empty() {
        return Ok(working);
    }
    let synths = Dataset::with_template(&working, synth_features, synth_labels, synth_ids);
    working.union(&synths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(counts: &[usize]) -> Dataset {
        // Clustered blobs, one per class, far enough apart to stay distinct.
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut salt = 1u64;
        for (label, &count) in counts.iter().enumerate() {
            for _ in 0..count {
                salt = salt.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let jitter_a = ((salt >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                let jitter_b = ((salt >> 7) % 1000) as f64 / 1000.0 - 0.5;
                features.push(label as f64 * 10.0 + jitter_a);
                features.push(label as f64 * -5.0 + jitter_b);
                labels.push(label as u32);
            }
        }
        Dataset::from_parts(features, 2, labels).expect("valid toy dataset")
    }

    #[test]
    fn sampler_names_round_trip() {
        for id in SamplerId::ALL {
            let parsed: SamplerId = id.name().parse().expect("known name parses");
            assert_eq!(parsed, id);
        }
        assert!("not_a_sampler".parse::<SamplerId>().is_err());
    }

    #[test]
    fn sampler_tags_are_distinct() {
        let mut tags: Vec<u64> = SamplerId::ALL.iter().map(|id| id.tag()).collect();
        tags.sort_unstable();
        tags.dedup();
        assert_eq!(tags.len(), SamplerId::ALL.len());
    }

    #[test]
    fn default_config_is_valid() {
        SamplerConfig::default().validate().expect("defaults validate");
    }

    #[test]
    fn validate_rejects_out_of_domain_values() {
        let cases: Vec<Box<dyn Fn(&mut SamplerConfig)>> = vec![
            Box::new(|c| c.k = 0),
            Box::new(|c| c.sigma = -1.0),
            Box::new(|c| c.energy = 0.0),
            Box::new(|c| c.c_max_ratio = 1.5),
            Box::new(|c| c.c_max_ratio = 0.0),
            Box::new(|c| c.rbo_gamma = f64::NAN),
            Box::new(|c| c.rbo_step_size = -0.01),
            Box::new(|c| c.rbo_stop_probability = 0.0),
            Box::new(|c| c.safe_level_correction_rate = 2.0),
            Box::new(|c| c.beta = 0.0),
            Box::new(|c| c.density_exponent = Some(0.0)),
        ];
        for mutate in cases {
            let mut cfg = SamplerConfig::default();
            mutate(&mut cfg);
            assert!(cfg.validate().is_err(), "expected rejection for {cfg:?}");
        }
    }

    #[test]
    fn oversample_unknown_label_is_rejected() {
        let ds = toy(&[10, 5]);
        let err = oversample(&ds, 9, 3, &SamplerConfig::default(), SamplerId::Smote).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel(9)));
    }

    #[test]
    fn oversample_zero_rows_yields_empty_batch() {
        let ds = toy(&[10, 5]);
        let batch =
            oversample(&ds, 1, 0, &SamplerConfig::default(), SamplerId::Smote).expect("empty ok");
        assert!(batch.is_empty());
        assert_eq!(batch.n_cols(), 2);
        assert_eq!(batch.label, 1);
    }

    #[test]
    fn singleton_class_falls_back_to_duplication() {
        let ds = toy(&[10, 1]);
        let batch =
            oversample(&ds, 1, 4, &SamplerConfig::default(), SamplerId::Smote).expect("fallback");
        assert_eq!(batch.len(), 4);
        let lone = ds.filter_by_label(1, true);
        for i in 0..batch.len() {
            assert_eq!(batch.row(i), lone.row(0));
            assert_eq!(batch.provenance[i].method, "duplicate");
            assert_eq!(batch.provenance[i].base_row_id, lone.row_ids()[0]);
        }
    }

    #[test]
    fn transform_rejects_single_class() {
        let ds = toy(&[12]);
        let err = transform(&ds, SamplerId::Smote, &SamplerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SingleClass));
    }

    #[test]
    fn transform_balances_every_sampler() {
        let ds = toy(&[40, 12, 7]);
        for sampler in SamplerId::ALL {
            let cfg = SamplerConfig { rbo_iterations: 2, ..SamplerConfig::default() };
            let balanced = transform(&ds, sampler, &cfg)
                .unwrap_or_else(|e| panic!("{} failed: {e}", sampler.name()));
            let counts = balanced.class_counts();
            assert_eq!(counts.len(), 3, "{}", sampler.name());
            for c in &counts {
                assert_eq!(c.count, 40, "{} class {}", sampler.name(), c.label);
            }
            assert_eq!(balanced.n_rows(), 120, "{}", sampler.name());
        }
    }

    #[test]
    fn transform_preserves_original_rows_and_ids() {
        let ds = toy(&[30, 9]);
        let balanced =
            transform(&ds, SamplerId::Smote, &SamplerConfig::default()).expect("balances");
        // Originals come first, byte for byte, with their ids intact.
        for i in 0..ds.n_rows() {
            assert_eq!(balanced.row(i), ds.row(i));
            assert_eq!(balanced.row_ids()[i], ds.row_ids()[i]);
            assert_eq!(balanced.labels()[i], ds.labels()[i]);
        }
        // Synthetic ids continue past the original range without gaps.
        let expected: Vec<u64> = (30 + 9..(30 + 9 + 21) as u64).collect();
        assert_eq!(&balanced.row_ids()[ds.n_rows()..], &expected[..]);
    }

    #[test]
    fn transform_handles_already_balanced_input() {
        let ds = toy(&[15, 15]);
        let balanced =
            transform(&ds, SamplerId::Smote, &SamplerConfig::default()).expect("no-op balance");
        assert_eq!(balanced.n_rows(), 30);
        for i in 0..30 {
            assert_eq!(balanced.row(i), ds.row(i));
        }
    }

    #[test]
    fn config_serde_round_trip() {
        let cfg = SamplerConfig { k: 7, sigma: 0.25, seed: 99, ..SamplerConfig::default() };
        let json = serde_json::to_string(&cfg).expect("serializes");
        let back: SamplerConfig = serde_json::from_str(&json).expect("deserializes");
        assert_eq!(back, cfg);
    }

    #[test]
    fn sampler_id_serde_uses_names() {
        let json = serde_json::to_string(&SamplerId::KMeansSmote).expect("serializes");
        assert_eq!(json, "\"kmeans_smote\"");
        let back: SamplerId = serde_json::from_str("\"gaussian_smote\"").expect("deserializes");
        assert_eq!(back, SamplerId::GaussianSmote);
    }
}
